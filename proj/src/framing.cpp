#include "frameq/framing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "frameq/qre.hpp"

namespace frameq {

namespace {

Game perturb_row_payoff(const Game& g, int i, int j, double delta) {
  std::vector<double> a(g.row_payoffs().begin(), g.row_payoffs().end());
  std::vector<double> b(g.col_payoffs().begin(), g.col_payoffs().end());
  a[static_cast<size_t>(i) * g.cols() + j] += delta;
  return Game(g.rows(), g.cols(), std::move(a), std::move(b));
}

Game with_dup_counts(const Game& base, const std::vector<int>& dups) {
  Game out = base;
  // walk right to left so earlier indices stay valid
  for (int j = static_cast<int>(dups.size()) - 1; j >= 0; --j) {
    if (dups[j] > 0) out = duplicate_column(out, j, dups[j]);
  }
  return out;
}

}  // namespace

Assessor Assessor::phi() {
  return {"phi",
          [](const Game& g) { return phi_assessment(g, PlayerSide::Row); }};
}

Assessor Assessor::qre_terminal(double lambda_max) {
  return {"qre-terminal", [lambda_max](const Game& g) {
            const double lmax =
                lambda_max > 0.0 ? lambda_max : default_lambda_max(g);
            const BranchTrace trace = trace_branch(g, lmax);
            if (!trace.completed) {
              throw std::runtime_error("qre-terminal: " + trace.failure);
            }
            return Assessment{trace.terminal().profile.row, PlayerSide::Row};
          }};
}

Assessor Assessor::qre_at_lambda(double lambda) {
  return {"qre-at-lambda", [lambda](const Game& g) {
            // follow the principal branch to lambda so all representations
            // are assessed on the same branch, not an arbitrary fixed point
            StepControl opts;
            opts.purity_threshold = 1.0;  // never stop early
            const BranchTrace trace = trace_branch(g, lambda, opts);
            if (!trace.completed) {
              throw std::runtime_error("qre-at-lambda: " + trace.failure);
            }
            return Assessment{trace.terminal().profile.row, PlayerSide::Row};
          }};
}

Assessor Assessor::nash_argmax() {
  return {"nash-argmax", [](const Game& g) {
            Assessment a;
            a.side = PlayerSide::Row;
            a.values.assign(g.rows(), 0.0);
            for (const auto& [i, j] : pure_nash(g)) a.values[i] = 1.0;
            return a;
          }};
}

Assessor Assessor::constant(std::vector<double> values) {
  return {"constant", [values](const Game& g) {
            if (values.size() != static_cast<size_t>(g.rows())) {
              throw std::invalid_argument("constant assessor: wrong length");
            }
            return Assessment{values, PlayerSide::Row};
          }};
}

FramingReport frame_sensitivity(const Assessor& assessor, const Game& g,
                                int max_dups, int max_total_cols) {
  if (max_dups < 0) {
    throw std::invalid_argument("frame_sensitivity: max_dups must be >= 0");
  }
  FramingReport report{reduce(g), {}, {}, {}, 0.0, {}, false};
  const Game& base = report.base;
  const int n = base.cols();

  // enumerate duplication tuples in lexicographic order
  std::vector<int> dups(n, 0);
  for (;;) {
    int total = n;
    for (int d : dups) total += d;
    if (total <= max_total_cols || total == n) {
      Game rep = with_dup_counts(base, dups);
      Assessment a = assessor.evaluate(rep);
      report.representations.push_back(std::move(rep));
      report.dup_counts.push_back(dups);
      report.assessments.push_back(std::move(a));
    }
    int pos = n - 1;
    while (pos >= 0 && dups[pos] == max_dups) dups[pos--] = 0;
    if (pos < 0) break;
    dups[pos] += 1;
  }

  const int m = base.rows();
  for (int i = 0; i < m; ++i) {
    double lo = report.assessments[0].values[i];
    double hi = lo;
    for (const auto& a : report.assessments) {
      lo = std::min(lo, a.values[i]);
      hi = std::max(hi, a.values[i]);
    }
    report.max_discrepancy = std::max(report.max_discrepancy, hi - lo);
  }
  for (int i = 0; i < m; ++i) {
    for (int k = i + 1; k < m; ++k) {
      bool saw_ik = false, saw_ki = false;
      for (const auto& a : report.assessments) {
        if (a.values[i] > a.values[k]) saw_ik = true;
        if (a.values[i] < a.values[k]) saw_ki = true;
      }
      if (saw_ik && saw_ki) report.order_flips.emplace_back(i, k);
    }
  }
  report.inconsistent =
      report.max_discrepancy > 0.0 || !report.order_flips.empty();
  return report;
}

std::vector<double> derivative_probe(const Assessor& assessor, const Game& g,
                                     int i, int j, double h) {
  if (i < 0 || i >= g.rows() || j < 0 || j >= g.cols()) {
    throw std::out_of_range("derivative_probe: entry out of range");
  }
  if (h == 0.0) h = 1e-5 * std::max(1.0, std::abs(g.a(i, j)));
  if (!(h > 0.0)) {
    throw std::invalid_argument("derivative_probe: h must be positive");
  }
  const Assessment up = assessor.evaluate(perturb_row_payoff(g, i, j, h));
  const Assessment dn = assessor.evaluate(perturb_row_payoff(g, i, j, -h));
  std::vector<double> out(up.values.size());
  for (size_t k = 0; k < out.size(); ++k) {
    out[k] = (up.values[k] - dn.values[k]) / (2.0 * h);
  }
  return out;
}

TheoremRecord theorem_enactment(const Assessor& assessor, const Game& g,
                                double t_range, double h, int grid_points) {
  if (g.rows() != 2 || g.cols() != 2) {
    throw std::invalid_argument("theorem_enactment: need a 2x2 game");
  }
  if (!(t_range > 0.0) || !(h > 0.0) || grid_points < 3) {
    throw std::invalid_argument("theorem_enactment: bad settings");
  }

  // families over t; columns listed as (payoff pair source, +t on row 1?)
  auto m1 = [&](double t) { return perturb_row_payoff(g, 0, 0, t); };
  auto family = [&](double t, bool shift1, bool shift2, bool shift3) {
    // three copies of column 1 followed by column 2
    std::vector<double> a = {g.a(0, 0) + (shift1 ? t : 0.0),
                             g.a(0, 0) + (shift2 ? t : 0.0),
                             g.a(0, 0) + (shift3 ? t : 0.0), g.a(0, 1),
                             g.a(1, 0), g.a(1, 0), g.a(1, 0), g.a(1, 1)};
    std::vector<double> b = {g.b(0, 0), g.b(0, 0), g.b(0, 0), g.b(0, 1),
                             g.b(1, 0), g.b(1, 0), g.b(1, 0), g.b(1, 1)};
    return Game(2, 4, std::move(a), std::move(b));
  };
  auto m2 = [&](double t) { return family(t, true, true, true); };
  auto m3 = [&](double t) { return family(t, false, false, true); };
  auto m4 = [&](double t) { return family(t, false, true, true); };

  TheoremRecord rec;
  for (int k = 0; k < grid_points; ++k) {
    const double t =
        -t_range + 2.0 * t_range * k / (grid_points - 1);
    rec.t_grid.push_back(t);
    rec.u1.push_back(assessor.evaluate(m1(t)).values);
    rec.u2.push_back(assessor.evaluate(m2(t)).values);
    rec.u3.push_back(assessor.evaluate(m3(t)).values);
    rec.u4.push_back(assessor.evaluate(m4(t)).values);
  }
  auto max_dev = [&](const auto& x, const auto& y) {
    double d = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
      for (size_t i = 0; i < x[k].size(); ++i) {
        d = std::max(d, std::abs(x[k][i] - y[k][i]));
      }
    }
    return d;
  };
  rec.max_dev_12 = max_dev(rec.u1, rec.u2);
  rec.max_dev_34 = max_dev(rec.u3, rec.u4);
  rec.u1_eq_u2 = rec.max_dev_12 <= 1e-9;
  rec.u3_eq_u4 = rec.max_dev_34 <= 1e-9;

  auto central = [&](auto make) {
    const Assessment up = assessor.evaluate(make(h));
    const Assessment dn = assessor.evaluate(make(-h));
    std::vector<double> d(up.values.size());
    for (size_t i = 0; i < d.size(); ++i) {
      d[i] = (up.values[i] - dn.values[i]) / (2.0 * h);
    }
    return d;
  };
  rec.du1 = central(m1);
  rec.du2 = central(m2);
  rec.du3 = central(m3);
  rec.du4 = central(m4);
  return rec;
}

std::string framing_report_json(const FramingReport& report) {
  nlohmann::json j;
  j["base_game"] = nlohmann::json::parse(save_game(report.base));
  j["max_discrepancy"] = report.max_discrepancy;
  j["inconsistent"] = report.inconsistent;
  for (const auto& [i, k] : report.order_flips) {
    j["order_flips"].push_back({i, k});
  }
  if (report.order_flips.empty()) j["order_flips"] = nlohmann::json::array();
  for (size_t r = 0; r < report.representations.size(); ++r) {
    nlohmann::json rep;
    rep["game"] = nlohmann::json::parse(save_game(report.representations[r]));
    rep["dup_counts"] = report.dup_counts[r];
    rep["assessment"] = report.assessments[r].values;
    j["representations"].push_back(std::move(rep));
  }
  return j.dump(2) + "\n";
}

}  // namespace frameq
