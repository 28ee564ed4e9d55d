#include "frameq/qre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "format17.hpp"

namespace frameq {

namespace {

using detail::g17;

double sup_diff(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

// One application of the joint response map sigma(u(p)) for both players.
struct Response {
  std::vector<double> row;
  std::vector<double> col;
};

Response respond(const Game& g, double lambda, const MixedProfile& p,
                 const ResponseMap& map) {
  Response s;
  s.row = map.probabilities(expected_payoffs(g, p.col, PlayerSide::Row),
                            LogitParams{lambda});
  s.col = map.probabilities(expected_payoffs(g, p.row, PlayerSide::Column),
                            LogitParams{lambda});
  return s;
}

double residual_of(const MixedProfile& p, const Response& s) {
  return std::max(sup_diff(p.row, s.row), sup_diff(p.col, s.col));
}

void renormalize(std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
}

// Dense LU solve with partial pivoting, in place. Returns false when the
// matrix is numerically singular.
bool lu_solve(std::vector<double>& a, std::vector<double>& rhs, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double big = std::abs(a[static_cast<size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[static_cast<size_t>(i) * n + k]);
      if (v > big) { big = v; piv = i; }
    }
    if (big < 1e-300) return false;
    if (piv != k) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(k) * n + j],
                  a[static_cast<size_t>(piv) * n + j]);
      std::swap(rhs[k], rhs[piv]);
    }
    const double d = a[static_cast<size_t>(k) * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double f = a[static_cast<size_t>(i) * n + k] / d;
      if (f == 0.0) continue;
      a[static_cast<size_t>(i) * n + k] = f;
      for (int j = k + 1; j < n; ++j)
        a[static_cast<size_t>(i) * n + j] -= f * a[static_cast<size_t>(k) * n + j];
      rhs[i] -= f * rhs[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < n; ++j)
      s -= a[static_cast<size_t>(i) * n + j] * rhs[j];
    rhs[i] = s / a[static_cast<size_t>(i) * n + i];
  }
  return true;
}

// Newton step for F(z) = z - sigma(u(z)), z = (p_row, p_col). The
// off-diagonal blocks chain the response Jacobian d sigma/d u with the
// payoff matrices: d sigma_row/d p_col = (d sigma/d u) A and
// d sigma_col/d p_row = (d sigma/d u) B'.
bool newton_step(const Game& g, double lambda, const MixedProfile& p,
                 const Response& s, const ResponseMap& map,
                 MixedProfile& out) {
  if (!map.jacobian) return false;
  const int m = g.rows(), n = g.cols(), dim = m + n;
  const auto dsr = map.jacobian(expected_payoffs(g, p.col, PlayerSide::Row),
                                LogitParams{lambda});
  const auto dsc = map.jacobian(expected_payoffs(g, p.row, PlayerSide::Column),
                                LogitParams{lambda});

  std::vector<double> J(static_cast<size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) J[static_cast<size_t>(i) * dim + i] = 1.0;

  // top-right block: -d sigma_row / d p_col
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double deriv = 0.0;
      for (int k = 0; k < m; ++k) {
        deriv += dsr[static_cast<size_t>(i) * m + k] * g.a(k, j);
      }
      J[static_cast<size_t>(i) * dim + (m + j)] = -deriv;
    }
  }
  // bottom-left block: -d sigma_col / d p_row
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      double deriv = 0.0;
      for (int l = 0; l < n; ++l) {
        deriv += dsc[static_cast<size_t>(j) * n + l] * g.b(i, l);
      }
      J[static_cast<size_t>(m + j) * dim + i] = -deriv;
    }
  }

  std::vector<double> rhs(dim);
  for (int i = 0; i < m; ++i) rhs[i] = s.row[i] - p.row[i];
  for (int j = 0; j < n; ++j) rhs[m + j] = s.col[j] - p.col[j];

  if (!lu_solve(J, rhs, dim)) return false;

  out = p;
  for (int i = 0; i < m; ++i) out.row[i] += rhs[i];
  for (int j = 0; j < n; ++j) out.col[j] += rhs[m + j];
  for (double v : out.row) if (!(v > 0.0) || !std::isfinite(v)) return false;
  for (double v : out.col) if (!(v > 0.0) || !std::isfinite(v)) return false;
  renormalize(out.row);
  renormalize(out.col);
  return true;
}

}  // namespace

std::vector<double> logit_response(std::span<const double> u,
                                   LogitParams params) {
  std::vector<double> p(u.size());
  double zmax = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < u.size(); ++i) {
    p[i] = params.lambda * u[i];
    zmax = std::max(zmax, p[i]);
  }
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

const ResponseMap& logit_map() {
  static const ResponseMap map = {
      "logit",
      [](std::span<const double> u, LogitParams params) {
        return logit_response(u, params);
      },
      [](std::span<const double> u, LogitParams params) {
        const auto s = logit_response(u, params);
        const size_t k = s.size();
        std::vector<double> jac(k * k);
        for (size_t i = 0; i < k; ++i) {
          for (size_t j = 0; j < k; ++j) {
            const double kron = i == j ? 1.0 : 0.0;
            jac[i * k + j] = params.lambda * s[i] * (kron - s[j]);
          }
        }
        return jac;
      }};
  return map;
}

FixedPointResult solve_fixed_point(const Game& g, LogitParams params,
                                   const MixedProfile& init,
                                   const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument("solve_fixed_point: tol must be positive");
  }
  if (init.row.size() != static_cast<size_t>(g.rows()) ||
      init.col.size() != static_cast<size_t>(g.cols()) || !init.valid(1e-9)) {
    throw std::invalid_argument("solve_fixed_point: invalid initial profile");
  }

  const ResponseMap& map =
      opts.response.probabilities ? opts.response : logit_map();

  MixedProfile p = init;
  MixedProfile best = p;
  double best_res = std::numeric_limits<double>::infinity();
  int iter = 0;

  for (; iter < opts.max_iter; ++iter) {
    const Response s = respond(g, params.lambda, p, map);
    const double res = residual_of(p, s);
    if (res < best_res) { best_res = res; best = p; }
    if (res <= opts.tol) break;

    if (res < opts.newton_threshold) {
      MixedProfile trial;
      if (newton_step(g, params.lambda, p, s, map, trial)) {
        const double trial_res =
            residual_of(trial, respond(g, params.lambda, trial, map));
        if (trial_res < res) {
          p = trial;
          continue;
        }
      }
    }
    for (int i = 0; i < g.rows(); ++i)
      p.row[i] = (1.0 - opts.damping) * p.row[i] + opts.damping * s.row[i];
    for (int j = 0; j < g.cols(); ++j)
      p.col[j] = (1.0 - opts.damping) * p.col[j] + opts.damping * s.col[j];
    renormalize(p.row);
    renormalize(p.col);
  }

  FixedPointResult out;
  out.profile = best;
  // independent recomputation, outside the loop above
  out.residual = residual_of(best, respond(g, params.lambda, best, map));
  out.iterations = iter;
  out.converged = out.residual <= opts.tol;
  return out;
}

double default_lambda_max(const Game& g) {
  const double range = g.payoff_range();
  if (range <= 0.0) return 1.0;
  return 50.0 / range;
}

BranchTrace trace_branch(const Game& g, double lambda_max,
                         const StepControl& opts) {
  if (lambda_max < 0.0) {
    throw std::invalid_argument("trace_branch: lambda_max must be >= 0");
  }
  const ResponseMap& map =
      opts.solve.response.probabilities ? opts.solve.response : logit_map();
  BranchTrace trace;
  MixedProfile p = centroid_profile(g);
  trace.samples.push_back(
      {0.0, p, residual_of(p, respond(g, 0.0, p, map))});  // exactly 0
  if (lambda_max == 0.0) {
    trace.completed = true;
    return trace;
  }

  auto near_vertex = [&](const MixedProfile& prof) {
    const double thr = opts.purity_threshold;
    return *std::max_element(prof.row.begin(), prof.row.end()) >= thr &&
           *std::max_element(prof.col.begin(), prof.col.end()) >= thr;
  };

  double lambda = 0.0;
  double step = opts.initial_step_fraction * lambda_max;
  const double min_step = 1e-13 * lambda_max;
  trace.completed = true;

  while (lambda < lambda_max) {
    const double next = std::min(lambda + step, lambda_max);
    const FixedPointResult fp =
        solve_fixed_point(g, LogitParams{next}, p, opts.solve);
    const double jump = std::max(sup_diff(fp.profile.row, p.row),
                                 sup_diff(fp.profile.col, p.col));
    if (!fp.converged || jump > opts.jump_threshold) {
      step *= 0.5;
      if (step < min_step) {
        trace.completed = false;
        trace.failure = "corrector failed near lambda=" + g17(next);
        break;
      }
      continue;
    }
    lambda = next;
    p = fp.profile;
    trace.samples.push_back({lambda, p, fp.residual});
    if (fp.iterations < opts.easy_iterations) {
      step *= 2.0;
    } else if (fp.iterations >= 10 * opts.easy_iterations) {
      step *= 0.5;
    }
    if (near_vertex(p)) break;
  }
  return trace;
}

LimitResult limit_equilibrium(const BranchTrace& trace, const Game& g,
                              double purity_threshold) {
  if (trace.samples.empty()) {
    throw std::invalid_argument("limit_equilibrium: empty trace");
  }
  LimitResult out;
  out.profile = trace.terminal().profile;
  out.lambda = trace.terminal().lambda;

  auto pure = [purity_threshold](const std::vector<double>& v) {
    for (double x : v) {
      if (x < purity_threshold && x > 1.0 - purity_threshold) return false;
    }
    return true;
  };
  if (pure(out.profile.row) && pure(out.profile.col)) {
    out.decided = true;
    out.row_index = static_cast<int>(
        std::max_element(out.profile.row.begin(), out.profile.row.end()) -
        out.profile.row.begin());
    out.col_index = static_cast<int>(
        std::max_element(out.profile.col.begin(), out.profile.col.end()) -
        out.profile.col.begin());
    out.label =
        "(" + g.row_label(out.row_index) + "," + g.col_label(out.col_index) + ")";
  } else {
    out.label = "mixed/undecided at lambda_max";
  }
  return out;
}

void write_branch_csv(std::ostream& os, const BranchTrace& trace) {
  const size_t m = trace.samples.front().profile.row.size();
  const size_t n = trace.samples.front().profile.col.size();
  os << "lambda";
  for (size_t i = 1; i <= m; ++i) os << ",pR_" << i;
  for (size_t j = 1; j <= n; ++j) os << ",pC_" << j;
  os << ",residual\n";
  for (const auto& s : trace.samples) {
    os << g17(s.lambda);
    for (double v : s.profile.row) os << "," << g17(v);
    for (double v : s.profile.col) os << "," << g17(v);
    os << "," << g17(s.residual) << "\n";
  }
}

}  // namespace frameq
