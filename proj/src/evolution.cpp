#include "frameq/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "format17.hpp"

namespace frameq {

namespace {

using detail::g17;

// Uniform double in [0,1) from the top 53 bits; the mt19937_64 stream is
// standardized, so runs are bit-reproducible across platforms.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) via Lemire's multiply-reject method.
int uniform_int(std::mt19937_64& rng, int n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  unsigned __int128 prod = static_cast<unsigned __int128>(rng()) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      prod = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<int>(prod >> 64);
}

}  // namespace

Assessment phi_assessment(const Game& g, PlayerSide side) {
  const int own = side == PlayerSide::Row ? g.rows() : g.cols();
  const int other = side == PlayerSide::Row ? g.cols() : g.rows();
  auto pay = [&](int i, int j) {
    return side == PlayerSide::Row ? g.a(i, j) : g.b(j, i);
  };
  Assessment out;
  out.side = side;
  out.values.resize(own);
  double grand = 0.0;
  for (int i = 0; i < own; ++i) {
    double s = 0.0;
    for (int j = 0; j < other; ++j) s += pay(i, j);
    out.values[i] = s / other;
    grand += s;
  }
  grand /= static_cast<double>(own) * other;
  for (double& v : out.values) v -= grand;
  return out;
}

std::vector<bool> selection_favors(const Assessment& a) {
  std::vector<bool> out(a.values.size());
  for (size_t i = 0; i < a.values.size(); ++i) out[i] = a.values[i] > 0.0;
  return out;
}

std::vector<int> Ranking::order() const {
  std::vector<int> idx(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) idx[i] = entries[i].index;
  return idx;
}

Ranking abundance_order(const Assessment& a) {
  Ranking r;
  r.entries.resize(a.values.size());
  for (size_t i = 0; i < a.values.size(); ++i) {
    r.entries[i] = {static_cast<int>(i), a.values[i], false};
  }
  std::stable_sort(r.entries.begin(), r.entries.end(),
                   [](const RankEntry& x, const RankEntry& y) {
                     return x.value > y.value;
                   });
  for (size_t i = 1; i < r.entries.size(); ++i) {
    if (r.entries[i].value == r.entries[i - 1].value) {
      r.entries[i].tied_with_previous = true;
      r.has_ties = true;
    }
  }
  return r;
}

std::pair<double, double> MoranEstimate::mass(
    PlayerSide side, std::span<const int> indices) const {
  const auto& batches =
      side == PlayerSide::Row ? row_batches : col_batches;
  const int nb = static_cast<int>(batches.size());
  std::vector<double> sums(nb, 0.0);
  for (int b = 0; b < nb; ++b) {
    for (int i : indices) sums[b] += batches[b][i];
  }
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / nb;
  double var = 0.0;
  for (double s : sums) var += (s - mean) * (s - mean);
  var /= (nb - 1);
  return {mean, std::sqrt(var / nb)};
}

MoranEstimate moran_simulate(const Game& g, const MoranConfig& cfg,
                             const TrajectoryFn& trajectory) {
  if (cfg.n_row < 2 || cfg.n_col < 2) {
    throw std::invalid_argument("moran_simulate: populations must have >= 2");
  }
  if (cfg.mutation < 0.0 || cfg.mutation > 1.0) {
    throw std::invalid_argument("moran_simulate: mutation outside [0,1]");
  }
  if (cfg.delta < 0.0) {
    throw std::invalid_argument("moran_simulate: delta must be >= 0");
  }
  if (cfg.steps <= cfg.burn_in || cfg.burn_in < 0) {
    throw std::invalid_argument("moran_simulate: need steps > burn_in >= 0");
  }
  if (cfg.batches < 2 || (cfg.steps - cfg.burn_in) / cfg.batches < 1) {
    throw std::invalid_argument("moran_simulate: bad batch count");
  }

  const int m = g.rows(), n = g.cols();
  std::mt19937_64 rng(cfg.seed);

  // near-uniform initial composition
  std::vector<int> crow(m, cfg.n_row / m), ccol(n, cfg.n_col / n);
  for (int i = 0; i < cfg.n_row % m; ++i) crow[i] += 1;
  for (int j = 0; j < cfg.n_col % n; ++j) ccol[j] += 1;

  const long long batch_len = (cfg.steps - cfg.burn_in) / cfg.batches;
  std::vector<std::vector<long long>> row_acc(
      cfg.batches, std::vector<long long>(m, 0));
  std::vector<std::vector<long long>> col_acc(
      cfg.batches, std::vector<long long>(n, 0));

  std::vector<double> weights(std::max(m, n));

  // pick the member at `target` when population members are laid out by
  // strategy blocks; returns its strategy
  auto strategy_of = [](const std::vector<int>& counts, int target) {
    int s = 0;
    for (int acc = counts[0]; target >= acc; acc += counts[++s]) {}
    return s;
  };

  for (long long step = 0; step < cfg.steps; ++step) {
    const bool row_side = uniform_int(rng, cfg.n_row + cfg.n_col) < cfg.n_row;
    auto& counts = row_side ? crow : ccol;
    const int total = row_side ? cfg.n_row : cfg.n_col;
    const int k = row_side ? m : n;

    const int agent = strategy_of(counts, uniform_int(rng, total));
    int next;
    if (uniform01(rng) < cfg.mutation) {
      next = uniform_int(rng, k);
    } else {
      // mean payoff of each strategy against the other population
      const auto& opp = row_side ? ccol : crow;
      const int opp_total = row_side ? cfg.n_col : cfg.n_row;
      double wsum = 0.0;
      for (int i = 0; i < k; ++i) {
        double u = 0.0;
        for (size_t j = 0; j < opp.size(); ++j) {
          u += (row_side ? g.a(i, static_cast<int>(j))
                         : g.b(static_cast<int>(j), i)) * opp[j];
        }
        u /= opp_total;
        weights[i] = counts[i] * std::exp(cfg.delta * u);
        wsum += weights[i];
      }
      double r = uniform01(rng) * wsum;
      next = k - 1;
      for (int i = 0; i < k; ++i) {
        r -= weights[i];
        if (r < 0.0) { next = i; break; }
      }
    }
    counts[agent] -= 1;
    counts[next] += 1;

    if (step >= cfg.burn_in) {
      const long long b =
          std::min<long long>((step - cfg.burn_in) / batch_len, cfg.batches - 1);
      for (int i = 0; i < m; ++i) row_acc[b][i] += crow[i];
      for (int j = 0; j < n; ++j) col_acc[b][j] += ccol[j];
    }
    if (trajectory && cfg.thin > 0 && step % cfg.thin == 0) {
      trajectory(step, crow, ccol);
    }
  }

  MoranEstimate est;
  est.row_batches.assign(cfg.batches, std::vector<double>(m));
  est.col_batches.assign(cfg.batches, std::vector<double>(n));
  const long long tail = (cfg.steps - cfg.burn_in) - batch_len * (cfg.batches - 1);
  for (int b = 0; b < cfg.batches; ++b) {
    const double len =
        static_cast<double>(b == cfg.batches - 1 ? tail : batch_len);
    for (int i = 0; i < m; ++i)
      est.row_batches[b][i] = row_acc[b][i] / (len * cfg.n_row);
    for (int j = 0; j < n; ++j)
      est.col_batches[b][j] = col_acc[b][j] / (len * cfg.n_col);
  }
  auto summarize = [&](const std::vector<std::vector<double>>& batches,
                       std::vector<double>& mean, std::vector<double>& se,
                       int kk) {
    mean.assign(kk, 0.0);
    se.assign(kk, 0.0);
    for (int i = 0; i < kk; ++i) {
      for (int b = 0; b < cfg.batches; ++b) mean[i] += batches[b][i];
      mean[i] /= cfg.batches;
      double var = 0.0;
      for (int b = 0; b < cfg.batches; ++b) {
        var += (batches[b][i] - mean[i]) * (batches[b][i] - mean[i]);
      }
      se[i] = std::sqrt(var / (cfg.batches - 1) / cfg.batches);
    }
  };
  summarize(est.row_batches, est.row_abundance, est.row_std_error, m);
  summarize(est.col_batches, est.col_abundance, est.col_std_error, n);
  return est;
}

PhiMoranReport phi_vs_moran_report(const Game& g, const MoranConfig& cfg) {
  PhiMoranReport rep;
  if (cfg.delta * g.payoff_range() > 0.5) {
    rep.warning = "selection is not weak: delta * payoff range = " +
                  g17(cfg.delta * g.payoff_range()) + " > 0.5";
  }
  const Assessment phi = phi_assessment(g, PlayerSide::Row);
  const MoranEstimate est = moran_simulate(g, cfg);
  const double uniform = 1.0 / g.rows();

  bool all_phi_zero = true, all_within_noise = true;
  for (int i = 0; i < g.rows(); ++i) {
    PhiMoranEntry e;
    e.phi = phi.values[i];
    e.abundance_minus_uniform = est.row_abundance[i] - uniform;
    e.std_error = est.row_std_error[i];
    e.sign_agrees = (e.phi > 0.0 && e.abundance_minus_uniform > 0.0) ||
                    (e.phi < 0.0 && e.abundance_minus_uniform < 0.0) ||
                    (e.phi == 0.0 &&
                     std::abs(e.abundance_minus_uniform) <= 3.0 * e.std_error);
    if (e.phi != 0.0) all_phi_zero = false;
    if (std::abs(e.abundance_minus_uniform) > 3.0 * e.std_error)
      all_within_noise = false;
    rep.entries.push_back(e);
  }
  rep.neutral = all_phi_zero && all_within_noise;

  Assessment sim_as_assessment;
  sim_as_assessment.side = PlayerSide::Row;
  sim_as_assessment.values = est.row_abundance;
  rep.ordering_agrees =
      abundance_order(phi).order() == abundance_order(sim_as_assessment).order();
  return rep;
}

std::string moran_summary_json(const Game& g, const MoranConfig& cfg,
                               const MoranEstimate& est) {
  nlohmann::json j;
  auto side = [&](const std::vector<double>& ab, const std::vector<double>& se,
                  int k, auto label) {
    nlohmann::json s;
    for (int i = 0; i < k; ++i) {
      s["labels"].push_back(label(i));
      s["abundance"].push_back(ab[i]);
      s["std_error"].push_back(se[i]);
    }
    return s;
  };
  j["row"] = side(est.row_abundance, est.row_std_error, g.rows(),
                  [&](int i) { return g.row_label(i); });
  j["col"] = side(est.col_abundance, est.col_std_error, g.cols(),
                  [&](int i) { return g.col_label(i); });
  j["config"] = {{"n_row", cfg.n_row},       {"n_col", cfg.n_col},
                 {"delta", cfg.delta},       {"mutation", cfg.mutation},
                 {"steps", cfg.steps},       {"burn_in", cfg.burn_in},
                 {"batches", cfg.batches},   {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

TrajectoryFn csv_trajectory_writer(std::ostream& os, const Game& g) {
  os << "step,strategy,population,count\n";
  return [&os, &g](long long step, std::span<const int> row_counts,
                   std::span<const int> col_counts) {
    for (size_t i = 0; i < row_counts.size(); ++i) {
      os << step << "," << g.row_label(static_cast<int>(i)) << ",row,"
         << row_counts[i] << "\n";
    }
    for (size_t j = 0; j < col_counts.size(); ++j) {
      os << step << "," << g.col_label(static_cast<int>(j)) << ",col,"
         << col_counts[j] << "\n";
    }
  };
}

}  // namespace frameq
