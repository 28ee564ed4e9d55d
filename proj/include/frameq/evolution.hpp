#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frameq/game.hpp"

namespace frameq {

/// A real-valued score per pure strategy of one player.
struct Assessment {
  std::vector<double> values;
  PlayerSide side = PlayerSide::Row;
};

/// Weak-selection assessment phi_i = (row mean of i's payoffs) - (grand
/// mean over all of the player's payoffs). Entries sum to zero. For the
/// column player the transposed convention applies to the b matrix.
Assessment phi_assessment(const Game& g, PlayerSide side);

/// Per-strategy flag: selection favors a strategy exactly when its
/// assessment value is positive.
std::vector<bool> selection_favors(const Assessment& a);

struct RankEntry {
  int index;
  double value;
  bool tied_with_previous;
};

/// Indices sorted by value descending; stable, so ties keep index order
/// and are flagged.
struct Ranking {
  std::vector<RankEntry> entries;
  bool has_ties = false;

  std::vector<int> order() const;
};

Ranking abundance_order(const Assessment& a);

/// Parameters of the two-population imitation-mutation process.
///
/// Each step one member of one population (picked with probability
/// proportional to population size) revises its strategy: with
/// probability `mutation` it draws uniformly over all strategies,
/// otherwise it imitates strategy i with probability
/// N_i exp(delta u_i) / sum_k N_k exp(delta u_k), where u_i is the mean
/// payoff of strategy i against the other population's current mixture
/// and the counts include the revising member itself.
///
/// Runs are reproducible: the only randomness source is an mt19937_64
/// seeded with `seed`, consumed through fixed-order draws.
struct MoranConfig {
  int n_row = 40;
  int n_col = 40;
  double delta = 0.01;       // selection strength
  double mutation = 0.05;
  long long steps = 10'000'000;
  long long burn_in = 100'000;
  int batches = 100;         // batch-means blocks for standard errors
  std::uint64_t seed = 1;
  long long thin = 1000;     // trajectory callback interval
};

/// Time-averaged strategy frequencies after burn-in, with batch-means
/// standard errors. Batch means are kept so callers can aggregate
/// (e.g. the total mass of several columns) with honest errors.
struct MoranEstimate {
  std::vector<double> row_abundance, row_std_error;
  std::vector<double> col_abundance, col_std_error;
  // batches x strategies
  std::vector<std::vector<double>> row_batches, col_batches;

  /// Mean and standard error of the summed abundance of a strategy
  /// subset, from the per-batch sums.
  std::pair<double, double> mass(PlayerSide side,
                                 std::span<const int> indices) const;
};

/// Called every cfg.thin steps with the current strategy counts.
using TrajectoryFn = std::function<void(
    long long step, std::span<const int> row_counts,
    std::span<const int> col_counts)>;

MoranEstimate moran_simulate(const Game& g, const MoranConfig& cfg,
                             const TrajectoryFn& trajectory = {});

/// Per-strategy comparison of the closed-form assessment against the
/// simulated deviation from uniform.
struct PhiMoranEntry {
  double phi;
  double abundance_minus_uniform;
  double std_error;
  bool sign_agrees;
};

struct PhiMoranReport {
  std::vector<PhiMoranEntry> entries;  // row player strategies
  bool ordering_agrees = false;        // phi ranking == abundance ranking
  bool neutral = false;                // phi == 0 and deviations within noise
  std::string warning;                 // set when selection is not weak
};

PhiMoranReport phi_vs_moran_report(const Game& g, const MoranConfig& cfg);

/// Summary JSON: per-strategy abundance and std_error for both
/// populations, plus the config.
std::string moran_summary_json(const Game& g, const MoranConfig& cfg,
                               const MoranEstimate& est);

/// CSV trajectory writer: step,strategy,population,count at every
/// cfg.thin steps. Returns a callback to pass to moran_simulate.
TrajectoryFn csv_trajectory_writer(std::ostream& os, const Game& g);

}  // namespace frameq
