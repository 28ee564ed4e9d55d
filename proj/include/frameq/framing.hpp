#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "frameq/evolution.hpp"
#include "frameq/game.hpp"

namespace frameq {

/// A named, deterministic evaluation procedure mapping a game to a score
/// vector over the row player's strategies. The row count is preserved
/// by column duplication, so assessments of equivalent games compare
/// entry by entry.
struct Assessor {
  std::string name;
  std::function<Assessment(const Game&)> evaluate;

  /// Weak-selection assessment phi (row side).
  static Assessor phi();
  /// Terminal row profile of the principal logit branch traced to
  /// lambda_max (0 = per-game default).
  static Assessor qre_terminal(double lambda_max = 0.0);
  /// Row profile of the principal-branch fixed point at a given lambda.
  static Assessor qre_at_lambda(double lambda);
  /// 0/1 indicator of rows that appear in some pure Nash equilibrium.
  /// Duplication-invariant; serves as the consistent reference.
  static Assessor nash_argmax();
  /// f == c regardless of the game; consistent but not valid.
  static Assessor constant(std::vector<double> values);
};

/// How an assessor's output varies over equivalent representations of
/// one game.
struct FramingReport {
  Game base;
  std::vector<Game> representations;        // all equivalent to base
  std::vector<std::vector<int>> dup_counts; // copies added per base column
  std::vector<Assessment> assessments;
  double max_discrepancy = 0.0;             // max pairwise sup-norm
  std::vector<std::pair<int, int>> order_flips;  // (i,k), i < k
  bool inconsistent = false;                // discrepancy or flips found
};

/// Evaluate `assessor` on every representation obtained by duplicating
/// each column of reduce(g) between 0 and max_dups times (total column
/// count capped at `max_total_cols`; the equivalence class is infinite).
/// A consistent assessor yields max_discrepancy = 0 and no flips.
FramingReport frame_sensitivity(const Assessor& assessor, const Game& g,
                                int max_dups, int max_total_cols = 12);

/// Central finite-difference estimate of the assessment's sensitivity to
/// the row player's payoff a_ij, one entry per row strategy.
/// h = 0 picks 1e-5 scaled by max(1, |a_ij|).
std::vector<double> derivative_probe(const Assessor& assessor, const Game& g,
                                     int i, int j, double h = 0.0);

/// Numerical scaffolding of the duplication argument on a 2x2 game:
/// four families built from g by perturbing the (1,1) row payoff by t
/// and duplicating the first column, with
///   m1(t): 2 columns, entry (1,1) shifted by t
///   m2(t): first column of m1(t) tripled              (m1 ~ m2 for all t)
///   m3(t): three copies of column 1, only the third shifted
///   m4(t): three copies of column 1, second and third shifted
///           (m3 ~ m4 for all t; m3(0) = m4(0) = m2(0))
/// The record reports whether the assessor agrees on each equivalent
/// pair over a t grid, and its one-sided derivatives at t = 0. For any
/// assessor that is smooth but sensitive to duplication, some pair
/// disagrees for t != 0.
struct TheoremRecord {
  std::vector<double> t_grid;
  std::vector<std::vector<double>> u1, u2, u3, u4;  // per grid point
  double max_dev_12 = 0.0, max_dev_34 = 0.0;
  bool u1_eq_u2 = false, u3_eq_u4 = false;  // within 1e-9 on the grid
  std::vector<double> du1, du2, du3, du4;   // central differences at 0
};

TheoremRecord theorem_enactment(const Assessor& assessor, const Game& g,
                                double t_range, double h,
                                int grid_points = 21);

/// JSON form of a framing report (base game, representations inline,
/// assessments, discrepancy, flips).
std::string framing_report_json(const FramingReport& report);

}  // namespace frameq
