#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frameq {

/// Which player a strategy set / payoff query refers to.
enum class PlayerSide { Row, Column };

/// Thrown when a game file cannot be parsed into a valid Game.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A two-player normal-form game: an m x n matrix of payoff pairs.
///
/// Row player payoffs `a` and column player payoffs `b` are stored
/// row-major. Payoffs are kept in the units they were constructed with;
/// no internal rescaling happens anywhere (logit and selection outputs
/// are scale dependent).
///
/// Strategy labels are optional display metadata. They never take part
/// in equality, reduction or equivalence.
class Game {
 public:
  Game(int rows, int cols, std::vector<double> row_payoffs,
       std::vector<double> col_payoffs);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double a(int i, int j) const { return a_[idx(i, j)]; }
  double b(int i, int j) const { return b_[idx(i, j)]; }

  std::span<const double> row_payoffs() const { return a_; }
  std::span<const double> col_payoffs() const { return b_; }

  /// Payoff range max-min over both players' matrices.
  double payoff_range() const;

  bool has_labels() const { return !row_labels_.empty(); }
  void set_labels(std::vector<std::string> row_labels,
                  std::vector<std::string> col_labels);
  /// Label of a row strategy; defaults to its 1-based index.
  std::string row_label(int i) const;
  std::string col_label(int j) const;

  /// Payoff-wise exact equality (labels ignored).
  friend bool operator==(const Game& x, const Game& y);

 private:
  int idx(int i, int j) const { return i * cols_ + j; }

  int rows_, cols_;
  std::vector<double> a_, b_;
  std::vector<std::string> row_labels_, col_labels_;
};

/// A pair of mixed strategies, one probability vector per player.
struct MixedProfile {
  std::vector<double> row;
  std::vector<double> col;

  /// Entrywise nonnegative and summing to one within `tol`.
  bool valid(double tol = 1e-12) const;
};

/// Uniform randomization over both strategy sets.
MixedProfile centroid_profile(const Game& g);

// ---------------------------------------------------------------------------
// I/O

/// Parse a game from its JSON text form:
///   {"rows": m, "cols": n, "row_payoffs": [[...]], "col_payoffs": [[...]]}
/// with optional "row_labels"/"col_labels" string arrays.
/// Rejects ragged rows, shape mismatches and non-finite entries.
Game load_game(const std::string& text);

/// Serialize in the shape load_game accepts, numbers with 17 significant
/// digits so the round trip is value exact. Labels are emitted only when
/// set.
std::string save_game(const Game& g);

// ---------------------------------------------------------------------------
// Evaluation

/// Expected payoff of every pure strategy of `side` against a mixed
/// opponent: u_i = sum_j a_ij q_j for the row player, u_j = sum_i b_ij p_i
/// for the column player. Throws on length mismatch.
std::vector<double> expected_payoffs(const Game& g,
                                     std::span<const double> opponent,
                                     PlayerSide side);

enum class DominanceMode { Pure, Mixed };

/// Indices of strategies of `side` that are strictly dominated.
///
/// Pure mode: dominated by some single pure strategy against every
/// opposing column (resp. row). Mixed mode: dominated by some mixture,
/// decided by a small linear program; the dominating mixture must win by
/// a margin > 1e-9 against every opposing pure strategy.
std::vector<int> strictly_dominated(const Game& g, PlayerSide side,
                                    DominanceMode mode);

/// All pure-strategy Nash equilibria (i, j), by exhaustive check of the
/// two best-response conditions with weak inequalities.
std::vector<std::pair<int, int>> pure_nash(const Game& g);

// ---------------------------------------------------------------------------
// Generators

/// 2 x (2 + n_outside) coordination game with rows L, H. Coordinating on
/// L pays (90,90), on H (180,180), miscoordination (0,0). Each outside
/// column pays the row player x in row L and 0 in row H, and the column
/// player a safe 40 in both rows.
Game gen_coordination(double x, int n_outside);

/// 2 x 4 variant whose two outside columns differ by eps in the row-L
/// payoff: S1 = (x,40)/(0,40), S2 = (x+eps,40)/(0,40). eps = 0 collapses
/// to gen_coordination(x, 2).
Game gen_coordination_eps(double x, double eps);

/// Symmetric claims game on {lo, ..., hi}: both claimants receive the
/// lower claim, the strictly lower claimant gains `reward` and the
/// strictly higher one loses it.
Game gen_travelers(int lo, int hi, double reward);

// ---------------------------------------------------------------------------
// Column-duplication equivalence

/// Insert `count` exact copies of column j immediately after it.
Game duplicate_column(const Game& g, int j, int count);

/// Delete every column that exactly equals (both payoffs, all rows) an
/// earlier column. Keeps first occurrences in original order; idempotent.
Game reduce(const Game& g);

/// True iff the two games have the same set of distinct columns
/// (exact payoff-pair equality per row). Both games must have the same
/// number of rows. Decided by comparing canonical forms: reduce, then
/// sort columns lexicographically by (a_1j, b_1j, a_2j, b_2j, ...).
bool equivalent(const Game& g1, const Game& g2);

/// Diagnostic only: pairs of distinct columns whose payoff entries all
/// agree within `tol`. Exact duplicates are handled by reduce(); this
/// reports near misses that exact equality deliberately ignores.
std::vector<std::pair<int, int>> near_duplicate_columns(const Game& g,
                                                        double tol);

}  // namespace frameq
