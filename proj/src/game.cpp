#include "frameq/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "format17.hpp"

namespace frameq {

namespace {

using detail::g17;

void check_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace

Game::Game(int rows, int cols, std::vector<double> row_payoffs,
           std::vector<double> col_payoffs)
    : rows_(rows), cols_(cols), a_(std::move(row_payoffs)),
      b_(std::move(col_payoffs)) {
  if (rows_ < 1 || cols_ < 1) {
    throw std::invalid_argument("Game: need at least one row and one column");
  }
  const size_t want = static_cast<size_t>(rows_) * cols_;
  if (a_.size() != want || b_.size() != want) {
    throw std::invalid_argument("Game: payoff matrix size mismatch");
  }
  check_finite(a_, "row payoffs");
  check_finite(b_, "col payoffs");
}

double Game::payoff_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : a_) { lo = std::min(lo, v); hi = std::max(hi, v); }
  for (double v : b_) { lo = std::min(lo, v); hi = std::max(hi, v); }
  return hi - lo;
}

void Game::set_labels(std::vector<std::string> row_labels,
                      std::vector<std::string> col_labels) {
  if (row_labels.size() != static_cast<size_t>(rows_) ||
      col_labels.size() != static_cast<size_t>(cols_)) {
    throw std::invalid_argument("set_labels: label count mismatch");
  }
  row_labels_ = std::move(row_labels);
  col_labels_ = std::move(col_labels);
}

std::string Game::row_label(int i) const {
  if (row_labels_.empty()) return std::to_string(i + 1);
  return row_labels_.at(i);
}

std::string Game::col_label(int j) const {
  if (col_labels_.empty()) return std::to_string(j + 1);
  return col_labels_.at(j);
}

bool operator==(const Game& x, const Game& y) {
  return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_ &&
         x.b_ == y.b_;
}

bool MixedProfile::valid(double tol) const {
  auto ok = [tol](const std::vector<double>& p) {
    if (p.empty()) return false;
    double s = 0.0;
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v)) return false;
      s += v;
    }
    return std::abs(s - 1.0) <= tol;
  };
  return ok(row) && ok(col);
}

MixedProfile centroid_profile(const Game& g) {
  MixedProfile p;
  p.row.assign(g.rows(), 1.0 / g.rows());
  p.col.assign(g.cols(), 1.0 / g.cols());
  return p;
}

// ---------------------------------------------------------------------------
// I/O

Game load_game(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("game file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("row_payoffs") || !j.contains("col_payoffs")) {
    throw ParseError("game file: expected object with rows, cols, "
                     "row_payoffs, col_payoffs");
  }
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer()) {
    throw ParseError("game file: rows/cols must be integers");
  }
  const int rows = j["rows"].get<int>();
  const int cols = j["cols"].get<int>();
  if (rows < 1 || cols < 1) {
    throw ParseError("game file: rows and cols must be positive");
  }

  auto read_matrix = [&](const char* key) {
    const auto& mj = j[key];
    if (!mj.is_array() || mj.size() != static_cast<size_t>(rows)) {
      throw ParseError(std::string("game file: ") + key + " must have " +
                       std::to_string(rows) + " rows");
    }
    std::vector<double> m;
    m.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& rowj : mj) {
      if (!rowj.is_array() || rowj.size() != static_cast<size_t>(cols)) {
        throw ParseError(std::string("game file: ") + key +
                         ": dimension mismatch (ragged or wrong-length row)");
      }
      for (const auto& v : rowj) {
        if (!v.is_number()) {
          throw ParseError(std::string("game file: ") + key +
                           ": non-numeric entry");
        }
        m.push_back(v.get<double>());
      }
    }
    return m;
  };

  Game g(rows, cols, read_matrix("row_payoffs"), read_matrix("col_payoffs"));

  if (j.contains("row_labels") || j.contains("col_labels")) {
    if (!j.contains("row_labels") || !j.contains("col_labels")) {
      throw ParseError("game file: row_labels and col_labels go together");
    }
    auto read_labels = [&](const char* key, int n) {
      const auto& lj = j[key];
      if (!lj.is_array() || lj.size() != static_cast<size_t>(n)) {
        throw ParseError(std::string("game file: ") + key + " wrong length");
      }
      std::vector<std::string> out;
      for (const auto& v : lj) {
        if (!v.is_string()) {
          throw ParseError(std::string("game file: ") + key +
                           " entries must be strings");
        }
        out.push_back(v.get<std::string>());
      }
      return out;
    };
    g.set_labels(read_labels("row_labels", rows),
                 read_labels("col_labels", cols));
  }
  return g;
}

std::string save_game(const Game& g) {
  std::ostringstream os;
  auto matrix = [&](auto getter) {
    os << "[";
    for (int i = 0; i < g.rows(); ++i) {
      os << (i ? ", [" : "[");
      for (int j = 0; j < g.cols(); ++j) {
        os << (j ? ", " : "") << g17(getter(i, j));
      }
      os << "]";
    }
    os << "]";
  };
  os << "{\n";
  os << "  \"rows\": " << g.rows() << ",\n";
  os << "  \"cols\": " << g.cols() << ",\n";
  os << "  \"row_payoffs\": ";
  matrix([&](int i, int j) { return g.a(i, j); });
  os << ",\n  \"col_payoffs\": ";
  matrix([&](int i, int j) { return g.b(i, j); });
  if (g.has_labels()) {
    auto labels = [&](int n, auto get) {
      os << "[";
      for (int k = 0; k < n; ++k) {
        os << (k ? ", " : "") << nlohmann::json(get(k)).dump();
      }
      os << "]";
    };
    os << ",\n  \"row_labels\": ";
    labels(g.rows(), [&](int i) { return g.row_label(i); });
    os << ",\n  \"col_labels\": ";
    labels(g.cols(), [&](int j) { return g.col_label(j); });
  }
  os << "\n}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<double> expected_payoffs(const Game& g,
                                     std::span<const double> opponent,
                                     PlayerSide side) {
  if (side == PlayerSide::Row) {
    if (opponent.size() != static_cast<size_t>(g.cols())) {
      throw std::invalid_argument("expected_payoffs: opponent length != cols");
    }
    std::vector<double> u(g.rows(), 0.0);
    for (int i = 0; i < g.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < g.cols(); ++j) s += g.a(i, j) * opponent[j];
      u[i] = s;
    }
    return u;
  }
  if (opponent.size() != static_cast<size_t>(g.rows())) {
    throw std::invalid_argument("expected_payoffs: opponent length != rows");
  }
  std::vector<double> u(g.cols(), 0.0);
  for (int j = 0; j < g.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < g.rows(); ++i) s += g.b(i, j) * opponent[i];
    u[j] = s;
  }
  return u;
}

namespace {

// Value of the zero-sum matrix game G (row player maximizes), by the
// classic LP transform: shift G positive, then maximize 1'z subject to
// G z <= 1, z >= 0 with a tableau simplex (Bland's rule). The optimum
// is 1/value of the shifted game.
double zero_sum_value(const std::vector<std::vector<double>>& G) {
  const int m = static_cast<int>(G.size());
  const int n = static_cast<int>(G[0].size());
  double lo = G[0][0];
  for (const auto& row : G)
    for (double v : row) lo = std::min(lo, v);
  const double shift = 1.0 - lo;  // all entries >= 1

  // tableau: m constraint rows, columns = n vars + m slacks + rhs
  const int width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = G[i][j] + shift;
    t[i][n + i] = 1.0;
    t[i][width - 1] = 1.0;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -1.0;  // maximize sum z_j

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const double eps = 1e-12;
  for (;;) {
    int pivot_col = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t[m][j] < -eps) { pivot_col = j; break; }  // Bland: first index
    }
    if (pivot_col < 0) break;
    int pivot_row = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t[i][pivot_col] > eps) {
        double ratio = t[i][width - 1] / t[i][pivot_col];
        if (pivot_row < 0 || ratio < best - eps ||
            (ratio < best + eps && basis[i] < basis[pivot_row])) {
          pivot_row = i;
          best = ratio;
        }
      }
    }
    if (pivot_row < 0) {
      throw std::runtime_error("zero_sum_value: unbounded LP");
    }
    const double pv = t[pivot_row][pivot_col];
    for (int j = 0; j < width; ++j) t[pivot_row][j] /= pv;
    for (int i = 0; i <= m; ++i) {
      if (i == pivot_row) continue;
      const double f = t[i][pivot_col];
      if (f == 0.0) continue;
      for (int j = 0; j < width; ++j) t[i][j] -= f * t[pivot_row][j];
    }
    basis[pivot_row] = pivot_col;
  }
  const double objective = t[m][width - 1];  // = 1/value(shifted)
  if (objective <= 0.0) {
    throw std::runtime_error("zero_sum_value: degenerate objective");
  }
  return 1.0 / objective - shift;
}

// Payoff matrix of `side` oriented so strategies are rows: a for the row
// player, b transposed for the column player.
std::vector<std::vector<double>> own_payoffs(const Game& g, PlayerSide side) {
  if (side == PlayerSide::Row) {
    std::vector<std::vector<double>> p(g.rows(), std::vector<double>(g.cols()));
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) p[i][j] = g.a(i, j);
    return p;
  }
  std::vector<std::vector<double>> p(g.cols(), std::vector<double>(g.rows()));
  for (int j = 0; j < g.cols(); ++j)
    for (int i = 0; i < g.rows(); ++i) p[j][i] = g.b(i, j);
  return p;
}

}  // namespace

std::vector<int> strictly_dominated(const Game& g, PlayerSide side,
                                    DominanceMode mode) {
  const auto pay = own_payoffs(g, side);
  const int m = static_cast<int>(pay.size());
  const int n = static_cast<int>(pay[0].size());
  std::vector<int> out;

  if (mode == DominanceMode::Pure) {
    for (int i = 0; i < m; ++i) {
      bool dominated = false;
      for (int k = 0; k < m && !dominated; ++k) {
        if (k == i) continue;
        bool all = true;
        for (int j = 0; j < n; ++j) {
          if (!(pay[k][j] > pay[i][j])) { all = false; break; }
        }
        dominated = all;
      }
      if (dominated) out.push_back(i);
    }
    return out;
  }

  // Mixed mode: i is dominated iff the best uniform margin
  //   max_x min_j (x'pay_j - pay_ij)
  // over mixtures x is positive. That margin is the value of the zero-sum
  // game with entries pay_kj - pay_ij.
  const double margin = 1e-9;
  for (int i = 0; i < m; ++i) {
    if (m == 1) break;
    std::vector<std::vector<double>> d(m, std::vector<double>(n));
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < n; ++j) d[k][j] = pay[k][j] - pay[i][j];
    if (zero_sum_value(d) > margin) out.push_back(i);
  }
  return out;
}

std::vector<std::pair<int, int>> pure_nash(const Game& g) {
  std::vector<std::pair<int, int>> eq;
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      bool best_row = true;
      for (int k = 0; k < g.rows(); ++k)
        if (g.a(k, j) > g.a(i, j)) { best_row = false; break; }
      if (!best_row) continue;
      bool best_col = true;
      for (int l = 0; l < g.cols(); ++l)
        if (g.b(i, l) > g.b(i, j)) { best_col = false; break; }
      if (best_col) eq.emplace_back(i, j);
    }
  }
  return eq;
}

// ---------------------------------------------------------------------------
// Generators

Game gen_coordination(double x, int n_outside) {
  if (n_outside < 0) {
    throw std::invalid_argument("gen_coordination: n_outside must be >= 0");
  }
  const int n = 2 + n_outside;
  std::vector<double> a(2 * n, 0.0), b(2 * n, 0.0);
  a[0] = 90.0;  b[0] = 90.0;          // (L,L)
  a[n + 1] = 180.0; b[n + 1] = 180.0; // (H,H)
  for (int k = 0; k < n_outside; ++k) {
    a[2 + k] = x;       // row L vs outside option
    b[2 + k] = 40.0;
    b[n + 2 + k] = 40.0;
  }
  Game g(2, n, std::move(a), std::move(b));
  std::vector<std::string> cl = {"L", "H"};
  if (n_outside == 1) {
    cl.push_back("S");
  } else {
    for (int k = 0; k < n_outside; ++k)
      cl.push_back("S" + std::to_string(k + 1));
  }
  g.set_labels({"L", "H"}, std::move(cl));
  return g;
}

Game gen_coordination_eps(double x, double eps) {
  Game g = gen_coordination(x, 2);
  std::vector<double> a(g.row_payoffs().begin(), g.row_payoffs().end());
  std::vector<double> b(g.col_payoffs().begin(), g.col_payoffs().end());
  a[3] = x + eps;  // row L, column S2
  Game out(2, 4, std::move(a), std::move(b));
  out.set_labels({"L", "H"}, {"L", "H", "S1", "S2"});
  return out;
}

Game gen_travelers(int lo, int hi, double reward) {
  if (lo > hi) throw std::invalid_argument("gen_travelers: lo > hi");
  if (!(reward > 0.0)) {
    throw std::invalid_argument("gen_travelers: reward must be positive");
  }
  const int n = hi - lo + 1;
  std::vector<double> a(static_cast<size_t>(n) * n),
      b(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ci = lo + i, cj = lo + j;
      const double low = std::min(ci, cj);
      double mine;
      if (ci < cj)      mine = low + reward;
      else if (ci > cj) mine = low - reward;
      else              mine = ci;
      a[static_cast<size_t>(i) * n + j] = mine;
      // symmetric game: the column claimant faces the mirrored situation
      double theirs;
      if (cj < ci)      theirs = low + reward;
      else if (cj > ci) theirs = low - reward;
      else              theirs = cj;
      b[static_cast<size_t>(i) * n + j] = theirs;
    }
  }
  Game g(n, n, std::move(a), std::move(b));
  std::vector<std::string> names(n);
  for (int i = 0; i < n; ++i) names[i] = std::to_string(lo + i);
  g.set_labels(names, names);
  return g;
}

// ---------------------------------------------------------------------------
// Column-duplication equivalence

Game duplicate_column(const Game& g, int j, int count) {
  if (j < 0 || j >= g.cols()) {
    throw std::out_of_range("duplicate_column: column index out of range");
  }
  if (count < 1) {
    throw std::invalid_argument("duplicate_column: count must be >= 1");
  }
  const int n2 = g.cols() + count;
  std::vector<double> a(static_cast<size_t>(g.rows()) * n2),
      b(static_cast<size_t>(g.rows()) * n2);
  std::vector<std::string> cl;
  for (int i = 0; i < g.rows(); ++i) {
    int out = 0;
    for (int c = 0; c < g.cols(); ++c) {
      const int copies = (c == j) ? 1 + count : 1;
      for (int r = 0; r < copies; ++r, ++out) {
        a[static_cast<size_t>(i) * n2 + out] = g.a(i, c);
        b[static_cast<size_t>(i) * n2 + out] = g.b(i, c);
        if (i == 0 && g.has_labels()) cl.push_back(g.col_label(c));
      }
    }
  }
  Game d(g.rows(), n2, std::move(a), std::move(b));
  if (g.has_labels()) {
    std::vector<std::string> rl(g.rows());
    for (int i = 0; i < g.rows(); ++i) rl[i] = g.row_label(i);
    d.set_labels(std::move(rl), std::move(cl));
  }
  return d;
}

namespace {

std::vector<double> column_key(const Game& g, int j) {
  std::vector<double> key(2 * g.rows());
  for (int i = 0; i < g.rows(); ++i) {
    key[2 * i] = g.a(i, j);
    key[2 * i + 1] = g.b(i, j);
  }
  return key;
}

Game from_columns(const Game& g, const std::vector<int>& keep) {
  const int n2 = static_cast<int>(keep.size());
  std::vector<double> a(static_cast<size_t>(g.rows()) * n2),
      b(static_cast<size_t>(g.rows()) * n2);
  for (int i = 0; i < g.rows(); ++i) {
    for (int c = 0; c < n2; ++c) {
      a[static_cast<size_t>(i) * n2 + c] = g.a(i, keep[c]);
      b[static_cast<size_t>(i) * n2 + c] = g.b(i, keep[c]);
    }
  }
  Game out(g.rows(), n2, std::move(a), std::move(b));
  if (g.has_labels()) {
    std::vector<std::string> rl(g.rows()), cl(n2);
    for (int i = 0; i < g.rows(); ++i) rl[i] = g.row_label(i);
    for (int c = 0; c < n2; ++c) cl[c] = g.col_label(keep[c]);
    out.set_labels(std::move(rl), std::move(cl));
  }
  return out;
}

}  // namespace

Game reduce(const Game& g) {
  std::vector<int> keep;
  std::vector<std::vector<double>> seen;
  for (int j = 0; j < g.cols(); ++j) {
    auto key = column_key(g, j);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      keep.push_back(j);
      seen.push_back(std::move(key));
    }
  }
  return from_columns(g, keep);
}

bool equivalent(const Game& g1, const Game& g2) {
  if (g1.rows() != g2.rows()) {
    throw std::invalid_argument("equivalent: games differ in row count");
  }
  auto canonical = [](const Game& g) {
    const Game r = reduce(g);
    std::vector<std::vector<double>> cols(r.cols());
    for (int j = 0; j < r.cols(); ++j) cols[j] = column_key(r, j);
    std::sort(cols.begin(), cols.end());
    return cols;
  };
  return canonical(g1) == canonical(g2);
}

std::vector<std::pair<int, int>> near_duplicate_columns(const Game& g,
                                                        double tol) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < g.cols(); ++j) {
    for (int l = j + 1; l < g.cols(); ++l) {
      bool exact = true, close = true;
      for (int i = 0; i < g.rows(); ++i) {
        if (g.a(i, j) != g.a(i, l) || g.b(i, j) != g.b(i, l)) exact = false;
        if (std::abs(g.a(i, j) - g.a(i, l)) > tol ||
            std::abs(g.b(i, j) - g.b(i, l)) > tol)
          close = false;
      }
      if (close && !exact) out.emplace_back(j, l);
    }
  }
  return out;
}

}  // namespace frameq
