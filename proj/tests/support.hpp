// Shared helpers for the test suites: deterministic random game
// generators and simple column surgery used by the property tests.
#pragma once

#include <random>
#include <vector>

#include "frameq/game.hpp"

namespace testsupport {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline frameq::Game random_game(std::mt19937_64& rng, int max_rows = 4,
                                int max_cols = 5, double scale = 10.0) {
  const int m = uniform_int(rng, 1, max_rows);
  const int n = uniform_int(rng, 1, max_cols);
  std::vector<double> a(static_cast<size_t>(m) * n), b(a.size());
  for (auto& v : a) v = uniform(rng, -scale, scale);
  for (auto& v : b) v = uniform(rng, -scale, scale);
  return frameq::Game(m, n, std::move(a), std::move(b));
}

// Copy random columns over other columns so exact duplicates exist.
inline frameq::Game inject_duplicates(const frameq::Game& g,
                                      std::mt19937_64& rng) {
  std::vector<double> a(g.row_payoffs().begin(), g.row_payoffs().end());
  std::vector<double> b(g.col_payoffs().begin(), g.col_payoffs().end());
  const int copies = uniform_int(rng, 0, g.cols() - 1);
  for (int c = 0; c < copies; ++c) {
    const int from = uniform_int(rng, 0, g.cols() - 1);
    const int to = uniform_int(rng, 0, g.cols() - 1);
    for (int i = 0; i < g.rows(); ++i) {
      a[static_cast<size_t>(i) * g.cols() + to] =
          a[static_cast<size_t>(i) * g.cols() + from];
      b[static_cast<size_t>(i) * g.cols() + to] =
          b[static_cast<size_t>(i) * g.cols() + from];
    }
  }
  return frameq::Game(g.rows(), g.cols(), std::move(a), std::move(b));
}

inline frameq::Game permute_columns(const frameq::Game& g,
                                    std::mt19937_64& rng) {
  std::vector<int> perm(g.cols());
  for (int j = 0; j < g.cols(); ++j) perm[j] = j;
  for (int j = g.cols() - 1; j > 0; --j) {
    std::swap(perm[j], perm[uniform_int(rng, 0, j)]);
  }
  std::vector<double> a(g.row_payoffs().size()), b(a.size());
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      a[static_cast<size_t>(i) * g.cols() + j] = g.a(i, perm[j]);
      b[static_cast<size_t>(i) * g.cols() + j] = g.b(i, perm[j]);
    }
  }
  return frameq::Game(g.rows(), g.cols(), std::move(a), std::move(b));
}

}  // namespace testsupport
