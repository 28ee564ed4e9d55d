#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "frameq/game.hpp"
#include "support.hpp"

using namespace frameq;

TEST_CASE("game construction validates shape and finiteness") {
  CHECK_NOTHROW(Game(2, 2, {1, 0, 0, 1}, {1, 0, 0, 1}));
  CHECK_THROWS_AS(Game(2, 2, {1, 0, 0}, {1, 0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Game(0, 2, {}, {}), std::invalid_argument);
  const double nan = std::nan("");
  CHECK_THROWS_AS(Game(1, 2, {1, nan}, {0, 0}), std::invalid_argument);
}

TEST_CASE("load_game accepts the documented shape") {
  const Game g = load_game(R"({"rows":2,"cols":2,
      "row_payoffs":[[1,0],[0,1]],"col_payoffs":[[1,0],[0,1]]})");
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 2);
  CHECK(g.a(0, 0) == 1.0);
}

TEST_CASE("load_game rejects ragged rows") {
  CHECK_THROWS_AS(load_game(R"({"rows":2,"cols":3,
      "row_payoffs":[[1,2],[1,2,3]],"col_payoffs":[[1,2,3],[1,2,3]]})"),
                  ParseError);
  CHECK_THROWS_AS(load_game("not json"), ParseError);
  CHECK_THROWS_AS(load_game(R"({"rows":1,"cols":1})"), ParseError);
}

TEST_CASE("load_game rejects entries that overflow a double") {
  CHECK_THROWS_AS(load_game(R"({"rows":1,"cols":1,
      "row_payoffs":[[1e999]],"col_payoffs":[[0]]})"),
                  ParseError);
}

TEST_CASE("save/load round trip is value exact") {
  const Game g = gen_coordination(160.0, 1);
  const Game back = load_game(save_game(g));
  CHECK(back == g);
  CHECK(back.row_label(1) == "H");
  // a second round trip is byte stable
  CHECK(save_game(back) == save_game(g));
}

TEST_CASE("expected payoffs against a uniform opponent") {
  const Game g = gen_coordination(160.0, 1);
  const std::vector<double> third(3, 1.0 / 3.0);
  const auto u = expected_payoffs(g, third, PlayerSide::Row);
  CHECK(u[0] == doctest::Approx((90.0 + 0.0 + 160.0) / 3.0).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(60.0).epsilon(1e-14));
}

TEST_CASE("expected payoffs against a pure opponent pick a column") {
  std::mt19937_64 rng(11);
  const Game g = testsupport::random_game(rng);
  for (int j = 0; j < g.cols(); ++j) {
    std::vector<double> e(g.cols(), 0.0);
    e[j] = 1.0;
    const auto u = expected_payoffs(g, e, PlayerSide::Row);
    for (int i = 0; i < g.rows(); ++i) CHECK(u[i] == g.a(i, j));
  }
}

TEST_CASE("expected payoffs of a zero game vanish") {
  const Game g(2, 2, {0, 0, 0, 0}, {0, 0, 0, 0});
  const std::vector<double> q = {0.25, 0.75};
  for (double u : expected_payoffs(g, q, PlayerSide::Row)) CHECK(u == 0.0);
}

TEST_CASE("expected payoffs reject a wrong-length opponent") {
  const Game g = gen_coordination(60.0, 1);
  const std::vector<double> bad = {0.5, 0.5};
  CHECK_THROWS_AS(expected_payoffs(g, bad, PlayerSide::Row),
                  std::invalid_argument);
}

TEST_CASE("expected payoffs are linear in the opponent") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = testsupport::random_game(rng);
    std::vector<double> q1(g.cols()), q2(g.cols());
    double s1 = 0, s2 = 0;
    for (auto& v : q1) { v = testsupport::uniform(rng, 0, 1); s1 += v; }
    for (auto& v : q2) { v = testsupport::uniform(rng, 0, 1); s2 += v; }
    for (auto& v : q1) v /= s1;
    for (auto& v : q2) v /= s2;
    const double alpha = testsupport::uniform(rng, 0, 1);
    std::vector<double> mix(g.cols());
    for (int j = 0; j < g.cols(); ++j) {
      mix[j] = alpha * q1[j] + (1 - alpha) * q2[j];
    }
    const auto u1 = expected_payoffs(g, q1, PlayerSide::Row);
    const auto u2 = expected_payoffs(g, q2, PlayerSide::Row);
    const auto um = expected_payoffs(g, mix, PlayerSide::Row);
    for (int i = 0; i < g.rows(); ++i) {
      CHECK(um[i] ==
            doctest::Approx(alpha * u1[i] + (1 - alpha) * u2[i]).epsilon(1e-12));
    }
  }
}

// grid oracle: search mixtures of the three claims on a coarse simplex
// grid for one that strictly beats the target row against every column
static bool grid_dominates(const Game& g, int target) {
  const int steps = 100;
  for (int w0 = 0; w0 <= steps; ++w0) {
    for (int w1 = 0; w1 + w0 <= steps; ++w1) {
      const double x0 = w0 / double(steps), x1 = w1 / double(steps);
      const double x2 = 1.0 - x0 - x1;
      bool all = true;
      for (int j = 0; j < g.cols() && all; ++j) {
        const double mixed =
            x0 * g.a(0, j) + x1 * g.a(1, j) + x2 * g.a(2, j);
        all = mixed > g.a(target, j) + 1e-9;
      }
      if (all) return true;
    }
  }
  return false;
}

TEST_CASE("highest claim of a short travelers game is dominated") {
  const Game g = gen_travelers(180, 182, 5.0);
  REQUIRE(g.rows() == 3);
  CHECK(grid_dominates(g, 2));  // oracle agrees before we trust the LP
  const auto dom = strictly_dominated(g, PlayerSide::Row, DominanceMode::Mixed);
  CHECK(std::count(dom.begin(), dom.end(), 2) == 1);
  CHECK(std::count(dom.begin(), dom.end(), 0) == 0);
}

TEST_CASE("a lone strategy is never dominated") {
  const Game g(1, 3, {1, 2, 3}, {0, 0, 0});
  CHECK(strictly_dominated(g, PlayerSide::Row, DominanceMode::Pure).empty());
  CHECK(strictly_dominated(g, PlayerSide::Row, DominanceMode::Mixed).empty());
}

TEST_CASE("outside option survives pure dominance for the column player") {
  const Game g = gen_coordination(160.0, 1);
  // oracle: exhaustive pairwise comparison of the three columns
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      if (j == k) continue;
      bool k_beats_j = true;
      for (int i = 0; i < 2; ++i) {
        if (!(g.b(i, k) > g.b(i, j))) k_beats_j = false;
      }
      CHECK_FALSE(k_beats_j);
    }
  }
  CHECK(strictly_dominated(g, PlayerSide::Column, DominanceMode::Pure).empty());
}

TEST_CASE("outside option falls to a mixture though no pure strategy") {
  // mixing L and H (e.g. 0.6/0.4) pays the column player (54, 72),
  // strictly above the safe (40, 40), while neither pure column does
  const Game g = gen_coordination(160.0, 1);
  CHECK(strictly_dominated(g, PlayerSide::Column, DominanceMode::Pure).empty());
  const auto mixed =
      strictly_dominated(g, PlayerSide::Column, DominanceMode::Mixed);
  REQUIRE(mixed.size() == 1);
  CHECK(mixed[0] == 2);
}

TEST_CASE("pure dominance implies mixed dominance") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Game g = testsupport::random_game(rng);
    for (PlayerSide side : {PlayerSide::Row, PlayerSide::Column}) {
      const auto pure = strictly_dominated(g, side, DominanceMode::Pure);
      const auto mixed = strictly_dominated(g, side, DominanceMode::Mixed);
      for (int i : pure) {
        CHECK(std::count(mixed.begin(), mixed.end(), i) == 1);
      }
    }
  }
}

TEST_CASE("coordination generator reproduces the payoff table") {
  const Game g = gen_coordination(160.0, 1);
  REQUIRE(g.rows() == 2);
  REQUIRE(g.cols() == 3);
  CHECK(g.a(0, 0) == 90.0);  CHECK(g.b(0, 0) == 90.0);
  CHECK(g.a(1, 1) == 180.0); CHECK(g.b(1, 1) == 180.0);
  CHECK(g.a(0, 1) == 0.0);   CHECK(g.a(1, 0) == 0.0);
  CHECK(g.a(0, 2) == 160.0); CHECK(g.b(0, 2) == 40.0);
  CHECK(g.a(1, 2) == 0.0);   CHECK(g.b(1, 2) == 40.0);

  const Game g2 = gen_coordination(60.0, 2);
  REQUIRE(g2.cols() == 4);
  CHECK(g2.a(0, 2) == 60.0);
  CHECK(g2.a(0, 3) == 60.0);
  CHECK(g2.b(1, 3) == 40.0);

  const Game bare = gen_coordination(0.0, 0);
  CHECK(bare.cols() == 2);
}

TEST_CASE("eps variant differs only in one entry") {
  CHECK(gen_coordination_eps(60.0, 0.0) == gen_coordination(60.0, 2));
  const Game g = gen_coordination_eps(60.0, 1.0);
  CHECK(g.a(0, 2) == 60.0);
  CHECK(g.a(0, 3) == 61.0);
  CHECK(g.a(1, 2) == g.a(1, 3));
  CHECK(g.b(0, 2) == g.b(0, 3));
  CHECK(reduce(g).cols() == 4);  // all columns distinct
}

TEST_CASE("travelers generator") {
  const Game g = gen_travelers(180, 300, 5.0);
  REQUIRE(g.rows() == 121);
  REQUIRE(g.cols() == 121);
  for (int c : {0, 60, 120}) {
    CHECK(g.a(c, c) == 180.0 + c);
    CHECK(g.b(c, c) == 180.0 + c);
  }
  CHECK(g.a(0, 120) == 185.0);  // claims (180, 300): low claimant rewarded
  CHECK(g.b(0, 120) == 175.0);
  CHECK(g.row_label(0) == "180");

  const Game tiny = gen_travelers(200, 200, 5.0);
  CHECK(tiny.rows() == 1);
  CHECK(tiny.a(0, 0) == 200.0);
  CHECK(tiny.b(0, 0) == 200.0);

  CHECK_THROWS_AS(gen_travelers(300, 180, 5.0), std::invalid_argument);
}

TEST_CASE("travelers has the lowest claim as its unique pure equilibrium") {
  const Game g = gen_travelers(180, 300, 5.0);
  const auto eq = pure_nash(g);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0] == std::pair<int, int>(0, 0));
}

TEST_CASE("coordination pure equilibria exclude the outside option") {
  const auto eq = pure_nash(gen_coordination(160.0, 1));
  REQUIRE(eq.size() == 2);
  CHECK(eq[0] == std::pair<int, int>(0, 0));
  CHECK(eq[1] == std::pair<int, int>(1, 1));
}

TEST_CASE("duplicate_column inserts exact copies") {
  const Game base = gen_coordination(60.0, 1);
  CHECK(duplicate_column(base, 2, 1) == gen_coordination(60.0, 2));
  CHECK_THROWS_AS(duplicate_column(base, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(duplicate_column(base, 3, 1), std::out_of_range);
  CHECK(duplicate_column(base, 1, 3).cols() == base.cols() + 3);
}

TEST_CASE("reduce removes copies of earlier columns") {
  CHECK(reduce(gen_coordination(60.0, 2)) == gen_coordination(60.0, 1));
  const Game distinct = gen_coordination(60.0, 1);
  CHECK(reduce(distinct) == distinct);
}

TEST_CASE("reduce is idempotent on games with injected duplicates") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Game g =
        testsupport::inject_duplicates(testsupport::random_game(rng), rng);
    const Game r = reduce(g);
    CHECK(reduce(r) == r);
    CHECK(equivalent(g, r));
  }
}

TEST_CASE("equivalence spots duplicated outside options") {
  CHECK(equivalent(gen_coordination(60.0, 1), gen_coordination(60.0, 2)));
  const Game g = gen_coordination(60.0, 1);
  CHECK(equivalent(g, g));
  CHECK_FALSE(equivalent(gen_coordination(60.0, 1),
                         gen_coordination_eps(60.0, 1.0)));
  const Game one_row(1, 2, {1, 2}, {3, 4});
  CHECK_THROWS_AS(equivalent(g, one_row), std::invalid_argument);
}

TEST_CASE("equivalence is an equivalence relation") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const Game g = testsupport::random_game(rng, 3, 4);
    const Game d1 = testsupport::permute_columns(
        testsupport::inject_duplicates(g, rng), rng);
    const Game d2 = testsupport::permute_columns(
        duplicate_column(g, testsupport::uniform_int(rng, 0, g.cols() - 1),
                         1 + testsupport::uniform_int(rng, 0, 2)),
        rng);
    CHECK(equivalent(g, g));            // reflexive
    CHECK(equivalent(g, d2));           // duplication preserves the class
    CHECK(equivalent(d2, g));           // symmetric
    if (equivalent(g, d1) && equivalent(d1, d2)) {
      CHECK(equivalent(g, d2));         // transitive
    }
  }
}

TEST_CASE("duplicating a column never changes the reduced game") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    const Game g = testsupport::random_game(rng);
    const int j = testsupport::uniform_int(rng, 0, g.cols() - 1);
    const int k = 1 + testsupport::uniform_int(rng, 0, 3);
    CHECK(reduce(duplicate_column(g, j, k)) == reduce(g));
  }
}

TEST_CASE("near-duplicate report is diagnostic only") {
  const Game g = gen_coordination_eps(60.0, 1e-7);
  const auto close = near_duplicate_columns(g, 1e-6);
  REQUIRE(close.size() == 1);
  CHECK(close[0] == std::pair<int, int>(2, 3));
  // exact duplicates are reduce()'s business, not a near miss
  CHECK(near_duplicate_columns(gen_coordination(60.0, 2), 1e-6).empty());
}
