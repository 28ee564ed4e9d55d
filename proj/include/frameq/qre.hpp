#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frameq/game.hpp"

namespace frameq {

/// Rationality parameter of the logit response (units 1/payoff).
/// lambda = 0 is uniform randomization; large lambda approaches best
/// response.
struct LogitParams {
  double lambda = 0.0;
};

/// Softmax of lambda*u, computed max-shifted so large payoffs cannot
/// overflow. Output sums to 1 within 1e-15.
std::vector<double> logit_response(std::span<const double> u,
                                   LogitParams params);

/// Replaceable stochastic response: anything that maps a payoff vector
/// to choice probabilities, smooth and monotone in the payoffs, and
/// uniform at lambda = 0 (the centroid anchor depends on that). Only
/// the logit rule ships. `jacobian` returns d sigma_i / d u_j row-major;
/// when it is empty the solver skips the Newton polish and relies on
/// damped iteration alone.
struct ResponseMap {
  std::string name;
  std::function<std::vector<double>(std::span<const double>, LogitParams)>
      probabilities;
  std::function<std::vector<double>(std::span<const double>, LogitParams)>
      jacobian;
};

/// The shipped logit rule with its closed-form Jacobian
/// lambda (diag(s) - s s').
const ResponseMap& logit_map();

struct SolveOptions {
  double tol = 1e-10;          // sup-norm residual target
  int max_iter = 10000;
  double damping = 0.5;        // p <- (1-w) p + w sigma(u(p))
  double newton_threshold = 1e-4;  // switch to Newton polish below this
  ResponseMap response;        // empty = logit_map()
};

/// Outcome of a fixed-point solve. `residual` is the sup-norm of
/// p - sigma(u(p)) over both players, recomputed once more outside the
/// iteration loop before returning.
struct FixedPointResult {
  MixedProfile profile;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Find a logit equilibrium at fixed lambda by damped fixed-point
/// iteration with a Newton polish once the residual is small. On
/// non-convergence the best profile found is returned with
/// converged = false.
FixedPointResult solve_fixed_point(const Game& g, LogitParams params,
                                   const MixedProfile& init,
                                   const SolveOptions& opts = {});

/// Step control for branch continuation.
struct StepControl {
  double initial_step_fraction = 1e-3;  // first step = fraction * lambda_max
  double jump_threshold = 0.2;          // sup-norm jump between samples
  double purity_threshold = 0.99;       // stop when both sides this pure
  int easy_iterations = 10;             // corrector iterations to double step
  SolveOptions solve;
};

struct BranchSample {
  double lambda;
  MixedProfile profile;
  double residual;
};

/// Samples along the principal logit-equilibrium branch, ordered by
/// strictly increasing lambda starting at (0, centroid).
struct BranchTrace {
  std::vector<BranchSample> samples;
  bool completed = false;   // false if the corrector gave up early
  std::string failure;      // diagnostic when completed == false

  const BranchSample& terminal() const { return samples.back(); }
};

/// lambda_max with lambda * payoff_range ~= 50, large enough that the
/// branch has effectively selected its limit equilibrium for payoffs on
/// the scale the game was written in.
double default_lambda_max(const Game& g);

/// Trace the principal branch from the lambda = 0 centroid up to
/// lambda_max: predictor = previous profile, corrector =
/// solve_fixed_point, step doubled after easy solves and halved when the
/// corrector struggles or the profile jumps. Stops early once both
/// players' profiles are within the purity threshold of a vertex.
BranchTrace trace_branch(const Game& g, double lambda_max,
                         const StepControl& opts = {});

/// Terminal profile of a trace plus the implied pure-strategy label when
/// every probability is within `purity_threshold` of 0 or 1.
struct LimitResult {
  MixedProfile profile;
  double lambda = 0.0;
  bool decided = false;
  int row_index = -1;   // argmax when decided
  int col_index = -1;
  std::string label;    // "(H,H)" style, or "mixed/undecided at lambda_max"
};

LimitResult limit_equilibrium(const BranchTrace& trace, const Game& g,
                              double purity_threshold = 0.99);

/// CSV with header lambda,pR_1,...,pR_m,pC_1,...,pC_n,residual and one
/// row per accepted sample; numbers with 17 significant digits.
void write_branch_csv(std::ostream& os, const BranchTrace& trace);

}  // namespace frameq
