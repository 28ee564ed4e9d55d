// frameq command line: generate games, trace logit branches, assess
// strategies, run the imitation-mutation simulator, and probe framing
// sensitivity. Exit codes: 0 ok, 1 usage, 2 input error, 3 numerical
// failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "frameq/evolution.hpp"
#include "frameq/framing.hpp"
#include "frameq/game.hpp"
#include "frameq/qre.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

frameq::Game load_game_file(const std::string& path) {
  return frameq::load_game(read_file(path));
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json manifest(const std::string& command,
                        const nlohmann::json& params,
                        const std::vector<std::string>& input_paths) {
  nlohmann::json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["parameters"] = params;
  for (const auto& p : input_paths) {
    m["inputs"].push_back({{"path", p}, {"digest_fnv1a64", fnv1a64_hex(read_file(p))}});
  }
  return m;
}

std::vector<double> side_values(const frameq::MixedProfile& prof,
                                frameq::PlayerSide side) {
  return side == frameq::PlayerSide::Row ? prof.row : prof.col;
}

frameq::Assessment run_assessment(const frameq::Game& g,
                                  const std::string& method,
                                  frameq::PlayerSide side, double lambda,
                                  double lambda_max) {
  using frameq::PlayerSide;
  if (method == "phi") return frameq::phi_assessment(g, side);
  if (method == "qre-at-lambda") {
    frameq::StepControl opts;
    opts.purity_threshold = 1.0;
    const auto trace = frameq::trace_branch(g, lambda, opts);
    if (!trace.completed) throw std::runtime_error(trace.failure);
    return {side_values(trace.terminal().profile, side), side};
  }
  if (method == "qre-terminal") {
    const double lmax =
        lambda_max > 0.0 ? lambda_max : frameq::default_lambda_max(g);
    const auto trace = frameq::trace_branch(g, lmax);
    if (!trace.completed) throw std::runtime_error(trace.failure);
    return {side_values(trace.terminal().profile, side), side};
  }
  throw InputError("unknown method: " + method);
}

std::string assessment_json(const frameq::Game& g,
                            const frameq::Assessment& a,
                            const std::string& method) {
  nlohmann::json j;
  j["method"] = method;
  j["side"] = a.side == frameq::PlayerSide::Row ? "row" : "col";
  for (size_t i = 0; i < a.values.size(); ++i) {
    j["labels"].push_back(a.side == frameq::PlayerSide::Row
                              ? g.row_label(static_cast<int>(i))
                              : g.col_label(static_cast<int>(i)));
  }
  j["assessment"] = a.values;
  j["favored"] = frameq::selection_favors(a);
  const auto rank = frameq::abundance_order(a);
  nlohmann::json order = nlohmann::json::array();
  for (const auto& e : rank.entries) {
    order.push_back({{"index", e.index},
                     {"value", e.value},
                     {"tied_with_previous", e.tied_with_previous}});
  }
  j["ordering"] = order;
  j["has_ties"] = rank.has_ties;
  return j.dump(2) + "\n";
}

frameq::Assessor make_assessor(const std::string& name, double lambda,
                               double lambda_max) {
  if (name == "phi") return frameq::Assessor::phi();
  if (name == "qre-terminal") return frameq::Assessor::qre_terminal(lambda_max);
  if (name == "qre-at-lambda") return frameq::Assessor::qre_at_lambda(lambda);
  if (name == "nash-argmax") return frameq::Assessor::nash_argmax();
  throw InputError("unknown assessor: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frameq: logit equilibria, evolutionary assessments and "
               "framing effects for two-player normal-form games"};
  app.require_subcommand(1);

  // --- gen -----------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a game file");
  std::string gen_kind, gen_out;
  double gen_x = 160.0, gen_eps = 1.0, gen_reward = 5.0;
  int gen_outside = 1, gen_lo = 180, gen_hi = 300;
  gen->add_option("--kind", gen_kind,
                  "coordination | coordination-eps | travelers")
      ->required();
  gen->add_option("--x", gen_x, "outside-option payoff to row L");
  gen->add_option("--n-outside", gen_outside, "number of outside columns");
  gen->add_option("--eps", gen_eps, "perturbation of the second outside column");
  gen->add_option("--lo", gen_lo, "lowest claim");
  gen->add_option("--hi", gen_hi, "highest claim");
  gen->add_option("--reward", gen_reward, "reward/penalty for undercutting");
  gen->add_option("--out", gen_out, "output game file")->required();

  // --- qre-trace -----------------------------------------------------
  auto* qre = app.add_subcommand("qre-trace",
                                 "trace the principal logit branch");
  std::string qre_game, qre_out;
  double qre_lambda_max = -1.0;
  qre->add_option("--game", qre_game, "game file")->required();
  qre->add_option("--lambda-max", qre_lambda_max,
                  "end of the lambda range (default: 50/payoff range)");
  qre->add_option("--out", qre_out, "branch CSV output");

  // --- assess --------------------------------------------------------
  auto* assess = app.add_subcommand("assess", "score one player's strategies");
  std::string as_game, as_method = "phi", as_side = "row", as_out;
  double as_lambda = 0.0, as_lambda_max = 0.0;
  assess->add_option("--game", as_game, "game file")->required();
  assess->add_option("--method", as_method,
                     "phi | qre-at-lambda | qre-terminal");
  assess->add_option("--side", as_side, "row | col");
  assess->add_option("--lambda", as_lambda, "lambda for qre-at-lambda");
  assess->add_option("--lambda-max", as_lambda_max,
                     "lambda range for qre-terminal (0 = auto)");
  assess->add_option("--out", as_out, "also write the JSON here");

  // --- moran ---------------------------------------------------------
  auto* moran = app.add_subcommand("moran",
                                   "run the imitation-mutation simulator");
  std::string mo_game, mo_out, mo_traj, mo_pop = "40,40";
  frameq::MoranConfig mo_cfg;
  std::optional<std::uint64_t> mo_seed;
  moran->add_option("--game", mo_game, "game file")->required();
  moran->add_option("--pop", mo_pop, "population sizes n_row,n_col");
  moran->add_option("--delta", mo_cfg.delta, "selection strength");
  moran->add_option("--mutation", mo_cfg.mutation, "mutation probability");
  moran->add_option("--steps", mo_cfg.steps, "total update steps");
  moran->add_option("--burn-in", mo_cfg.burn_in, "steps discarded up front");
  moran->add_option("--batches", mo_cfg.batches, "batch-means blocks");
  moran->add_option("--seed", mo_seed, "RNG seed (omit for a random one)");
  moran->add_option("--thin", mo_cfg.thin, "trajectory sampling interval");
  moran->add_option("--out", mo_out, "summary JSON output");
  moran->add_option("--traj", mo_traj, "thinned trajectory CSV output");

  // --- frame ---------------------------------------------------------
  auto* frame = app.add_subcommand("frame",
                                   "assess equivalent representations");
  std::string fr_game, fr_method = "phi", fr_out;
  int fr_max_dups = 1;
  double fr_lambda = 0.0, fr_lambda_max = 0.0;
  frame->add_option("--game", fr_game, "game file")->required();
  frame->add_option("--method", fr_method,
                    "phi | qre-terminal | qre-at-lambda | nash-argmax");
  frame->add_option("--max-dups", fr_max_dups, "copies per column, at most");
  frame->add_option("--lambda", fr_lambda, "lambda for qre-at-lambda");
  frame->add_option("--lambda-max", fr_lambda_max,
                    "lambda range for qre-terminal (0 = auto)");
  frame->add_option("--out", fr_out, "report JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      frameq::Game g = [&] {
        if (gen_kind == "coordination")
          return frameq::gen_coordination(gen_x, gen_outside);
        if (gen_kind == "coordination-eps")
          return frameq::gen_coordination_eps(gen_x, gen_eps);
        if (gen_kind == "travelers")
          return frameq::gen_travelers(gen_lo, gen_hi, gen_reward);
        throw InputError("unknown kind: " + gen_kind);
      }();
      write_file(gen_out, frameq::save_game(g));
      std::cout << "wrote " << g.rows() << "x" << g.cols() << " game to "
                << gen_out << "\n";
      return kExitOk;
    }

    if (qre->parsed()) {
      const frameq::Game g = load_game_file(qre_game);
      const double lmax = qre_lambda_max >= 0.0
                              ? qre_lambda_max
                              : frameq::default_lambda_max(g);
      const auto trace = frameq::trace_branch(g, lmax);
      if (!qre_out.empty()) {
        std::ostringstream os;
        frameq::write_branch_csv(os, trace);
        write_file(qre_out, os.str());
      }
      if (!trace.completed) {
        std::cerr << "branch tracing failed: " << trace.failure << "\n";
        return kExitNumerical;
      }
      const auto limit = frameq::limit_equilibrium(trace, g);
      std::cout << "samples: " << trace.samples.size() << "\n";
      std::cout << "terminal lambda: " << limit.lambda << "\n";
      std::cout << "terminal row profile:";
      for (double v : limit.profile.row) std::cout << " " << v;
      std::cout << "\nterminal col profile:";
      for (double v : limit.profile.col) std::cout << " " << v;
      std::cout << "\nnash limit: " << limit.label << "\n";
      return kExitOk;
    }

    if (assess->parsed()) {
      if (as_method == "qre-at-lambda" && !(as_lambda > 0.0)) {
        std::cerr << "assess: qre-at-lambda needs --lambda > 0\n";
        return kExitUsage;
      }
      const frameq::Game g = load_game_file(as_game);
      const auto side = as_side == "col" ? frameq::PlayerSide::Column
                                         : frameq::PlayerSide::Row;
      const auto a = run_assessment(g, as_method, side, as_lambda,
                                    as_lambda_max);
      const std::string json = assessment_json(g, a, as_method);
      std::cout << json;
      if (!as_out.empty()) write_file(as_out, json);
      return kExitOk;
    }

    if (moran->parsed()) {
      if (std::sscanf(mo_pop.c_str(), "%d,%d", &mo_cfg.n_row, &mo_cfg.n_col) !=
          2) {
        std::cerr << "moran: --pop expects n_row,n_col\n";
        return kExitUsage;
      }
      if (mo_seed) {
        mo_cfg.seed = *mo_seed;
      } else {
        mo_cfg.seed = std::random_device{}();
        std::cout << "seed (generated): " << mo_cfg.seed << "\n";
      }
      const frameq::Game g = load_game_file(mo_game);
      nlohmann::json params = {
          {"pop", {mo_cfg.n_row, mo_cfg.n_col}}, {"delta", mo_cfg.delta},
          {"mutation", mo_cfg.mutation},         {"steps", mo_cfg.steps},
          {"burn_in", mo_cfg.burn_in},           {"batches", mo_cfg.batches},
          {"seed", mo_cfg.seed},                 {"thin", mo_cfg.thin}};
      std::cout << manifest("moran", params, {mo_game}).dump(2) << "\n";

      std::ofstream traj_file;
      frameq::TrajectoryFn traj;
      if (!mo_traj.empty()) {
        traj_file.open(mo_traj, std::ios::binary);
        if (!traj_file) throw InputError("cannot write " + mo_traj);
        traj = frameq::csv_trajectory_writer(traj_file, g);
      }
      const auto est = frameq::moran_simulate(g, mo_cfg, traj);
      const std::string summary = frameq::moran_summary_json(g, mo_cfg, est);
      std::cout << summary;
      if (!mo_out.empty()) write_file(mo_out, summary);
      return kExitOk;
    }

    if (frame->parsed()) {
      if (fr_method == "qre-at-lambda" && !(fr_lambda > 0.0)) {
        std::cerr << "frame: qre-at-lambda needs --lambda > 0\n";
        return kExitUsage;
      }
      const frameq::Game g = load_game_file(fr_game);
      const auto assessor = make_assessor(fr_method, fr_lambda, fr_lambda_max);
      const auto report = frameq::frame_sensitivity(assessor, g, fr_max_dups);
      std::cout << "assessor: " << assessor.name << "\n";
      std::cout << "representations: " << report.representations.size()
                << "\n";
      for (size_t r = 0; r < report.representations.size(); ++r) {
        std::cout << "  [" << r << "] cols="
                  << report.representations[r].cols() << " assessment:";
        for (double v : report.assessments[r].values) std::cout << " " << v;
        std::cout << "\n";
      }
      std::cout << "max_discrepancy: " << report.max_discrepancy << "\n";
      std::cout << "order_flips:";
      for (const auto& [i, k] : report.order_flips) {
        std::cout << " (" << report.base.row_label(i) << ","
                  << report.base.row_label(k) << ")";
      }
      if (report.order_flips.empty()) std::cout << " none";
      std::cout << "\ninconsistent=" << (report.inconsistent ? "true" : "false")
                << "\n";
      const std::string json = frameq::framing_report_json(report);
      if (!fr_out.empty()) write_file(fr_out, json);
      return kExitOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const frameq::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
