// pcx: pairwise-comparison toolkit command line.

#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "pcx/error.hpp"

namespace {

using pcx::cli::Streams;

// Values from --config apply unless the same setting was given as a flag.
void apply_config_file(const std::string& path, pcx::cli::SimulateArgs& args,
                       const CLI::App& sim) {
  std::ifstream in(path);
  if (!in) throw pcx::Error(pcx::ErrorCode::kInvalidConfig, "cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw pcx::Error(pcx::ErrorCode::kInvalidConfig, std::string("bad config: ") + e.what());
  }
  auto& c = args.config;
  const auto unset = [&](const char* flag) { return sim.count(flag) == 0; };
  try {
    if (j.contains("scale") && unset("--scale")) args.scale_name = j["scale"].get<std::string>();
    if (j.contains("n") && unset("--n")) c.n = j["n"].get<std::size_t>();
    if (j.contains("trials") && unset("--trials")) c.trials = j["trials"].get<std::size_t>();
    if (j.contains("delta") && unset("--delta")) c.perturb_delta = j["delta"].get<double>();
    if (j.contains("snap") && unset("--snap") && unset("--no-snap")) c.snap = j["snap"].get<bool>();
    if (j.contains("seed") && unset("--seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("starts") && unset("--starts")) c.starts = j["starts"].get<int>();
    if (j.contains("threads") && unset("--threads")) c.threads = j["threads"].get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw pcx::Error(pcx::ErrorCode::kInvalidConfig, std::string("bad config: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcx - priority weights, inconsistency and convexity checks for pairwise comparisons"};
  app.require_subcommand(1);
  Streams io{std::cout, std::cerr};
  int rc = 0;

  pcx::cli::SolveArgs solve;
  solve.opts.start_seed = pcx::cli::default_seed();
  int solve_starts = 0;
  auto* s = app.add_subcommand("solve", "Derive priority weights");
  s->add_option("input", solve.input, "Matrix file (CSV or JSON)")->required();
  s->add_option("--method", solve.method, "lsm|wlsm|llsm|evm|all")
      ->check(CLI::IsMember({"lsm", "wlsm", "llsm", "evm", "all"}));
  s->add_option("--starts", solve_starts, "LSM starts (default 1 if certified, else 20)")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", solve.opts.start_seed, "Seed for LSM start points");
  s->add_option("--grad-tol", solve.opts.grad_tol, "Projected-gradient sup-norm tolerance")
      ->check(CLI::PositiveNumber);
  s->add_option("--max-iters", solve.opts.max_iters, "Newton iterations per start")
      ->check(CLI::PositiveNumber);
  s->add_option("--distinct-tol", solve.opts.distinct_tol, "Distance separating minimizers")
      ->check(CLI::PositiveNumber);
  s->add_flag("--json", solve.json, "Machine-readable output");
  s->callback([&] {
    if (solve_starts > 0) solve.opts.starts = solve_starts;
    rc = pcx::cli::cmd_solve(solve, io);
  });

  pcx::cli::InconsistencyArgs inc;
  auto* i = app.add_subcommand("inconsistency", "Triad inconsistency indicator");
  i->add_option("input", inc.input, "Matrix file (CSV or JSON)")->required();
  i->add_flag("--all-triads", inc.all_triads, "List every triad");
  i->add_option("--threshold", inc.threshold, "Acceptability threshold");
  i->add_flag("--json", inc.json, "Machine-readable output");
  i->callback([&] { rc = pcx::cli::cmd_inconsistency(inc, io); });

  pcx::cli::AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Convexity certification against a0");
  a->add_option("input", an.input, "Matrix file (CSV or JSON)")->required();
  a->add_flag("--curves", an.curves, "Emit the (w, phi, psi) table as CSV");
  a->add_option("--curve-points", an.curve_points, "Rows in the curve table")
      ->check(CLI::Range(2, 1000000));
  a->add_option("--w-min", an.w_min, "Smallest w in the curve table")->check(CLI::PositiveNumber);
  a->add_option("--w-max", an.w_max, "Largest w in the curve table")->check(CLI::PositiveNumber);
  a->add_flag("--json", an.json, "Machine-readable output");
  a->callback([&] { rc = pcx::cli::cmd_analyze(an, io); });

  pcx::cli::SimulateArgs sim;
  sim.config.seed = pcx::cli::default_seed();
  std::string config_file;
  bool no_snap = false;
  auto* m = app.add_subcommand("simulate", "Monte-Carlo comparison of scales");
  m->add_option("--scale", sim.scale_name, "1-3|1-3-half|1-5|1-9");
  m->add_option("--n", sim.config.n, "Matrix size");
  m->add_option("--trials", sim.config.trials, "Number of trials");
  m->add_option("--delta", sim.config.perturb_delta, "Log-space perturbation half-width");
  m->add_flag("--snap", sim.config.snap, "Snap entries to the scale (default)");
  m->add_flag("--no-snap", no_snap, "Keep perturbed entries off-scale");
  m->add_option("--seed", sim.config.seed, "Seed (default: PCX_SEED or 0)");
  m->add_option("--starts", sim.config.starts, "LSM starts per trial");
  m->add_option("--threads", sim.config.threads, "Worker threads");
  m->add_option("--out", sim.out_prefix, "Output prefix for .csv and .json");
  m->add_option("--config", config_file, "JSON config file");
  m->add_flag("--json", sim.json, "Print the aggregate JSON");
  m->callback([&] {
    try {
      if (!config_file.empty()) apply_config_file(config_file, sim, *m);
    } catch (const pcx::Error& e) {
      std::cerr << "error: " << pcx::to_string(e.code()) << ": " << e.what() << '\n';
      rc = pcx::cli::kExitInput;
      return;
    }
    if (no_snap) sim.config.snap = false;
    rc = pcx::cli::cmd_simulate(sim, io);
  });

  pcx::cli::VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Cross-check the LSM solver against the grid oracle");
  v->add_option("input", ver.input, "Matrix file (CSV or JSON), n <= 4")->required();
  v->add_option("--points", ver.points, "Grid points per axis (odd)");
  v->add_option("--rounds", ver.rounds, "Refinement rounds");
  v->add_option("--tolerance", ver.tolerance, "Agreement tolerance on the objective");
  v->add_flag("--json", ver.json, "Machine-readable output");
  v->callback([&] { rc = pcx::cli::cmd_verify(ver, io); });

  pcx::cli::ServeArgs srv;
  auto* sv = app.add_subcommand("serve", "Run the elicitation HTTP service");
  sv->add_option("--port", srv.port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  sv->add_option("--bind", srv.bind, "Bind address");
  sv->add_option("--db", srv.db, "SQLite session store");
  sv->callback([&] { rc = pcx::cli::cmd_serve(srv, io); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcx::cli::kExitInput;
  }
  return rc;
}
