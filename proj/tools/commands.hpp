#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "pcx/scales.hpp"
#include "pcx/solvers.hpp"

namespace pcx::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

struct SolveArgs {
  std::string input;
  std::string method = "all";
  SolveOptions opts;
  bool json = false;
};

struct InconsistencyArgs {
  std::string input;
  bool all_triads = false;
  double threshold = kAcceptableInconsistency;
  bool json = false;
};

struct AnalyzeArgs {
  std::string input;
  bool curves = false;
  std::size_t curve_points = 4001;
  double w_min = 1e-2;
  double w_max = 1e2;
  bool json = false;
};

struct SimulateArgs {
  scales::MonteCarloConfig config;
  std::string scale_name = "1-3";
  std::optional<std::string> config_file;
  std::string out_prefix = "pcx_simulate";
  bool json = false;
};

struct VerifyArgs {
  std::string input;
  std::optional<int> points;
  std::optional<int> rounds;
  double tolerance = 1e-3;
  bool json = false;
};

struct ServeArgs {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string db = "pcx_sessions.db";
};

/// Default seed: PCX_SEED from the environment when set, else 0.
std::uint64_t default_seed();

int cmd_solve(const SolveArgs& args, Streams io);
int cmd_inconsistency(const InconsistencyArgs& args, Streams io);
int cmd_analyze(const AnalyzeArgs& args, Streams io);
int cmd_simulate(SimulateArgs args, Streams io);
int cmd_verify(const VerifyArgs& args, Streams io);
int cmd_serve(const ServeArgs& args, Streams io);

}  // namespace pcx::cli
