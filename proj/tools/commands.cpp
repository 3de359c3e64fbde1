#include "commands.hpp"

#include <signal.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pcx/convexity.hpp"
#include "pcx/error.hpp"
#include "pcx/io.hpp"
#include "pcx/oracle.hpp"
#include "pcx/pcm.hpp"
#include "pcx/service.hpp"

namespace pcx::cli {

namespace {

using nlohmann::json;

std::string num(double v, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string label(const PCMatrix& a, std::size_t i) {
  return a.labels().empty() ? "A" + std::to_string(i + 1) : a.labels()[i];
}

int report_error(const Error& e, Streams io) {
  io.err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
  return kExitInput;
}

void print_weights(std::ostream& os, const PCMatrix& a, const SolveResult& r) {
  const WeightVector prod = r.product_one();
  os << "  alternative      sum=1            product=1\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-14s %-16s %s\n", label(a, i).c_str(),
                  num(r.weights[i], 12).c_str(), num(prod[i], 12).c_str());
    os << line;
  }
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PCX_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return 0;
}

int cmd_solve(const SolveArgs& args, Streams io) {
  try {
    const PCMatrix a = io::load_matrix(args.input);
    const auto cert = convexity::certify(a);

    std::vector<SolveResult> results;
    const auto want = [&](const char* m) { return args.method == "all" || args.method == m; };
    if (want("lsm")) results.push_back(solve_lsm(a, args.opts));
    if (want("wlsm")) results.push_back(solve_wlsm(a));
    if (want("llsm")) results.push_back(solve_llsm(a));
    if (want("evm")) results.push_back(solve_evm(a));
    if (results.empty()) {
      io.err << "error: unknown method '" << args.method << "' (lsm|wlsm|llsm|evm|all)\n";
      return kExitInput;
    }

    bool converged = true;
    for (const auto& r : results) converged = converged && r.converged;

    if (args.json) {
      json out = {{"input", io::to_json(a)}, {"certification", io::to_json(cert)}};
      json rs = json::array();
      for (const auto& r : results) rs.push_back(io::to_json(r));
      out["results"] = std::move(rs);
      io.out << out.dump(2) << '\n';
    } else {
      for (const auto& r : results) {
        io.out << "method: " << to_string(r.method) << '\n';
        print_weights(io.out, a, r);
        io.out << "  objective (least squares): " << num(r.objective, 12) << '\n';
        if (r.eigenvalue) io.out << "  principal eigenvalue: " << num(*r.eigenvalue, 12) << '\n';
        io.out << "  iterations: " << r.iterations << '\n';
        io.out << "  converged: " << (r.converged ? "yes" : "no") << '\n';
        if (r.method == Method::kLSM) {
          io.out << "  uniqueness: ";
          if (cert.admissible) {
            io.out << "guaranteed (all entries within [1/a0, a0])";
          } else if (r.unique) {
            io.out << "not guaranteed; " << r.starts << " start(s) found one minimizer";
          } else {
            io.out << "not guaranteed; " << r.starts << " start(s) found "
                   << r.minima_found.size() << " distinct minimizers";
          }
          io.out << '\n';
        }
        for (const auto& w : r.warnings) io.out << "  warning: " << w << '\n';
        io.out << '\n';
      }
    }
    return converged ? kExitOk : kExitNumerical;
  } catch (const Error& e) {
    return report_error(e, io);
  }
}

int cmd_inconsistency(const InconsistencyArgs& args, Streams io) {
  try {
    const PCMatrix a = io::load_matrix(args.input);
    const auto rep = inconsistency(a, args.all_triads, args.threshold);
    if (args.json) {
      json out = io::to_json(rep);
      out["threshold"] = args.threshold;
      io.out << out.dump(2) << '\n';
      return kExitOk;
    }
    io.out << "inconsistency: " << num(rep.global_value, 12) << '\n';
    if (rep.worst) {
      const auto& t = *rep.worst;
      io.out << "worst triad: (" << t.i + 1 << "," << t.k + 1 << "," << t.j + 1 << ") "
             << "a_ik=" << num(t.a_ik) << " a_kj=" << num(t.a_kj) << " a_ij=" << num(t.a_ij)
             << '\n';
    } else {
      io.out << "worst triad: none (no triads for n=2)\n";
    }
    io.out << (rep.acceptable ? "acceptable" : "unacceptable") << " ("
           << (rep.acceptable ? "<= " : "> ") << num(args.threshold, 6) << ")\n";
    if (args.all_triads) {
      io.out << "triads (most inconsistent first):\n";
      for (const auto& t : rep.all_triads) {
        io.out << "  (" << t.i + 1 << "," << t.k + 1 << "," << t.j + 1
               << ") " << num(t.value, 12) << '\n';
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, io);
  }
}

int cmd_analyze(const AnalyzeArgs& args, Streams io) {
  try {
    const PCMatrix a = io::load_matrix(args.input);
    const double a0 = convexity::constants().a0;
    const auto cert = convexity::certify(a);
    std::vector<convexity::CurvePoint> curves;
    if (args.curves) curves = convexity::curve_table(args.w_min, args.w_max, args.curve_points);

    if (args.json) {
      json entries = json::array();
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
          const double v = a(i, j);
          entries.push_back({{"i", i}, {"j", j}, {"value", v},
                             {"admissible", v <= a0 && v >= 1.0 / a0}});
        }
      json out = {{"a0", a0}, {"entries", std::move(entries)}, {"certification", io::to_json(cert)}};
      if (args.curves) {
        json c = json::array();
        for (const auto& p : curves) c.push_back({{"w", p.w}, {"phi", p.phi}, {"psi", p.psi}});
        out["curves"] = std::move(c);
      }
      io.out << out.dump(2) << '\n';
      return kExitOk;
    }

    if (args.curves) {
      io.out << "w,phi,psi\n";
      for (const auto& p : curves)
        io.out << num(p.w, 12) << ',' << num(p.phi, 12) << ',' << num(p.psi, 12) << '\n';
      return kExitOk;
    }

    io.out << "a0 = " << num(a0, 12) << "  (admissible band [" << num(1.0 / a0, 12) << ", "
           << num(a0, 12) << "])\n";
    io.out << "max entry: " << num(cert.max_entry, 12) << '\n';
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j) {
        const double v = a(i, j);
        io.out << "  (" << i + 1 << "," << j + 1 << ") = " << num(v, 12);
        if (v > a0) {
          io.out << "  violation: " << num(v, 12) << " > " << num(a0, 12);
        } else if (v < 1.0 / a0) {
          io.out << "  violation: " << num(v, 12) << " < 1/a0 = " << num(1.0 / a0, 12);
        } else {
          io.out << "  admissible";
        }
        io.out << '\n';
      }
    io.out << "verdict: " << convexity::to_string(cert.verdict) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, io);
  }
}

int cmd_simulate(SimulateArgs args, Streams io) {
  try {
    const auto scale = scales::find_scale(args.scale_name);
    if (!scale) {
      io.err << "error: InvalidConfig: unknown scale '" << args.scale_name << "'\n";
      return kExitInput;
    }
    args.config.scale = *scale;
    const auto report = scales::run_monte_carlo(args.config);

    const std::string csv_path = args.out_prefix + ".csv";
    const std::string json_path = args.out_prefix + ".json";
    {
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) throw Error(ErrorCode::kInvalidConfig, "cannot write '" + csv_path + "'");
      scales::write_csv(csv, report);
    }
    const std::string agg = scales::aggregate_json(report);
    {
      std::ofstream js(json_path, std::ios::binary);
      if (!js) throw Error(ErrorCode::kInvalidConfig, "cannot write '" + json_path + "'");
      js << agg;
    }

    if (args.json) {
      io.out << agg;
    } else {
      const auto& a = report.aggregate;
      io.out << "scale " << scale->name() << ", n=" << args.config.n
             << ", trials=" << args.config.trials << ", seed=" << args.config.seed << '\n'
             << "  mean inconsistency:   " << num(a.mean_inconsistency) << '\n'
             << "  max inconsistency:    " << num(a.max_inconsistency) << '\n'
             << "  fraction acceptable:  " << num(a.fraction_acceptable) << '\n'
             << "  fraction certified:   " << num(a.fraction_certified) << '\n'
             << "  fraction unique:      " << num(a.fraction_unique) << '\n'
             << "  mean weight spread:   " << num(a.mean_weight_disagreement) << '\n'
             << "wrote " << csv_path << " and " << json_path << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, io);
  }
}

int cmd_verify(const VerifyArgs& args, Streams io) {
  try {
    const PCMatrix a = io::load_matrix(args.input);
    if (a.size() > 4) {
      throw Error(ErrorCode::kUnsupportedSize,
                  "verify supports n <= 4, got n=" + std::to_string(a.size()));
    }
    oracle::GridSpec spec;
    // A 601^3 grid is too slow for n = 4; a coarser grid with more
    // refinement rounds reaches the same resolution.
    spec.points_per_axis = args.points.value_or(a.size() == 4 ? 121 : 601);
    spec.refine_rounds = args.rounds.value_or(a.size() == 4 ? 4 : 2);

    SolveOptions opts;
    opts.start_seed = default_seed();
    const SolveResult solved = solve_lsm(a, opts);
    const auto grid = oracle::grid_min_lsm(a, spec);
    const double diff = std::abs(solved.method_objective - grid.objective);
    const bool agree = diff <= args.tolerance;

    if (args.json) {
      json out = {{"solver_objective", solved.method_objective},
                  {"grid_objective", grid.objective},
                  {"difference", diff},
                  {"tolerance", args.tolerance},
                  {"agree", agree},
                  {"solver_converged", solved.converged}};
      io.out << out.dump(2) << '\n';
    } else {
      io.out << "solver objective: " << num(solved.method_objective, 12) << '\n'
             << "grid objective:   " << num(grid.objective, 12) << '\n'
             << "difference:       " << num(diff, 6) << " (tolerance " << num(args.tolerance, 6)
             << ")\n"
             << (agree ? "AGREE" : "DISAGREE") << '\n';
    }
    return agree ? kExitOk : kExitNumerical;
  } catch (const Error& e) {
    return report_error(e, io);
  }
}

int cmd_serve(const ServeArgs& args, Streams io) {
  // Route SIGINT/SIGTERM to a waiter thread instead of an async handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  try {
    service::ElicitationService svc(args.db);
    service::HttpServer server(svc);
    const auto port = server.bind(args.bind, args.port);
    if (!port) {
      io.err << "error: cannot bind " << args.bind << ":" << args.port << '\n';
      return kExitInput;
    }
    io.err << json{{"event", "listening"}, {"bind", args.bind}, {"port", *port}}.dump()
           << std::endl;

    std::thread waiter([&server, set] {
      int sig = 0;
      sigwait(&set, &sig);
      server.stop();
    });
    const bool ok = server.listen();
    // listen() returned on its own: wake the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return ok ? kExitOk : kExitInput;
  } catch (const Error& e) {
    return report_error(e, io);
  }
}

}  // namespace pcx::cli
