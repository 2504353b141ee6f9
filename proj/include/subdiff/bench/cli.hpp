#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "subdiff/bench/registry.hpp"
#include "subdiff/report.hpp"
#include "subdiff/solver.hpp"

namespace subdiff::bench {

struct RunOptions {
  std::string problem;
  bool list = false;
  double epsilon = -1.0;  // < 0: the problem's default
  std::string norm;       // empty: the problem's default
  double mu = 0.5;
  double alpha0 = 1.0;
  std::string schedule = "armijo";
  std::size_t max_iter = 0;  // 0: the problem's default
  std::uint64_t seed = 0;
  std::string strategy = "auto";
  std::size_t budget = 64;
  bool reduced = false;
  std::string out;
  std::string format = "csv";
  bool no_timing = false;
  std::string sweep;
  double floor = -1e12;
  std::optional<double> lipschitz;
  std::optional<double> f_star;
  ProblemParams params;
};

/// Thrown for flag combinations CLI11 cannot reject on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Vector parse_csv_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) v.push_back(parse_double(token, 1));
  if (v.empty()) throw UsageError("--x0 needs at least one number");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline void build_app(CLI::App& app, RunOptions& o, std::optional<std::size_t>& dim, std::optional<double>& rho,
                      std::string& x0, std::optional<double>& lipschitz, std::optional<double>& f_star) {
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "key=value file; flags on the command line win");
  app.add_option("--problem", o.problem, "registered problem name");
  app.add_flag("--list", o.list, "print the problem registry and exit");
  app.add_option("--epsilon", o.epsilon, "stationarity tolerance (>= 0)");
  app.add_option("--norm", o.norm, "unit ball of the direction search")
      ->check(CLI::IsMember({"l2", "l1", "linf", "simplex"}));
  app.add_option("--mu", o.mu, "Armijo reduction multiple in (0, 1)")->check(CLI::Range(0.0, 1.0));
  app.add_option("--alpha0", o.alpha0, "initial Armijo step / diminishing scale")->check(CLI::PositiveNumber);
  app.add_option("--schedule", o.schedule, "step rule")->check(CLI::IsMember({"armijo", "diminishing"}));
  app.add_option("--max-iter", o.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "seed for problem data and sampled directions");
  app.add_option("--strategy", o.strategy, "direction search")
      ->check(CLI::IsMember({"auto", "l2", "linf-sep", "l1-ext", "fallback"}));
  app.add_option("--budget", o.budget, "fallback sample count");
  app.add_flag("--reduced", o.reduced, "l1-ext over the n+1 vertices e_1..e_n, -e");
  app.add_option("--out", o.out, "trace path (default: stdout)");
  app.add_option("--format", o.format, "trace format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--no-timing", o.no_timing, "write wall_ns as 0");
  app.add_option("--sweep", o.sweep, "file of flag lines, each run concurrently with its own --out");
  app.add_option("--floor", o.floor, "f below this ends the run as Unbounded");
  app.add_option("--dim", dim, "problem dimension");
  app.add_option("--lambda", o.params.lambda, "regularization weight");
  app.add_option("--rho", rho, "penalty weight");
  app.add_option("--r", o.params.r, "Moreau parameter")->check(CLI::PositiveNumber);
  app.add_option("--matrix", o.params.matrix_path, "matrix fixture file");
  app.add_option("--rhs", o.params.rhs_path, "right-hand side fixture file");
  app.add_option("--x0", x0, "starting point, comma separated");
  app.add_option("--lipschitz", lipschitz, "descent constant for the rate audit");
  app.add_option("--f-star", f_star, "lower bound on inf f for the rate audit");
}

inline std::vector<std::string> split_words(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

}  // namespace detail

/// Parses argv-style arguments (program name excluded). CLI11 errors propagate.
inline RunOptions parse_options(const std::vector<std::string>& args) {
  CLI::App app{"Subderivative method runner"};
  RunOptions o;
  std::optional<std::size_t> dim;
  std::optional<double> rho, lipschitz, f_star;
  std::string x0;
  detail::build_app(app, o, dim, rho, x0, lipschitz, f_star);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  o.params.dim = dim;
  o.params.rho = rho;
  o.params.seed = o.seed;
  if (!x0.empty()) o.params.x0 = detail::parse_csv_vector(x0);
  o.lipschitz = lipschitz;
  o.f_star = f_star;
  return o;
}

inline std::string help_text() {
  CLI::App app{"Subderivative method runner"};
  RunOptions o;
  std::optional<std::size_t> dim;
  std::optional<double> rho, lipschitz, f_star;
  std::string x0;
  detail::build_app(app, o, dim, rho, x0, lipschitz, f_star);
  return app.help();
}

struct RunResult {
  Trace trace;
  ReportMeta meta;
};

inline RunResult execute(const RunOptions& o) {
  const ProblemSpec* spec = find_problem(o.problem);
  if (!spec) throw UsageError("--problem: unknown problem '" + o.problem + "' (see --list)");
  const Problem problem = spec->build(o.params);

  SolverConfig cfg;
  cfg.epsilon = o.epsilon >= 0.0 ? o.epsilon : problem.epsilon;
  cfg.norm = o.norm.empty() ? problem.norm : *parse_norm(o.norm);
  cfg.max_iter = o.max_iter > 0 ? o.max_iter : problem.max_iter;
  cfg.floor = o.floor;
  cfg.record_timing = !o.no_timing;
  if (o.schedule == "armijo") {
    cfg.schedule = ArmijoParams{o.mu, o.alpha0, 60};
  } else {
    cfg.schedule = Diminishing{o.alpha0};
  }
  cfg.strategy.kind = *parse_strategy(o.strategy);
  if (o.strategy == "auto" && problem.strategy != DirectionStrategy::Kind::Auto) cfg.strategy.kind = problem.strategy;
  cfg.strategy.budget = o.budget;
  cfg.strategy.seed = o.seed;
  cfg.strategy.reduced = o.reduced;

  RunResult r;
  r.trace = run(*problem.f, problem.x0, cfg);
  r.meta.problem = o.problem;
  r.meta.config = {{"epsilon", cfg.epsilon},
                   {"norm", std::string(to_string(cfg.norm))},
                   {"schedule", o.schedule},
                   {"mu", o.mu},
                   {"alpha0", o.alpha0},
                   {"max_iter", cfg.max_iter},
                   {"seed", o.seed},
                   {"strategy", o.strategy},
                   {"budget", o.budget},
                   {"reduced", o.reduced},
                   {"floor", cfg.floor},
                   {"dimension", problem.f->dimension()},
                   {"lambda", o.params.lambda},
                   {"r", o.params.r}};
  if (o.params.rho) r.meta.config["rho"] = *o.params.rho;
  if (o.schedule == "armijo") {
    r.meta.lipschitz = o.lipschitz ? o.lipschitz : problem.lipschitz;
    r.meta.f_star = o.f_star ? o.f_star : problem.f_star;
    r.meta.mu = o.mu;
  }
  return r;
}

inline int exit_code_for(Status s) { return s == Status::BacktrackExhausted ? 1 : 0; }

inline void write_result(const RunOptions& o, const RunResult& r, std::ostream& out) {
  const TraceFormat fmt = o.format == "json" ? TraceFormat::Json : TraceFormat::Csv;
  if (o.out.empty()) {
    if (fmt == TraceFormat::Csv) write_csv(out, r.trace, !o.no_timing);
    else out << report_json(r.trace, r.meta, !o.no_timing).dump(2) << '\n';
  } else {
    emit_trace(r.trace, o.out, fmt, r.meta, !o.no_timing);
  }
}

inline std::string summary_line(const RunOptions& o, const RunResult& r) {
  std::ostringstream s;
  s << "problem=" << o.problem << " status=" << to_string(r.trace.status) << " steps=" << r.trace.steps()
    << " f=" << format_number(r.trace.final_f) << " d=" << format_number(r.trace.final_dir_value);
  return s.str();
}

/// Whole command line: exit 0 on success, 1 on runtime failure, 2 on usage errors.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunOptions base;
  try {
    base = parse_options(args);
  } catch (const CLI::CallForHelp&) {
    out << help_text();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  if (base.list) {
    for (const auto& s : registry()) {
      out << s.name << "\t" << s.summary << "\t[";
      for (std::size_t i = 0; i < s.tags.size(); ++i) out << (i ? "," : "") << s.tags[i];
      out << "]\n";
    }
    return 0;
  }

  try {
    if (!base.sweep.empty()) {
      // Each line of the sweep file is appended to the base flags.
      std::vector<std::string> common;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--sweep") ++i;
        else if (args[i].rfind("--sweep=", 0) != 0) common.push_back(args[i]);
      }
      auto in = open_input(base.sweep);
      std::vector<RunOptions> runs;
      std::vector<std::string> outs;
      std::string line;
      while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto words = detail::split_words(line);
        if (words.empty()) continue;
        auto a = common;
        a.insert(a.end(), words.begin(), words.end());
        RunOptions o = parse_options(a);
        if (o.out.empty()) throw UsageError("--sweep: every line needs its own --out");
        for (const auto& p : outs) {
          if (p == o.out) throw UsageError("--sweep: output path '" + o.out + "' used twice");
        }
        outs.push_back(o.out);
        runs.push_back(std::move(o));
      }
      if (runs.empty()) throw UsageError("--sweep: no runs in " + base.sweep);
      std::vector<std::future<RunResult>> futures;
      for (const auto& o : runs) futures.push_back(std::async(std::launch::async, [&o] { return execute(o); }));
      int code = 0;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        try {
          const RunResult r = futures[i].get();
          write_result(runs[i], r, out);
          out << summary_line(runs[i], r) << " out=" << runs[i].out << '\n';
          code = std::max(code, exit_code_for(r.trace.status));
        } catch (const UsageError&) {
          throw;
        } catch (const std::exception& e) {
          err << "error: " << runs[i].out << ": " << e.what() << '\n';
          code = 1;
        }
      }
      return code;
    }

    if (base.problem.empty()) throw UsageError("--problem is required (or --list)");
    const RunResult r = execute(base);
    write_result(base, r, out);
    if (!base.out.empty()) out << summary_line(base, r) << '\n';
    if (r.trace.status == Status::BacktrackExhausted) err << "error: " << r.trace.message << '\n';
    return exit_code_for(r.trace.status);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace subdiff::bench
