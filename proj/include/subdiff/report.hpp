#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "subdiff/error.hpp"
#include "subdiff/solver.hpp"

namespace subdiff {

/// Shortest decimal that parses back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline constexpr const char* kCsvHeader = "iter,f,dir_value,alpha,backtracks,step_norm,wall_ns";

inline void write_csv(std::ostream& out, const Trace& trace, bool timing = true) {
  out << kCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_number(r.f) << ',' << format_number(r.dir_value) << ',' << format_number(r.alpha)
        << ',' << r.backtracks << ',' << format_number(r.step_norm) << ',' << (timing ? r.wall_ns : 0) << '\n';
  }
  out << "# status=" << to_string(trace.status) << '\n';
}

/// What a report carries besides the trace.
struct ReportMeta {
  std::string problem;
  nlohmann::json config = nlohmann::json::object();
  std::optional<double> lipschitz;
  std::optional<double> f_star;
  std::optional<double> mu;  // Armijo reduction multiple, when that schedule ran
};

namespace detail {

// JSON has no infinities; they travel as strings.
inline nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw Error(Errc::Parse, "bad number in report: " + s);
}

}  // namespace detail

inline nlohmann::json report_json(const Trace& trace, const ReportMeta& meta, bool timing = true) {
  using nlohmann::json;
  json records = json::array();
  for (const auto& r : trace.records) {
    records.push_back({{"iter", r.k},
                       {"f", detail::number_json(r.f)},
                       {"dir_value", detail::number_json(r.dir_value)},
                       {"alpha", detail::number_json(r.alpha)},
                       {"backtracks", r.backtracks},
                       {"step_norm", detail::number_json(r.step_norm)},
                       {"wall_ns", timing ? r.wall_ns : 0},
                       {"f_next", detail::number_json(r.f_next)}});
  }
  json x = json::array();
  for (std::size_t i = 0; i < trace.final_x.size(); ++i) x.push_back(trace.final_x[i]);
  json out = {{"problem", meta.problem},
              {"config", meta.config},
              {"records", records},
              {"final",
               {{"x", x},
                {"f", detail::number_json(trace.final_f)},
                {"dir_value", detail::number_json(trace.final_dir_value)},
                {"search_ran", trace.final_search_ran},
                {"certified", trace.certified},
                {"status", std::string(to_string(trace.status))},
                {"message", trace.message}}}};
  if (meta.lipschitz && meta.f_star) {
    const double mu = meta.mu.value_or(0.5);
    const RateSweep s = rate_sweep(trace, *meta.f_star, *meta.lipschitz, mu);
    std::size_t failed_steps = 0;
    for (bool b : s.per_step) failed_steps += b ? 0 : 1;
    out["rate_audit"] = {{"L", *meta.lipschitz},
                         {"f_star", *meta.f_star},
                         {"mu", mu},
                         {"M", s.m},
                         {"N", s.lhs.size() - 1},
                         {"lhs", detail::number_json(s.lhs.back())},
                         {"rhs", detail::number_json(s.rhs.back())},
                         {"failed_steps", failed_steps},
                         {"holds", s.holds}};
  }
  return out;
}

struct Report {
  std::string problem;
  nlohmann::json config;
  Trace trace;
  std::optional<nlohmann::json> rate_audit;
};

inline Report parse_report(const nlohmann::json& j) {
  try {
    Report r;
    r.problem = j.at("problem").get<std::string>();
    r.config = j.at("config");
    for (const auto& rec : j.at("records")) {
      IterationRecord ir;
      ir.k = rec.at("iter").get<std::size_t>();
      ir.f = detail::number_from_json(rec.at("f"));
      ir.dir_value = detail::number_from_json(rec.at("dir_value"));
      ir.alpha = detail::number_from_json(rec.at("alpha"));
      ir.backtracks = rec.at("backtracks").get<std::size_t>();
      ir.step_norm = detail::number_from_json(rec.at("step_norm"));
      ir.wall_ns = rec.at("wall_ns").get<std::int64_t>();
      ir.f_next = detail::number_from_json(rec.at("f_next"));
      r.trace.records.push_back(ir);
    }
    const auto& fin = j.at("final");
    Vector x(static_cast<Eigen::Index>(fin.at("x").size()));
    for (std::size_t i = 0; i < fin.at("x").size(); ++i) x[static_cast<Eigen::Index>(i)] = fin.at("x")[i].get<double>();
    r.trace.final_x = Point(std::move(x));
    r.trace.final_f = detail::number_from_json(fin.at("f"));
    r.trace.final_dir_value = detail::number_from_json(fin.at("dir_value"));
    r.trace.final_search_ran = fin.at("search_ran").get<bool>();
    r.trace.certified = fin.at("certified").get<bool>();
    const auto status = parse_status(fin.at("status").get<std::string>());
    if (!status) throw Error(Errc::Parse, "unknown status in report");
    r.trace.status = *status;
    r.trace.message = fin.at("message").get<std::string>();
    if (j.contains("rate_audit")) r.rate_audit = j.at("rate_audit");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("malformed report: ") + e.what());
  }
}

inline Report read_report(std::istream& in) {
  try {
    return parse_report(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("report is not JSON: ") + e.what());
  }
}

enum class TraceFormat { Csv, Json };

inline void emit_trace(const Trace& trace, const std::string& path, TraceFormat format, const ReportMeta& meta = {},
                       bool timing = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  if (format == TraceFormat::Csv) {
    write_csv(out, trace, timing);
  } else {
    out << report_json(trace, meta, timing).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed for " + path);
}

}  // namespace subdiff
