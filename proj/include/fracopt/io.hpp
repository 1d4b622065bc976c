#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracopt/apps.hpp"
#include "fracopt/reduction.hpp"
#include "fracopt/version.hpp"

namespace fracopt {

using Json = nlohmann::json;

struct LoadedProblem {
  ProblemDefinition problem;
  SolveConfig config;            // direction from the file, plus any "config" overrides
  bool seed_from_file = false;   // true when "config.seed" was present
};

namespace detail {

inline std::string json_escape(const std::string& s) { return Json(s).dump(); }

/// Canonical number token: integers verbatim, floats as %.17g (exact
/// round-trip), -0 normalized, non-finite values as quoted strings.
inline std::string canonical_number(const Json& j) {
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  double v = j.get<double>();
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) v = 0.0;  // collapse -0
  return format_double(v);
}

inline void canonical_write(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann objects iterate key-sorted
        if (!first) out += ",\n";
        first = false;
        out += pad_in + json_escape(it.key()) + ": ";
        canonical_write(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad_in;
        canonical_write(j[i], out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::string:
      out += json_escape(j.get<std::string>());
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::null:
      out += "null";
      return;
    default:
      out += canonical_number(j);
      return;
  }
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic serialization: sorted keys, 2-space indent, %.17g floats,
/// trailing newline. Identical json values always produce identical bytes.
inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::canonical_write(j, out, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// problem files

namespace detail {

inline const Json& require(const Json& j, const char* key, const char* where) {
  const auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(std::string("missing required key \"") + key + "\" in " + where);
  return *it;
}

inline std::vector<double> finite_array(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string(what) + " must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw SchemaError(std::string(what) + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

/// Like finite_array but the string "inf" is admitted (control-space upper
/// bounds only).
inline std::vector<double> array_with_inf(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string(what) + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (x.is_string()) {
      if (x.get<std::string>() != "inf")
        throw SchemaError(std::string(what) + ": the only admitted string entry is \"inf\"");
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (x.is_number()) {
      out.push_back(x.get<double>());
    } else {
      throw SchemaError(std::string(what) + " entries must be numbers or \"inf\"");
    }
  }
  return out;
}

inline Direction parse_direction(const Json& j) {
  const std::string s = j.get<std::string>();
  if (s == "max") return Direction::Max;
  if (s == "min") return Direction::Min;
  throw SchemaError("\"direction\" must be \"max\" or \"min\", got \"" + s + "\"");
}

inline void apply_config_overrides(const Json& j, SolveConfig& cfg, bool& seed_seen) {
  if (!j.is_object()) throw SchemaError("\"config\" must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (key == "grid_per_dim") cfg.grid_per_dim = v.get<int>();
    else if (key == "multistarts") cfg.multistarts = v.get<int>();
    else if (key == "refine_iters") cfg.refine_iters = v.get<int>();
    else if (key == "tol_value") cfg.tol_value = v.get<double>();
    else if (key == "tol_point") cfg.tol_point = v.get<double>();
    else if (key == "epsilon") cfg.epsilon = v.get<double>();
    else if (key == "divergence_threshold") cfg.divergence_threshold = v.get<double>();
    else if (key == "truncation_bound") cfg.truncation_bound = v.get<double>();
    else if (key == "truncation_growth") cfg.truncation_growth = v.get<double>();
    else if (key == "truncation_rounds") cfg.truncation_rounds = v.get<int>();
    else if (key == "max_rounds") cfg.max_rounds = v.get<int>();
    else if (key == "sign_samples") cfg.sign_samples = v.get<int>();
    else if (key == "denom_tolerance") cfg.denom_tolerance = v.get<double>();
    else if (key == "seed") {
      cfg.seed = v.get<std::uint64_t>();
      seed_seen = true;
    } else {
      throw SchemaError("unknown config key \"" + key + "\"");
    }
  }
}

}  // namespace detail

inline LoadedProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("problem file must be a JSON object");
  const std::string name = detail::require(j, "name", "problem file").get<std::string>();
  const std::string a_text = detail::require(j, "A", "problem file").get<std::string>();
  const std::string b_text = detail::require(j, "B", "problem file").get<std::string>();

  const std::string sign = detail::require(j, "sign_B", "problem file").get<std::string>();
  if (sign != "positive" && sign != "negative")
    throw SchemaError("\"sign_B\" must be \"positive\" or \"negative\", got \"" + sign + "\"");

  const Json& s_json = detail::require(j, "S", "problem file");
  std::vector<double> s_lower = detail::finite_array(detail::require(s_json, "lower", "S"), "S.lower");
  std::vector<double> s_upper = detail::finite_array(detail::require(s_json, "upper", "S"), "S.upper");
  for (double v : s_upper)
    if (!std::isfinite(v))
      throw SchemaError("S must be a bounded box: unbounded parameter domains are not supported; "
                        "pick explicit finite bounds for the search");

  const Json& u_json = detail::require(j, "U", "problem file");
  const std::string kind = detail::require(u_json, "kind", "U").get<std::string>();
  ControlSpace space = [&] {
    if (kind == "box") {
      auto lower = detail::finite_array(detail::require(u_json, "lower", "U"), "U.lower");
      auto upper = detail::array_with_inf(detail::require(u_json, "upper", "U"), "U.upper");
      return ControlSpace::box(std::move(lower), std::move(upper));
    }
    if (kind == "finite") {
      const Json& pts = detail::require(u_json, "points", "U");
      if (!pts.is_array() || pts.empty()) throw SchemaError("U.points must be a non-empty array");
      std::vector<Point> points;
      for (const auto& p : pts) points.push_back(detail::finite_array(p, "U.points[i]"));
      return ControlSpace::finite(std::move(points));
    }
    throw SchemaError("U.kind must be \"box\" or \"finite\", got \"" + kind + "\"");
  }();

  LoadedProblem out{
      make_problem(name, a_text, b_text,
                   ParameterDomain::box(std::move(s_lower), std::move(s_upper)), std::move(space),
                   sign == "positive" ? Sign::Positive : Sign::Negative),
      SolveConfig{}, false};
  out.config.direction = detail::parse_direction(detail::require(j, "direction", "problem file"));
  if (const auto it = j.find("config"); it != j.end())
    detail::apply_config_overrides(*it, out.config, out.seed_from_file);
  out.config.validate();
  return out;
}

/// The seed stays out of exported problem files: it scopes a run, not a
/// problem. Reports embed it explicitly instead.
inline Json config_to_json(const SolveConfig& cfg, bool include_seed = false) {
  Json j{{"grid_per_dim", cfg.grid_per_dim},
         {"multistarts", cfg.multistarts},
         {"refine_iters", cfg.refine_iters},
         {"tol_value", cfg.tol_value},
         {"tol_point", cfg.tol_point},
         {"epsilon", cfg.epsilon},
         {"divergence_threshold", cfg.divergence_threshold},
         {"truncation_bound", cfg.truncation_bound},
         {"truncation_growth", cfg.truncation_growth},
         {"truncation_rounds", cfg.truncation_rounds},
         {"max_rounds", cfg.max_rounds},
         {"sign_samples", cfg.sign_samples},
         {"denom_tolerance", cfg.denom_tolerance}};
  if (include_seed) j["seed"] = cfg.seed;
  return j;
}

inline Json problem_to_json(const ProblemDefinition& p, const SolveConfig& cfg) {
  Json j;
  j["name"] = p.name;
  j["A"] = to_string(p.A);
  j["B"] = to_string(p.B);
  j["sign_B"] = p.declared_sign_B == Sign::Positive ? "positive" : "negative";
  j["S"] = Json{{"lower", p.S.lower()}, {"upper", p.S.upper()}};
  if (p.U.kind() == ControlSpace::Kind::Box) {
    Json upper = Json::array();
    for (double v : p.U.upper()) {
      if (std::isinf(v))
        upper.push_back("inf");
      else
        upper.push_back(v);
    }
    j["U"] = Json{{"kind", "box"}, {"lower", p.U.lower()}, {"upper", std::move(upper)}};
  } else {
    j["U"] = Json{{"kind", "finite"}, {"points", p.U.points()}};
  }
  j["direction"] = to_string(cfg.direction);
  j["config"] = config_to_json(cfg);
  return j;
}

/// Hash identifying the problem and every result-relevant knob except the
/// seed; together with the seed it pins the whole "result" subtree.
inline std::string problem_hash(const Json& problem_json) {
  Json j = problem_json;
  if (j.contains("config")) {
    j["config"].erase("seed");
    if (j["config"].empty()) j.erase("config");  // seed-only config hashes like no config
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(canonical_dump(j))));
  return buf;
}

// ---------------------------------------------------------------------------
// report files

namespace detail {

inline Json point_json(const Point& p) { return Json(p); }

}  // namespace detail

inline Json report_to_json(const SolveReport& report, const Json& problem_json,
                           const SolveConfig& cfg, double wall_time_seconds) {
  Json result;
  result["classification"] = to_string(report.classification);
  result["direction"] = to_string(report.direction);
  result["best_alpha"] = detail::point_json(report.best_alpha);
  result["best_u"] = detail::point_json(report.best_u);
  result["best_value"] = report.best_value;
  result["evaluations"] = report.evaluations;
  result["rounds"] = report.rounds;
  result["skipped_sign"] = report.skipped_sign;
  result["failed_evaluations"] = report.failed_evaluations;
  if (report.certificate) {
    const EpsilonCertificate& c = *report.certificate;
    result["certificate"] = Json{{"epsilon", c.epsilon},
                                 {"alpha_eps", c.alpha_eps},
                                 {"u_eps", c.u_eps},
                                 {"value", c.value},
                                 {"sup_estimate", c.sup_estimate}};
  }
  if (report.witness) {
    Json seq = Json::array();
    for (const WitnessEntry& e : report.witness->sequence)
      seq.push_back(Json{{"alpha", e.alpha}, {"u", e.u}, {"value", e.value}});
    result["witness"] = std::move(seq);
  }
  Json trace = Json::array();
  for (const TraceEntry& t : report.trace)
    trace.push_back(Json{{"round", t.round},
                         {"alpha", t.alpha},
                         {"u", t.u},
                         {"value", t.value},
                         {"evaluations", t.evaluations}});
  result["trace"] = std::move(trace);

  Json j;
  j["fracopt_version"] = std::string(kVersion);
  j["problem"] = Json{{"name", problem_json.value("name", "")},
                      {"hash", problem_hash(problem_json)}};
  j["config"] = config_to_json(cfg, /*include_seed=*/true);
  j["seed"] = cfg.seed;
  j["wall_time_seconds"] = wall_time_seconds;
  j["sign_check"] = Json{{"samples", report.sign_check.samples_checked},
                         {"violations", report.sign_check.violations.size()}};
  j["result"] = std::move(result);
  return j;
}

// ---------------------------------------------------------------------------
// files

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw SchemaError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

/// Writes atomically: temp file in the same directory, then rename. A failed
/// run never leaves a partial file behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp.string());
    out << contents;
    if (!out.good()) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline LoadedProblem load_problem_file(const std::filesystem::path& path) {
  return problem_from_json(read_json_file(path));
}

}  // namespace fracopt
