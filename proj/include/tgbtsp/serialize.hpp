#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "tgbtsp/betadist.hpp"
#include "tgbtsp/error.hpp"
#include "tgbtsp/heuristics.hpp"
#include "tgbtsp/instance.hpp"
#include "tgbtsp/moments.hpp"
#include "tgbtsp/tgb.hpp"
#include "tgbtsp/tour.hpp"

namespace tgbtsp {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

using json = nlohmann::ordered_json;

// Non-finite doubles become null so every document stays valid JSON.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json optional_number(const std::optional<T>& x) {
  if (!x) return json(nullptr);
  if constexpr (std::is_integral_v<T>) {
    return json(*x);
  } else {
    return number(static_cast<double>(*x));
  }
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Instance.

inline json to_json(const Instance& inst) {
  json j;
  j["name"] = inst.name;
  j["n"] = inst.n;
  j["geometry"] = std::string(to_string(inst.geometry));
  if (inst.geometry == Geometry::explicit_matrix) {
    json rows = json::array();
    for (std::size_t i = 0; i < inst.n; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < inst.n; ++k) row.push_back(inst.explicit_costs(i, k));
      rows.push_back(std::move(row));
    }
    j["costs"] = std::move(rows);
  } else {
    if (inst.geometry == Geometry::euclidean_2d) j["round"] = inst.round_euclidean;
    json pts = json::array();
    for (const auto& p : inst.coords) pts.push_back({p.x, p.y});
    j["coords"] = std::move(pts);
  }
  return j;
}

inline Instance instance_from_json(const json& j) {
  try {
    Instance inst;
    inst.name = j.value("name", std::string("unnamed"));
    inst.n = j.at("n").get<std::size_t>();
    const auto g = j.at("geometry").get<std::string>();
    if (g == "euclidean-2d") {
      inst.geometry = Geometry::euclidean_2d;
      inst.round_euclidean = j.value("round", true);
    } else if (g == "geographic") {
      inst.geometry = Geometry::geographic;
    } else if (g == "explicit") {
      inst.geometry = Geometry::explicit_matrix;
    } else {
      throw ParseError("unsupported-geometry", "instance JSON: unknown geometry '" + g + "'");
    }
    if (inst.geometry == Geometry::explicit_matrix) {
      const auto& rows = j.at("costs");
      if (rows.size() != inst.n) throw ParseError("dimension-mismatch", "instance JSON: costs row count != n");
      std::vector<double> v;
      v.reserve(inst.n * inst.n);
      for (const auto& row : rows) {
        if (row.size() != inst.n) throw ParseError("dimension-mismatch", "instance JSON: costs column count != n");
        for (const auto& x : row) v.push_back(x.get<double>());
      }
      inst.explicit_costs = CostMatrix(inst.n, std::move(v));
    } else {
      const auto& pts = j.at("coords");
      if (pts.size() != inst.n) throw ParseError("dimension-mismatch", "instance JSON: coords count != n");
      for (const auto& p : pts) inst.coords.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    if (inst.n < 3) throw ParseError("dimension-mismatch", "instance JSON: n must be >= 3");
    return inst;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError("malformed-json", std::string("instance JSON: ") + e.what());
  }
}

inline std::string instance_checksum(const Instance& inst) { return hex64(fnv1a(to_json(inst).dump())); }

// ---------------------------------------------------------------------------
// Statistics.

inline json to_json(const MomentSet& m) {
  json j;
  j["basis"] = std::string(to_string(m.basis));
  j["mean"] = number(m.mean);
  j["variance"] = number(m.variance);
  j["stddev"] = number(m.stddev());
  j["skewness"] = number(m.skewness);
  j["kurtosis"] = number(m.kurtosis);
  j["excess_kurtosis"] = number(m.excess_kurtosis());
  j["min"] = optional_number(m.min);
  j["max"] = optional_number(m.max);
  j["count"] = m.count;
  if (m.basis == MomentBasis::sampled) {
    j["sample_size"] = m.sample_size;
    j["seed"] = m.seed;
  }
  return j;
}

inline json to_json(const Histogram& h) {
  json j;
  j["bins"] = h.bins();
  j["total"] = h.total;
  j["bin_edges"] = h.bin_edges;
  j["counts"] = h.counts;
  j["density"] = h.density();
  return j;
}

inline std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out.precision(17);
  out << "bin_center,density\n";
  const auto d = h.density();
  for (std::size_t i = 0; i < h.bins(); ++i) out << h.center(i) << ',' << d[i] << '\n';
  return out.str();
}

inline json to_json(const GBParams& p) {
  json j;
  j["alpha"] = number(p.alpha);
  j["beta"] = number(p.beta);
  j["A"] = number(p.A);
  j["B"] = number(p.B);
  return j;
}

inline json to_json(const BoundFitDiagnostics& d) {
  json j;
  j["bracket"] = {d.bracket_lo, d.bracket_hi};
  j["residual_mean"] = number(d.residual_mean);
  j["residual_variance"] = number(d.residual_variance);
  j["residual_skewness"] = number(d.residual_skewness);
  return j;
}

inline json to_json(const Tour& t) {
  json j;
  j["order"] = t.order;
  j["length"] = optional_number(t.length);
  return j;
}

inline json to_json(const HeuristicResult& r) {
  json j;
  j["method"] = std::string(to_string(r.method));
  j["length"] = number(r.length);
  j["tour"] = r.tour.order;
  j["improvement_steps"] = r.improvement_steps;
  j["exact_matching"] = r.exact_matching;
  j["warnings"] = r.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// TGB.

inline json to_json(const TgbIteration& it) {
  json j;
  j["K"] = it.K;
  j["b_hat"] = number(it.b_hat);
  j["mu"] = number(it.mu);
  j["ratio_bound"] = number(it.ratio_bound);
  j["within_bound"] = it.within_bound;
  return j;
}

// `max_rows` caps the serialized iteration list (0 = all); the first and last
// rows are always kept.
inline json to_json(const TgbSchedule& s, std::size_t max_rows = 0) {
  json j;
  j["params"] = to_json(s.params);
  j["length"] = s.iterations.size();
  j["converged_at"] = optional_number(s.converged_at);
  j["initial_window_clamped"] = s.initial_window_clamped;
  j["all_within_bound"] = s.all_within_bound();
  json rows = json::array();
  const std::size_t total = s.iterations.size();
  if (max_rows == 0 || total <= max_rows) {
    for (const auto& it : s.iterations) rows.push_back(to_json(it));
  } else {
    const std::size_t head = max_rows - 1;
    for (std::size_t i = 0; i < head; ++i) rows.push_back(to_json(s.iterations[i]));
    rows.push_back(to_json(s.iterations.back()));
    j["truncated_rows"] = true;
  }
  j["iterations"] = std::move(rows);
  return j;
}

inline json to_json(const TgbReport& r, std::size_t max_schedule_rows = 200) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["instance"] = r.instance;
  j["n"] = r.n;
  j["A_source"] = std::string(to_string(r.A_source));
  j["A"] = optional_number(r.A);
  j["B"] = optional_number(r.B);
  j["moments"] = r.moments ? to_json(*r.moments) : json(nullptr);
  j["fitted"] = r.fitted ? to_json(*r.fitted) : json(nullptr);
  j["fit_diagnostics"] = r.fit_diagnostics ? to_json(*r.fit_diagnostics) : json(nullptr);
  j["schedule"] = r.schedule ? to_json(*r.schedule, max_schedule_rows) : json(nullptr);
  j["christofides_length"] = optional_number(r.christofides_length);
  j["kopt_length"] = optional_number(r.kopt_length);
  json mi;
  mi["target_ratio"] = optional_number(r.target_ratio);
  mi["K"] = optional_number(r.min_iterations_at_target);
  mi["K_minus_1"] = r.min_iterations_at_target ? json(*r.min_iterations_at_target - 1) : json(nullptr);
  mi["ratio_at_K"] = (r.min_iterations_at_target && r.fitted)
                         ? number(approximation_ratio(r.fitted->alpha, *r.min_iterations_at_target))
                         : json(nullptr);
  mi["literal_formula"] = std::string(kLiteralMinIterationsFormula);
  mi["literal_value"] = optional_number(r.min_iterations_literal_at_target);
  j["min_iterations"] = std::move(mi);
  if (r.regression) {
    json g = to_json(r.regression->params());
    g["warnings"] = r.regression->warnings;
    j["regression"] = std::move(g);
  } else {
    j["regression"] = nullptr;
  }
  json rel = json::object();
  for (const auto& [k, v] : r.relative_errors) rel[k] = number(v);
  j["relative_errors"] = std::move(rel);
  json errs = json::object();
  for (const auto& [k, v] : r.stage_errors) errs[k] = v;
  j["stage_errors"] = std::move(errs);
  j["warnings"] = r.warnings;
  return j;
}

inline std::string report_csv_header() { return "instance,n,A,B,alpha,beta,K,ratio\n"; }

// One row; K is the schedule length and ratio its final ratio bound.
inline std::string report_csv_row(const TgbReport& r) {
  auto f = [](const std::optional<double>& x) {
    if (!x) return std::string();
    std::ostringstream o;
    o.precision(10);
    o << *x;
    return o.str();
  };
  std::ostringstream out;
  out << r.instance << ',' << r.n << ',' << f(r.A) << ',' << f(r.B) << ','
      << f(r.fitted ? std::optional<double>(r.fitted->alpha) : std::nullopt) << ','
      << f(r.fitted ? std::optional<double>(r.fitted->beta) : std::nullopt) << ',';
  if (r.schedule) out << r.schedule->last().K;
  out << ',' << f(r.schedule ? std::optional<double>(r.schedule->last().ratio_bound) : std::nullopt) << '\n';
  return out.str();
}

}  // namespace tgbtsp
