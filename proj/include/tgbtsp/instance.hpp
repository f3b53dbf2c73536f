#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgbtsp/error.hpp"
#include "tgbtsp/rng.hpp"

namespace tgbtsp {

// Dense symmetric edge-cost matrix with zero diagonal. Immutable once built;
// the constructor rejects anything that is not a valid symmetric TSP matrix.
class CostMatrix {
 public:
  CostMatrix() = default;

  CostMatrix(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (values_.size() != n_ * n_) {
      throw DomainError("dimension-mismatch", "cost matrix: expected " + std::to_string(n_ * n_) +
                                                  " values, got " + std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (at(i, i) != 0.0) {
        throw DomainError("invalid-diagonal",
                          "cost matrix: nonzero diagonal at node " + std::to_string(i));
      }
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (at(i, j) != at(j, i)) {
          throw DomainError("non-symmetric-matrix", "cost matrix: c(" + std::to_string(i) + "," +
                                                         std::to_string(j) + ") != c(" +
                                                         std::to_string(j) + "," +
                                                         std::to_string(i) + ")");
        }
        if (!(at(i, j) >= 0.0) || !std::isfinite(at(i, j))) {
          throw DomainError("negative-cost", "cost matrix: invalid cost at (" + std::to_string(i) +
                                                 "," + std::to_string(j) + ")");
        }
      }
    }
  }

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }

  double at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) {
      throw DomainError("index-out-of-range", "cost matrix: node index out of range");
    }
    return values_[i * n_ + j];
  }

  // Row-major contiguous storage.
  const std::vector<double>& values() const noexcept { return values_; }
  const double* row(std::size_t i) const noexcept { return values_.data() + i * n_; }

  double max_off_diagonal() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, (*this)(i, j));
    }
    return m;
  }

  bool all_integral() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v == std::floor(v); });
  }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

enum class Geometry { euclidean_2d, geographic, explicit_matrix };

inline std::string_view to_string(Geometry g) {
  switch (g) {
    case Geometry::euclidean_2d: return "euclidean-2d";
    case Geometry::geographic: return "geographic";
    case Geometry::explicit_matrix: return "explicit";
  }
  return "unknown";
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Instance {
  std::string name;
  std::size_t n = 0;
  Geometry geometry = Geometry::euclidean_2d;
  // TSPLIB nint rounding for EUC_2D files; random instances keep exact norms.
  bool round_euclidean = true;
  std::vector<Point> coords;  // geometric instances only
  CostMatrix explicit_costs;  // explicit instances only
};

namespace detail {

inline double tsplib_nint(double x) { return std::floor(x + 0.5); }

// TSPLIB GEO: DDD.MM encoded degrees (truncated), fixed pi and earth radius.
inline double geo_radians(double v) {
  constexpr double kPi = 3.141592;
  const double deg = std::trunc(v);
  const double min = v - deg;
  return kPi * (deg + 5.0 * min / 3.0) / 180.0;
}

inline double geo_distance(const Point& a, const Point& b) {
  constexpr double kEarthRadius = 6378.388;
  const double lat_a = geo_radians(a.x), lon_a = geo_radians(a.y);
  const double lat_b = geo_radians(b.x), lon_b = geo_radians(b.y);
  const double q1 = std::cos(lon_a - lon_b);
  const double q2 = std::cos(lat_a - lat_b);
  const double q3 = std::cos(lat_a + lat_b);
  return static_cast<double>(static_cast<std::int64_t>(
      kEarthRadius * std::acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0));
}

}  // namespace detail

inline double distance(const Instance& inst, std::size_t i, std::size_t j) {
  if (i >= inst.n || j >= inst.n) {
    throw DomainError("index-out-of-range", "distance: node index out of range");
  }
  if (i == j) return 0.0;
  switch (inst.geometry) {
    case Geometry::explicit_matrix:
      return inst.explicit_costs(i, j);
    case Geometry::geographic:
      return detail::geo_distance(inst.coords[i], inst.coords[j]);
    case Geometry::euclidean_2d: {
      const double d = std::hypot(inst.coords[i].x - inst.coords[j].x,
                                  inst.coords[i].y - inst.coords[j].y);
      return inst.round_euclidean ? detail::tsplib_nint(d) : d;
    }
  }
  return 0.0;
}

inline CostMatrix materialize_costs(const Instance& inst) {
  if (inst.geometry == Geometry::explicit_matrix) return inst.explicit_costs;
  const std::size_t n = inst.n;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(inst, i, j);
      v[i * n + j] = d;
      v[j * n + i] = d;
    }
  }
  return CostMatrix(n, std::move(v));
}

// Same coordinates under unrounded planar Euclidean distance (GEO lat/long
// read as x/y). Explicit instances have no coordinates and are rejected.
inline Instance as_plain_euclidean(Instance inst) {
  if (inst.geometry == Geometry::explicit_matrix) {
    throw DomainError("no-coordinates", "as_plain_euclidean: instance has no coordinates");
  }
  inst.geometry = Geometry::euclidean_2d;
  inst.round_euclidean = false;
  return inst;
}

// Number of ordered triples (i, j, k) of distinct nodes with c_ij + c_jk < c_ik - slack.
inline std::size_t triangle_violations(const CostMatrix& c, double slack = 0.0) {
  const std::size_t n = c.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = i + 1; k < n; ++k) {
        if (k == j) continue;
        if (c(i, j) + c(j, k) < c(i, k) - slack) ++count;
      }
    }
  }
  return count;
}

// Minimization costs M - c_ij with M = max edge + 1. A minimum tour of the
// result is a maximum tour of the original; recover with n * M - length.
struct MaxTransform {
  CostMatrix costs;
  double big_m = 0.0;

  double recover(double transformed_length) const {
    return static_cast<double>(costs.size()) * big_m - transformed_length;
  }
};

inline MaxTransform transform_max(const CostMatrix& c) {
  const std::size_t n = c.size();
  const double m = c.max_off_diagonal() + 1.0;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) v[i * n + j] = m - c(i, j);
    }
  }
  return {CostMatrix(n, std::move(v)), m};
}

inline MaxTransform transform_max(const Instance& inst) {
  return transform_max(materialize_costs(inst));
}

// n points uniform on the unit square; exact (unrounded) Euclidean costs.
inline Instance generate_random(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw DomainError("too-few-nodes", "generate_random: n must be >= 3");
  Instance inst;
  inst.name = "random-n" + std::to_string(n) + "-s" + std::to_string(seed);
  inst.n = n;
  inst.geometry = Geometry::euclidean_2d;
  inst.round_euclidean = false;
  inst.coords.reserve(n);
  CounterRng rng(seed, 0x1f2e3d4c5b6a7988ULL);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    inst.coords.push_back({x, y});
  }
  return inst;
}

// ---------------------------------------------------------------------------
// TSPLIB reader (symmetric TSP subset: EUC_2D, GEO, EXPLICIT).

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  return s;
}

inline bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool is_section_keyword(const std::string& line) {
  const std::string u = upper(trim(line));
  return u.ends_with("_SECTION") || u == "EOF";
}

}  // namespace detail

inline Instance parse_tsplib(std::istream& in) {
  using detail::trim;
  using detail::upper;

  Instance inst;
  std::string type = "TSP";
  std::string weight_type;
  std::string weight_format;
  std::optional<std::size_t> dimension;
  std::vector<std::string> section_tokens;
  enum class Section { none, coords, weights, skip } section = Section::none;
  bool saw_coords = false;
  bool saw_weights = false;
  std::vector<std::string> coord_lines;

  auto flush_header = [&] {
    if (!dimension) throw ParseError("malformed-header", "TSPLIB: DIMENSION missing before data section");
    if (weight_type.empty()) {
      throw ParseError("malformed-header", "TSPLIB: EDGE_WEIGHT_TYPE missing before data section");
    }
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string u = upper(t);
    if (u == "EOF") break;

    if (u.starts_with("NODE_COORD_SECTION")) {
      flush_header();
      section = Section::coords;
      saw_coords = true;
      continue;
    }
    if (u.starts_with("EDGE_WEIGHT_SECTION")) {
      flush_header();
      section = Section::weights;
      saw_weights = true;
      continue;
    }
    if (u.ends_with("_SECTION")) {  // DISPLAY_DATA_SECTION, FIXED_EDGES_SECTION, ...
      section = Section::skip;
      continue;
    }

    const auto colon = t.find(':');
    const bool header_like = colon != std::string::npos &&
                             t.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZ_ \t", 0) >= colon &&
                             colon > 0;
    if (section == Section::none || header_like) {
      if (!header_like) {
        throw ParseError("malformed-header",
                         "TSPLIB line " + std::to_string(lineno) + ": expected 'KEY : VALUE', got '" + t + "'");
      }
      section = Section::none;
      const std::string key = upper(trim(std::string_view(t).substr(0, colon)));
      const std::string value = trim(std::string_view(t).substr(colon + 1));
      if (key == "NAME") {
        inst.name = value;
      } else if (key == "TYPE") {
        type = upper(value);
      } else if (key == "DIMENSION") {
        std::size_t d = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw ParseError("malformed-header", "TSPLIB: DIMENSION is not an integer: '" + value + "'");
        }
        dimension = d;
      } else if (key == "EDGE_WEIGHT_TYPE") {
        weight_type = upper(value);
      } else if (key == "EDGE_WEIGHT_FORMAT") {
        weight_format = upper(value);
      }
      // COMMENT, DISPLAY_DATA_TYPE, NODE_COORD_TYPE: ignored.
      continue;
    }

    if (section == Section::coords) {
      coord_lines.push_back(t);
    } else if (section == Section::weights) {
      std::istringstream ss(t);
      std::string tok;
      while (ss >> tok) section_tokens.push_back(tok);
    }
  }

  if (type != "TSP") {
    throw ParseError("unsupported-type", "TSPLIB: TYPE '" + type + "' is not a symmetric TSP");
  }
  flush_header();
  if (*dimension < 3) {
    throw ParseError("dimension-mismatch", "TSPLIB: DIMENSION must be >= 3");
  }
  inst.n = *dimension;

  if (weight_type == "EUC_2D" || weight_type == "GEO") {
    inst.geometry = weight_type == "GEO" ? Geometry::geographic : Geometry::euclidean_2d;
    inst.round_euclidean = true;
    if (!saw_coords) throw ParseError("malformed-header", "TSPLIB: NODE_COORD_SECTION missing");
    if (coord_lines.size() != inst.n) {
      throw ParseError("dimension-mismatch", "TSPLIB: DIMENSION is " + std::to_string(inst.n) +
                                                 " but NODE_COORD_SECTION has " +
                                                 std::to_string(coord_lines.size()) + " entries");
    }
    inst.coords.assign(inst.n, Point{});
    std::vector<bool> seen(inst.n, false);
    for (const auto& cl : coord_lines) {
      std::istringstream ss(cl);
      std::string id_tok, x_tok, y_tok, extra;
      double id = 0, x = 0, y = 0;
      if (!(ss >> id_tok >> x_tok >> y_tok) || (ss >> extra) || !detail::parse_double(id_tok, id) ||
          !detail::parse_double(x_tok, x) || !detail::parse_double(y_tok, y)) {
        throw ParseError("malformed-coordinates", "TSPLIB: bad coordinate line '" + cl + "'");
      }
      const auto node = static_cast<std::int64_t>(id);
      if (static_cast<double>(node) != id || node < 1 || static_cast<std::size_t>(node) > inst.n ||
          seen[static_cast<std::size_t>(node - 1)]) {
        throw ParseError("dimension-mismatch", "TSPLIB: node id out of range or repeated in '" + cl + "'");
      }
      seen[static_cast<std::size_t>(node - 1)] = true;
      inst.coords[static_cast<std::size_t>(node - 1)] = {x, y};
    }
    return inst;
  }

  if (weight_type != "EXPLICIT") {
    throw ParseError("unsupported-edge-weight-type",
                     "TSPLIB: EDGE_WEIGHT_TYPE '" + weight_type + "' is not supported (EUC_2D, GEO, EXPLICIT)");
  }
  if (!saw_weights) throw ParseError("malformed-header", "TSPLIB: EDGE_WEIGHT_SECTION missing");

  const std::size_t n = inst.n;
  std::size_t expected = 0;
  if (weight_format == "FULL_MATRIX") {
    expected = n * n;
  } else if (weight_format == "LOWER_DIAG_ROW" || weight_format == "UPPER_DIAG_ROW") {
    expected = n * (n + 1) / 2;
  } else if (weight_format == "UPPER_ROW" || weight_format == "LOWER_ROW") {
    expected = n * (n - 1) / 2;
  } else {
    throw ParseError("unsupported-edge-weight-format",
                     "TSPLIB: EDGE_WEIGHT_FORMAT '" + weight_format + "' is not supported");
  }
  if (section_tokens.size() != expected) {
    throw ParseError("dimension-mismatch", "TSPLIB: " + weight_format + " with DIMENSION " +
                                               std::to_string(n) + " needs " + std::to_string(expected) +
                                               " weights, found " + std::to_string(section_tokens.size()));
  }
  std::vector<double> w(expected);
  for (std::size_t k = 0; k < expected; ++k) {
    if (!detail::parse_double(section_tokens[k], w[k])) {
      throw ParseError("malformed-weights", "TSPLIB: bad edge weight '" + section_tokens[k] + "'");
    }
  }

  std::vector<double> v(n * n, 0.0);
  auto set_pair = [&](std::size_t i, std::size_t j, double x) {
    v[i * n + j] = x;
    v[j * n + i] = x;
  };
  std::size_t k = 0;
  if (weight_format == "FULL_MATRIX") {
    v = w;
  } else if (weight_format == "LOWER_DIAG_ROW") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) set_pair(i, j, w[k++]);
  } else if (weight_format == "UPPER_DIAG_ROW") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) set_pair(i, j, w[k++]);
  } else if (weight_format == "UPPER_ROW") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) set_pair(i, j, w[k++]);
  } else {  // LOWER_ROW
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) set_pair(i, j, w[k++]);
  }
  inst.geometry = Geometry::explicit_matrix;
  try {
    inst.explicit_costs = CostMatrix(n, std::move(v));
  } catch (const DomainError& e) {
    throw ParseError(e.kind(), "TSPLIB: " + std::string(e.what()));
  }
  return inst;
}

inline Instance parse_tsplib(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_tsplib(in);
}

// Writes any instance as an EXPLICIT FULL_MATRIX TSPLIB file. Values are
// printed with round-trip precision.
inline std::string write_tsplib_explicit(const Instance& inst) {
  const CostMatrix c = materialize_costs(inst);
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "NAME : " << inst.name << "\nTYPE : TSP\nDIMENSION : " << inst.n
      << "\nEDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
  for (std::size_t i = 0; i < inst.n; ++i) {
    for (std::size_t j = 0; j < inst.n; ++j) out << (j ? " " : "") << c(i, j);
    out << '\n';
  }
  out << "EOF\n";
  return out.str();
}

}  // namespace tgbtsp
