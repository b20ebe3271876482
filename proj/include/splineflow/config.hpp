#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "splineflow/errors.hpp"
#include "splineflow/field.hpp"
#include "splineflow/flow.hpp"
#include "splineflow/partition.hpp"
#include "splineflow/spline.hpp"

namespace splineflow {

namespace detail {

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, long line = -1) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ParseError("bad number '" + s + "'", line);
  return v;
}

inline std::uint64_t parse_count(const std::string& s, long line = -1) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw ParseError("bad count '" + s + "'", line);
  return v;
}

}  // namespace detail

// Everything a run depends on. Validated up front and serialized verbatim
// into every output header, so equal configs give identical outputs.
struct RunConfig {
  // flow generation
  std::string field = "uniform";
  double speed = 1.0;
  double radius = 1.0;
  double hill_height = 10.0;
  double hill_width = 20.0;
  double jitter = 0.0;
  std::uint64_t seed = 0;
  std::size_t M = 1;
  std::size_t S = 4;
  double dt = 1.0;
  // fit & evaluation
  std::size_t V = 10;
  unsigned p = 1;
  double alpha = 0.5;
  double beta = 0.5;
  std::string convention = "bezier-A";
  bool strict = true;
  bool raw_u = false;
  std::string format = "csv";

  FlowField make_field() const {
    FlowField f;
    f.kind = field_from_name(field);
    f.speed = speed;
    f.radius = radius;
    f.hill_height = hill_height;
    f.hill_width = hill_width;
    f.jitter = jitter;
    f.seed = seed;
    return f;
  }

  Convention make_convention() const { return convention_from_name(convention); }

  BlendParams make_blend() const { return BlendParams{alpha, beta, false}; }

  GroupingMode make_grouping() const {
    return strict ? GroupingMode::strict : GroupingMode::relaxed;
  }

  void validate() const {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (S < 4) throw std::invalid_argument("S must be at least 4");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (V < 1) throw std::invalid_argument("V must be at least 1");
    if (p < 1) throw std::invalid_argument("p must be at least 1");
    if (format != "csv" && format != "bin")
      throw std::invalid_argument("format must be csv or bin");
    make_field().validate();
    make_convention();
    make_blend().validate();
  }

  // Canonical single-line key=value form, fixed key order.
  std::string to_kv() const {
    std::ostringstream os;
    os << "field=" << field << " speed=" << detail::format_double(speed)
       << " radius=" << detail::format_double(radius)
       << " hill_height=" << detail::format_double(hill_height)
       << " hill_width=" << detail::format_double(hill_width)
       << " jitter=" << detail::format_double(jitter) << " seed=" << seed << " M=" << M
       << " S=" << S << " dt=" << detail::format_double(dt) << " V=" << V << " p=" << p
       << " alpha=" << detail::format_double(alpha) << " beta=" << detail::format_double(beta)
       << " convention=" << convention << " strict=" << (strict ? 1 : 0)
       << " raw_u=" << (raw_u ? 1 : 0) << " format=" << format;
    return os.str();
  }

  void set(const std::string& key, const std::string& value, long line = -1) {
    if (key == "field") field = value;
    else if (key == "speed") speed = detail::parse_double(value, line);
    else if (key == "radius") radius = detail::parse_double(value, line);
    else if (key == "hill_height") hill_height = detail::parse_double(value, line);
    else if (key == "hill_width") hill_width = detail::parse_double(value, line);
    else if (key == "jitter") jitter = detail::parse_double(value, line);
    else if (key == "seed") seed = detail::parse_count(value, line);
    else if (key == "M") M = detail::parse_count(value, line);
    else if (key == "S") S = detail::parse_count(value, line);
    else if (key == "dt") dt = detail::parse_double(value, line);
    else if (key == "V") V = detail::parse_count(value, line);
    else if (key == "p") p = static_cast<unsigned>(detail::parse_count(value, line));
    else if (key == "alpha") alpha = detail::parse_double(value, line);
    else if (key == "beta") beta = detail::parse_double(value, line);
    else if (key == "convention") convention = value;
    else if (key == "strict") strict = value == "1" || value == "true";
    else if (key == "raw_u") raw_u = value == "1" || value == "true";
    else if (key == "format") format = value;
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }

  // key=value or `key = value` lines; # starts a comment.
  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string raw;
    long line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
      const auto strip = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
      };
      line = strip(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
      cfg.set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)), line_no);
    }
    return cfg;
  }
};

}  // namespace splineflow
