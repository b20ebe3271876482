#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "splineflow/analysis.hpp"
#include "splineflow/config.hpp"
#include "splineflow/errors.hpp"
#include "splineflow/evaluate.hpp"
#include "splineflow/flow.hpp"
#include "splineflow/partition.hpp"

namespace splineflow {
namespace io {

namespace detail {

using splineflow::detail::format_double;
using splineflow::detail::parse_count;
using splineflow::detail::parse_double;

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Parses `key=value` tokens of a header line that starts with the given tag.
inline std::map<std::string, std::string> parse_header(const std::string& line,
                                                       const std::string& tag, long line_no) {
  std::istringstream is(line);
  std::string word;
  is >> word;
  if (word != tag) throw ParseError("expected header '" + tag + "', got '" + word + "'", line_no);
  is >> word;
  if (word != "v1") throw ParseError("unsupported version '" + word + "'", line_no);
  std::map<std::string, std::string> kv;
  while (is >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw ParseError("bad header token '" + word + "'", line_no);
    kv[word.substr(0, eq)] = word.substr(eq + 1);
  }
  return kv;
}

inline const std::string& header_field(const std::map<std::string, std::string>& kv,
                                       const std::string& key, long line_no) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("header is missing '" + key + "'", line_no);
  return it->second;
}

// little-endian scalar I/O

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError("unexpected end of binary file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ParseError("unexpected end of binary file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Flow files
// ---------------------------------------------------------------------------

// Canonical CSV: header, optional #config line, one row per sample.
inline void write_flow_csv(std::ostream& os, const Flow& flow, const std::string& config = "") {
  os << "#splineflow-flow v1 M=" << flow.trajectory_count() << " S=" << flow.sample_count()
     << " dims=" << flow.dims << " dt=" << (flow.dt ? detail::format_double(*flow.dt) : "na")
     << "\n";
  if (!config.empty()) os << "#config " << config << "\n";
  for (std::size_t i = 0; i < flow.trajectory_count(); ++i)
    for (std::size_t j = 0; j < flow.trajectories[i].size(); ++j) {
      const Vec3& p = flow.trajectories[i][j];
      os << i << ',' << j << ',' << detail::format_double(p.x) << ','
         << detail::format_double(p.y) << ',' << detail::format_double(p.z) << "\n";
    }
}

inline Flow read_flow_csv(std::istream& is) {
  std::string line;
  long line_no = 0;
  if (!std::getline(is, line)) throw ParseError("empty flow file", 1);
  ++line_no;
  const auto kv = detail::parse_header(line, "#splineflow-flow", line_no);
  Flow flow;
  const std::size_t m = detail::parse_count(detail::header_field(kv, "M", line_no), line_no);
  const std::size_t s = detail::parse_count(detail::header_field(kv, "S", line_no), line_no);
  flow.dims =
      static_cast<int>(detail::parse_count(detail::header_field(kv, "dims", line_no), line_no));
  const std::string& dt = detail::header_field(kv, "dt", line_no);
  if (dt != "na") flow.dt = detail::parse_double(dt, line_no);
  flow.trajectories.assign(m, Trajectory(s));
  std::vector<std::vector<bool>> seen(m, std::vector<bool>(s, false));
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 5) throw ParseError("expected 5 columns", line_no);
    const std::size_t i = detail::parse_count(cells[0], line_no);
    const std::size_t j = detail::parse_count(cells[1], line_no);
    if (i >= m || j >= s) throw ParseError("sample index out of range", line_no);
    flow.trajectories[i][j] = {detail::parse_double(cells[2], line_no),
                               detail::parse_double(cells[3], line_no),
                               detail::parse_double(cells[4], line_no)};
    seen[i][j] = true;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < s; ++j)
      if (!seen[i][j])
        throw ParseError("flow file is missing sample (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
  flow.validate();
  return flow;
}

// Binary alternative: magic SFLW, version, M, S, dims, then row-major
// doubles (dims components per sample), little-endian.
inline void write_flow_bin(std::ostream& os, const Flow& flow) {
  os.write("SFLW", 4);
  detail::put_u32(os, 1);
  detail::put_u64(os, flow.trajectory_count());
  detail::put_u64(os, flow.sample_count());
  os.put(static_cast<char>(flow.dims));
  for (const Trajectory& t : flow.trajectories)
    for (const Vec3& p : t)
      for (int d = 0; d < flow.dims; ++d) detail::put_f64(os, p[d]);
}

inline Flow read_flow_bin(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SFLW", 4) != 0)
    throw ParseError("not a flow binary (bad magic)");
  const std::uint32_t version = detail::get_u32(is);
  if (version != 1) throw ParseError("unsupported flow binary version " + std::to_string(version));
  Flow flow;
  const std::uint64_t m = detail::get_u64(is);
  const std::uint64_t s = detail::get_u64(is);
  const int dims = is.get();
  if (dims != 2 && dims != 3) throw ParseError("bad dims in flow binary");
  flow.dims = dims;
  flow.trajectories.assign(m, Trajectory(s));
  for (std::uint64_t i = 0; i < m; ++i)
    for (std::uint64_t j = 0; j < s; ++j)
      for (int d = 0; d < dims; ++d) flow.trajectories[i][j][d] = detail::get_f64(is);
  flow.validate();
  return flow;
}

// ---------------------------------------------------------------------------
// Coefficient files
// ---------------------------------------------------------------------------

inline void write_coeffs_csv(std::ostream& os, const CoeffSet& set, const std::string& config = "") {
  os << "#splineflow-coeffs v1 M=" << set.M << " N=" << set.N << " dims=" << set.dims
     << " conv=" << convention_name(set.convention)
     << " alpha=" << detail::format_double(set.blend.alpha)
     << " beta=" << detail::format_double(set.blend.beta) << " curve=" << (set.raw_u ? "u" : "v")
     << "\n";
  if (!config.empty()) os << "#config " << config << "\n";
  for (std::size_t g = 0; g < set.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < set.dims; ++d) {
        const CoeffPlane& plane = set.plane(g, k, d);
        for (std::size_t i = 0; i < set.M; ++i) {
          const auto& row = plane.rows[i];
          os << i << ',' << g << ',' << k << ',' << d << ',' << detail::format_double(row[0])
             << ',' << detail::format_double(row[1]) << ',' << detail::format_double(row[2])
             << ',' << detail::format_double(row[3]) << "\n";
        }
      }
}

inline CoeffSet read_coeffs_csv(std::istream& is) {
  std::string line;
  long line_no = 0;
  if (!std::getline(is, line)) throw ParseError("empty coefficient file", 1);
  ++line_no;
  const auto kv = detail::parse_header(line, "#splineflow-coeffs", line_no);
  CoeffSet set;
  set.M = detail::parse_count(detail::header_field(kv, "M", line_no), line_no);
  set.N = detail::parse_count(detail::header_field(kv, "N", line_no), line_no);
  set.dims =
      static_cast<int>(detail::parse_count(detail::header_field(kv, "dims", line_no), line_no));
  set.convention = convention_from_name(detail::header_field(kv, "conv", line_no));
  set.blend.alpha = detail::parse_double(detail::header_field(kv, "alpha", line_no), line_no);
  set.blend.beta = detail::parse_double(detail::header_field(kv, "beta", line_no), line_no);
  if (const auto it = kv.find("curve"); it != kv.end()) set.raw_u = it->second == "u";
  set.planes.resize(set.N * 3 * static_cast<std::size_t>(set.dims));
  for (std::size_t g = 0; g < set.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < set.dims; ++d) {
        CoeffPlane& plane = set.planes[set.plane_index(g, k, d)];
        plane.M = set.M;
        plane.rows.assign(set.M, {0, 0, 0, 0});
        plane.group_index = g;
        plane.segment_k = k;
        plane.dim = d;
      }
  std::vector<bool> seen(set.planes.size() * set.M, false);
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 8) throw ParseError("expected 8 columns", line_no);
    const std::size_t i = detail::parse_count(cells[0], line_no);
    const std::size_t g = detail::parse_count(cells[1], line_no);
    const std::size_t k = detail::parse_count(cells[2], line_no);
    const std::size_t d = detail::parse_count(cells[3], line_no);
    if (i >= set.M || g >= set.N || k < 1 || k > 3 || d >= static_cast<std::size_t>(set.dims))
      throw ParseError("coefficient row out of range", line_no);
    CoeffPlane& plane = set.planes[set.plane_index(g, static_cast<int>(k), static_cast<int>(d))];
    plane.rows[i] = {detail::parse_double(cells[4], line_no), detail::parse_double(cells[5], line_no),
                     detail::parse_double(cells[6], line_no),
                     detail::parse_double(cells[7], line_no)};
    seen[set.plane_index(g, static_cast<int>(k), static_cast<int>(d)) * set.M + i] = true;
  }
  for (std::size_t idx = 0; idx < seen.size(); ++idx)
    if (!seen[idx])
      throw IncompleteInputError("coefficient file is missing rows (plane " +
                                 std::to_string(idx / set.M) + ", trajectory " +
                                 std::to_string(idx % set.M) + ")");
  return set;
}

// Binary mirror of the flow layout: magic SCOF, version, M, N, dims,
// convention, curve tag, alpha, beta, then plane-major doubles.
inline void write_coeffs_bin(std::ostream& os, const CoeffSet& set) {
  os.write("SCOF", 4);
  detail::put_u32(os, 1);
  detail::put_u64(os, set.M);
  detail::put_u64(os, set.N);
  os.put(static_cast<char>(set.dims));
  os.put(set.convention == Convention::bezier_A ? 0 : 1);
  os.put(set.raw_u ? 1 : 0);
  detail::put_f64(os, set.blend.alpha);
  detail::put_f64(os, set.blend.beta);
  for (std::size_t g = 0; g < set.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < set.dims; ++d) {
        const CoeffPlane& plane = set.plane(g, k, d);
        for (std::size_t i = 0; i < set.M; ++i)
          for (double v : plane.rows[i]) detail::put_f64(os, v);
      }
}

inline CoeffSet read_coeffs_bin(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "SCOF", 4) != 0)
    throw ParseError("not a coefficient binary (bad magic)");
  const std::uint32_t version = detail::get_u32(is);
  if (version != 1)
    throw ParseError("unsupported coefficient binary version " + std::to_string(version));
  CoeffSet set;
  set.M = detail::get_u64(is);
  set.N = detail::get_u64(is);
  set.dims = is.get();
  if (set.dims != 2 && set.dims != 3) throw ParseError("bad dims in coefficient binary");
  const int conv = is.get();
  set.convention = conv == 0 ? Convention::bezier_A : Convention::paper_literal;
  set.raw_u = is.get() == 1;
  set.blend.alpha = detail::get_f64(is);
  set.blend.beta = detail::get_f64(is);
  set.planes.resize(set.N * 3 * static_cast<std::size_t>(set.dims));
  for (std::size_t g = 0; g < set.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < set.dims; ++d) {
        CoeffPlane& plane = set.planes[set.plane_index(g, k, d)];
        plane.M = set.M;
        plane.group_index = g;
        plane.segment_k = k;
        plane.dim = d;
        plane.rows.resize(set.M);
        for (std::size_t i = 0; i < set.M; ++i)
          for (double& v : plane.rows[i]) v = detail::get_f64(is);
      }
  return set;
}

// ---------------------------------------------------------------------------
// Snapshot files (plot-ready output)
// ---------------------------------------------------------------------------

inline void write_snapshot_csv(std::ostream& os, const Snapshot& snap,
                               const std::string& config = "") {
  os << "#splineflow-snap v1 M=" << snap.polylines.size()
     << " points=" << snap.points_per_trajectory() << " dims=" << snap.dims << " V=" << snap.V
     << "\n";
  if (!config.empty()) os << "#config " << config << "\n";
  for (std::size_t i = 0; i < snap.polylines.size(); ++i)
    for (std::size_t j = 0; j < snap.polylines[i].size(); ++j) {
      const Vec3& p = snap.polylines[i][j];
      os << i << ',' << j << ',' << detail::format_double(p.x) << ','
         << detail::format_double(p.y) << ',' << detail::format_double(p.z) << "\n";
    }
}

inline Snapshot read_snapshot_csv(std::istream& is) {
  std::string line;
  long line_no = 0;
  if (!std::getline(is, line)) throw ParseError("empty snapshot file", 1);
  ++line_no;
  const auto kv = detail::parse_header(line, "#splineflow-snap", line_no);
  Snapshot snap;
  const std::size_t m = detail::parse_count(detail::header_field(kv, "M", line_no), line_no);
  const std::size_t pts = detail::parse_count(detail::header_field(kv, "points", line_no), line_no);
  snap.dims =
      static_cast<int>(detail::parse_count(detail::header_field(kv, "dims", line_no), line_no));
  snap.V = detail::parse_count(detail::header_field(kv, "V", line_no), line_no);
  snap.polylines.assign(m, Trajectory(pts));
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 5) throw ParseError("expected 5 columns", line_no);
    const std::size_t i = detail::parse_count(cells[0], line_no);
    const std::size_t j = detail::parse_count(cells[1], line_no);
    if (i >= m || j >= pts) throw ParseError("snapshot index out of range", line_no);
    snap.polylines[i][j] = {detail::parse_double(cells[2], line_no),
                            detail::parse_double(cells[3], line_no),
                            detail::parse_double(cells[4], line_no)};
  }
  return snap;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline void write_bench_header(std::ostream& os) {
  os << "p,M,N,V,stage,time_execution_s,time_cpu_s,time_overhead_s,speedup\n";
}

inline void write_bench_row(std::ostream& os, unsigned p, std::size_t m, std::size_t n,
                            std::size_t v, const std::string& stage, const TimingBreakdown& t,
                            double speedup) {
  os << p << ',' << m << ',' << n << ',' << v << ',' << stage << ','
     << detail::format_double(t.time_execution) << ',' << detail::format_double(t.time_cpu) << ','
     << detail::format_double(t.time_overhead) << ',' << detail::format_double(speedup) << "\n";
}

inline void write_metric(std::ostream& os, const std::string& name, double value,
                         const std::string& units) {
  os << name << ',' << detail::format_double(value) << ',' << units << "\n";
}

// Paired polylines for external plotting: the reference and the
// reconstruction, tagged by series.
inline void write_pairs_csv(std::ostream& os, const std::vector<GroundTruth>& truths,
                            const Snapshot& snap) {
  os << "series,traj_id,sample_idx,x,y,z\n";
  for (std::size_t i = 0; i < truths.size(); ++i)
    for (std::size_t j = 0; j < truths[i].polyline.size(); ++j) {
      const Vec3& p = truths[i].polyline[j];
      os << "truth," << i << ',' << j << ',' << detail::format_double(p.x) << ','
         << detail::format_double(p.y) << ',' << detail::format_double(p.z) << "\n";
    }
  for (std::size_t i = 0; i < snap.polylines.size(); ++i)
    for (std::size_t j = 0; j < snap.polylines[i].size(); ++j) {
      const Vec3& p = snap.polylines[i][j];
      os << "spline," << i << ',' << j << ',' << detail::format_double(p.x) << ','
         << detail::format_double(p.y) << ',' << detail::format_double(p.z) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Path-level helpers: format detection by content
// ---------------------------------------------------------------------------

inline Flow load_flow(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open flow file '" + path + "'");
  const int first = in.peek();
  return first == '#' ? read_flow_csv(in) : read_flow_bin(in);
}

inline void save_flow(const std::string& path, const Flow& flow, const std::string& format,
                      const std::string& config = "") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  if (format == "bin")
    write_flow_bin(out, flow);
  else
    write_flow_csv(out, flow, config);
}

inline CoeffSet load_coeffs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open coefficient file '" + path + "'");
  const int first = in.peek();
  return first == '#' ? read_coeffs_csv(in) : read_coeffs_bin(in);
}

inline void save_coeffs(const std::string& path, const CoeffSet& set, const std::string& format,
                        const std::string& config = "") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  if (format == "bin")
    write_coeffs_bin(out, set);
  else
    write_coeffs_csv(out, set, config);
}

}  // namespace io
}  // namespace splineflow
