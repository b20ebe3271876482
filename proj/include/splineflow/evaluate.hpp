#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "splineflow/batch.hpp"
#include "splineflow/errors.hpp"
#include "splineflow/geometry.hpp"
#include "splineflow/spline.hpp"

namespace splineflow {

// 4 x (V+1) matrix of parameter-tick powers. Column j is
// ((j/V)^3, (j/V)^2, j/V, 1); multiplying an M x 4 coefficient block by it
// evaluates every cubic at every tick in one product.
struct TickMatrix {
  std::size_t V = 0;
  std::vector<double> entries;  // row-major, 4 rows of V+1

  double at(int row, std::size_t col) const { return entries[row * (V + 1) + col]; }
  std::size_t tick_count() const { return V + 1; }
};

inline TickMatrix tick_matrix(std::size_t V) {
  if (V == 0) throw std::invalid_argument("subdivision count V must be at least 1");
  TickMatrix t;
  t.V = V;
  t.entries.resize(4 * (V + 1));
  for (std::size_t j = 0; j <= V; ++j) {
    // tick computed once; powers by repeated multiplication, not pow()
    const double tk = static_cast<double>(j) / static_cast<double>(V);
    const double tk2 = tk * tk;
    t.entries[0 * (V + 1) + j] = tk2 * tk;
    t.entries[1 * (V + 1) + j] = tk2;
    t.entries[2 * (V + 1) + j] = tk;
    t.entries[3 * (V + 1) + j] = 1.0;
  }
  return t;
}

// M x (V+1) values of one segment's cubics at every tick, per dimension.
struct ValueMatrix {
  std::size_t M = 0;
  std::size_t V = 0;
  std::vector<double> values;  // row-major M x (V+1)
  std::size_t group_index = 0;
  int segment_k = 1;
  int dim = 0;

  double at(std::size_t row, std::size_t col) const { return values[row * (V + 1) + col]; }
};

// V = C T: evaluate all M cubics of a plane at all ticks. 8 M (V+1) flops,
// counted exactly.
inline ValueMatrix eval_segment_batch(const CoeffPlane& plane, const TickMatrix& ticks) {
  ValueMatrix out;
  out.M = plane.M;
  out.V = ticks.V;
  out.group_index = plane.group_index;
  out.segment_k = plane.segment_k;
  out.dim = plane.dim;
  const std::size_t w = ticks.tick_count();
  out.values.resize(plane.M * w);
  for (std::size_t i = 0; i < plane.M; ++i) {
    const auto& row = plane.rows[i];
    for (std::size_t j = 0; j < w; ++j) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r) acc += row[r] * ticks.at(r, j);
      out.values[i * w + j] = acc;
    }
  }
  flops::add(8 * static_cast<std::uint64_t>(plane.M) * w);
  return out;
}

// Complete set of coefficient planes for one flow, ordered (group, segment,
// dimension), plus the metadata every output records.
struct CoeffSet {
  std::size_t M = 0;
  std::size_t N = 0;
  int dims = 3;
  Convention convention = Convention::bezier_A;
  BlendParams blend;
  bool raw_u = false;  // planes hold the unblended u instead of v
  std::vector<CoeffPlane> planes;

  std::size_t plane_index(std::size_t g, int k, int dim) const {
    return (g * 3 + static_cast<std::size_t>(k - 1)) * static_cast<std::size_t>(dims) +
           static_cast<std::size_t>(dim);
  }

  const CoeffPlane& plane(std::size_t g, int k, int dim) const {
    if (g >= N || k < 1 || k > 3 || dim < 0 || dim >= dims)
      throw std::invalid_argument("plane (" + std::to_string(g) + "," + std::to_string(k) + "," +
                                  std::to_string(dim) + ") out of range");
    const std::size_t idx = plane_index(g, k, dim);
    if (idx >= planes.size() || planes[idx].M != M)
      throw IncompleteInputError("coefficient set is missing plane (" + std::to_string(g) + "," +
                                 std::to_string(k) + "," + std::to_string(dim) + ")");
    return planes[idx];
  }

  void validate_complete() const {
    if (planes.size() != N * 3 * static_cast<std::size_t>(dims))
      throw IncompleteInputError("coefficient set has " + std::to_string(planes.size()) +
                                 " planes, expected " + std::to_string(N * 3 * dims));
    for (std::size_t g = 0; g < N; ++g)
      for (int k = 1; k <= 3; ++k)
        for (int d = 0; d < dims; ++d) plane(g, k, d);
  }
};

// Fine polylines for all trajectories: 3NV + 1 points each. Segments are
// evaluated in order and the leading tick of every segment after the first
// is dropped (it duplicates the previous segment's trailing tick).
struct Snapshot {
  std::vector<Trajectory> polylines;
  std::size_t V = 0;
  int dims = 3;

  std::size_t points_per_trajectory() const {
    return polylines.empty() ? 0 : polylines[0].size();
  }
};

namespace detail {

// Evaluates plane rows [row_begin, row_end) and scatters the ticks into the
// snapshot polylines. Same inner accumulation as eval_segment_batch, so
// sharded and whole-flow evaluation agree bit for bit.
inline void eval_scatter_rows(const CoeffPlane& plane, const TickMatrix& ticks,
                              std::size_t row_begin, std::size_t row_end, Snapshot& snap) {
  const std::size_t V = ticks.V;
  const std::size_t seg_base =
      (plane.group_index * 3 + static_cast<std::size_t>(plane.segment_k - 1)) * V;
  const bool first_segment = (plane.group_index == 0 && plane.segment_k == 1);
  const std::size_t j0 = first_segment ? 0 : 1;
  for (std::size_t i = row_begin; i < row_end; ++i) {
    const auto& row = plane.rows[i];
    // full product over all V+1 ticks; the duplicate leading tick of later
    // segments is computed but not stored
    for (std::size_t j = 0; j <= V; ++j) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r) acc += row[r] * ticks.at(r, j);
      if (j >= j0) snap.polylines[i][seg_base + j][plane.dim] = acc;
    }
  }
  flops::add(8 * static_cast<std::uint64_t>(row_end - row_begin) * ticks.tick_count());
}

}  // namespace detail

// Preallocates the 3NV + 1 point polylines for a coefficient set.
inline Snapshot make_empty_snapshot(const CoeffSet& coeffs, std::size_t V) {
  Snapshot snap;
  snap.V = V;
  snap.dims = coeffs.dims;
  snap.polylines.assign(coeffs.M, Trajectory(3 * coeffs.N * V + 1));
  return snap;
}

inline Snapshot assemble_snapshot(const CoeffSet& coeffs, std::size_t V) {
  coeffs.validate_complete();
  const TickMatrix ticks = tick_matrix(V);
  Snapshot snap = make_empty_snapshot(coeffs, V);
  for (std::size_t g = 0; g < coeffs.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < coeffs.dims; ++d)
        detail::eval_scatter_rows(coeffs.plane(g, k, d), ticks, 0, coeffs.M, snap);
  return snap;
}

}  // namespace splineflow
