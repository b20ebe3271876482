#pragma once

#include <cstddef>
#include <vector>

#include "splineflow/batch.hpp"
#include "splineflow/evaluate.hpp"
#include "splineflow/flow.hpp"
#include "splineflow/spline.hpp"

namespace splineflow {

struct FitOptions {
  Convention convention = Convention::bezier_A;
  BlendParams blend;
  bool raw_u = false;                          // export u instead of the blended v
  GroupingMode grouping = GroupingMode::strict;
  GStorage storage = GStorage::constant_block;
};

namespace detail {

// Stacked input restricted to trajectories [begin, end).
inline StackedInput assemble_b_range(const FlowGroups& groups, std::size_t begin, std::size_t end,
                                     std::size_t group_index, int k, Convention conv, int dim) {
  StackedInput b;
  b.M = end - begin;
  b.group_index = group_index;
  b.segment_k = k;
  b.dim = dim;
  b.convention = conv;
  b.values.reserve(5 * b.M);
  for (std::size_t i = begin; i < end; ++i) {
    const GroupOfFour& g = groups[i][group_index];
    b.values.push_back(g.points[k][dim]);
    b.values.push_back(g.points[k - 1][dim]);
    b.values.push_back(g.bezier.B[dim]);
    b.values.push_back(g.bezier.C[dim]);
    b.values.push_back(fifth_element(g, conv, dim));
  }
  return b;
}

}  // namespace detail

// Allocates the full plane layout of a coefficient set without computing it.
inline CoeffSet make_empty_coeff_set(std::size_t m, std::size_t n, int dims,
                                     const FitOptions& opts) {
  CoeffSet set;
  set.M = m;
  set.N = n;
  set.dims = dims;
  set.convention = opts.convention;
  set.blend = opts.blend;
  set.raw_u = opts.raw_u;
  set.planes.resize(n * 3 * static_cast<std::size_t>(dims));
  for (std::size_t g = 0; g < n; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < dims; ++d) {
        CoeffPlane& plane = set.planes[set.plane_index(g, k, d)];
        plane.M = m;
        plane.rows.resize(m);
        plane.group_index = g;
        plane.segment_k = k;
        plane.dim = d;
      }
  return set;
}

// Computes coefficient rows [begin, end) of every plane: one G b product per
// (group, segment, dimension) over the range, then the blend (unless raw u
// was requested). Ranges touch disjoint rows, so shards can run concurrently.
inline void fit_rows(const FlowGroups& groups, std::size_t begin, std::size_t end,
                     const FitOptions& opts, CoeffSet& out) {
  if (begin >= end) return;
  const BlockSparseG g_op = assemble_g(end - begin, opts.storage);
  for (std::size_t g = 0; g < out.N; ++g) {
    for (int k = 1; k <= 3; ++k) {
      for (int d = 0; d < out.dims; ++d) {
        const StackedInput b =
            detail::assemble_b_range(groups, begin, end, g, k, opts.convention, d);
        const CoeffPlane part = batched_coeffs(g_op, b);
        CoeffPlane& plane = out.planes[out.plane_index(g, k, d)];
        if (opts.raw_u) {
          for (std::size_t i = 0; i < part.M; ++i) plane.rows[begin + i] = part.rows[i];
        } else {
          const double alpha = opts.blend.alpha;
          const double beta = opts.blend.beta;
          for (std::size_t i = 0; i < part.M; ++i) {
            const SegmentCoeffs bez = bezier_segment_power(groups[begin + i][g], k);
            auto& row = plane.rows[begin + i];
            row[0] = alpha * bez.a[d] + beta * part.rows[i][0];
            row[1] = alpha * bez.b[d] + beta * part.rows[i][1];
            row[2] = alpha * bez.c[d] + beta * part.rows[i][2];
            row[3] = alpha * bez.d[d] + beta * part.rows[i][3];
          }
        }
      }
    }
  }
}

// Whole-flow fit: groups every trajectory, then computes all 3N*dims planes.
inline CoeffSet fit_flow(const Flow& flow, const FitOptions& opts, std::size_t* dropped = nullptr) {
  opts.blend.validate();
  const FlowGroups groups = group_flow(flow, opts.grouping, dropped);
  const std::size_t n = groups.empty() ? 0 : groups[0].size();
  CoeffSet set = make_empty_coeff_set(flow.trajectory_count(), n, flow.dims, opts);
  fit_rows(groups, 0, flow.trajectory_count(), opts, set);
  return set;
}

// Evaluates snapshot rows [begin, end) from a complete coefficient set.
inline void eval_rows(const CoeffSet& coeffs, const TickMatrix& ticks, std::size_t begin,
                      std::size_t end, Snapshot& snap) {
  for (std::size_t g = 0; g < coeffs.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < coeffs.dims; ++d)
        detail::eval_scatter_rows(coeffs.plane(g, k, d), ticks, begin, end, snap);
}

// gen/fit already done; evaluate everything at V+1 ticks per segment.
inline Snapshot eval_flow(const CoeffSet& coeffs, std::size_t V) {
  return assemble_snapshot(coeffs, V);
}

// Fit + evaluate in one call.
inline Snapshot run_pipeline(const Flow& flow, const FitOptions& opts, std::size_t V) {
  return eval_flow(fit_flow(flow, opts), V);
}

}  // namespace splineflow
