#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "splineflow/evaluate.hpp"
#include "splineflow/flow.hpp"
#include "splineflow/geometry.hpp"

namespace splineflow {

// Largest stable time step for an advection scheme: space_step / speed.
inline double cfl_max_timestep(double space_step_cm, double speed_cm_s) {
  if (!(speed_cm_s > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(space_step_cm > 0.0)) throw std::invalid_argument("space step must be positive");
  return space_step_cm / speed_cm_s;
}

// Smallest grid spacing resolvable at a given output cadence: time_step * speed.
inline double cfl_min_spacestep(double time_step_s, double speed_cm_s) {
  if (!(time_step_s > 0.0) || !(speed_cm_s > 0.0))
    throw std::invalid_argument("time step and speed must be positive");
  return time_step_s * speed_cm_s;
}

// Heuristic equivalence between spline refinement by V and a V-times finer
// grid: the two formulas share every factor except V, so the ratio is V by
// construction. This is a statement of the formulas, not a proof.
struct EquivalenceReport {
  double L = 0.0;       // cm
  std::size_t N = 0;
  std::size_t V = 0;
  double speed = 0.0;   // cm/s
  double dt_splines = 0.0;  // L / (3 N s)
  double dt_fd = 0.0;       // L / (3 N V s)
  double ratio = 0.0;       // dt_splines / dt_fd = V exactly
};

inline EquivalenceReport virtual_equivalence(double length_cm, std::size_t n, std::size_t v,
                                             double speed_cm_s) {
  if (!(length_cm > 0.0) || n == 0 || v == 0 || !(speed_cm_s > 0.0))
    throw std::invalid_argument("virtual equivalence needs positive L, N, V and speed");
  EquivalenceReport r;
  r.L = length_cm;
  r.N = n;
  r.V = v;
  r.speed = speed_cm_s;
  const double segments = 3.0 * static_cast<double>(n);
  r.dt_splines = length_cm / (segments * speed_cm_s);
  r.dt_fd = length_cm / (segments * static_cast<double>(v) * speed_cm_s);
  r.ratio = static_cast<double>(v);
  return r;
}

// Dense-theoretic flop count for fitting all splines of a flow:
// 2 * (4M) * (5M) per product, N group products.
inline std::uint64_t flops_coeffs(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw std::invalid_argument("counts must be positive");
  return 40 * static_cast<std::uint64_t>(m) * m * n;
}

// Sparse flop count actually performed by the block-diagonal fit:
// 2 * 11M per product, 3N products per dimension.
inline std::uint64_t flops_coeffs_sparse(std::size_t m, std::size_t n, int dims) {
  if (m == 0 || n == 0 || dims < 1) throw std::invalid_argument("counts must be positive");
  return 2 * BlockSparseG::kNnzPerBlock * static_cast<std::uint64_t>(m) * 3 * n *
         static_cast<std::uint64_t>(dims);
}

// Exact evaluation flop count per dimension: 8 M (V+1) per product, 3N
// products. Matches the instrumented counter of the evaluation kernels.
inline std::uint64_t flops_values(std::size_t m, std::size_t n, std::size_t v) {
  if (m == 0 || n == 0 || v == 0) throw std::invalid_argument("counts must be positive");
  return 8 * static_cast<std::uint64_t>(m) * (v + 1) * 3 * n;
}

// Deviation of a reconstructed polyline from a densely sampled reference,
// normalized by the mean coarse chord length.
struct ErrorMetrics {
  double max_deviation = 0.0;  // cm
  double rms_deviation = 0.0;  // cm
  double mean_chord = 0.0;     // cm, mean coarse-segment length
};

namespace detail {

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double denom = dot(ab, ab);
  double t = denom > 0.0 ? dot(p - a, ab) / denom : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec3 q = a + ab * t;
  return norm(p - q);
}

inline double point_polyline_distance(const Vec3& p, const Trajectory& poly) {
  if (poly.size() == 1) return norm(p - poly[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[i + 1]));
  return best;
}

inline double mean_chord_length(const Trajectory& coarse) {
  if (coarse.size() < 2) throw std::invalid_argument("coarse trajectory needs at least 2 samples");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) sum += norm(coarse[i + 1] - coarse[i]);
  return sum / static_cast<double>(coarse.size() - 1);
}

}  // namespace detail

// Distance of every snapshot point to the nearest point of the truth
// polyline; max and root-mean-square, normalized by the mean chord of the
// coarse samples the spline was fitted to.
inline ErrorMetrics trajectory_error(const Trajectory& snapshot, const GroundTruth& truth,
                                     const Trajectory& coarse) {
  if (snapshot.empty() || truth.polyline.empty())
    throw std::invalid_argument("trajectory_error needs non-empty polylines");
  ErrorMetrics m;
  m.mean_chord = detail::mean_chord_length(coarse);
  double sum_sq = 0.0;
  for (const Vec3& p : snapshot) {
    const double d = detail::point_polyline_distance(p, truth.polyline);
    m.max_deviation = std::max(m.max_deviation, d);
    sum_sq += d * d;
  }
  m.rms_deviation = std::sqrt(sum_sq / static_cast<double>(snapshot.size()));
  return m;
}

// Pooled metrics over a whole flow: per-trajectory distances against each
// trajectory's own truth, one rms/max/mean-chord for the flow.
inline ErrorMetrics flow_error(const Snapshot& snap, const std::vector<GroundTruth>& truths,
                               const Flow& coarse) {
  if (snap.polylines.size() != truths.size() ||
      snap.polylines.size() != coarse.trajectories.size())
    throw std::invalid_argument("flow_error needs one truth and one coarse trajectory per polyline");
  if (snap.polylines.empty()) throw std::invalid_argument("empty snapshot");
  ErrorMetrics m;
  double sum_sq = 0.0;
  std::size_t count = 0;
  double chord_sum = 0.0;
  for (std::size_t i = 0; i < snap.polylines.size(); ++i) {
    chord_sum += detail::mean_chord_length(coarse.trajectories[i]);
    for (const Vec3& p : snap.polylines[i]) {
      const double d = detail::point_polyline_distance(p, truths[i].polyline);
      m.max_deviation = std::max(m.max_deviation, d);
      sum_sq += d * d;
      ++count;
    }
  }
  m.rms_deviation = std::sqrt(sum_sq / static_cast<double>(count));
  m.mean_chord = chord_sum / static_cast<double>(snap.polylines.size());
  return m;
}

}  // namespace splineflow
