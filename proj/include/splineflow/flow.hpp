#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "splineflow/errors.hpp"
#include "splineflow/geometry.hpp"

namespace splineflow {

// A batch of M trajectories, S samples each. The raw input of the pipeline.
struct Flow {
  std::vector<Trajectory> trajectories;
  int dims = 3;                   // 2 or 3; 2D flows keep z = 0
  std::optional<double> dt;       // uniform sample interval, seconds

  std::size_t trajectory_count() const { return trajectories.size(); }
  std::size_t sample_count() const { return trajectories.empty() ? 0 : trajectories[0].size(); }

  // Enforces the structural invariants: M >= 1, S >= 4, equal lengths, finite coordinates.
  void validate() const {
    if (trajectories.empty()) throw ShapeError("flow has no trajectories");
    const std::size_t s = trajectories[0].size();
    if (s < 4) throw ShapeError("trajectories need at least 4 samples, got " + std::to_string(s));
    if (dims != 2 && dims != 3) throw ShapeError("dims must be 2 or 3");
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      if (trajectories[i].size() != s)
        throw ShapeError("ragged flow: trajectory " + std::to_string(i) + " has " +
                         std::to_string(trajectories[i].size()) + " samples, expected " +
                         std::to_string(s));
      for (const Vec3& p : trajectories[i])
        if (!finite(p)) throw ShapeError("non-finite coordinate in trajectory " + std::to_string(i));
    }
  }
};

// Power-basis coefficients b(s) = A s^3 + B s^2 + C s + D of the cubic whose
// control points are the four samples, expanded per dimension from the
// Bernstein basis.
struct BezierPower {
  Vec3 A, B, C, D;
};

// Expand the control-polygon cubic of P1..P4 into power form.
// A = -P1+3P2-3P3+P4, B = 3P1-6P2+3P3, C = -3P1+3P2, D = P1, so that
// b(0) = P1 and A+B+C+D = P4.
inline BezierPower bezier_power_coeffs(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                       const Vec3& p4) {
  BezierPower out;
  for (int d = 0; d < 3; ++d) {
    const double a = p1[d], b = p2[d], c = p3[d], e = p4[d];
    out.A[d] = -a + 3.0 * b - 3.0 * c + e;
    out.B[d] = 3.0 * a - 6.0 * b + 3.0 * c;
    out.C[d] = -3.0 * a + 3.0 * b;
    out.D[d] = a;
  }
  return out;
}

// Four consecutive samples plus the power coefficients of their control polygon.
// Consecutive groups share their boundary point: group g covers samples
// [3g, 3g+3] of the trajectory.
struct GroupOfFour {
  std::array<Vec3, 4> points;
  BezierPower bezier;
  std::size_t group_index = 0;
};

enum class GroupingMode { strict, relaxed };

// Split a trajectory into N = (S-1)/3 shared-endpoint groups of four.
// Strict mode requires (S-1) mod 3 == 0; relaxed mode truncates trailing
// samples and reports how many were dropped through `dropped`.
inline std::vector<GroupOfFour> group_points(const Trajectory& traj,
                                             GroupingMode mode = GroupingMode::strict,
                                             std::size_t* dropped = nullptr) {
  const std::size_t s = traj.size();
  if (s < 4) throw ShapeError("trajectory needs at least 4 samples, got " + std::to_string(s));
  const std::size_t rem = (s - 1) % 3;
  if (rem != 0 && mode == GroupingMode::strict)
    throw ShapeError("trajectory length " + std::to_string(s) +
                     " does not satisfy (S-1) mod 3 = 0; use relaxed mode to truncate");
  if (dropped) *dropped = rem;
  const std::size_t n = (s - 1) / 3;
  std::vector<GroupOfFour> groups;
  groups.reserve(n);
  for (std::size_t g = 0; g < n; ++g) {
    GroupOfFour grp;
    for (int j = 0; j < 4; ++j) grp.points[j] = traj[3 * g + j];
    grp.bezier = bezier_power_coeffs(grp.points[0], grp.points[1], grp.points[2], grp.points[3]);
    grp.group_index = g;
    groups.push_back(grp);
  }
  return groups;
}

// Groups for every trajectory of a flow; all trajectories get the same N.
inline std::vector<std::vector<GroupOfFour>> group_flow(const Flow& flow,
                                                        GroupingMode mode = GroupingMode::strict,
                                                        std::size_t* dropped = nullptr) {
  flow.validate();
  std::vector<std::vector<GroupOfFour>> out;
  out.reserve(flow.trajectory_count());
  for (const Trajectory& t : flow.trajectories) out.push_back(group_points(t, mode, dropped));
  return out;
}

// Finely sampled reference path used as the comparison baseline.
struct GroundTruth {
  Trajectory polyline;
  double fine_dt = 0.0;  // seconds between consecutive samples
};

}  // namespace splineflow
