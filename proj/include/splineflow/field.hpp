#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "splineflow/flow.hpp"
#include "splineflow/geometry.hpp"

namespace splineflow {

enum class FieldKind { uniform, vortex, hill };

inline const char* field_name(FieldKind k) {
  switch (k) {
    case FieldKind::uniform: return "uniform";
    case FieldKind::vortex: return "vortex";
    default: return "hill";
  }
}

inline FieldKind field_from_name(const std::string& s) {
  if (s == "uniform") return FieldKind::uniform;
  if (s == "vortex") return FieldKind::vortex;
  if (s == "hill") return FieldKind::hill;
  throw std::invalid_argument("unknown field kind '" + s + "'");
}

// Analytic velocity field used as the trajectory source. Deterministic for
// fixed parameters and seed.
//
//   uniform - constant velocity `speed` along `direction`
//   vortex  - solid-body rotation about `center` (z axis); a particle on the
//             seed ring of radius `radius` moves at linear speed `speed`,
//             i.e. angular speed omega = speed / radius
//   hill    - base flow along x deflected over a Gaussian ridge of height
//             `hill_height` and width `hill_width`
struct FlowField {
  FieldKind kind = FieldKind::uniform;
  double speed = 1.0;  // cm/s
  Vec3 direction{1.0, 0.0, 0.0};
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;       // cm, vortex seed ring
  double hill_height = 10.0; // cm
  double hill_width = 20.0;  // cm
  double jitter = 0.0;       // cm, seed-point perturbation amplitude
  std::uint64_t seed = 0;

  void validate() const {
    if (!(speed > 0.0)) throw std::invalid_argument("field speed must be positive");
    if (kind == FieldKind::vortex && !(radius > 0.0))
      throw std::invalid_argument("vortex radius must be positive");
    if (kind == FieldKind::uniform && norm(direction) == 0.0)
      throw std::invalid_argument("uniform field needs a nonzero direction");
    if (kind == FieldKind::hill && (!(hill_height > 0.0) || !(hill_width > 0.0)))
      throw std::invalid_argument("hill height and width must be positive");
  }

  int dims() const {
    if (kind == FieldKind::hill) return 3;
    if (kind == FieldKind::uniform && direction.z != 0.0) return 3;
    return 2;
  }

  Vec3 velocity(const Vec3& p) const {
    switch (kind) {
      case FieldKind::uniform: {
        const double n = norm(direction);
        return direction * (speed / n);
      }
      case FieldKind::vortex: {
        const double omega = speed / radius;
        return {-omega * (p.y - center.y), omega * (p.x - center.x), 0.0};
      }
      case FieldKind::hill:
      default: {
        // ridge profile h(x) = H exp(-x^2 / (2 w^2)); vertical deflection
        // follows h'(x) and decays with height above the ridge
        const double x = p.x - center.x;
        const double h = hill_height * std::exp(-x * x / (2.0 * hill_width * hill_width));
        const double dh = -x / (hill_width * hill_width) * h;
        const double lift = std::exp(-std::max(p.z, 0.0) / (2.0 * hill_height));
        return {speed, 0.0, speed * dh * lift};
      }
    }
  }

  // Deterministic start point of trajectory i of M. Without jitter the first
  // seed sits exactly at the canonical origin of the field (trajectory 0 of a
  // uniform field starts at `center`; a vortex seed 0 at center + (radius, 0)).
  Vec3 seed_point(std::size_t i, std::size_t m) const {
    Vec3 p;
    switch (kind) {
      case FieldKind::uniform: {
        // spread seeds along an axis orthogonal to the flow direction
        const Vec3 d = direction * (1.0 / norm(direction));
        Vec3 perp = std::abs(d.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        perp = perp - d * dot(perp, d);
        perp = perp * (1.0 / norm(perp));
        p = center + perp * static_cast<double>(i);
        break;
      }
      case FieldKind::vortex: {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
        p = center + Vec3{radius * std::cos(angle), radius * std::sin(angle), 0.0};
        break;
      }
      case FieldKind::hill:
      default: {
        // line of seeds upwind of the ridge, spread laterally
        const double y = static_cast<double>(i) - static_cast<double>(m - 1) / 2.0;
        p = center + Vec3{-4.0 * hill_width, y, 0.5 * hill_height};
        break;
      }
    }
    if (jitter > 0.0) {
      std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + i);
      std::uniform_real_distribution<double> u(-jitter, jitter);
      p.x += u(rng);
      p.y += u(rng);
      if (dims() == 3) p.z += u(rng);
    }
    return p;
  }
};

namespace detail {

// One classical 4th-order step of dp/dt = field(p).
inline Vec3 rk4_step(const FlowField& field, const Vec3& p, double h) {
  const Vec3 k1 = field.velocity(p);
  const Vec3 k2 = field.velocity(p + k1 * (h / 2.0));
  const Vec3 k3 = field.velocity(p + k2 * (h / 2.0));
  const Vec3 k4 = field.velocity(p + k3 * h);
  return p + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
}

// Advance by `interval` seconds using substeps no longer than ~1/128 s.
// The substep count is a power of two so that uniform advection of exact
// coordinates stays exact.
inline Vec3 advect_interval(const FlowField& field, Vec3 p, double interval) {
  constexpr double kMaxStep = 1.0 / 128.0;
  std::size_t n = 16;
  while (interval / static_cast<double>(n) > kMaxStep) n *= 2;
  const double h = interval / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) p = rk4_step(field, p, h);
  return p;
}

}  // namespace detail

// Advect M seed points through the field, sampling every coarse_dt seconds.
// Bit-deterministic for fixed parameters and seed.
inline Flow generate_flow(const FlowField& field, std::size_t m, std::size_t s, double coarse_dt) {
  field.validate();
  if (m < 1) throw std::invalid_argument("trajectory count M must be at least 1");
  if (s < 4) throw std::invalid_argument("sample count S must be at least 4");
  if (!(coarse_dt > 0.0)) throw std::invalid_argument("sample interval dt must be positive");
  Flow flow;
  flow.dims = field.dims();
  flow.dt = coarse_dt;
  flow.trajectories.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Trajectory& traj = flow.trajectories[i];
    traj.reserve(s);
    Vec3 p = field.seed_point(i, m);
    traj.push_back(p);
    for (std::size_t j = 1; j < s; ++j) {
      p = detail::advect_interval(field, p, coarse_dt);
      traj.push_back(p);
    }
  }
  flow.validate();
  return flow;
}

// Finely sampled reference path from the same integrator as generate_flow.
// If fine_dt does not divide the duration, a final partial step closes the
// polyline at `duration`.
inline GroundTruth ground_truth(const FlowField& field, const Vec3& start, double duration,
                                double fine_dt) {
  field.validate();
  if (!(fine_dt > 0.0)) throw std::invalid_argument("fine_dt must be positive");
  if (!(duration > 0.0) || fine_dt > duration)
    throw std::invalid_argument("duration must be positive and at least fine_dt");
  GroundTruth out;
  out.fine_dt = fine_dt;
  const std::size_t n = static_cast<std::size_t>(std::floor(duration / fine_dt + 1e-9));
  Vec3 p = start;
  out.polyline.push_back(p);
  for (std::size_t j = 1; j <= n; ++j) {
    p = detail::advect_interval(field, p, fine_dt);
    out.polyline.push_back(p);
  }
  const double remainder = duration - static_cast<double>(n) * fine_dt;
  if (remainder > 1e-9 * fine_dt) {
    p = detail::advect_interval(field, p, remainder);
    out.polyline.push_back(p);
  }
  return out;
}

}  // namespace splineflow
