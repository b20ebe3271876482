#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "splineflow/flow.hpp"
#include "splineflow/geometry.hpp"

namespace splineflow {

// The constant 4x5 fitting matrix. Row r of T dotted with the input vector
// (P_{k+1}, P_k, B, C, e) yields the cubic coefficients (a, b, c, d) of
// u(t) = a t^3 + b t^2 + c t + d on t in [0,1]:
//
//     ( 1 -1 -3 -1 -6 )
//     ( 0  0  1  0  3 )
//     ( 0  0  2  1  3 )
//     ( 0  1  0  0  0 )
//
// Row 4 pins u(0) = P_k; the rows sum columnwise to (1,0,0,0,0), which pins
// u(1) = P_{k+1}. Both hold for any fifth element e.
struct TMatrix {
  std::array<std::array<double, 5>, 4> entries;

  static constexpr int kRows = 4;
  static constexpr int kCols = 5;
  static constexpr int kNnz = 11;  // nonzero count of the constant above
};

inline TMatrix t_matrix() {
  return TMatrix{{{{1, -1, -3, -1, -6},
                   {0, 0, 1, 0, 3},
                   {0, 0, 2, 1, 3},
                   {0, 1, 0, 0, 0}}}};
}

// What the fifth element of the input vector carries.
//   bezier_A      - e = A, the cubic power coefficient of the group curve.
//                   Constant trajectories stay constant (a = b = c = 0).
//   paper_literal - e = 1. Endpoint interpolation still holds, but a constant
//                   group acquires interior coefficients (-6, 3, 3).
enum class Convention { bezier_A, paper_literal };

inline const char* convention_name(Convention c) {
  return c == Convention::bezier_A ? "bezier-A" : "paper-literal";
}

inline Convention convention_from_name(const std::string& s) {
  if (s == "bezier-A" || s == "bezier_A") return Convention::bezier_A;
  if (s == "paper-literal" || s == "paper_literal") return Convention::paper_literal;
  throw std::invalid_argument("unknown convention '" + s + "'");
}

// Blend weights for v = alpha * bezier + beta * u. alpha + beta = 1 is
// required unless allow_non_affine is set; only then does the blended curve
// interpolate the group boundary points.
struct BlendParams {
  double alpha = 0.5;
  double beta = 0.5;
  bool allow_non_affine = false;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
      throw std::invalid_argument("blend weights must lie strictly in (0, 1)");
    if (!allow_non_affine && std::abs(alpha + beta - 1.0) > 1e-12)
      throw std::invalid_argument("alpha + beta must equal 1 (set allow_non_affine to override)");
  }
};

// Cubic coefficients of one segment, per spatial dimension:
// u(t) = a t^3 + b t^2 + c t + d, t in [0,1].
struct SegmentCoeffs {
  Vec3 a, b, c, d;
  int segment_k = 1;  // 1..3 within the group
};

namespace detail {

// e-slot value for one dimension under the active convention.
inline double fifth_element(const GroupOfFour& group, Convention conv, int dim) {
  return conv == Convention::bezier_A ? group.bezier.A[dim] : 1.0;
}

// Row r of T applied to (p_next, p_k, B, C, e). Written term by term so the
// accumulation order matches the sparse storages exactly.
inline double t_row_apply(int r, double p_next, double p_k, double B, double C, double e) {
  switch (r) {
    case 0: return p_next - p_k - 3.0 * B - C - 6.0 * e;
    case 1: return B + 3.0 * e;
    case 2: return 2.0 * B + C + 3.0 * e;
    default: return p_k;
  }
}

}  // namespace detail

// Fit segment k of a group: (a,b,c,d) = T (P_{k+1}, P_k, B, C, e) per
// dimension, with e chosen by the convention.
inline SegmentCoeffs segment_coeffs(const GroupOfFour& group, int k, Convention conv) {
  if (k < 1 || k > 3) throw std::invalid_argument("segment index must be 1, 2 or 3");
  SegmentCoeffs out;
  out.segment_k = k;
  for (int d = 0; d < 3; ++d) {
    const double p_k = group.points[k - 1][d];
    const double p_next = group.points[k][d];
    const double B = group.bezier.B[d];
    const double C = group.bezier.C[d];
    const double e = detail::fifth_element(group, conv, d);
    out.a[d] = detail::t_row_apply(0, p_next, p_k, B, C, e);
    out.b[d] = detail::t_row_apply(1, p_next, p_k, B, C, e);
    out.c[d] = detail::t_row_apply(2, p_next, p_k, B, C, e);
    out.d[d] = detail::t_row_apply(3, p_next, p_k, B, C, e);
  }
  return out;
}

// Power coefficients of the group curve restricted to segment k and
// reparameterized to the segment-local parameter: b_k(t) = b((k-1+t)/3).
// The only correspondence that keeps consecutive blended segments C0.
inline SegmentCoeffs bezier_segment_power(const GroupOfFour& group, int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("segment index must be 1, 2 or 3");
  SegmentCoeffs out;
  out.segment_k = k;
  const double w = static_cast<double>(k - 1);
  for (int d = 0; d < 3; ++d) {
    const double A = group.bezier.A[d];
    const double B = group.bezier.B[d];
    const double C = group.bezier.C[d];
    const double D = group.bezier.D[d];
    // b((w+t)/3) expanded in powers of t
    out.a[d] = A / 27.0;
    out.b[d] = (A * w) / 9.0 + B / 9.0;
    out.c[d] = (A * w * w) / 9.0 + (2.0 * B * w) / 9.0 + C / 3.0;
    out.d[d] = (A * w * w * w) / 27.0 + (B * w * w) / 9.0 + (C * w) / 3.0 + D;
  }
  return out;
}

// v = alpha * b_k + beta * u, coefficientwise. Cubic in, cubic out.
inline SegmentCoeffs blend(const GroupOfFour& group, int k, const SegmentCoeffs& u,
                           const BlendParams& params) {
  if (u.segment_k != k)
    throw std::invalid_argument("segment coefficients belong to segment " +
                                std::to_string(u.segment_k) + ", not " + std::to_string(k));
  params.validate();
  const SegmentCoeffs bez = bezier_segment_power(group, k);
  SegmentCoeffs out;
  out.segment_k = k;
  for (int d = 0; d < 3; ++d) {
    out.a[d] = params.alpha * bez.a[d] + params.beta * u.a[d];
    out.b[d] = params.alpha * bez.b[d] + params.beta * u.b[d];
    out.c[d] = params.alpha * bez.c[d] + params.beta * u.c[d];
    out.d[d] = params.alpha * bez.d[d] + params.beta * u.d[d];
  }
  return out;
}

// Evaluate a segment cubic at t in [0,1]. Computed both as the dot product
// (a,b,c,d).(t^3,t^2,t,1) and in nested form; the two must agree to 1e-14
// relative to the coefficient scale.
inline Vec3 eval_cubic(const SegmentCoeffs& coeffs, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::out_of_range("cubic parameter t = " + std::to_string(t) + " outside [0, 1]");
  const double t2 = t * t;
  const double t3 = t2 * t;
  Vec3 out;
  for (int d = 0; d < 3; ++d) {
    const double dot = coeffs.a[d] * t3 + coeffs.b[d] * t2 + coeffs.c[d] * t + coeffs.d[d];
    const double horner = ((coeffs.a[d] * t + coeffs.b[d]) * t + coeffs.c[d]) * t + coeffs.d[d];
    const double scale = std::max({1.0, std::abs(coeffs.a[d]), std::abs(coeffs.b[d]),
                                   std::abs(coeffs.c[d]), std::abs(coeffs.d[d])});
    if (std::abs(dot - horner) > 1e-14 * scale)
      throw std::logic_error("cubic evaluation self-check failed");
    out[d] = horner;
  }
  return out;
}

}  // namespace splineflow
