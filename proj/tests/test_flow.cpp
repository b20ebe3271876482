#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "splineflow/flow.hpp"

using namespace splineflow;

namespace {

// Independent oracle: evaluate the control-polygon cubic straight from the
// Bernstein basis, no power-form expansion involved.
double bernstein_eval(double p1, double p2, double p3, double p4, double s) {
  const double oms = 1.0 - s;
  return p1 * oms * oms * oms + 3.0 * p2 * s * oms * oms + 3.0 * p3 * s * s * oms +
         p4 * s * s * s;
}

double eval_power(const BezierPower& b, int dim, double s) {
  return ((b.A[dim] * s + b.B[dim]) * s + b.C[dim]) * s + b.D[dim];
}

Trajectory line_trajectory(std::size_t s) {
  Trajectory t;
  for (std::size_t i = 0; i < s; ++i) t.push_back({double(i), 0.0, 0.0});
  return t;
}

}  // namespace

TEST_CASE("bezier power coefficients match hand-expanded cases") {
  const auto b = bezier_power_coeffs({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0});
  CHECK(b.A.x == 0.0);
  CHECK(b.B.x == 0.0);
  CHECK(b.C.x == 3.0);
  CHECK(b.D.x == 0.0);

  const auto hump = bezier_power_coeffs({0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 0, 0});
  CHECK(hump.A.x == 0.0);
  CHECK(hump.B.x == -3.0);
  CHECK(hump.C.x == 3.0);
  CHECK(hump.D.x == 0.0);
  // b(1) = 0 for this arch
  CHECK(eval_power(hump, 0, 1.0) == Catch::Approx(0.0).margin(1e-15));

  const Vec3 c{4.5, -2.0, 7.0};
  const auto constant = bezier_power_coeffs(c, c, c, c);
  for (int d = 0; d < 3; ++d) {
    CHECK(constant.A[d] == 0.0);
    CHECK(constant.B[d] == 0.0);
    CHECK(constant.C[d] == 0.0);
    CHECK(constant.D[d] == c[d]);
  }
}

TEST_CASE("power form agrees with direct Bernstein evaluation") {
  std::mt19937_64 rng(20240915);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 p[4];
    for (auto& q : p) q = {coord(rng), coord(rng), coord(rng)};
    const auto b = bezier_power_coeffs(p[0], p[1], p[2], p[3]);
    for (double s : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0})
      for (int d = 0; d < 3; ++d)
        CHECK(eval_power(b, d, s) ==
              Catch::Approx(bernstein_eval(p[0][d], p[1][d], p[2][d], p[3][d], s))
                  .margin(1e-10));
  }
}

TEST_CASE("bezier endpoint identities") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    Vec3 p[4];
    for (auto& q : p) q = {coord(rng), coord(rng), coord(rng)};
    const auto b = bezier_power_coeffs(p[0], p[1], p[2], p[3]);
    for (int d = 0; d < 3; ++d) {
      CHECK(b.D[d] == p[0][d]);  // D = P1 exactly
      const double sum = b.A[d] + b.B[d] + b.C[d] + b.D[d];
      CHECK(sum == Catch::Approx(p[3][d]).epsilon(1e-12).margin(1e-12));
    }
  }
}

TEST_CASE("group_points splits S = 3N+1 into shared-endpoint groups") {
  SECTION("S=4 gives one group") {
    const auto groups = group_points(line_trajectory(4));
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].points[0].x == 0.0);
    CHECK(groups[0].points[3].x == 3.0);
  }
  SECTION("S=7 gives two groups sharing sample 3") {
    const auto groups = group_points(line_trajectory(7));
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].points[3].x == 3.0);
    CHECK(groups[1].points[0].x == 3.0);
    CHECK(groups[1].group_index == 1);
  }
  SECTION("S=6 strict is a shape error") {
    CHECK_THROWS_AS(group_points(line_trajectory(6), GroupingMode::strict), ShapeError);
  }
  SECTION("S=6 relaxed truncates two samples") {
    std::size_t dropped = 0;
    const auto groups = group_points(line_trajectory(6), GroupingMode::relaxed, &dropped);
    CHECK(groups.size() == 1);
    CHECK(dropped == 2);
  }
}

TEST_CASE("grouping then flattening reproduces the first 3N+1 samples") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (std::size_t s : {4u, 7u, 13u, 31u}) {
    Trajectory traj;
    for (std::size_t i = 0; i < s; ++i) traj.push_back({coord(rng), coord(rng), coord(rng)});
    const auto groups = group_points(traj);
    Trajectory flat;
    for (const auto& g : groups) {
      const int start = flat.empty() ? 0 : 1;  // shared endpoint
      for (int j = start; j < 4; ++j) flat.push_back(g.points[j]);
    }
    REQUIRE(flat.size() == traj.size());
    for (std::size_t i = 0; i < s; ++i) CHECK(flat[i] == traj[i]);
  }
}

TEST_CASE("flow validation catches bad shapes") {
  Flow flow;
  CHECK_THROWS_AS(flow.validate(), ShapeError);
  flow.trajectories = {line_trajectory(4), line_trajectory(5)};
  flow.dims = 2;
  CHECK_THROWS_AS(flow.validate(), ShapeError);  // ragged
  flow.trajectories = {line_trajectory(3)};
  CHECK_THROWS_AS(flow.validate(), ShapeError);  // too short
  flow.trajectories = {line_trajectory(4)};
  CHECK_NOTHROW(flow.validate());
  flow.trajectories[0][2].y = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(flow.validate(), ShapeError);  // non-finite
}
