#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "splineflow/evaluate.hpp"
#include "splineflow/field.hpp"
#include "splineflow/pipeline.hpp"

using namespace splineflow;

namespace {

double horner(const std::array<double, 4>& c, double t) {
  return ((c[0] * t + c[1]) * t + c[2]) * t + c[3];
}

}  // namespace

TEST_CASE("tick matrix") {
  SECTION("V=1: columns (0,0,0,1) and (1,1,1,1)") {
    const TickMatrix t = tick_matrix(1);
    CHECK(t.at(0, 0) == 0.0);
    CHECK(t.at(1, 0) == 0.0);
    CHECK(t.at(2, 0) == 0.0);
    CHECK(t.at(3, 0) == 1.0);
    for (int r = 0; r < 4; ++r) CHECK(t.at(r, 1) == 1.0);
  }
  SECTION("V=2 matches the hand-computed powers of 0, 1/2, 1") {
    const TickMatrix t = tick_matrix(2);
    const double expected[4][3] = {
        {0, 0.125, 1}, {0, 0.25, 1}, {0, 0.5, 1}, {1, 1, 1}};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 3; ++c) CHECK(t.at(r, c) == expected[r][c]);
  }
  SECTION("V=10 is 4 x 11 with an all-ones last row") {
    const TickMatrix t = tick_matrix(10);
    CHECK(t.tick_count() == 11);
    CHECK(t.entries.size() == 44);
    for (std::size_t j = 0; j <= 10; ++j) CHECK(t.at(3, j) == 1.0);
  }
  SECTION("V=0 is rejected") { CHECK_THROWS_AS(tick_matrix(0), std::invalid_argument); }
}

TEST_CASE("batched evaluation equals per-entry nested evaluation") {
  SECTION("constant row") {
    CoeffPlane plane;
    plane.M = 1;
    plane.rows = {{0, 0, 0, 5}};
    const ValueMatrix v = eval_segment_batch(plane, tick_matrix(2));
    CHECK(v.at(0, 0) == 5.0);
    CHECK(v.at(0, 1) == 5.0);
    CHECK(v.at(0, 2) == 5.0);
  }
  SECTION("blended example row (-1, 0, 2, 0) at V=2") {
    CoeffPlane plane;
    plane.M = 1;
    plane.rows = {{-1, 0, 2, 0}};
    const ValueMatrix v = eval_segment_batch(plane, tick_matrix(2));
    CHECK(v.at(0, 0) == 0.0);
    CHECK(v.at(0, 1) == 0.875);
    CHECK(v.at(0, 2) == 1.0);
  }
  SECTION("random planes, V in {1, 2, 10, 100}") {
    std::mt19937_64 rng(1618);
    std::uniform_real_distribution<double> coef(-8.0, 8.0);
    for (std::size_t v : {1u, 2u, 10u, 100u}) {
      const TickMatrix ticks = tick_matrix(v);
      CoeffPlane plane;
      plane.M = 8;
      plane.rows.resize(8);
      for (auto& r : plane.rows) r = {coef(rng), coef(rng), coef(rng), coef(rng)};
      const ValueMatrix vals = eval_segment_batch(plane, ticks);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j <= v; ++j) {
          const double t = double(j) / double(v);
          CHECK(std::abs(vals.at(i, j) - horner(plane.rows[i], t)) <= 1e-12);
        }
    }
  }
  SECTION("flops per product are 8*M*(V+1)") {
    CoeffPlane plane;
    plane.M = 6;
    plane.rows.assign(6, {1, 1, 1, 1});
    const TickMatrix ticks = tick_matrix(10);
    flops::reset();
    eval_segment_batch(plane, ticks);
    CHECK(flops::count() == 8 * 6 * 11);
  }
}

TEST_CASE("value matrix boundary columns reproduce segment endpoints") {
  std::mt19937_64 rng(31337);
  FlowField field;
  field.kind = FieldKind::vortex;
  field.jitter = 0.1;
  field.seed = 9;
  const Flow flow = generate_flow(field, 5, 13, 0.4);
  const CoeffSet coeffs = fit_flow(flow, FitOptions{});
  const TickMatrix ticks = tick_matrix(7);
  for (std::size_t g = 0; g < coeffs.N; ++g)
    for (int k = 1; k <= 3; ++k)
      for (int d = 0; d < coeffs.dims; ++d) {
        const CoeffPlane& plane = coeffs.plane(g, k, d);
        const ValueMatrix vals = eval_segment_batch(plane, ticks);
        for (std::size_t i = 0; i < plane.M; ++i) {
          const auto& r = plane.rows[i];
          CHECK(std::abs(vals.at(i, 0) - r[3]) <= 1e-12);                       // start = d
          CHECK(std::abs(vals.at(i, 7) - (r[0] + r[1] + r[2] + r[3])) <= 1e-12);  // end = a+b+c+d
        }
      }
}

TEST_CASE("snapshot assembly") {
  FlowField field;

  SECTION("N=1, V=1 collinear: the four original samples") {
    const Flow flow = generate_flow(field, 1, 4, 1.0);
    const Snapshot snap = run_pipeline(flow, FitOptions{}, 1);
    REQUIRE(snap.points_per_trajectory() == 4);
    for (int j = 0; j < 4; ++j) {
      CHECK(snap.polylines[0][j].x == Catch::Approx(double(j)).margin(1e-12));
      CHECK(snap.polylines[0][j].y == 0.0);
    }
  }
  SECTION("constant flow: every snapshot point equals the constant") {
    Flow flow;
    flow.dims = 3;
    flow.trajectories = {Trajectory(13, Vec3{2.5, -1.0, 0.75})};
    const Snapshot snap = run_pipeline(flow, FitOptions{}, 5);
    for (const Vec3& p : snap.polylines[0]) {
      CHECK(p.x == 2.5);
      CHECK(p.y == -1.0);
      CHECK(p.z == 0.75);
    }
  }
  SECTION("N=2, V=10 gives 61 points per trajectory") {
    const Flow flow = generate_flow(field, 2, 7, 1.0);
    const Snapshot snap = run_pipeline(flow, FitOptions{}, 10);
    CHECK(snap.points_per_trajectory() == 61);
    CHECK(snap.polylines.size() == 2);
  }
  SECTION("N=1, V=1 non-collinear: group endpoints plus blended joins") {
    Flow flow;
    flow.dims = 3;
    flow.trajectories = {{{0, 0, 0}, {1, 2, -1}, {2, 1, 0.5}, {3, 3, 1}}};
    const Snapshot snap = run_pipeline(flow, FitOptions{}, 1);
    REQUIRE(snap.points_per_trajectory() == 4);
    GroupOfFour g;
    g.points = {flow.trajectories[0][0], flow.trajectories[0][1], flow.trajectories[0][2],
                flow.trajectories[0][3]};
    g.bezier = bezier_power_coeffs(g.points[0], g.points[1], g.points[2], g.points[3]);
    CHECK(snap.polylines[0][0] == g.points[0]);
    for (int k = 1; k <= 3; ++k) {
      const SegmentCoeffs v =
          blend(g, k, segment_coeffs(g, k, Convention::bezier_A), BlendParams{});
      const Vec3 expect = eval_cubic(v, 1.0);
      const Vec3 gap = snap.polylines[0][k] - expect;
      CHECK(norm(gap) <= 1e-13);
    }
  }
  SECTION("missing planes raise an incomplete-input error") {
    const Flow flow = generate_flow(field, 2, 7, 1.0);
    CoeffSet coeffs = fit_flow(flow, FitOptions{});
    coeffs.planes.pop_back();
    CHECK_THROWS_AS(assemble_snapshot(coeffs, 4), IncompleteInputError);
  }
}

TEST_CASE("snapshot passes through group boundaries") {
  SECTION("integer lattice flow: bitwise passage at every boundary") {
    FlowField field;
    const Flow flow = generate_flow(field, 2, 13, 1.0);  // N = 4, exact lattice
    const std::size_t v = 10;
    const Snapshot snap = run_pipeline(flow, FitOptions{}, v);
    REQUIRE(snap.points_per_trajectory() == 3 * 4 * v + 1);
    for (std::size_t i = 0; i < flow.trajectory_count(); ++i)
      for (std::size_t g = 0; g <= 4; ++g) {
        const Vec3 boundary = flow.trajectories[i][3 * g];
        const Vec3 sample = snap.polylines[i][3 * g * v];
        CHECK(sample == boundary);  // exact, no tolerance
      }
  }
  SECTION("random flow: passage within 1e-12 of the coordinate scale") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> coord(-30.0, 30.0);
    Flow flow;
    flow.dims = 3;
    flow.trajectories.resize(4);
    for (auto& t : flow.trajectories) {
      t.resize(10);
      for (auto& p : t) p = {coord(rng), coord(rng), coord(rng)};
    }
    const std::size_t v = 6;
    const Snapshot snap = run_pipeline(flow, FitOptions{}, v);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t g = 0; g <= 3; ++g) {
        const Vec3 gap = snap.polylines[i][3 * g * v] - flow.trajectories[i][3 * g];
        CHECK(norm(gap) <= 1e-12 * 30.0);
      }
  }
}

TEST_CASE("raw-u export skips the blend") {
  FlowField field;
  const Flow flow = generate_flow(field, 1, 4, 1.0);
  FitOptions opts;
  opts.raw_u = true;
  const CoeffSet coeffs = fit_flow(flow, opts);
  CHECK(coeffs.raw_u);
  // x-plane of the collinear group is the unblended (-2, 0, 3, 0)
  const CoeffPlane& plane = coeffs.plane(0, 1, 0);
  CHECK(plane.rows[0] == std::array<double, 4>{-2, 0, 3, 0});
}
