#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "tmacap/kinematics.hpp"
#include "tmacap/scenario.hpp"

using namespace tmacap;

TEST_CASE("segment_accel closed form") {
  CHECK(segment_accel(30.0, 6.0, 6.0) == doctest::Approx(0.0));
  CHECK(segment_accel(30.0, 6.0, 3.0) == doctest::Approx(-0.45));
  CHECK(segment_accel(10.0, 3.0, 2.0) == doctest::Approx(-0.25));

  // v(d) = sqrt(v0^2 + 2 a d) must return v_end at d = length.
  for (auto [len, v0, v1] : {std::tuple{30.0, 6.0, 3.0}, std::tuple{10.0, 3.0, 2.0}}) {
    const double a = segment_accel(len, v0, v1);
    CHECK(std::sqrt(v0 * v0 + 2.0 * a * len) == doctest::Approx(v1).epsilon(1e-12));
  }
}

TEST_CASE("segment_accel rejects bad inputs") {
  CHECK_THROWS_AS(segment_accel(0.0, 6.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(segment_accel(-5.0, 6.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(segment_accel(10.0, 3.0, 6.0), std::invalid_argument);  // accelerating
  CHECK_THROWS_AS(segment_accel(10.0, 3.0, 0.0), std::invalid_argument);
}

TEST_CASE("path_flight_time examples") {
  const SpeedProfile constant{5.0, 5.0, 5.0};
  CHECK(path_flight_time(10.0, 10.0, constant) == doctest::Approx(4.0));

  const SpeedProfile decel{6.0, 3.0, 2.0};
  const double expected = 30.0 / 4.5 + 10.0 / 2.5;
  CHECK(path_flight_time(30.0, 10.0, decel) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(path_flight_time(30.0, 10.0, decel) ==
        doctest::Approx(oracle::numeric_path_time(30.0, 10.0, decel)).epsilon(1e-9));

  // Vanishing first segment with v_entry = v_mpiap contributes eps / v.
  const SpeedProfile flat_head{6.0, 6.0, 2.0};
  const double eps = 1e-9;
  CHECK(path_flight_time(eps, 10.0, flat_head) ==
        doctest::Approx(eps / 6.0 + 10.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("speed_at_offset examples and continuity") {
  const SpeedProfile p{6.0, 3.0, 2.0};
  const double d1 = 30.0, d2 = 10.0;
  CHECK(speed_at_offset(d1, d2, p, 0.0) == doctest::Approx(6.0));
  CHECK(speed_at_offset(d1, d2, p, d1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(speed_at_offset(d1, d2, p, d1 + d2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(speed_at_offset(d1, d2, p, 15.0) == doctest::Approx(std::sqrt(22.5)).epsilon(1e-12));

  // Both branch formulas agree at the segment boundary.
  const double a1 = segment_accel(d1, p.v_entry, p.v_mpiap);
  const double seg1_at_d1 = std::sqrt(p.v_entry * p.v_entry + 2.0 * a1 * d1);
  CHECK(speed_at_offset(d1, d2, p, d1) == doctest::Approx(seg1_at_d1).epsilon(1e-12));

  CHECK_THROWS_AS(speed_at_offset(d1, d2, p, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(speed_at_offset(d1, d2, p, d1 + d2 + 0.1), std::invalid_argument);
}

TEST_CASE("upstream_extrapolated_speed") {
  const SpeedProfile p{6.0, 3.0, 2.0};
  CHECK(upstream_extrapolated_speed(p, -0.45, 0.0) == doctest::Approx(6.0));
  CHECK(upstream_extrapolated_speed(p, -0.45, 4.0) ==
        doctest::Approx(std::sqrt(39.6)).epsilon(1e-12));
  const SpeedProfile constant{6.0, 6.0, 6.0};
  CHECK(upstream_extrapolated_speed(constant, 0.0, 123.0) == doctest::Approx(6.0));
}

TEST_CASE("time-distance consistency against quadrature") {
  std::mt19937_64 rng(20240401);
  std::uniform_real_distribution<double> len(5.0, 60.0);
  for (int trial = 0; trial < 50; ++trial) {
    const SpeedProfile p = oracle::random_profile(rng);
    const double d1 = len(rng), d2 = len(rng);
    const double closed = path_flight_time(d1, d2, p);
    const double integrated = oracle::numeric_path_time(d1, d2, p);
    CHECK(std::fabs(closed - integrated) < 1e-6);
  }
}

TEST_CASE("speed_at_offset is non-increasing along the path") {
  std::mt19937_64 rng(20240402);
  std::uniform_real_distribution<double> len(5.0, 60.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SpeedProfile p = oracle::random_profile(rng);
    const double d1 = len(rng), d2 = len(rng);
    double prev = speed_at_offset(d1, d2, p, 0.0);
    for (int i = 1; i <= 1000; ++i) {
      const double d = (d1 + d2) * static_cast<double>(i) / 1000.0;
      const double v = speed_at_offset(d1, d2, p, d);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("average-speed identity per segment") {
  std::mt19937_64 rng(20240403);
  std::uniform_real_distribution<double> len(5.0, 60.0);
  for (int trial = 0; trial < 50; ++trial) {
    const SpeedProfile p = oracle::random_profile(rng);
    const double d1 = len(rng), d2 = len(rng);
    // Under constant acceleration, length / segment time is the endpoint mean.
    const double t1 = d1 / (0.5 * (p.v_entry + p.v_mpiap));
    const double t2 = d2 / (0.5 * (p.v_mpiap + p.v_thr));
    CHECK(d1 / t1 == doctest::Approx(0.5 * (p.v_entry + p.v_mpiap)).epsilon(1e-14));
    CHECK(d2 / t2 == doctest::Approx(0.5 * (p.v_mpiap + p.v_thr)).epsilon(1e-14));
    CHECK(path_flight_time(d1, d2, p) == doctest::Approx(t1 + t2).epsilon(1e-14));
  }
}

TEST_CASE("SegmentKinematics factory pins the invariant") {
  const auto seg = SegmentKinematics::from_endpoints(30.0, 6.0, 3.0);
  CHECK(seg.accel == doctest::Approx((3.0 * 3.0 - 6.0 * 6.0) / (2.0 * 30.0)).epsilon(0.0));
  CHECK(seg.v_start >= seg.v_end);
}
