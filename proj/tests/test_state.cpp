#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dged/state.hpp"
#include "support/oracles.hpp"

using namespace dged;

TEST_CASE("initial builders") {
  SUBCASE("monodisperse") {
    const ConcentrationState s =
        build_initial({Monodisperse{1, 1.0}, 2}, Variant::Isolated);
    CHECK(s.values == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(s.time == 0.0);
    CHECK(s.truncation() == 2);
  }
  SUBCASE("geometric normalizes total mass") {
    const ConcentrationState s =
        build_initial({Geometric{0.5, 1.0}, 2}, Variant::Isolated);
    // profile (1, 0.5, 0.25) already has unit mass
    CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.values[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.values[2] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(moment(s, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("explicit profile is taken verbatim") {
    const ConcentrationState s =
        build_initial({ExplicitProfile{{0.2, 0.3, 0.5}}, 2}, Variant::Isolated);
    CHECK(s.values == std::vector<double>{0.2, 0.3, 0.5});
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(build_initial({Monodisperse{5, 1.0}, 2}, Variant::Isolated),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_initial({ExplicitProfile{{0.1, -0.2, 0.0}}, 2}, Variant::Isolated),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_initial({ExplicitProfile{{0.1, 0.2}}, 2}, Variant::Isolated),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_initial({Monodisperse{1, 1.0}, 2}, Variant::NonIsolated),
                    std::invalid_argument);  // bath required
  }
  SUBCASE("non-isolated pins the void index to the bath") {
    const ConcentrationState s =
        build_initial({Monodisperse{1, 1.0}, 3}, Variant::NonIsolated, 0.75);
    CHECK(s.values[0] == 0.75);
    CHECK(s.values[1] == 1.0);
    CHECK(s.variant == Variant::NonIsolated);
  }
}

TEST_CASE("moments") {
  ConcentrationState s;
  s.values = {0.0, 1.0, 0.0};
  CHECK(moment(s, 0.0) == 1.0);
  CHECK(moment(s, 1.0) == 1.0);

  s.values = {1.0, 2.0, 3.0};
  CHECK(moment(s, 2.0) == 14.0);
  CHECK(moment(s, 0.0) == 6.0);  // 0^0 = 1 counts the void entry

  s.values = {2.0, 0.0};
  CHECK(moment(s, 0.0) == 2.0);
  CHECK(moment(s, 1.0) == 0.0);
}

TEST_CASE("sigma moments and the truncated norm") {
  const SigmaFunction p32 = SigmaFunction::power(1.5);
  const SigmaFunction p2 = SigmaFunction::power(2.0);

  ConcentrationState s;
  s.values = {0.0, 1.0, 0.0};
  CHECK(sigma_moment(s, p32) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(norm_x01(s) == 2.0);

  s.values = {0.0, 0.0, 1.0};
  CHECK(sigma_moment(s, p2) == doctest::Approx(4.0).epsilon(1e-15));

  s.values = {1.0, 1.0, 1.0};
  CHECK(sigma_moment(s, p32) == doctest::Approx(1.0 + std::pow(2.0, 1.5)).epsilon(1e-15));

  s.values = {1.0, 1.0, 0.0};
  CHECK(norm_x01(s) == 3.0);

  s.values = {0.0, 0.0, 0.0};
  CHECK(norm_x01(s) == 0.0);
}

TEST_CASE("norm and moment relations on random nonnegative states") {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    const ConcentrationState s = testsupport::random_state(rng, 1 + trial % 24, Variant::Isolated);
    const double p0 = moment(s, 0.0);
    const double p1 = moment(s, 1.0);
    CHECK(p0 <= p1 + s.values[0] + 1e-12 * (1.0 + p1));
    CHECK(norm_x01(s) == doctest::Approx(p0 + p1).epsilon(1e-13));
  }
}

TEST_CASE("geometric initial reproduces the requested mass to rounding") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ratio(0.05, 0.95);
  std::uniform_real_distribution<double> amount(0.1, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double m = amount(rng);
    const ConcentrationState s =
        build_initial({Geometric{ratio(rng), m}, 2 + trial % 40}, Variant::Isolated);
    CHECK(moment(s, 1.0) == doctest::Approx(m).epsilon(1e-14));
  }
}
