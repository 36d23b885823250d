#include "doctest.h"
#include "emrecon/error.hpp"
#include "emrecon/fields.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace emrecon;
using testing::box;

namespace {

struct DefaultSetup {
  Grid3 g = build_grid(testing::default_outer(), 0.1);
  RegionMask m = build_decomposition(g, testing::default_inner());
};

std::vector<Inclusion> two_boxes() {
  return {{box(-1.4, -1.0, -0.2, 0.2, -0.2, 0.2), 12.0, 2.0},
          {box(0.6, 1.0, 0.0, 0.4, -0.2, 0.2), 12.0, 2.0}};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("phantom with two inclusions") {
  DefaultSetup s;
  const CoefficientField c = phantom(s.g, s.m, two_boxes());
  CHECK(*std::max_element(c.eps.begin(), c.eps.end()) == 12.0);
  CHECK(*std::max_element(c.mu.begin(), c.mu.end()) == 2.0);
  // 5 x 5 x 5 nodes per box.
  CHECK(std::count(c.eps.begin(), c.eps.end(), 12.0) == 250);
  CHECK(c.eps[s.g.index(s.g.nearest(0, -1.2), s.g.nearest(1, 0.0), s.g.nearest(2, 0.0))] == 12.0);
  CHECK(c.eps[s.g.index(0, 0, 0)] == 1.0);
  validate_coefficients(c, s.m);
}

TEST_CASE("empty inclusion list is the uniform background") {
  DefaultSetup s;
  const CoefficientField c = phantom(s.g, s.m, {});
  CHECK(std::all_of(c.eps.begin(), c.eps.end(), [](double v) { return v == 1.0; }));
  CHECK(std::all_of(c.mu.begin(), c.mu.end(), [](double v) { return v == 1.0; }));
}

TEST_CASE("phantom argument errors") {
  DefaultSetup s;
  CHECK(code_of([&] { phantom(s.g, s.m, {{box(-1, 0, -0.2, 0.2, -0.2, 0.2), 20.0, 2.0}}); }) ==
        ErrorCode::OutOfBounds);
  CHECK(code_of([&] { phantom(s.g, s.m, {{box(-1, 0, -0.2, 0.2, -0.2, 0.2), 5.0, 0.5}}); }) ==
        ErrorCode::OutOfBounds);
  CHECK(code_of([&] { phantom(s.g, s.m, {{box(-3.3, 0, -0.2, 0.2, -0.2, 0.2), 5.0, 2.0}}); }) ==
        ErrorCode::OutsideInner);
}

TEST_CASE("coefficient validation") {
  DefaultSetup s;
  CoefficientField c = CoefficientField::uniform(s.g);
  c.eps[s.g.index(0, 0, 0)] = 2.0;
  CHECK(code_of([&] { validate_coefficients(c, s.m); }) == ErrorCode::ValidationError);
  c.eps[s.g.index(0, 0, 0)] = 1.0;
  c.mu[s.m.inner_nodes().front()] = 3.5;
  CHECK(code_of([&] { validate_coefficients(c, s.m); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("uniform stream range and determinism") {
  UniformStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 10000; ++i) {
    const double x = a.next();
    REQUIRE(x >= -1.0);
    REQUIRE(x < 1.0);
    REQUIRE(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("additive noise") {
  ObservationTrace clean(200, 50, 0.003);
  for (std::size_t i = 0; i < clean.samples.size(); ++i)
    clean.samples[i] = std::sin(0.01 * static_cast<double>(i));
  const double peak = clean.max_abs();

  SUBCASE("zero level leaves the data unchanged") {
    CHECK(add_noise(clean, 0.0, 7).samples == clean.samples);
  }
  SUBCASE("same seed gives bit-identical output") {
    CHECK(add_noise(clean, 3.0, 7).samples == add_noise(clean, 3.0, 7).samples);
    CHECK(add_noise(clean, 3.0, 7).samples != add_noise(clean, 3.0, 8).samples);
  }
  SUBCASE("ten percent stays within the bound and has small mean") {
    const ObservationTrace noisy = add_noise(clean, 10.0, 5);
    CHECK(noisy.noise_level == 10.0);
    CHECK(noisy.seed == 5u);
    double sum = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < clean.samples.size(); ++i) {
      const double d = noisy.samples[i] - clean.samples[i];
      worst = std::max(worst, std::abs(d));
      sum += d;
    }
    CHECK(worst <= 0.1 * peak);
    CHECK(worst > 0.09 * peak);
    const double n = static_cast<double>(clean.samples.size());
    const double sigma = 0.1 * peak / std::sqrt(3.0);
    CHECK(std::abs(sum / n) < 4.0 * sigma / std::sqrt(n));
  }
  SUBCASE("perturbation is the scaled stream") {
    const ObservationTrace noisy = add_noise(clean, 3.0, 9);
    UniformStream u(9);
    for (std::size_t i = 0; i < clean.samples.size(); ++i)
      REQUIRE(noisy.samples[i] == clean.samples[i] + 0.03 * peak * u.next());
  }
  CHECK_THROWS_AS(add_noise(clean, -1.0, 1), Error);
}

TEST_CASE("trace congruence") {
  ObservationTrace a(10, 4, 0.003), b(10, 4, 0.003), c(11, 4, 0.003), d(10, 4, 0.0015);
  CHECK(a.congruent(b));
  CHECK_FALSE(a.congruent(c));
  CHECK_FALSE(a.congruent(d));
  CHECK(a.offset(1, 0, 0) == 12u);
}
