#include "doctest.h"
#include "emrecon/error.hpp"
#include "emrecon/objective.hpp"
#include "emrecon/verify.hpp"
#include "problems.hpp"

#include <cmath>

using namespace emrecon;
using testing::box;

namespace {

struct Traces {
  Grid3 g = build_grid(box(0, 1.2, 0, 0.8, 0, 0.8), 0.1);
  RegionMask m = build_decomposition(g, box(0.2, 1.0, 0.2, 0.6, 0.2, 0.6));
  ObservationTrace a{400, 35, 0.003}, b{400, 35, 0.003};
  TikhonovParams p = TikhonovParams::uniform_priors(g);

  Traces() {
    for (std::size_t i = 0; i < a.samples.size(); ++i) a.samples[i] = b.samples[i] = std::cos(0.01 * i);
  }
};

FieldHistory zero_history(const Grid3& g, std::size_t levels, double tau) {
  FieldHistory h;
  h.tau = tau;
  h.final_time = tau * static_cast<double>(levels - 1);
  for (std::size_t k = 0; k < levels; ++k) h.frames.emplace_back(g.size(), static_cast<int>(k));
  return h;
}

}  // namespace

TEST_CASE("functional at the truth and priors is zero") {
  Traces t;
  CHECK(tikhonov(t.g, t.a, t.b, CoefficientField::uniform(t.g), t.p) == 0.0);
}

TEST_CASE("regularization terms") {
  Traces t;
  CoefficientField c = CoefficientField::uniform(t.g);
  const auto inner = t.m.inner_nodes();
  c.eps[inner[0]] = 3.0;
  c.eps[inner[5]] = 1.5;
  c.mu[inner[3]] = 2.0;
  const double h3 = 0.001;
  CHECK(tikhonov(t.g, t.a, t.b, c, t.p) ==
        doctest::Approx(0.5 * 0.01 * (4.0 + 0.25) * h3 + 0.5 * 0.9 * 1.0 * h3));
  t.p.gamma1 = t.p.gamma2 = 0.0;
  CHECK(tikhonov(t.g, t.a, t.b, c, t.p) == 0.0);
}

TEST_CASE("misfit is quadratic and uses trapezoid weights in time") {
  Traces t;
  t.p.gamma1 = t.p.gamma2 = 0.0;
  const CutoffSpec none{1e-9, 1e9};
  for (double& v : t.a.samples) v += 0.25;
  double expect = 0.0;
  for (std::size_t k = 0; k <= 400; ++k) expect += (k == 0 || k == 400 ? 0.5 : 1.0) * 35 * 3 * 0.0625;
  expect *= 0.5 * 0.01 * 0.003;
  CHECK(misfit(t.g, t.a, t.b, none) == doctest::Approx(expect));
  const double one = tikhonov(t.g, t.a, t.b, CoefficientField::uniform(t.g), t.p);
  for (double& v : t.a.samples) v += 0.25;
  CHECK(tikhonov(t.g, t.a, t.b, CoefficientField::uniform(t.g), t.p) == doctest::Approx(4.0 * one));
  ObservationTrace shorter(399, 35, 0.003);
  CHECK_THROWS_AS(misfit(t.g, t.a, shorter, none), Error);
}

TEST_CASE("gradient densities with a vanishing adjoint") {
  Traces t;
  const FieldHistory e = zero_history(t.g, 11, 0.003), lam = zero_history(t.g, 11, 0.003);
  CoefficientField c = CoefficientField::uniform(t.g);
  const std::size_t node = t.m.inner_nodes()[7];

  SUBCASE("at the priors both vanish") {
    for (double v : grad_epsilon(t.g, t.m, e, lam, c, t.p)) CHECK(v == 0.0);
    for (double v : grad_mu(t.g, t.m, e, lam, c, t.p)) CHECK(v == 0.0);
  }
  SUBCASE("one perturbed node") {
    c.eps[node] = 2.0;
    c.mu[node] = 1.5;
    const NodalArray g1 = grad_epsilon(t.g, t.m, e, lam, c, t.p);
    const NodalArray g2 = grad_mu(t.g, t.m, e, lam, c, t.p);
    CHECK(g1[node] == doctest::Approx(0.01));
    CHECK(g2[node] == doctest::Approx(0.45));
    for (std::size_t n = 0; n < t.g.size(); ++n)
      if (n != node) REQUIRE((g1[n] == 0.0 && g2[n] == 0.0));
  }
}

TEST_CASE("gradient densities vanish outside the inner region") {
  Traces t;
  FieldHistory e = zero_history(t.g, 6, 0.003), lam = zero_history(t.g, 6, 0.003);
  for (std::size_t k = 0; k < 6; ++k) {
    e.frames[k] = testing::random_frame(t.g, 100 + k);
    lam.frames[k] = testing::random_frame(t.g, 200 + k);
    e.frames[k].time_index = lam.frames[k].time_index = static_cast<int>(k);
  }
  const CoefficientField c = CoefficientField::uniform(t.g);
  for (auto term : {DivergenceTerm::FieldDotGrad, DivergenceTerm::DivProduct}) {
    t.p.divergence_term = term;
    const NodalArray g1 = grad_epsilon(t.g, t.m, e, lam, c, t.p);
    const NodalArray g2 = grad_mu(t.g, t.m, e, lam, c, t.p);
    bool inner_nonzero = false;
    for (std::size_t n = 0; n < t.g.size(); ++n) {
      if (!t.m.is_inner(n)) REQUIRE((g1[n] == 0.0 && g2[n] == 0.0));
      else inner_nonzero = inner_nonzero || g1[n] != 0.0;
    }
    CHECK(inner_nonzero);
  }
}

TEST_CASE("curl term scales with the inverse square of mu") {
  Traces t;
  t.p.gamma2 = 0.0;
  FieldHistory e = zero_history(t.g, 4, 0.003), lam = zero_history(t.g, 4, 0.003);
  for (std::size_t k = 0; k < 4; ++k) {
    e.frames[k] = testing::random_frame(t.g, 10 + k);
    lam.frames[k] = testing::random_frame(t.g, 20 + k);
    e.frames[k].time_index = lam.frames[k].time_index = static_cast<int>(k);
  }
  const NodalArray one = grad_mu(t.g, t.m, e, lam, CoefficientField::uniform(t.g, 1.0, 1.0), t.p);
  const NodalArray two = grad_mu(t.g, t.m, e, lam, CoefficientField::uniform(t.g, 1.0, 2.0), t.p);
  for (std::size_t n = 0; n < t.g.size(); ++n) REQUIRE(two[n] == doctest::Approx(0.25 * one[n]));
}

TEST_CASE("mismatched histories are rejected") {
  Traces t;
  const FieldHistory e = zero_history(t.g, 6, 0.003), lam = zero_history(t.g, 5, 0.003);
  const CoefficientField c = CoefficientField::uniform(t.g);
  try {
    grad_epsilon(t.g, t.m, e, lam, c, t.p);
    FAIL("expected HistoryMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::HistoryMismatch);
  }
  CHECK_THROWS_AS(grad_mu(t.g, t.m, e, lam, c, t.p), Error);
}

TEST_CASE("inner norm and dot product") {
  Traces t;
  NodalArray v(t.g.size(), 2.0);
  const double count = static_cast<double>(t.m.inner_count());
  CHECK(inner_dot(t.g, t.m, v, v) == doctest::Approx(4.0 * count * 0.001));
  CHECK(inner_norm(t.g, t.m, v) == doctest::Approx(std::sqrt(4.0 * count * 0.001)));
}

TEST_CASE("exact data at the truth gives a vanishing misfit gradient") {
  InverseProblem p = testing::reduced_problem(0.6, 0.0, 0.0);
  const CoefficientField truth = phantom(p.grid, p.mask, testing::default_boxes());
  const GradientEvaluation ge = evaluate_gradient(p, truth);
  CHECK(ge.value == 0.0);
  for (double v : ge.g1) REQUIRE(v == 0.0);
  for (double v : ge.g2) REQUIRE(v == 0.0);
}

TEST_CASE("adjoint gradient agrees with finite differences") {
  const InverseProblem p = testing::reduced_problem(0.6, 0.01, 0.9);
  const CoefficientField c = testing::inner_uniform(p, 2.0, 1.5);
  const GradientEvaluation ge = evaluate_gradient(p, c);
  CHECK(ge.value == doctest::Approx(evaluate_functional(p, c)).epsilon(1e-14));
  const double h3 = std::pow(p.grid.spacing(), 3);
  const auto inner = p.mask.inner_nodes();
  for (std::size_t i : {std::size_t{10}, inner.size() / 2, inner.size() - 12}) {
    const std::size_t n = inner[i];
    const double fe = fd_gradient_oracle(p, c, Parameter::Eps, n);
    const double fm = fd_gradient_oracle(p, c, Parameter::Mu, n);
    CHECK(ge.g1[n] * h3 == doctest::Approx(fe).epsilon(2e-3));
    CHECK(ge.g2[n] * h3 == doctest::Approx(fm).epsilon(2e-3));
  }
}
