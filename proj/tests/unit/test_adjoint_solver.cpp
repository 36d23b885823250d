#include "doctest.h"
#include "emrecon/adjoint_solver.hpp"
#include "emrecon/error.hpp"
#include "emrecon/forward_solver.hpp"
#include "support.hpp"

#include <cmath>

using namespace emrecon;
using testing::box;

namespace {

struct Setup {
  Grid3 g = build_grid(box(0, 1.2, 0, 0.8, 0, 0.8), 0.1);
  BoundaryMap bc = classify_boundary(g, 2);
  CoefficientField c = testing::random_coefficients(g, 31);
  TimeLoopSpec spec;
  SourcePulse src;

  Setup() {
    for (std::size_t n = 0; n < g.size(); ++n)
      if (!testing::interior(g, n)) c.eps[n] = c.mu[n] = 1.0;
    spec.tau = 0.02;
    spec.final_time = 0.6;
  }

  ObservationTrace random_source(std::uint64_t seed) const {
    ObservationTrace t(spec.steps(), bc.observation.size(), spec.tau);
    UniformStream u(seed);
    for (double& v : t.samples) v = u.next();
    return t;
  }
};

}  // namespace

TEST_CASE("cutoff function") {
  const CutoffSpec s{0.12, 1.2};
  CHECK(cutoff(0.0, s) == 1.0);
  CHECK(cutoff(1.2 - 0.12, s) == 1.0);
  CHECK(cutoff(1.2, s) == 0.0);
  CHECK(cutoff(1.2 - 0.06, s) == 0.0);
  const double mid = cutoff(1.2 - 0.09, s);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == doctest::Approx(0.5));
  double last = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double z = cutoff(1.2 * i / 1000.0, s);
    REQUIRE(z <= last);
    REQUIRE(z >= 0.0);
    last = z;
  }
  // The blend is symmetric about its midpoint.
  for (double d : {0.001, 0.01, 0.02, 0.029})
    CHECK(cutoff(1.11 - d, s) + cutoff(1.11 + d, s) == doctest::Approx(1.0));
}

TEST_CASE("residual source") {
  ObservationTrace sim(400, 3, 0.003), meas(400, 3, 0.003);
  for (std::size_t i = 0; i < sim.samples.size(); ++i) {
    sim.samples[i] = std::sin(0.1 * static_cast<double>(i));
    meas.samples[i] = sim.samples[i];
  }
  const CutoffSpec s{0.12, 1.2};
  SUBCASE("equal traces give zero") {
    const ObservationTrace r = residual_source(sim, meas, s);
    for (double v : r.samples) CHECK(v == 0.0);
  }
  SUBCASE("sign and support") {
    for (double& v : sim.samples) v += 1.0;
    const ObservationTrace r = residual_source(sim, meas, s);
    CHECK(r.at(0, 0, 0) == -1.0);
    CHECK(r.at(100, 2, 1) == -1.0);
    for (std::size_t k = 0; k <= 400; ++k)
      if (k * 0.003 >= 1.2 - 0.06 + 1e-12)
        for (int d = 0; d < 3; ++d) REQUIRE(r.at(k, 1, d) == 0.0);
  }
  SUBCASE("incongruent traces") {
    ObservationTrace other(399, 3, 0.003);
    CHECK_THROWS_AS(residual_source(sim, other, s), Error);
  }
}

TEST_CASE("adjoint of a zero source is zero") {
  Setup s;
  const ObservationTrace zero(s.spec.steps(), s.bc.observation.size(), s.spec.tau);
  const FieldHistory lam = solve_adjoint(s.g, s.bc, s.c, zero, s.src, s.spec);
  REQUIRE(lam.frames.size() == s.spec.steps() + 1);
  for (const auto& f : lam.frames)
    for (const auto& comp : f.comp)
      for (double v : comp) REQUIRE(v == 0.0);
}

TEST_CASE("adjoint is linear in the source") {
  Setup s;
  const ObservationTrace a = s.random_source(1), b = s.random_source(2);
  ObservationTrace combo = a;
  for (std::size_t i = 0; i < combo.samples.size(); ++i)
    combo.samples[i] = 2.5 * a.samples[i] - 0.5 * b.samples[i];
  const FieldHistory la = solve_adjoint(s.g, s.bc, s.c, a, s.src, s.spec);
  const FieldHistory lb = solve_adjoint(s.g, s.bc, s.c, b, s.src, s.spec);
  const FieldHistory lc = solve_adjoint(s.g, s.bc, s.c, combo, s.src, s.spec);
  double scale = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < lc.frames.size(); ++k)
    for (int d = 0; d < 3; ++d)
      for (std::size_t n = 0; n < s.g.size(); ++n) {
        const double expect = 2.5 * la.frames[k].comp[d][n] - 0.5 * lb.frames[k].comp[d][n];
        scale = std::max(scale, std::abs(expect));
        worst = std::max(worst, std::abs(expect - lc.frames[k].comp[d][n]));
      }
  CHECK(scale > 0.0);
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("terminal level and boundary nodes of the adjoint vanish") {
  Setup s;
  const FieldHistory lam = solve_adjoint(s.g, s.bc, s.c, s.random_source(3), s.src, s.spec);
  for (const auto& comp : lam.frames.back().comp)
    for (double v : comp) CHECK(v == 0.0);
  for (const auto& f : lam.frames)
    for (std::size_t n = 0; n < s.g.size(); ++n)
      if (!testing::interior(s.g, n))
        for (int d = 0; d < 3; ++d) REQUIRE(f.comp[d][n] == 0.0);
}

TEST_CASE("adjoint represents the derivative of the face functional") {
  // J(u) = sum_k w_k h^2 tau <S_k, E_k on the face> with E^0 = 0 and
  // E^1 = u in the interior; its gradient is eps h^3 lambda^0 / tau.
  for (Illumination ill : {Illumination::Dirichlet, Illumination::Neumann}) {
    Setup s;
    s.spec.illumination = ill;
    s.src.amplitude = 0.0;
    const ObservationTrace S = s.random_source(4);
    const VectorFrame u = testing::random_frame(s.g, 5, true);
    const std::size_t n_steps = s.spec.steps();
    const double h = s.g.spacing(), tau = s.spec.tau;

    VectorFrame prev(s.g.size()), curr = u;
    apply_boundary_pass(s.g, s.bc, s.spec, s.src, tau, prev, curr);
    double J = 0.0;
    auto accumulate = [&](const VectorFrame& f, std::size_t k) {
      const double w = k == n_steps ? 0.5 : 1.0;
      for (std::size_t p = 0; p < s.bc.observation.size(); ++p)
        for (int d = 0; d < 3; ++d) J += w * h * h * tau * S.at(k, p, d) * f.comp[d][s.bc.observation[p]];
    };
    accumulate(curr, 1);
    for (std::size_t k = 1; k < n_steps; ++k) {
      VectorFrame next = step_forward(s.g, prev, curr, s.c, s.bc, (k + 1) * tau, s.spec, s.src);
      accumulate(next, k + 1);
      prev = std::move(curr);
      curr = std::move(next);
    }

    const FieldHistory lam = solve_adjoint(s.g, s.bc, s.c, S, s.src, s.spec);
    double rhs = 0.0;
    for (int d = 0; d < 3; ++d)
      for (std::size_t n = 0; n < s.g.size(); ++n)
        rhs += s.c.eps[n] * h * h * h / tau * lam.frames[0].comp[d][n] * u.comp[d][n];
    CHECK(J == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("adjoint argument errors") {
  Setup s;
  ObservationTrace wrong(s.spec.steps() + 1, s.bc.observation.size(), s.spec.tau);
  CHECK_THROWS_AS(solve_adjoint(s.g, s.bc, s.c, wrong, s.src, s.spec), Error);
  TimeLoopSpec fast = s.spec;
  fast.tau = 0.1;
  fast.final_time = 0.6;
  ObservationTrace src6(6, s.bc.observation.size(), 0.1);
  try {
    solve_adjoint(s.g, s.bc, s.c, src6, s.src, fast);
    FAIL("expected CflViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CflViolation);
  }
}
