#include "doctest.h"
#include "emrecon/error.hpp"
#include "emrecon/verify.hpp"
#include "problems.hpp"

#include <cmath>

using namespace emrecon;
using testing::box;

namespace {

Grid3 cube9() { return build_grid(box(0, 1, 0, 1, 0, 1), 0.125); }

}  // namespace

TEST_CASE("adjoint identity holds to round-off") {
  const Grid3 g = cube9();
  REQUIRE(g.counts() == Index3{9, 9, 9});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    AdjointCheckSpec spec;
    CHECK(adjoint_identity_check(g, seed, spec) < 1e-10);
    spec.boundaries = BoundaryTreatment::Frozen;
    CHECK(adjoint_identity_check(g, seed, spec) < 1e-10);
    spec.same_fields = true;
    CHECK(adjoint_identity_check(g, seed, spec) < 1e-10);
  }
}

TEST_CASE("sign-flipped reverse chains are detected") {
  const Grid3 g = cube9();
  AdjointCheckSpec spec;
  spec.mutation = AdjointMutation::FlipAbsorbingSign;
  CHECK(adjoint_identity_check(g, 1, spec) > 1e-6);
  spec.mutation = AdjointMutation::FlipPenaltySign;
  CHECK(adjoint_identity_check(g, 1, spec) > 1e-6);
}

TEST_CASE("adjoint identity on an elongated grid along another axis") {
  const Grid3 g = build_grid(box(0, 1.5, 0, 0.75, 0, 1.0), 0.125);
  AdjointCheckSpec spec;
  spec.steps = 30;
  CHECK(adjoint_identity_check(g, 7, spec) < 1e-10);
}

TEST_CASE("finite-difference oracle argument checks") {
  const InverseProblem p = testing::reduced_problem(0.15, 0.01, 0.9);
  CoefficientField c = testing::inner_uniform(p, 2.0, 1.5);
  const std::size_t inner = p.mask.inner_nodes().front();
  try {
    fd_gradient_oracle(p, c, Parameter::Eps, 0);
    FAIL("expected OutsideInner");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideInner);
  }
  c.eps[inner] = 15.0;
  try {
    fd_gradient_oracle(p, c, Parameter::Eps, inner);
    FAIL("expected ClampContact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClampContact);
  }
  try {
    fd_gradient_oracle(p, c, Parameter::Mu, inner, 10.0);
    FAIL("expected ClampContact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClampContact);
  }
}

TEST_CASE("oracle is regularization dominated before the wave arrives") {
  // With T = 0.15 the pulse has not reached the inner region.
  const InverseProblem p = testing::reduced_problem(0.15, 0.01, 0.9);
  const CoefficientField c = testing::inner_uniform(p, 2.0, 1.5);
  const double h3 = std::pow(p.grid.spacing(), 3);
  const std::size_t node = p.mask.inner_nodes()[40];
  CHECK(fd_gradient_oracle(p, c, Parameter::Eps, node) == doctest::Approx(0.01 * 1.0 * h3));
  CHECK(fd_gradient_oracle(p, c, Parameter::Mu, node) == doctest::Approx(0.9 * 0.5 * h3));
  const GradientEvaluation ge = evaluate_gradient(p, c);
  CHECK(ge.g1[node] == doctest::Approx(0.01));
  CHECK(ge.g2[node] == doctest::Approx(0.45));
}
