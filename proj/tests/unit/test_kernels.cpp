#include "doctest.h"
#include "emrecon/kernels.hpp"
#include "support.hpp"

#include <cmath>

using namespace emrecon;
using namespace emrecon::kernels;
using testing::box;

namespace {

Grid3 odd_grid() { return build_grid(box(0, 1.1, 0, 0.7, 0, 0.5), 0.1); }

double max_diff(const VectorFrame& a, const VectorFrame& b) {
  double m = 0.0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.comp[d][n] - b.comp[d][n]));
  return m;
}

double scale(const VectorFrame& a) {
  double m = 0.0;
  for (const auto& c : a.comp)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("omp operator matches the serial reference") {
  const Grid3 g = odd_grid();
  const CoefficientField c = testing::random_coefficients(g, 3);
  const VectorFrame e = testing::random_frame(g, 4);
  OperatorWorkspace ws;
  ws.resize(g.size());
  for (Penalty p : {Penalty::EpsInsideDivergence, Penalty::EpsOutsideGradient})
    for (double s : {0.0, 1.0, 2.5}) {
      VectorFrame ref(g.size()), fast(g.size());
      serial::apply_operator(g, e, {c.eps, c.mu, s}, p, ref);
      omp::apply_operator(g, e, {c.eps, c.mu, s}, p, ws, fast);
      CHECK(max_diff(ref, fast) <= 1e-12 * scale(ref));
    }
}

TEST_CASE("omp leapfrog updates match the serial reference") {
  const Grid3 g = odd_grid();
  const CoefficientField c = testing::random_coefficients(g, 5);
  const Coefficients coef{c.eps, c.mu, 1.0};
  const VectorFrame prev = testing::random_frame(g, 6), curr = testing::random_frame(g, 7);
  OperatorWorkspace ws;
  ws.resize(g.size());

  VectorFrame ref(g.size()), fast(g.size());
  serial::leapfrog_interior(g, prev, curr, coef, 0.01, ref);
  omp::leapfrog_interior(g, prev, curr, coef, 0.01, ws, fast);
  CHECK(max_diff(ref, fast) <= 1e-12 * scale(ref));

  VectorFrame rc = testing::random_frame(g, 8), rp = testing::random_frame(g, 9);
  VectorFrame fc = rc, fp = rp;
  serial::reverse_leapfrog_interior(g, curr, coef, 0.01, rc, rp);
  omp::reverse_leapfrog_interior(g, curr, coef, 0.01, ws, fc, fp);
  CHECK(max_diff(rc, fc) <= 1e-12 * scale(rc));
  CHECK(max_diff(rp, fp) <= 1e-12 * scale(rp));
}

TEST_CASE("forward and backward differences are negative transposes") {
  const Grid3 g = odd_grid();
  const VectorFrame u = testing::random_frame(g, 10), v = testing::random_frame(g, 11);
  for (int axis = 0; axis < 3; ++axis) {
    NodalArray fu(g.size()), bv(g.size());
    serial::forward_difference(g, u.comp[0], axis, fu);
    serial::backward_difference(g, v.comp[0], axis, bv);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      lhs += fu[n] * v.comp[0][n];
      rhs -= u.comp[0][n] * bv[n];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("adjoint operator is the exact transpose on the full node set") {
  const Grid3 g = odd_grid();
  const CoefficientField c = testing::random_coefficients(g, 12);
  const VectorFrame u = testing::random_frame(g, 13), v = testing::random_frame(g, 14);
  VectorFrame au(g.size()), atv(g.size());
  serial::apply_operator(g, u, {c.eps, c.mu, 1.0}, Penalty::EpsInsideDivergence, au);
  serial::apply_operator(g, v, {c.eps, c.mu, 1.0}, Penalty::EpsOutsideGradient, atv);
  const double lhs = testing::dot(au, v), rhs = testing::dot(u, atv);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * testing::norm(au) * testing::norm(v));
}

TEST_CASE("leapfrog reverse is the transpose of the interior update") {
  const Grid3 g = odd_grid();
  const CoefficientField c = testing::random_coefficients(g, 15);
  const Coefficients coef{c.eps, c.mu, 1.0};
  const VectorFrame prev = testing::random_frame(g, 16), curr = testing::random_frame(g, 17);
  const VectorFrame w = testing::random_frame(g, 18, true);
  VectorFrame next(g.size());
  serial::leapfrog_interior(g, prev, curr, coef, 0.02, next);
  VectorFrame uc(g.size()), up(g.size());
  serial::reverse_leapfrog_interior(g, w, coef, 0.02, uc, up);
  const double lhs = testing::dot(next, w);
  const double rhs = testing::dot(curr, uc) + testing::dot(prev, up);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("thread count is positive") { CHECK(thread_count() >= 1); }
