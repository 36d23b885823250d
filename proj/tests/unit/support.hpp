#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"

namespace testing {

using namespace emrecon;

inline Extents box(double x0, double x1, double y0, double y1, double z0, double z1) {
  return {{{x0, x1}, {y0, y1}, {z0, z1}}};
}

inline Extents default_outer() { return box(-3.4, 3.4, -0.8, 0.8, -0.4, 0.4); }
inline Extents default_inner() { return box(-3.2, 3.2, -0.6, 0.6, -0.3, 0.3); }

inline bool interior(const Grid3& g, std::size_t n) { return !g.on_boundary(g.unravel(n)); }

inline VectorFrame random_frame(const Grid3& g, std::uint64_t seed, bool interior_only = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorFrame f(g.size());
  for (std::size_t n = 0; n < g.size(); ++n)
    for (auto& c : f.comp) c[n] = (!interior_only || interior(g, n)) ? u(rng) : 0.0;
  return f;
}

inline CoefficientField random_coefficients(const Grid3& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ue(1.0, 6.0), um(1.0, 3.0);
  CoefficientField c = CoefficientField::uniform(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    c.eps[n] = ue(rng);
    c.mu[n] = um(rng);
  }
  return c;
}

inline double dot(const VectorFrame& a, const VectorFrame& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t n = 0; n < a.size(); ++n) s += a.comp[d][n] * b.comp[d][n];
  return s;
}

inline double norm(const VectorFrame& a) { return std::sqrt(dot(a, a)); }

/// Independent 7-point Laplacian, interior nodes only (boundary entries 0).
inline NodalArray laplacian7(const Grid3& g, const NodalArray& u) {
  NodalArray out(g.size(), 0.0);
  const double h2 = g.spacing() * g.spacing();
  for (int i = 1; i + 1 < g.count(0); ++i)
    for (int j = 1; j + 1 < g.count(1); ++j)
      for (int k = 1; k + 1 < g.count(2); ++k) {
        const double c = u[g.index(i, j, k)];
        out[g.index(i, j, k)] =
            (u[g.index(i + 1, j, k)] - 2.0 * c + u[g.index(i - 1, j, k)]) / h2 +
            (u[g.index(i, j + 1, k)] - 2.0 * c + u[g.index(i, j - 1, k)]) / h2 +
            (u[g.index(i, j, k + 1)] - 2.0 * c + u[g.index(i, j, k - 1)]) / h2;
      }
  return out;
}

}  // namespace testing
