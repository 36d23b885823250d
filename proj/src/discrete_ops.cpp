#include "emrecon/discrete_ops.hpp"

#include <algorithm>
#include <cmath>

#include "emrecon/error.hpp"
#include "emrecon/kernels.hpp"

namespace emrecon {

namespace {

void require_shape(const Grid3& grid, std::size_t n) {
  if (n != grid.size()) throw Error(ErrorCode::ShapeMismatch, "field does not match the grid");
}

void require_shape(const Grid3& grid, const VectorFrame& f) {
  for (const auto& c : f.comp) require_shape(grid, c.size());
}

}  // namespace

NodalArray difference(const Grid3& grid, const NodalArray& u, int axis, Stencil stencil) {
  require_shape(grid, u.size());
  const double h = grid.spacing();
  const std::ptrdiff_t s = grid.stride(axis);
  const int last = grid.count(axis) - 1;
  NodalArray out(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(grid.size()); ++p) {
    const int c = grid.unravel(static_cast<std::size_t>(p))[axis];
    Stencil use = stencil;
    if (c == 0 && use != Stencil::Forward) use = Stencil::Forward;
    if (c == last && use != Stencil::Backward) use = Stencil::Backward;
    switch (use) {
      case Stencil::Central: out[p] = (u[p + s] - u[p - s]) / (2.0 * h); break;
      case Stencil::Forward: out[p] = (u[p + s] - u[p]) / h; break;
      case Stencil::Backward: out[p] = (u[p] - u[p - s]) / h; break;
    }
  }
  return out;
}

VectorFrame curl(const Grid3& grid, const VectorFrame& f, Stencil stencil) {
  require_shape(grid, f);
  auto d = [&](int comp, int axis) { return difference(grid, f.comp[comp], axis, stencil); };
  const NodalArray d1f2 = d(2, 1), d2f1 = d(1, 2), d2f0 = d(0, 2);
  const NodalArray d0f2 = d(2, 0), d0f1 = d(1, 0), d1f0 = d(0, 1);
  VectorFrame out(grid.size(), f.time_index);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    out.comp[0][p] = d1f2[p] - d2f1[p];
    out.comp[1][p] = d2f0[p] - d0f2[p];
    out.comp[2][p] = d0f1[p] - d1f0[p];
  }
  return out;
}

NodalArray divergence(const Grid3& grid, const VectorFrame& f, Stencil stencil) {
  require_shape(grid, f);
  NodalArray out = difference(grid, f.comp[0], 0, stencil);
  for (int a = 1; a < 3; ++a) {
    const NodalArray da = difference(grid, f.comp[a], a, stencil);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += da[p];
  }
  return out;
}

VectorFrame gradient_scalar(const Grid3& grid, const NodalArray& p, Stencil stencil) {
  VectorFrame out;
  for (int a = 0; a < 3; ++a) out.comp[a] = difference(grid, p, a, stencil);
  return out;
}

VectorFrame apply_stabilized_operator(const Grid3& grid, const VectorFrame& e,
                                      const CoefficientField& c, double s) {
  require_shape(grid, e);
  require_shape(grid, c.eps.size());
  kernels::OperatorWorkspace ws;
  ws.resize(grid.size());
  VectorFrame out(grid.size(), e.time_index);
  kernels::omp::apply_operator(grid, e, {c.eps, c.mu, s}, kernels::Penalty::EpsInsideDivergence,
                               ws, out);
  return out;
}

VectorFrame apply_adjoint_operator(const Grid3& grid, const VectorFrame& a,
                                   const CoefficientField& c, double s) {
  require_shape(grid, a);
  require_shape(grid, c.eps.size());
  kernels::OperatorWorkspace ws;
  ws.resize(grid.size());
  VectorFrame out(grid.size(), a.time_index);
  kernels::omp::apply_operator(grid, a, {c.eps, c.mu, s}, kernels::Penalty::EpsOutsideGradient, ws,
                               out);
  return out;
}

NodalArray lumped_mass_weights(const CoefficientField& c) { return c.eps; }

double cfl_max_step(const Grid3& grid, const CoefficientField& c) {
  double c_max = 0.0;
  for (std::size_t n = 0; n < c.eps.size(); ++n)
    c_max = std::max(c_max, 1.0 / std::sqrt(c.eps[n] * c.mu[n]));
  return grid.spacing() / (std::sqrt(3.0) * c_max);
}

}  // namespace emrecon
