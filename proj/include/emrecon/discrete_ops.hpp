#pragma once

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"

namespace emrecon {

/// Interior difference stencil. Boundary nodes fall back to the one-sided
/// first-order difference that stays inside the grid.
enum class Stencil { Central, Forward, Backward };

NodalArray difference(const Grid3& grid, const NodalArray& u, int axis, Stencil stencil);

VectorFrame curl(const Grid3& grid, const VectorFrame& f, Stencil stencil = Stencil::Central);
NodalArray divergence(const Grid3& grid, const VectorFrame& f, Stencil stencil = Stencil::Central);
VectorFrame gradient_scalar(const Grid3& grid, const NodalArray& p,
                            Stencil stencil = Stencil::Central);

/// A(E) = curl(mu^-1 curl E) - s grad(div(eps E)), compact pairing: forward
/// differences for the inner curl and the outer gradient, backward for the
/// outer curl and the inner divergence. Differences reaching outside the grid
/// read zero; values at boundary nodes are overwritten by the solvers' boundary
/// pass and only interior nodes carry the operator.
VectorFrame apply_stabilized_operator(const Grid3& grid, const VectorFrame& e,
                                      const CoefficientField& c, double s);

/// Exact transpose of apply_stabilized_operator on the full node set:
/// curl(mu^-1 curl a) - s eps grad(div a).
VectorFrame apply_adjoint_operator(const Grid3& grid, const VectorFrame& a,
                                   const CoefficientField& c, double s);

/// Diagonal of the lumped mass matrix per unit dual-cell volume (= eps).
NodalArray lumped_mass_weights(const CoefficientField& c);

/// h / (sqrt(3) c_max) with c_max the fastest wave speed 1/sqrt(eps mu).
double cfl_max_step(const Grid3& grid, const CoefficientField& c);

}  // namespace emrecon
