#pragma once

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"
#include "emrecon/forward_solver.hpp"
#include "emrecon/kernels.hpp"

namespace emrecon {

struct CutoffSpec {
  double delta = 0.12;
  double final_time = 1.2;
};

/// 1 on [0, T - delta], 0 on [T - delta/2, T], smooth monotone blend between.
double cutoff(double t, const CutoffSpec& spec);

/// -(E - E_obs) z(t) per observation node, level and component.
/// Throws TraceMismatch unless the traces are congruent.
ObservationTrace residual_source(const ObservationTrace& simulated,
                                 const ObservationTrace& measured, const CutoffSpec& spec);

/// Transpose of apply_boundary_pass. `u_next` holds the multipliers of level
/// t_next; entries on boundary nodes are pushed back onto the interior of
/// `u_next` and onto `u_curr`, then cleared. `absorbing_sign` = -1 flips the
/// absorbing coefficient (mutation hook for the adjoint identity check).
void reverse_boundary_pass(const Grid3& g, const BoundaryMap& bc, const TimeLoopSpec& spec,
                           const SourcePulse& src, double t_next, VectorFrame& u_curr,
                           VectorFrame& u_next, double absorbing_sign = 1.0);

/// Transpose of one full forward step (k-1, k-2) -> k. On return `u_k` is
/// restricted to interior nodes and its contributions are accumulated into
/// `u_km1` and `u_km2`.
void reverse_step(const Grid3& g, const BoundaryMap& bc, const kernels::Coefficients& coef,
                  const TimeLoopSpec& spec, const SourcePulse& src, double t_k,
                  kernels::OperatorWorkspace& ws, VectorFrame& u_k, VectorFrame& u_km1,
                  VectorFrame& u_km2, double absorbing_sign = 1.0);

/// Backward march driven by `source` (as returned by residual_source) on the
/// observation face. Frames k = 0..N; frame N and N-1 vanish when the source
/// does, boundary nodes are zero. The result is the discrete transpose of the
/// forward scheme, which realizes dlambda/dn = dlambda/dt on the absorbing
/// faces and dlambda/dn = 0 on the lateral ones.
FieldHistory solve_adjoint(const Grid3& g, const BoundaryMap& bc, const CoefficientField& c,
                           const ObservationTrace& source, const SourcePulse& src,
                           const TimeLoopSpec& spec);

}  // namespace emrecon
