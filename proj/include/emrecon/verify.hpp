#pragma once

#include <cstdint>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"
#include "emrecon/forward_solver.hpp"
#include "emrecon/objective.hpp"

namespace emrecon {

/// Deliberate defects injected into the reverse chain to show the identity
/// check is sensitive.
enum class AdjointMutation { None, FlipAbsorbingSign, FlipPenaltySign };

struct AdjointCheckSpec {
  std::size_t steps = 50;
  double cfl_fraction = 0.9;
  BoundaryTreatment boundaries = BoundaryTreatment::Physical;
  AdjointMutation mutation = AdjointMutation::None;
  bool same_fields = false;  // v = u
};

/// |<L u, v> - <u, L* v>| / (|u| |v|) for the source-free step chain
/// L: E^1 = u -> E^N with random interior-supported u, v and random
/// coefficients on interior nodes.
double adjoint_identity_check(const Grid3& g, std::uint64_t seed,
                              const AdjointCheckSpec& spec = {});

enum class Parameter { Eps, Mu };

/// (F(c + h e_n) - F(c - h e_n)) / (2 h) from two forward solves.
/// Throws ClampContact if either perturbed value leaves its admissible range
/// and OutsideInner if `node` is not INNER.
double fd_gradient_oracle(const InverseProblem& prob, const CoefficientField& c, Parameter param,
                          std::size_t node, double h_fd = 1e-3);

}  // namespace emrecon
