#include "emrecon/verify.hpp"

#include <cmath>
#include <numbers>

#include "emrecon/adjoint_solver.hpp"
#include "emrecon/discrete_ops.hpp"
#include "emrecon/error.hpp"
#include "emrecon/kernels.hpp"

namespace emrecon {

namespace {

VectorFrame random_interior(const Grid3& g, UniformStream& rng) {
  VectorFrame f(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.on_boundary(g.unravel(p))) continue;
    for (auto& comp : f.comp) comp[p] = rng.next();
  }
  return f;
}

double dot(const VectorFrame& a, const VectorFrame& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t p = 0; p < a.size(); ++p) s += a.comp[d][p] * b.comp[d][p];
  return s;
}

}  // namespace

double adjoint_identity_check(const Grid3& g, std::uint64_t seed, const AdjointCheckSpec& spec) {
  if (spec.steps < 2) throw Error(ErrorCode::InvalidArgument, "need at least two steps");
  UniformStream rng(seed);
  const std::size_t n = g.size();
  const BoundaryMap bc = classify_boundary(g, 2);

  CoefficientField c = CoefficientField::uniform(g);
  for (std::size_t p = 0; p < n; ++p) {
    if (g.on_boundary(g.unravel(p))) continue;
    c.eps[p] = 2.5 + 1.5 * rng.next();
    c.mu[p] = 1.5 + 0.5 * rng.next();
  }

  TimeLoopSpec time;
  time.tau = spec.cfl_fraction * cfl_max_step(g, c);
  time.final_time = time.tau * static_cast<double>(spec.steps);
  time.boundaries = spec.boundaries;
  SourcePulse src;
  src.amplitude = 0.0;
  src.omega = 1e3 * 2.0 * std::numbers::pi / time.tau;  // absorbing from the first step

  const VectorFrame u = random_interior(g, rng);
  const VectorFrame v = spec.same_fields ? u : random_interior(g, rng);

  const kernels::Coefficients coef{c.eps, c.mu, time.s};
  kernels::OperatorWorkspace ws;
  ws.resize(n);

  VectorFrame prev(n), curr = u, next(n);
  for (std::size_t k = 1; k < spec.steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * time.tau;
    kernels::omp::leapfrog_interior(g, prev, curr, coef, time.tau, ws, next);
    apply_boundary_pass(g, bc, time, src, t_next, curr, next);
    std::swap(prev, curr);
    std::swap(curr, next);
  }
  const double forward = dot(curr, v);

  const double absorbing_sign = spec.mutation == AdjointMutation::FlipAbsorbingSign ? -1.0 : 1.0;
  const double s_rev = spec.mutation == AdjointMutation::FlipPenaltySign ? -time.s : time.s;
  const kernels::Coefficients rcoef{c.eps, c.mu, s_rev};
  VectorFrame u_k = v, u_km1(n), u_km2(n);
  for (std::size_t k = spec.steps; k >= 2; --k) {
    reverse_step(g, bc, rcoef, time, src, static_cast<double>(k) * time.tau, ws, u_k,
                 u_km1, u_km2, absorbing_sign);
    std::swap(u_k, u_km1);
    std::swap(u_km1, u_km2);
    u_km2.fill(0.0);
  }
  const double backward = dot(u, u_k);
  return std::abs(forward - backward) / (std::sqrt(dot(u, u)) * std::sqrt(dot(v, v)));
}

double fd_gradient_oracle(const InverseProblem& prob, const CoefficientField& c, Parameter param,
                          std::size_t node, double h_fd) {
  if (node >= c.size() || !prob.mask.is_inner(node))
    throw Error(ErrorCode::OutsideInner, "finite-difference node must be INNER");
  const bool eps = param == Parameter::Eps;
  const Bounds& bounds = eps ? c.eps_bounds : c.mu_bounds;
  const double value = eps ? c.eps[node] : c.mu[node];
  if (!bounds.contains(value + h_fd) || !bounds.contains(value - h_fd))
    throw Error(ErrorCode::ClampContact, "finite-difference perturbation leaves the admissible range");

  CoefficientField plus = c, minus = c;
  (eps ? plus.eps : plus.mu)[node] = value + h_fd;
  (eps ? minus.eps : minus.mu)[node] = value - h_fd;
  return (evaluate_functional(prob, plus) - evaluate_functional(prob, minus)) / (2.0 * h_fd);
}

}  // namespace emrecon
