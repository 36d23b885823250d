#include "emrecon/adjoint_solver.hpp"

#include <algorithm>
#include <cmath>

#include "emrecon/discrete_ops.hpp"
#include "emrecon/error.hpp"

namespace emrecon {

namespace {

double blend_exp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

std::size_t inward_neighbour(const Grid3& g, const BoundaryMap& bc, std::size_t b) {
  const int axis = bc.observation_axis;
  return g.unravel(b)[axis] == 0 ? b + static_cast<std::size_t>(g.stride(axis))
                                 : b - static_cast<std::size_t>(g.stride(axis));
}

std::size_t clamped_source(const Grid3& g, std::size_t b) {
  Index3 ijk = g.unravel(b);
  for (int a = 0; a < 3; ++a) ijk[a] = std::clamp(ijk[a], 1, g.count(a) - 2);
  return g.index(ijk);
}

}  // namespace

double cutoff(double t, const CutoffSpec& spec) {
  const double half = 0.5 * spec.delta;
  const double sigma = (spec.final_time - half - t) / half;
  if (sigma >= 1.0) return 1.0;
  if (sigma <= 0.0) return 0.0;
  const double a = blend_exp(sigma), b = blend_exp(1.0 - sigma);
  return a / (a + b);
}

ObservationTrace residual_source(const ObservationTrace& simulated,
                                 const ObservationTrace& measured, const CutoffSpec& spec) {
  if (!simulated.congruent(measured))
    throw Error(ErrorCode::TraceMismatch, "simulated and measured traces are not congruent");
  ObservationTrace out(simulated.steps, simulated.node_count, simulated.tau);
  out.omega = simulated.omega;
  for (std::size_t k = 0; k <= simulated.steps; ++k) {
    const double z = cutoff(static_cast<double>(k) * simulated.tau, spec);
    for (std::size_t p = 0; p < simulated.node_count; ++p)
      for (int d = 0; d < 3; ++d)
        out.at(k, p, d) = -(simulated.at(k, p, d) - measured.at(k, p, d)) * z;
  }
  return out;
}

void reverse_boundary_pass(const Grid3& g, const BoundaryMap& bc, const TimeLoopSpec& spec,
                           const SourcePulse& src, double t_next, VectorFrame& u_curr,
                           VectorFrame& u_next, double absorbing_sign) {
  if (spec.boundaries == BoundaryTreatment::Frozen) {
    for (auto list : {&bc.observation, &bc.opposite, &bc.lateral})
      for (std::size_t b : *list)
        for (auto& comp : u_next.comp) comp[b] = 0.0;
    return;
  }

  for (std::size_t b : bc.lateral) {
    const std::size_t q = clamped_source(g, b);
    for (int d = 0; d < 3; ++d) {
      u_next.comp[d][q] += u_next.comp[d][b];
      u_next.comp[d][b] = 0.0;
    }
  }

  const double kappa = absorbing_sign * absorbing_coefficient(spec.tau, g.spacing());
  auto absorb = [&](std::size_t b) {
    const std::size_t q = inward_neighbour(g, bc, b);
    for (int d = 0; d < 3; ++d) {
      const double w = u_next.comp[d][b];
      u_curr.comp[d][q] += w;
      u_next.comp[d][q] += kappa * w;
      u_curr.comp[d][b] -= kappa * w;
      u_next.comp[d][b] = 0.0;
    }
  };

  const bool source_on = t_next <= src.end_time();
  if (!source_on) {
    for (std::size_t b : bc.observation) absorb(b);
  } else {
    for (std::size_t b : bc.observation) {
      const std::size_t q = inward_neighbour(g, bc, b);
      for (int d = 0; d < 3; ++d) {
        if (spec.illumination == Illumination::Neumann) u_next.comp[d][q] += u_next.comp[d][b];
        u_next.comp[d][b] = 0.0;
      }
    }
  }
  for (std::size_t b : bc.opposite) absorb(b);
}

void reverse_step(const Grid3& g, const BoundaryMap& bc, const kernels::Coefficients& coef,
                  const TimeLoopSpec& spec, const SourcePulse& src, double t_k,
                  kernels::OperatorWorkspace& ws, VectorFrame& u_k, VectorFrame& u_km1,
                  VectorFrame& u_km2, double absorbing_sign) {
  reverse_boundary_pass(g, bc, spec, src, t_k, u_km1, u_k, absorbing_sign);
  kernels::omp::reverse_leapfrog_interior(g, u_k, coef, spec.tau, ws, u_km1, u_km2);
}

FieldHistory solve_adjoint(const Grid3& g, const BoundaryMap& bc, const CoefficientField& c,
                           const ObservationTrace& source, const SourcePulse& src,
                           const TimeLoopSpec& spec) {
  const std::size_t n_steps = spec.steps();
  if (source.steps != n_steps || source.node_count != bc.observation.size())
    throw Error(ErrorCode::TraceMismatch, "adjoint source does not match the time loop");
  if (c.size() != g.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficients do not match the grid");
  const double bound = cfl_max_step(g, c);
  if (spec.tau > bound) throw Error(ErrorCode::CflViolation, "tau exceeds the stability bound");

  const std::size_t n = g.size();
  const double h = g.spacing();
  const double tau = spec.tau;
  const double load_scale = h * h * tau;
  const double lambda_scale = -tau / (h * h * h);
  const kernels::Coefficients coef{c.eps, c.mu, spec.s};
  kernels::OperatorWorkspace ws;
  ws.resize(n);

  FieldHistory out;
  out.tau = tau;
  out.final_time = spec.final_time;
  out.frames.assign(n_steps + 1, VectorFrame(n));
  for (std::size_t k = 0; k <= n_steps; ++k) out.frames[k].time_index = static_cast<int>(k);

  VectorFrame u_k(n), u_km1(n), u_km2(n);
  for (std::size_t k = n_steps; k >= 1; --k) {
    const double weight = (k == n_steps) ? 0.5 : 1.0;
    for (std::size_t p = 0; p < bc.observation.size(); ++p)
      for (int d = 0; d < 3; ++d)
        u_k.comp[d][bc.observation[p]] -= load_scale * weight * source.at(k, p, d);

    reverse_step(g, bc, coef, spec, src, static_cast<double>(k) * tau, ws, u_k, u_km1, u_km2);

    VectorFrame& lam = out.frames[k - 1];
    for (int d = 0; d < 3; ++d)
      for (std::size_t p = 0; p < n; ++p)
        lam.comp[d][p] = lambda_scale * u_k.comp[d][p] / c.eps[p];
    for (const auto& comp : lam.comp)
      for (double v : comp)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite adjoint value");

    std::swap(u_k, u_km1);
    std::swap(u_km1, u_km2);
    u_km2.fill(0.0);
  }
  return out;
}

}  // namespace emrecon
