#include "emrecon/objective.hpp"

#include <cmath>

#include "emrecon/discrete_ops.hpp"
#include "emrecon/error.hpp"

namespace emrecon {

namespace {

void check_histories(const Grid3& g, const FieldHistory& e, const FieldHistory& lambda,
                     const CoefficientField& c, const TikhonovParams& p) {
  if (e.frames.size() < 2 || e.frames.size() != lambda.frames.size() ||
      std::abs(e.tau - lambda.tau) > 1e-15 * e.tau)
    throw Error(ErrorCode::HistoryMismatch, "state and adjoint histories are not congruent");
  for (std::size_t k = 0; k < e.frames.size(); ++k) {
    if (e.frames[k].time_index != static_cast<int>(k) ||
        lambda.frames[k].time_index != static_cast<int>(k))
      throw Error(ErrorCode::HistoryMismatch, "histories must hold every time level");
    if (e.frames[k].size() != g.size() || lambda.frames[k].size() != g.size())
      throw Error(ErrorCode::HistoryMismatch, "history frame does not match the grid");
  }
  if (c.size() != g.size() || p.eps0.size() != g.size() || p.mu0.size() != g.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficients or priors do not match the grid");
}

double trapezoid_weight(std::size_t k, std::size_t n_steps) {
  return (k == 0 || k == n_steps) ? 0.5 : 1.0;
}

/// Central difference in time, one-sided at the two ends.
NodalArray time_derivative(const FieldHistory& h, std::size_t k, int d) {
  const std::size_t last = h.frames.size() - 1;
  const std::size_t lo = k == 0 ? 0 : k - 1;
  const std::size_t hi = k == last ? last : k + 1;
  const double dt = static_cast<double>(hi - lo) * h.tau;
  const NodalArray& a = h.frames[hi].comp[d];
  const NodalArray& b = h.frames[lo].comp[d];
  NodalArray out(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) out[p] = (a[p] - b[p]) / dt;
  return out;
}

void finish(const RegionMask& mask, const NodalArray& value, const NodalArray& prior,
            double gamma, NodalArray& acc) {
  for (std::size_t p = 0; p < acc.size(); ++p)
    acc[p] = mask.is_inner(p) ? acc[p] + gamma * (value[p] - prior[p]) : 0.0;
}

}  // namespace

TikhonovParams TikhonovParams::uniform_priors(const Grid3& g, double eps0, double mu0) {
  TikhonovParams p;
  p.eps0.assign(g.size(), eps0);
  p.mu0.assign(g.size(), mu0);
  return p;
}

double misfit(const Grid3& g, const ObservationTrace& simulated, const ObservationTrace& measured,
              const CutoffSpec& cutoff_spec) {
  if (!simulated.congruent(measured))
    throw Error(ErrorCode::TraceMismatch, "simulated and measured traces are not congruent");
  const double h = g.spacing();
  double total = 0.0;
  for (std::size_t k = 0; k <= simulated.steps; ++k) {
    const double z = cutoff(static_cast<double>(k) * simulated.tau, cutoff_spec);
    if (z == 0.0) continue;
    double level = 0.0;
    for (std::size_t p = 0; p < simulated.node_count; ++p)
      for (int d = 0; d < 3; ++d) {
        const double r = simulated.at(k, p, d) - measured.at(k, p, d);
        level += r * r;
      }
    total += trapezoid_weight(k, simulated.steps) * z * level;
  }
  return 0.5 * total * h * h * simulated.tau;
}

double tikhonov(const Grid3& g, const ObservationTrace& simulated,
                const ObservationTrace& measured, const CoefficientField& c,
                const TikhonovParams& p) {
  if (c.size() != g.size() || p.eps0.size() != g.size() || p.mu0.size() != g.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficients or priors do not match the grid");
  const double h3 = std::pow(g.spacing(), 3);
  double r1 = 0.0, r2 = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    r1 += (c.eps[n] - p.eps0[n]) * (c.eps[n] - p.eps0[n]);
    r2 += (c.mu[n] - p.mu0[n]) * (c.mu[n] - p.mu0[n]);
  }
  return misfit(g, simulated, measured, p.cutoff) + 0.5 * p.gamma1 * r1 * h3 +
         0.5 * p.gamma2 * r2 * h3;
}

NodalArray grad_epsilon(const Grid3& g, const RegionMask& mask, const FieldHistory& e,
                        const FieldHistory& lambda, const CoefficientField& c,
                        const TikhonovParams& p, double s) {
  check_histories(g, e, lambda, c, p);
  const std::size_t n_steps = e.frames.size() - 1;
  const std::size_t n = g.size();
  const double tau = e.tau;
  NodalArray acc(n, 0.0);

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double w = trapezoid_weight(k, n_steps) * tau;
    for (int d = 0; d < 3; ++d) {
      const NodalArray de = time_derivative(e, k, d);
      const NodalArray dl = time_derivative(lambda, k, d);
      for (std::size_t q = 0; q < n; ++q) acc[q] -= w * dl[q] * de[q];
    }
    if (s == 0.0) continue;
    const NodalArray div_l = divergence(g, lambda.frames[k], Stencil::Backward);
    if (p.divergence_term == DivergenceTerm::DivProduct) {
      const NodalArray div_e = divergence(g, e.frames[k], Stencil::Backward);
      for (std::size_t q = 0; q < n; ++q) acc[q] += w * s * div_e[q] * div_l[q];
    } else {
      const VectorFrame grad_div = gradient_scalar(g, div_l, Stencil::Forward);
      for (int d = 0; d < 3; ++d)
        for (std::size_t q = 0; q < n; ++q)
          acc[q] -= w * s * e.frames[k].comp[d][q] * grad_div.comp[d][q];
    }
  }
  finish(mask, c.eps, p.eps0, p.gamma1, acc);
  return acc;
}

NodalArray grad_mu(const Grid3& g, const RegionMask& mask, const FieldHistory& e,
                   const FieldHistory& lambda, const CoefficientField& c, const TikhonovParams& p) {
  check_histories(g, e, lambda, c, p);
  const std::size_t n_steps = e.frames.size() - 1;
  const std::size_t n = g.size();
  NodalArray acc(n, 0.0);

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double w = trapezoid_weight(k, n_steps) * e.tau;
    const VectorFrame ce = curl(g, e.frames[k], Stencil::Forward);
    const VectorFrame cl = curl(g, lambda.frames[k], Stencil::Forward);
    for (std::size_t q = 0; q < n; ++q) {
      const double dot =
          ce.comp[0][q] * cl.comp[0][q] + ce.comp[1][q] * cl.comp[1][q] + ce.comp[2][q] * cl.comp[2][q];
      acc[q] -= w * dot / (c.mu[q] * c.mu[q]);
    }
  }
  finish(mask, c.mu, p.mu0, p.gamma2, acc);
  return acc;
}

double evaluate_functional(const InverseProblem& prob, const CoefficientField& c) {
  TimeLoopSpec spec = prob.time;
  spec.record = RecordPolicy::TraceOnly;
  const ForwardResult fw = solve_forward(prob.grid, prob.bc, c, prob.source, spec);
  return tikhonov(prob.grid, fw.trace, prob.observed, c, prob.params);
}

GradientEvaluation evaluate_gradient(const InverseProblem& prob, const CoefficientField& c) {
  TimeLoopSpec spec = prob.time;
  spec.record = RecordPolicy::Full;
  const ForwardResult fw = solve_forward(prob.grid, prob.bc, c, prob.source, spec);
  GradientEvaluation out;
  out.value = tikhonov(prob.grid, fw.trace, prob.observed, c, prob.params);
  const ObservationTrace src = residual_source(fw.trace, prob.observed, prob.params.cutoff);
  const FieldHistory lambda = solve_adjoint(prob.grid, prob.bc, c, src, prob.source, spec);
  out.g1 = grad_epsilon(prob.grid, prob.mask, fw.history, lambda, c, prob.params, spec.s);
  out.g2 = grad_mu(prob.grid, prob.mask, fw.history, lambda, c, prob.params);
  return out;
}

double inner_dot(const Grid3& g, const RegionMask& mask, const NodalArray& a, const NodalArray& b) {
  double sum = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (mask.is_inner(n)) sum += a[n] * b[n];
  return sum * std::pow(g.spacing(), 3);
}

double inner_norm(const Grid3& g, const RegionMask& mask, const NodalArray& v) {
  return std::sqrt(inner_dot(g, mask, v, v));
}

}  // namespace emrecon
