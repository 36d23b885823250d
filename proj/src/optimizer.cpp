#include "emrecon/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "emrecon/error.hpp"

namespace emrecon {

namespace {

double max_abs_inner(const RegionMask& mask, const NodalArray& v) {
  double m = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n)
    if (mask.is_inner(n)) m = std::max(m, std::abs(v[n]));
  return m;
}

bool stabilized(const std::vector<double>& norms, int window, double rho) {
  if (window < 2 || norms.size() < static_cast<std::size_t>(window)) return false;
  const auto first = norms.end() - window;
  const auto [lo, hi] = std::minmax_element(first, norms.end());
  return *hi == 0.0 || (*hi - *lo) / *hi < rho;
}

NodalArray negated(const NodalArray& v) {
  NodalArray out(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = -v[n];
  return out;
}

}  // namespace

CgDirection cg_direction(const Grid3& g, const RegionMask& mask, const NodalArray& g_m,
                         const NodalArray& g_prev, const NodalArray& d_prev) {
  const double denom = inner_dot(g, mask, g_prev, g_prev);
  if (denom == 0.0) throw Error(ErrorCode::DegenerateGradient, "previous gradient vanishes");
  CgDirection out;
  out.beta = inner_dot(g, mask, g_m, g_m) / denom;
  out.d.resize(g_m.size());
  for (std::size_t n = 0; n < g_m.size(); ++n)
    out.d[n] = mask.is_inner(n) ? -g_m[n] + out.beta * d_prev[n] : 0.0;
  return out;
}

CoefficientField update_coefficients(const CoefficientField& c, const NodalArray& d1,
                                     const NodalArray& d2, double a1, double a2,
                                     const RegionMask& mask) {
  CoefficientField out = c;
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (!mask.is_inner(n)) {
      out.eps[n] = 1.0;
      out.mu[n] = 1.0;
      continue;
    }
    out.eps[n] = c.eps_bounds.clamp(c.eps[n] + a1 * d1[n]);
    out.mu[n] = c.mu_bounds.clamp(c.mu[n] + a2 * d2[n]);
  }
  return out;
}

StopDecision stopping_check(const CgState& state, const StoppingSpec& spec) {
  const bool at_limit = state.m >= spec.max_iter;
  bool eps_stop = state.eps_stopped || at_limit;
  bool mu_stop = state.mu_stopped || at_limit;
  if (!state.g1_norms.empty() && state.g1_norms.back() <= spec.theta) eps_stop = true;
  if (!state.g2_norms.empty() && state.g2_norms.back() <= spec.theta) mu_stop = true;
  if (stabilized(state.eps_norms, spec.window, spec.rho)) eps_stop = true;
  if (stabilized(state.mu_norms, spec.window, spec.rho)) mu_stop = true;
  if (eps_stop && mu_stop) return StopDecision::StopAll;
  if (eps_stop) return StopDecision::StopEps;
  if (mu_stop) return StopDecision::StopMu;
  return StopDecision::Continue;
}

std::string log_csv_header() { return "m,F,g1_norm,g2_norm,alpha1,alpha2,max_eps,max_mu"; }

std::string log_csv_row(const IterationLog& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e", r.m, r.f,
                r.g1_norm, r.g2_norm, r.alpha1, r.alpha2, r.max_eps, r.max_mu);
  return buf;
}

ReconstructionResult reconstruct(const InverseProblem& prob, const CoefficientField& start,
                                 const ReconstructionOptions& opt, std::ostream* log_out) {
  const Grid3& grid = prob.grid;
  const RegionMask& mask = prob.mask;
  validate_coefficients(start, mask);

  ReconstructionResult result;
  CgState st;
  st.c = start;
  GradientEvaluation ev = evaluate_gradient(prob, st.c);
  const double h3 = std::pow(grid.spacing(), 3);
  if (log_out) *log_out << log_csv_header() << '\n';

  auto coefficient_norms = [&](const CoefficientField& c) {
    st.eps_norms.push_back(inner_norm(grid, mask, c.eps));
    st.mu_norms.push_back(inner_norm(grid, mask, c.mu));
  };
  coefficient_norms(st.c);
  st.f_history.push_back(ev.value);

  NodalArray g1_prev, g2_prev;
  for (;;) {
    st.g1 = ev.g1;
    st.g2 = ev.g2;
    st.g1_norms.push_back(inner_norm(grid, mask, st.g1));
    st.g2_norms.push_back(inner_norm(grid, mask, st.g2));

    IterationLog row;
    row.m = st.m;
    row.f = ev.value;
    row.g1_norm = st.g1_norms.back();
    row.g2_norm = st.g2_norms.back();

    const StopDecision decision = stopping_check(st, opt.stopping);
    if (decision == StopDecision::StopEps || decision == StopDecision::StopAll) st.eps_stopped = true;
    if (decision == StopDecision::StopMu || decision == StopDecision::StopAll) st.mu_stopped = true;
    if (st.eps_stopped && st.mu_stopped) {
      row.max_eps = max_abs_inner(mask, st.c.eps);
      row.max_mu = max_abs_inner(mask, st.c.mu);
      result.log.push_back(row);
      if (log_out) *log_out << log_csv_row(row) << '\n';
      result.stop_reason = st.m >= opt.stopping.max_iter ? "max_iter" : "converged";
      break;
    }

    // Directions: steepest descent on the first and every restart-th
    // iteration or when the CG direction is not a descent direction.
    const bool restart = st.m == 0 || (opt.step.restart > 0 && st.m % opt.step.restart == 0);
    auto direction = [&](const NodalArray& g, const NodalArray& g_prev, const NodalArray& d_prev,
                         bool stopped, double& beta) {
      beta = 0.0;
      if (stopped) return NodalArray(g.size(), 0.0);
      if (restart || g_prev.empty() || inner_dot(grid, mask, g_prev, g_prev) == 0.0)
        return negated(g);
      CgDirection cg = cg_direction(grid, mask, g, g_prev, d_prev);
      if (inner_dot(grid, mask, g, cg.d) >= 0.0) return negated(g);
      beta = cg.beta;
      return cg.d;
    };
    st.d1 = direction(st.g1, g1_prev, st.d1, st.eps_stopped, st.beta1);
    st.d2 = direction(st.g2, g2_prev, st.d2, st.mu_stopped, st.beta2);

    const double m1 = max_abs_inner(mask, st.d1);
    const double m2 = max_abs_inner(mask, st.d2);
    const double a1 = m1 > 0.0 ? opt.step.alpha1 / m1 : 0.0;
    const double a2 = m2 > 0.0 ? opt.step.alpha2 / m2 : 0.0;

    CoefficientField trial;
    double f_trial = 0.0;
    bool accepted = false;
    double scale = 1.0;
    const int trials = opt.step.line_search ? std::max(1, opt.step.max_trials) : 1;
    for (int t = 0; t < trials; ++t, scale *= 0.5) {
      trial = update_coefficients(st.c, st.d1, st.d2, scale * a1, scale * a2, mask);
      f_trial = evaluate_functional(prob, trial);
      if (!opt.step.line_search) {
        accepted = true;
        break;
      }
      double slope = 0.0;
      for (std::size_t n = 0; n < grid.size(); ++n)
        if (mask.is_inner(n))
          slope += st.g1[n] * (trial.eps[n] - st.c.eps[n]) + st.g2[n] * (trial.mu[n] - st.c.mu[n]);
      if (f_trial <= ev.value + opt.step.armijo * slope * h3) {
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      result.line_search_failed = true;
      row.max_eps = max_abs_inner(mask, st.c.eps);
      row.max_mu = max_abs_inner(mask, st.c.mu);
      result.log.push_back(row);
      if (log_out) *log_out << log_csv_row(row) << '\n';
      result.stop_reason = "line_search";
      break;
    }

    st.alpha1 = scale * a1;
    st.alpha2 = scale * a2;
    row.alpha1 = st.alpha1;
    row.alpha2 = st.alpha2;
    row.max_eps = max_abs_inner(mask, trial.eps);
    row.max_mu = max_abs_inner(mask, trial.mu);
    result.log.push_back(row);
    if (log_out) *log_out << log_csv_row(row) << '\n';

    g1_prev = st.g1;
    g2_prev = st.g2;
    st.c = std::move(trial);
    ++st.m;
    if (!st.eps_stopped) result.n = st.m;
    if (!st.mu_stopped) result.l = st.m;
    coefficient_norms(st.c);
    ev = evaluate_gradient(prob, st.c);
    st.f_history.push_back(ev.value);
  }

  result.c = st.c;
  result.iterations = st.m;
  result.f_history = st.f_history;
  return result;
}

}  // namespace emrecon
