#pragma once

#include "emrecon/adjoint_solver.hpp"
#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"

namespace emrecon {

/// Form of the s-penalty contribution to the permittivity gradient.
enum class DivergenceTerm {
  DivProduct,   // s (div E)(div lambda)
  FieldDotGrad, // -s E . grad(div lambda)
};

struct TikhonovParams {
  double gamma1 = 0.01;
  double gamma2 = 0.9;
  NodalArray eps0;
  NodalArray mu0;
  CutoffSpec cutoff;
  DivergenceTerm divergence_term = DivergenceTerm::FieldDotGrad;

  static TikhonovParams uniform_priors(const Grid3& g, double eps0 = 1.0, double mu0 = 1.0);
};

/// 1/2 sum (E - E_obs)^2 z h^2 tau over face nodes, components and levels
/// (trapezoid in time).
double misfit(const Grid3& g, const ObservationTrace& simulated, const ObservationTrace& measured,
              const CutoffSpec& cutoff);

/// misfit + 1/2 gamma1 sum (eps - eps0)^2 h^3 + 1/2 gamma2 sum (mu - mu0)^2 h^3.
double tikhonov(const Grid3& g, const ObservationTrace& simulated,
                const ObservationTrace& measured, const CoefficientField& c,
                const TikhonovParams& p);

/// Gradient densities; the derivative of the functional with respect to the
/// value at node n is h^3 times entry n. OUTER entries are exactly zero.
/// `s` is the penalty factor the state was computed with.
NodalArray grad_epsilon(const Grid3& g, const RegionMask& mask, const FieldHistory& e,
                        const FieldHistory& lambda, const CoefficientField& c,
                        const TikhonovParams& p, double s = 1.0);

NodalArray grad_mu(const Grid3& g, const RegionMask& mask, const FieldHistory& e,
                   const FieldHistory& lambda, const CoefficientField& c, const TikhonovParams& p);

/// sqrt(sum over INNER nodes of v^2 h^3).
double inner_norm(const Grid3& g, const RegionMask& mask, const NodalArray& v);
double inner_dot(const Grid3& g, const RegionMask& mask, const NodalArray& a, const NodalArray& b);

/// Everything needed to evaluate the functional for a coefficient field.
struct InverseProblem {
  Grid3 grid;
  RegionMask mask;
  BoundaryMap bc;
  SourcePulse source;
  TimeLoopSpec time;
  ObservationTrace observed;
  TikhonovParams params;
};

/// One trace-only forward solve followed by tikhonov.
double evaluate_functional(const InverseProblem& prob, const CoefficientField& c);

struct GradientEvaluation {
  double value = 0.0;
  NodalArray g1;
  NodalArray g2;
};

/// Forward solve, adjoint solve and both gradient densities.
GradientEvaluation evaluate_gradient(const InverseProblem& prob, const CoefficientField& c);

}  // namespace emrecon
