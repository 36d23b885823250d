#pragma once

#include "emrecon/forward_solver.hpp"
#include "emrecon/objective.hpp"
#include "support.hpp"

namespace testing {

inline std::vector<Inclusion> default_boxes() {
  return {{box(-1.4, -1.0, -0.2, 0.2, -0.2, 0.2), 12.0, 2.0},
          {box(0.6, 1.0, 0.0, 0.4, -0.2, 0.2), 12.0, 2.0}};
}

/// h = 0.2 reduced domain with data from the two-box phantom on the same grid.
inline InverseProblem reduced_problem(double final_time, double gamma1, double gamma2) {
  InverseProblem p;
  p.grid = build_grid(box(-2.0, 2.0, -0.8, 0.8, -0.4, 0.4), 0.2);
  p.mask = build_decomposition(p.grid, box(-1.8, 1.8, -0.6, 0.6, -0.2, 0.2));
  p.bc = classify_boundary(p.grid, 2);
  p.time.final_time = final_time;
  p.time.record = RecordPolicy::TraceOnly;
  p.params = TikhonovParams::uniform_priors(p.grid);
  p.params.gamma1 = gamma1;
  p.params.gamma2 = gamma2;
  p.params.cutoff.final_time = final_time;
  const CoefficientField truth = phantom(p.grid, p.mask, default_boxes());
  p.observed = solve_forward(p.grid, p.bc, truth, p.source, p.time).trace;
  p.time.record = RecordPolicy::Full;
  return p;
}

inline CoefficientField inner_uniform(const InverseProblem& p, double eps, double mu) {
  CoefficientField c = CoefficientField::uniform(p.grid);
  for (std::size_t n : p.mask.inner_nodes()) {
    c.eps[n] = eps;
    c.mu[n] = mu;
  }
  return c;
}

}  // namespace testing
