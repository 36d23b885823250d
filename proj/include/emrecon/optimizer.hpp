#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"
#include "emrecon/objective.hpp"

namespace emrecon {

struct StoppingSpec {
  double theta = 1e-6;
  int window = 5;
  double rho = 1e-4;
  int max_iter = 50;
};

struct StepSpec {
  double alpha1 = 0.5;   // largest eps change per iteration
  double alpha2 = 0.05;  // largest mu change per iteration
  bool line_search = true;
  double armijo = 1e-4;
  int max_trials = 20;
  int restart = 20;
};

struct CgDirection {
  NodalArray d;
  double beta = 0.0;
};

/// Fletcher-Reeves: beta = |g_m|^2 / |g_prev|^2 over INNER nodes,
/// d = -g_m + beta d_prev. Throws DegenerateGradient if |g_prev| = 0.
CgDirection cg_direction(const Grid3& g, const RegionMask& mask, const NodalArray& g_m,
                         const NodalArray& g_prev, const NodalArray& d_prev);

/// eps + a1 d1 and mu + a2 d2 clamped to their bounds; OUTER nodes stay 1.
CoefficientField update_coefficients(const CoefficientField& c, const NodalArray& d1,
                                     const NodalArray& d2, double a1, double a2,
                                     const RegionMask& mask);

enum class StopDecision { Continue, StopEps, StopMu, StopAll };

struct CgState {
  int m = 0;
  CoefficientField c;
  NodalArray g1, g2, d1, d2;
  double beta1 = 0.0, beta2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  std::vector<double> f_history;
  std::vector<double> g1_norms, g2_norms;
  std::vector<double> eps_norms, mu_norms;  // coefficient norms after each iterate
  bool eps_stopped = false;
  bool mu_stopped = false;
};

/// Per-parameter stop: gradient norm <= theta, or coefficient norm spread
/// below rho (relative) over the last `window` iterates, or max_iter reached.
/// Parameters already stopped stay stopped.
StopDecision stopping_check(const CgState& state, const StoppingSpec& spec);

struct IterationLog {
  int m = 0;
  double f = 0.0;
  double g1_norm = 0.0;
  double g2_norm = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double max_eps = 0.0;
  double max_mu = 0.0;
};

struct ReconstructionOptions {
  StoppingSpec stopping;
  StepSpec step;
};

struct ReconstructionResult {
  CoefficientField c;
  int iterations = 0;
  int n = 0;  // last iterate at which eps was updated
  int l = 0;  // last iterate at which mu was updated
  std::vector<IterationLog> log;
  std::vector<double> f_history;  // functional at every accepted iterate
  bool line_search_failed = false;
  std::string stop_reason;
};

/// Conjugate-gradient reconstruction from `start` (usually the priors).
/// Writes one CSV row per iteration to `log_out` when given.
ReconstructionResult reconstruct(const InverseProblem& prob, const CoefficientField& start,
                                 const ReconstructionOptions& opt, std::ostream* log_out = nullptr);

std::string log_csv_header();
std::string log_csv_row(const IterationLog& row);

}  // namespace emrecon
