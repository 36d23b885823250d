#include "emrecon/forward_solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "emrecon/discrete_ops.hpp"
#include "emrecon/error.hpp"
#include "emrecon/kernels.hpp"

namespace emrecon {

double SourcePulse::end_time() const { return 2.0 * std::numbers::pi / omega; }

double pulse(double t, const SourcePulse& p) {
  if (t <= 0.0 || t >= p.end_time()) return 0.0;
  return p.amplitude * std::sin(p.omega * t);
}

std::size_t TimeLoopSpec::steps() const {
  if (!(tau > 0.0) || !(final_time > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tau and final_time must be positive");
  const double n = std::round(final_time / tau);
  if (n < 1.0 || std::abs(n * tau - final_time) > 1e-9 * final_time)
    throw Error(ErrorCode::InvalidArgument, "final_time is not an integer multiple of tau");
  return static_cast<std::size_t>(n);
}

double absorbing_coefficient(double tau, double h) { return (tau - h) / (tau + h); }

namespace {

std::size_t inward_neighbour(const Grid3& g, const BoundaryMap& bc, std::size_t b) {
  const int axis = bc.observation_axis;
  const Index3 ijk = g.unravel(b);
  return ijk[axis] == 0 ? b + static_cast<std::size_t>(g.stride(axis))
                        : b - static_cast<std::size_t>(g.stride(axis));
}

std::size_t clamped_source(const Grid3& g, std::size_t b) {
  Index3 ijk = g.unravel(b);
  for (int a = 0; a < 3; ++a) ijk[a] = std::clamp(ijk[a], 1, g.count(a) - 2);
  return g.index(ijk);
}

void check_finite(const VectorFrame& f, double t) {
  for (const auto& comp : f.comp)
    for (double v : comp)
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite field value at t=" << t;
        throw Error(ErrorCode::NonFinite, msg.str());
      }
}

void check_cfl(const Grid3& g, const CoefficientField& c, double tau) {
  const double bound = cfl_max_step(g, c);
  if (tau > bound) {
    std::ostringstream msg;
    msg << "tau=" << tau << " exceeds the stability bound " << bound;
    throw Error(ErrorCode::CflViolation, msg.str());
  }
}

}  // namespace

std::array<double, 2> IncidentWave::at(double t) const {
  const long k = std::lround(t / tau);
  if (k < 0 || k >= static_cast<long>(levels.size())) return {0.0, 0.0};
  return levels[static_cast<std::size_t>(k)];
}

IncidentWave incident_wave(const Grid3& g, const BoundaryMap& bc, const SourcePulse& src,
                           const TimeLoopSpec& spec) {
  const std::size_t n_steps = spec.steps();
  const int axis = bc.observation_axis;
  const int n = g.count(axis);
  const double h = g.spacing();
  const double speed2 = src.polarization == axis ? spec.s : 1.0;
  const double r = speed2 * spec.tau * spec.tau / (h * h);
  const double kappa = absorbing_coefficient(spec.tau, h);

  IncidentWave out;
  out.tau = spec.tau;
  out.levels.assign(n_steps + 1, {0.0, 0.0});
  std::vector<double> prev(n, 0.0), curr(n, 0.0), next(n, 0.0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * spec.tau;
    for (int m = 1; m + 1 < n; ++m)
      next[m] = 2.0 * curr[m] - prev[m] + r * (curr[m + 1] - 2.0 * curr[m] + curr[m - 1]);
    next[0] = curr[1] + kappa * (next[1] - curr[0]);
    const double f = pulse(t_next, src);
    next[n - 1] = spec.illumination == Illumination::Dirichlet ? f : next[n - 2] + h * f;
    out.levels[k + 1] = {next[n - 1], next[n - 2]};
    std::swap(prev, curr);
    std::swap(curr, next);
  }
  return out;
}

void apply_boundary_pass(const Grid3& g, const BoundaryMap& bc, const TimeLoopSpec& spec,
                         const SourcePulse& src, double t_next, const VectorFrame& curr,
                         VectorFrame& next, const IncidentWave* incident) {
  if (spec.boundaries == BoundaryTreatment::Frozen) {
    for (auto list : {&bc.observation, &bc.opposite, &bc.lateral})
      for (std::size_t b : *list)
        for (auto& comp : next.comp) comp[b] = 0.0;
    return;
  }

  const double kappa = absorbing_coefficient(spec.tau, g.spacing());
  const bool source_on = t_next <= src.end_time();
  auto absorb = [&](std::size_t b) {
    const std::size_t q = inward_neighbour(g, bc, b);
    for (int d = 0; d < 3; ++d)
      next.comp[d][b] = curr.comp[d][q] + kappa * (next.comp[d][q] - curr.comp[d][b]);
  };

  for (std::size_t b : bc.opposite) absorb(b);
  if (!source_on) {
    for (std::size_t b : bc.observation) absorb(b);
    if (incident) {
      // Mur is affine in the incident wave; add back its defect.
      const auto [ib1, iq1] = incident->at(t_next);
      const auto [ib0, iq0] = incident->at(t_next - spec.tau);
      const double defect = ib1 - iq0 - kappa * (iq1 - ib0);
      for (std::size_t b : bc.observation) next.comp[src.polarization][b] += defect;
    }
  } else {
    const double f = pulse(t_next, src);
    for (std::size_t b : bc.observation) {
      const std::size_t q = inward_neighbour(g, bc, b);
      for (int d = 0; d < 3; ++d) {
        const double value = d == src.polarization ? f : 0.0;
        next.comp[d][b] = spec.illumination == Illumination::Dirichlet
                              ? value
                              : next.comp[d][q] + g.spacing() * value;
      }
    }
  }
  for (std::size_t b : bc.lateral) {
    const std::size_t q = clamped_source(g, b);
    for (int d = 0; d < 3; ++d) next.comp[d][b] = next.comp[d][q];
  }
}

VectorFrame step_forward(const Grid3& g, const VectorFrame& prev, const VectorFrame& curr,
                         const CoefficientField& c, const BoundaryMap& bc, double t_next,
                         const TimeLoopSpec& spec, const SourcePulse& src,
                         const IncidentWave* incident) {
  check_cfl(g, c, spec.tau);
  if (prev.size() != g.size() || curr.size() != g.size() || c.size() != g.size())
    throw Error(ErrorCode::ShapeMismatch, "frames or coefficients do not match the grid");
  kernels::OperatorWorkspace ws;
  ws.resize(g.size());
  VectorFrame next(g.size(), curr.time_index + 1);
  kernels::omp::leapfrog_interior(g, prev, curr, {c.eps, c.mu, spec.s}, spec.tau, ws, next);
  apply_boundary_pass(g, bc, spec, src, t_next, curr, next, incident);
  check_finite(next, t_next);
  return next;
}

void record_trace(const BoundaryMap& bc, const VectorFrame& frame, std::size_t k,
                  ObservationTrace& trace) {
  for (std::size_t p = 0; p < bc.observation.size(); ++p)
    for (int d = 0; d < 3; ++d) trace.at(k, p, d) = frame.comp[d][bc.observation[p]];
}

ForwardResult solve_forward(const Grid3& g, const BoundaryMap& bc, const CoefficientField& c,
                            const SourcePulse& src, const TimeLoopSpec& spec) {
  const std::size_t n_steps = spec.steps();
  check_cfl(g, c, spec.tau);
  if (c.size() != g.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficients do not match the grid");
  if (spec.record == RecordPolicy::Strided && spec.stride < 1)
    throw Error(ErrorCode::InvalidArgument, "stride must be positive");

  ForwardResult out;
  out.trace = ObservationTrace(n_steps, bc.observation.size(), spec.tau);
  out.trace.omega = src.omega;
  out.history.tau = spec.tau;
  out.history.final_time = spec.final_time;

  const std::size_t n = g.size();
  const kernels::Coefficients coef{c.eps, c.mu, spec.s};
  kernels::OperatorWorkspace ws;
  ws.resize(n);

  const IncidentWave incident = incident_wave(g, bc, src, spec);
  VectorFrame prev(n, -1), curr(n, 0), next(n, 1);
  auto keep = [&](const VectorFrame& f, std::size_t k) {
    if (spec.record == RecordPolicy::Full ||
        (spec.record == RecordPolicy::Strided && k % static_cast<std::size_t>(spec.stride) == 0))
      out.history.frames.push_back(f);
  };
  keep(curr, 0);
  record_trace(bc, curr, 0, out.trace);

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * spec.tau;
    kernels::omp::leapfrog_interior(g, prev, curr, coef, spec.tau, ws, next);
    apply_boundary_pass(g, bc, spec, src, t_next, curr, next, &incident);
    check_finite(next, t_next);
    next.time_index = static_cast<int>(k + 1);
    record_trace(bc, next, k + 1, out.trace);
    keep(next, k + 1);
    std::swap(prev, curr);
    std::swap(curr, next);
  }
  return out;
}

}  // namespace emrecon
