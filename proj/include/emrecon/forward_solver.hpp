#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"

namespace emrecon {

/// f(t) = sin(omega t) on (0, 2 pi / omega), zero elsewhere, injected into
/// one component of E on the observation face.
struct SourcePulse {
  double omega = 30.0;
  int polarization = 1;
  double amplitude = 1.0;

  double end_time() const;
};

double pulse(double t, const SourcePulse& p);

enum class RecordPolicy { Full, TraceOnly, Strided };

enum class Illumination {
  Dirichlet,  // E = f(t) e_pol on the observation face
  Neumann,    // dE/dn = f(t) e_pol on the observation face
};

enum class BoundaryTreatment {
  Physical,  // source / absorbing / Neumann as configured
  Frozen,    // every boundary node held at zero
};

struct TimeLoopSpec {
  double tau = 0.003;
  double final_time = 1.2;
  double s = 1.0;
  RecordPolicy record = RecordPolicy::Full;
  int stride = 1;
  Illumination illumination = Illumination::Dirichlet;
  BoundaryTreatment boundaries = BoundaryTreatment::Physical;

  /// N = T / tau; throws InvalidArgument unless integral within 1e-9.
  std::size_t steps() const;
};

/// Mur coefficient (tau - h) / (tau + h) for unit boundary wave speed.
double absorbing_coefficient(double tau, double h);

/// Discrete plane wave launched by the source into the unit medium: the
/// polarized component on the observation face and on its inward neighbour
/// at every level, from the same leapfrog scheme run on one grid line along
/// the observation axis (source face as configured, absorbing far end).
struct IncidentWave {
  double tau = 0.0;
  std::vector<std::array<double, 2>> levels;  // {face, neighbour} for k = 0..N

  /// Zero beyond the computed levels.
  std::array<double, 2> at(double t) const;
};

IncidentWave incident_wave(const Grid3& g, const BoundaryMap& bc, const SourcePulse& src,
                           const TimeLoopSpec& spec);

/// Overwrites the boundary nodes of `next` (time t_next) given the interior
/// update already in `next` and the previous level `curr`.
/// Order: absorbing nodes, then the observation face source, then the
/// remaining faces copy from the interior node with clamped indices.
/// With `incident`, the absorbing update on the observation face acts on
/// E minus the incident wave, so the tail of the pulse leaves cleanly.
void apply_boundary_pass(const Grid3& g, const BoundaryMap& bc, const TimeLoopSpec& spec,
                         const SourcePulse& src, double t_next, const VectorFrame& curr,
                         VectorFrame& next, const IncidentWave* incident = nullptr);

/// Interior leapfrog update followed by the boundary pass.
/// Throws CflViolation if tau exceeds cfl_max_step and NonFinite on overflow.
VectorFrame step_forward(const Grid3& g, const VectorFrame& prev, const VectorFrame& curr,
                         const CoefficientField& c, const BoundaryMap& bc, double t_next,
                         const TimeLoopSpec& spec, const SourcePulse& src,
                         const IncidentWave* incident = nullptr);

struct ForwardResult {
  FieldHistory history;   // empty for TraceOnly, every stride-th level for Strided
  ObservationTrace trace; // always filled
};

/// Zero initial data, N steps. The trace holds all three components on the
/// observation face at every level k = 0..N.
ForwardResult solve_forward(const Grid3& g, const BoundaryMap& bc, const CoefficientField& c,
                            const SourcePulse& src, const TimeLoopSpec& spec);

/// Copies the observation-face samples of one frame into row k of a trace.
void record_trace(const BoundaryMap& bc, const VectorFrame& frame, std::size_t k,
                  ObservationTrace& trace);

}  // namespace emrecon
