#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "emrecon/domain.hpp"

namespace emrecon {

using NodalArray = std::vector<double>;

struct Bounds {
  double lo = 1.0;
  double hi = 1.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

/// Admissible ranges used throughout: 1 <= eps <= 15, 1 <= mu <= 3.
inline constexpr Bounds kEpsBounds{1.0, 15.0};
inline constexpr Bounds kMuBounds{1.0, 3.0};

struct CoefficientField {
  NodalArray eps;
  NodalArray mu;
  Bounds eps_bounds = kEpsBounds;
  Bounds mu_bounds = kMuBounds;

  static CoefficientField uniform(const Grid3& grid, double eps = 1.0, double mu = 1.0);
  std::size_t size() const { return eps.size(); }
};

/// Throws OutOfBounds if a value leaves its range or ValidationError if an
/// OUTER node deviates from 1.
void validate_coefficients(const CoefficientField& c, const RegionMask& mask);

/// Three nodal component arrays (E1, E2, E3) at one time level.
struct VectorFrame {
  std::array<NodalArray, 3> comp;
  int time_index = 0;

  VectorFrame() = default;
  explicit VectorFrame(std::size_t n, int k = 0) : time_index(k) {
    for (auto& c : comp) c.assign(n, 0.0);
  }
  std::size_t size() const { return comp[0].size(); }
  void fill(double v) {
    for (auto& c : comp) std::fill(c.begin(), c.end(), v);
  }
};

struct FieldHistory {
  double tau = 0.0;
  double final_time = 0.0;
  std::vector<VectorFrame> frames;  // k = 0..N

  std::size_t steps() const { return frames.empty() ? 0 : frames.size() - 1; }
};

/// E samples on the observation face: (N+1) x |face| x 3, row-major.
struct ObservationTrace {
  std::size_t steps = 0;      // N
  std::size_t node_count = 0; // |face|
  double tau = 0.0;
  double omega = 0.0;
  double noise_level = 0.0;   // percent
  std::uint64_t seed = 0;
  std::vector<double> samples;

  ObservationTrace() = default;
  ObservationTrace(std::size_t n_steps, std::size_t nodes, double dt)
      : steps(n_steps), node_count(nodes), tau(dt), samples((n_steps + 1) * nodes * 3, 0.0) {}

  std::size_t offset(std::size_t k, std::size_t p, int c) const {
    return (k * node_count + p) * 3 + static_cast<std::size_t>(c);
  }
  double& at(std::size_t k, std::size_t p, int c) { return samples[offset(k, p, c)]; }
  double at(std::size_t k, std::size_t p, int c) const { return samples[offset(k, p, c)]; }

  bool congruent(const ObservationTrace& other) const;
  double max_abs() const;
};

struct Inclusion {
  Extents box{};
  double eps = 1.0;
  double mu = 1.0;
};

/// Background 1 with the listed boxes (nodes inside, inclusive) set to their values.
CoefficientField phantom(const Grid3& grid, const RegionMask& mask,
                         const std::vector<Inclusion>& inclusions);

/// Additive uniform noise: sample + (level/100) * u * max|clean|, u ~ U[-1,1]
/// drawn iid from a 64-bit Mersenne Twister seeded with `seed`.
ObservationTrace add_noise(const ObservationTrace& clean, double level_percent, std::uint64_t seed);

/// Deterministic U[-1,1) stream used by add_noise and the test harnesses.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

}  // namespace emrecon
