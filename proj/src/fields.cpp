#include "emrecon/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emrecon/error.hpp"

namespace emrecon {

CoefficientField CoefficientField::uniform(const Grid3& grid, double eps, double mu) {
  CoefficientField c;
  c.eps.assign(grid.size(), eps);
  c.mu.assign(grid.size(), mu);
  return c;
}

void validate_coefficients(const CoefficientField& c, const RegionMask& mask) {
  if (c.eps.size() != mask.flags.size() || c.mu.size() != mask.flags.size())
    throw Error(ErrorCode::ShapeMismatch, "coefficient arrays do not match the grid");
  for (std::size_t n = 0; n < c.eps.size(); ++n) {
    if (!c.eps_bounds.contains(c.eps[n]) || !c.mu_bounds.contains(c.mu[n])) {
      std::ostringstream msg;
      msg << "coefficient out of admissible range at node " << n << " (eps=" << c.eps[n]
          << ", mu=" << c.mu[n] << ")";
      throw Error(ErrorCode::OutOfBounds, msg.str());
    }
    if (!mask.is_inner(n) && (c.eps[n] != 1.0 || c.mu[n] != 1.0))
      throw Error(ErrorCode::ValidationError,
                  "coefficients must equal 1 outside the inner region (node " +
                      std::to_string(n) + ")");
  }
}

bool ObservationTrace::congruent(const ObservationTrace& other) const {
  return steps == other.steps && node_count == other.node_count &&
         std::abs(tau - other.tau) <= 1e-12 * std::max(tau, other.tau) &&
         samples.size() == other.samples.size();
}

double ObservationTrace::max_abs() const {
  double m = 0.0;
  for (double v : samples) m = std::max(m, std::abs(v));
  return m;
}

CoefficientField phantom(const Grid3& grid, const RegionMask& mask,
                         const std::vector<Inclusion>& inclusions) {
  CoefficientField c = CoefficientField::uniform(grid);
  const double tol = 1e-9 * grid.spacing();
  for (const Inclusion& inc : inclusions) {
    if (!c.eps_bounds.contains(inc.eps) || !c.mu_bounds.contains(inc.mu)) {
      std::ostringstream msg;
      msg << "inclusion values eps=" << inc.eps << ", mu=" << inc.mu << " are not admissible";
      throw Error(ErrorCode::OutOfBounds, msg.str());
    }
    Index3 lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      const Interval box = inc.box[a];
      const Interval inner = mask.inner_extents[a];
      if (box.lo < inner.lo - tol || box.hi > inner.hi + tol || box.hi < box.lo)
        throw Error(ErrorCode::OutsideInner, "inclusion box leaves the inner region");
      lo[a] = static_cast<int>(std::ceil((box.lo - grid.extents()[a].lo - tol) / grid.spacing()));
      hi[a] = static_cast<int>(std::floor((box.hi - grid.extents()[a].lo + tol) / grid.spacing()));
    }
    for (int i = lo[0]; i <= hi[0]; ++i)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int k = lo[2]; k <= hi[2]; ++k) {
          const std::size_t n = grid.index(i, j, k);
          c.eps[n] = inc.eps;
          c.mu[n] = inc.mu;
        }
  }
  return c;
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() {
  // 53 random mantissa bits mapped to [-1, 1).
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

ObservationTrace add_noise(const ObservationTrace& clean, double level_percent, std::uint64_t seed) {
  if (!(level_percent >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "noise level must be non-negative");
  ObservationTrace noisy = clean;
  noisy.noise_level = level_percent;
  noisy.seed = seed;
  if (level_percent == 0.0) return noisy;
  const double scale = level_percent / 100.0 * clean.max_abs();
  UniformStream u(seed);
  for (double& v : noisy.samples) v += scale * u.next();
  return noisy;
}

}  // namespace emrecon
