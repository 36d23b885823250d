#include "emrecon/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emrecon/error.hpp"

namespace emrecon {

NodalArray threshold_field(const NodalArray& v, double fraction) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "empty field");
  const double cut = fraction * *std::max_element(v.begin(), v.end());
  NodalArray out(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = v[n] > cut ? v[n] : 1.0;
  return out;
}

ThresholdedFields threshold_fields(const NodalArray& eps_n, const NodalArray& mu_l,
                                   const ThresholdRule& rule) {
  return {threshold_field(eps_n, rule.eps_fraction), threshold_field(mu_l, rule.mu_fraction)};
}

double relative_error(const RegionMask& mask, const NodalArray& computed, const NodalArray& exact) {
  if (computed.size() != exact.size() || computed.size() != mask.flags.size())
    throw Error(ErrorCode::ShapeMismatch, "arrays are not congruent");
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < computed.size(); ++n) {
    if (!mask.is_inner(n)) continue;
    num += (exact[n] - computed[n]) * (exact[n] - computed[n]);
    den += computed[n] * computed[n];
  }
  if (den == 0.0) throw Error(ErrorCode::ZeroDenominator, "computed field has zero norm");
  return std::sqrt(num / den);
}

bool LocalizationReport::all_hit() const {
  return std::all_of(inclusions.begin(), inclusions.end(),
                     [](const InclusionMatch& m) { return m.hit; });
}

LocalizationReport localization_report(const Grid3& g, const NodalArray& masked,
                                       const std::vector<Inclusion>& truth, double radius) {
  if (masked.size() != g.size()) throw Error(ErrorCode::ShapeMismatch, "field does not match grid");
  LocalizationReport report;
  std::vector<int> label(g.size(), -1);
  std::vector<std::size_t> stack;

  for (std::size_t seed = 0; seed < g.size(); ++seed) {
    if (masked[seed] <= 1.0 || label[seed] >= 0) continue;
    const int id = static_cast<int>(report.components.size());
    Component comp;
    comp.lo = comp.hi = g.coordinate(seed);
    Point3 sum{};
    label[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const Index3 ijk = g.unravel(p);
      const Point3 x = g.coordinate(ijk);
      ++comp.node_count;
      comp.peak = std::max(comp.peak, masked[p]);
      for (int a = 0; a < 3; ++a) {
        sum[a] += x[a];
        comp.lo[a] = std::min(comp.lo[a], x[a]);
        comp.hi[a] = std::max(comp.hi[a], x[a]);
      }
      for (int a = 0; a < 3; ++a)
        for (int step : {-1, 1}) {
          Index3 nb = ijk;
          nb[a] += step;
          if (nb[a] < 0 || nb[a] >= g.count(a)) continue;
          const std::size_t q = g.index(nb);
          if (masked[q] > 1.0 && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
    }
    for (int a = 0; a < 3; ++a) comp.centroid[a] = sum[a] / static_cast<double>(comp.node_count);
    report.components.push_back(comp);
  }

  for (const Inclusion& inc : truth) {
    InclusionMatch m;
    for (int a = 0; a < 3; ++a) m.true_centroid[a] = 0.5 * (inc.box[a].lo + inc.box[a].hi);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.components.size(); ++i) {
      const Point3& c = report.components[i].centroid;
      const double planar = std::hypot(c[0] - m.true_centroid[0], c[1] - m.true_centroid[1]);
      if (planar < best) {
        best = planar;
        m.component = static_cast<int>(i);
        m.planar_distance = planar;
        m.distance = std::hypot(planar, c[2] - m.true_centroid[2]);
      }
    }
    m.hit = m.component >= 0 && m.planar_distance <= radius;
    report.inclusions.push_back(m);
  }
  return report;
}

}  // namespace emrecon
