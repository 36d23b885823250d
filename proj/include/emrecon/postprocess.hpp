#pragma once

#include <vector>

#include "emrecon/domain.hpp"
#include "emrecon/fields.hpp"

namespace emrecon {

struct ThresholdRule {
  double eps_fraction = 0.25;
  double mu_fraction = 0.87;
};

struct ThresholdedFields {
  NodalArray eps;
  NodalArray mu;
};

/// Keeps values strictly above fraction * max, sets the rest to 1.
NodalArray threshold_field(const NodalArray& v, double fraction);
ThresholdedFields threshold_fields(const NodalArray& eps_n, const NodalArray& mu_l,
                                   const ThresholdRule& rule = {});

/// |exact - computed| / |computed| over INNER nodes. Throws ShapeMismatch or
/// ZeroDenominator.
double relative_error(const RegionMask& mask, const NodalArray& computed, const NodalArray& exact);

struct Component {
  std::size_t node_count = 0;
  Point3 centroid{};
  Point3 lo{};
  Point3 hi{};
  double peak = 0.0;
};

struct InclusionMatch {
  Point3 true_centroid{};
  int component = -1;          // nearest component in the (x1, x2) plane, -1 if none
  double distance = 0.0;       // 3D centroid distance
  double planar_distance = 0.0;
  bool hit = false;            // planar_distance <= radius
};

struct LocalizationReport {
  std::vector<Component> components;
  std::vector<InclusionMatch> inclusions;

  bool all_hit() const;
};

/// 6-connected components of nodes with value > 1, matched to the inclusion
/// box centers; an inclusion counts as hit when a component centroid lies
/// within `radius` of its center in the (x1, x2) plane.
LocalizationReport localization_report(const Grid3& g, const NodalArray& masked,
                                       const std::vector<Inclusion>& truth, double radius);

}  // namespace emrecon
