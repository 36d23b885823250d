#include "emrecon/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emrecon/error.hpp"

namespace emrecon {

namespace {

constexpr double kConformTol = 1e-9;

// Number of h-steps spanning `length`, or -1 if not an integer multiple.
long conforming_steps(double length, double h) {
  const double ratio = length / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > kConformTol * std::max(1.0, std::abs(ratio))) return -1;
  return static_cast<long>(rounded);
}

const char* axis_name(int a) {
  static const char* names[] = {"x1", "x2", "x3"};
  return names[a];
}

}  // namespace

Grid3::Grid3(const Extents& extents, double h, const Index3& counts)
    : extents_(extents), h_(h), counts_(counts) {
  strides_ = {static_cast<std::ptrdiff_t>(counts[1]) * counts[2], counts[2], 1};
  size_ = static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
}

Index3 Grid3::unravel(std::size_t n) const {
  const auto k = static_cast<int>(n % counts_[2]);
  n /= counts_[2];
  const auto j = static_cast<int>(n % counts_[1]);
  const auto i = static_cast<int>(n / counts_[1]);
  return {i, j, k};
}

Point3 Grid3::coordinate(const Index3& ijk) const {
  return {extents_[0].lo + ijk[0] * h_, extents_[1].lo + ijk[1] * h_,
          extents_[2].lo + ijk[2] * h_};
}

int Grid3::nearest(int axis, double x) const {
  return static_cast<int>(std::lround((x - extents_[axis].lo) / h_));
}

bool Grid3::on_boundary(const Index3& ijk) const {
  for (int a = 0; a < 3; ++a)
    if (ijk[a] == 0 || ijk[a] == counts_[a] - 1) return true;
  return false;
}

bool Grid3::operator==(const Grid3& other) const {
  if (counts_ != other.counts_ || h_ != other.h_) return false;
  for (int a = 0; a < 3; ++a)
    if (extents_[a].lo != other.extents_[a].lo || extents_[a].hi != other.extents_[a].hi)
      return false;
  return true;
}

Grid3 build_grid(const Extents& extents, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  Index3 counts{};
  for (int a = 0; a < 3; ++a) {
    const double len = extents[a].length();
    if (!(len > 0.0))
      throw Error(ErrorCode::InvalidArgument, std::string("empty extent on ") + axis_name(a));
    const long steps = conforming_steps(len, h);
    if (steps < 0) {
      std::ostringstream msg;
      msg << "extent on " << axis_name(a) << " (length " << len << ") is not a multiple of h=" << h;
      throw Error(ErrorCode::NonConformingSpacing, msg.str());
    }
    if (steps < 2)
      throw Error(ErrorCode::DegenerateAxis,
                  std::string("axis ") + axis_name(a) + " needs at least 3 nodes");
    counts[a] = static_cast<int>(steps + 1);
  }
  return Grid3(extents, h, counts);
}

std::size_t RegionMask::inner_count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), Region::Inner));
}

std::vector<std::size_t> RegionMask::inner_nodes() const {
  std::vector<std::size_t> nodes;
  nodes.reserve(inner_count());
  for (std::size_t n = 0; n < flags.size(); ++n)
    if (flags[n] == Region::Inner) nodes.push_back(n);
  return nodes;
}

RegionMask build_decomposition(const Grid3& grid, const Extents& inner_extents) {
  RegionMask mask;
  mask.inner_extents = inner_extents;
  const double h = grid.spacing();
  for (int a = 0; a < 3; ++a) {
    const Interval outer = grid.extents()[a];
    const Interval inner = inner_extents[a];
    if (inner.hi < inner.lo)
      throw Error(ErrorCode::InvalidArgument, std::string("inverted inner interval on ") + axis_name(a));
    const long lo = conforming_steps(inner.lo - outer.lo, h);
    const long hi = conforming_steps(inner.hi - outer.lo, h);
    if (lo < 0 || hi < 0)
      throw Error(ErrorCode::NonConformingSpacing,
                  std::string("inner interval on ") + axis_name(a) + " is not on the grid");
    if (lo <= 0 || hi >= grid.count(a) - 1)
      throw Error(ErrorCode::InnerNotContained,
                  std::string("inner interval on ") + axis_name(a) + " touches the outer boundary");
    mask.inner_lo[a] = static_cast<int>(lo);
    mask.inner_hi[a] = static_cast<int>(hi);
  }
  mask.flags.assign(grid.size(), Region::Outer);
  for (int i = mask.inner_lo[0]; i <= mask.inner_hi[0]; ++i)
    for (int j = mask.inner_lo[1]; j <= mask.inner_hi[1]; ++j)
      for (int k = mask.inner_lo[2]; k <= mask.inner_hi[2]; ++k)
        mask.flags[grid.index(i, j, k)] = Region::Inner;
  return mask;
}

BoundaryMap classify_boundary(const Grid3& grid, int observation_axis) {
  if (observation_axis < 0 || observation_axis > 2)
    throw Error(ErrorCode::InvalidArgument, "observation axis must be 0, 1 or 2");
  BoundaryMap map;
  map.observation_axis = observation_axis;
  map.classes.assign(grid.size(), BoundaryClass::None);
  const Index3& n = grid.counts();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Index3 ijk = grid.unravel(idx);
    int faces = 0;
    for (int a = 0; a < 3; ++a)
      if (ijk[a] == 0 || ijk[a] == n[a] - 1) ++faces;
    if (faces == 0) continue;
    BoundaryClass cls = BoundaryClass::Lateral;
    if (faces == 1) {
      const int c = ijk[observation_axis];
      if (c == n[observation_axis] - 1)
        cls = BoundaryClass::Observation;
      else if (c == 0)
        cls = BoundaryClass::Opposite;
    }
    map.classes[idx] = cls;
    switch (cls) {
      case BoundaryClass::Observation: map.observation.push_back(idx); break;
      case BoundaryClass::Opposite: map.opposite.push_back(idx); break;
      default: map.lateral.push_back(idx); break;
    }
  }
  return map;
}

}  // namespace emrecon
