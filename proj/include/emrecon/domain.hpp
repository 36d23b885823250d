#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace emrecon {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
};

using Extents = std::array<Interval, 3>;
using Index3 = std::array<int, 3>;
using Point3 = std::array<double, 3>;

/// Uniform node-centered grid. Node (i,j,k) sits at lo + (i,j,k)*h and the
/// linear index runs fastest along axis 2.
class Grid3 {
 public:
  Grid3() = default;
  Grid3(const Extents& extents, double h, const Index3& counts);

  const Extents& extents() const { return extents_; }
  double spacing() const { return h_; }
  const Index3& counts() const { return counts_; }
  int count(int axis) const { return counts_[axis]; }
  std::size_t size() const { return size_; }

  /// Linear offset between neighbours along `axis`.
  std::ptrdiff_t stride(int axis) const { return strides_[axis]; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>((static_cast<std::ptrdiff_t>(i) * counts_[1] + j) *
                                        counts_[2] + k);
  }
  std::size_t index(const Index3& ijk) const { return index(ijk[0], ijk[1], ijk[2]); }
  Index3 unravel(std::size_t n) const;

  Point3 coordinate(const Index3& ijk) const;
  Point3 coordinate(std::size_t n) const { return coordinate(unravel(n)); }

  /// Nearest node index for a coordinate on an axis (no range check).
  int nearest(int axis, double x) const;

  bool on_boundary(const Index3& ijk) const;

  bool operator==(const Grid3& other) const;
  bool operator!=(const Grid3& other) const { return !(*this == other); }

 private:
  Extents extents_{};
  double h_ = 0.0;
  Index3 counts_{};
  std::array<std::ptrdiff_t, 3> strides_{};
  std::size_t size_ = 0;
};

Grid3 build_grid(const Extents& extents, double h);

enum class Region : std::uint8_t { Outer = 0, Inner = 1 };

/// Node flags for the inner (unknown coefficient) box and the outer collar.
struct RegionMask {
  Extents inner_extents{};
  Index3 inner_lo{};
  Index3 inner_hi{};  // inclusive
  std::vector<Region> flags;

  bool is_inner(std::size_t n) const { return flags[n] == Region::Inner; }
  std::size_t inner_count() const;
  /// Linear indices of every INNER node, in storage order.
  std::vector<std::size_t> inner_nodes() const;
};

RegionMask build_decomposition(const Grid3& grid, const Extents& inner_extents);

enum class BoundaryClass : std::uint8_t { None = 0, Observation = 1, Opposite = 2, Lateral = 3 };

/// Boundary taxonomy: Observation is the max face on `observation_axis`
/// (illumination + data), Opposite its min face, Lateral the rest. Edge and
/// corner nodes are always Lateral.
struct BoundaryMap {
  int observation_axis = 2;
  std::vector<BoundaryClass> classes;
  std::vector<std::size_t> observation;  // storage order
  std::vector<std::size_t> opposite;
  std::vector<std::size_t> lateral;

  std::size_t boundary_count() const {
    return observation.size() + opposite.size() + lateral.size();
  }
};

BoundaryMap classify_boundary(const Grid3& grid, int observation_axis);

}  // namespace emrecon
