#ifndef GAMMAKIT_GRID_HPP
#define GAMMAKIT_GRID_HPP

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gammakit/errors.hpp"

namespace gammakit {

/// Periodic rectangular cell with a uniform collocation grid.
///
/// Samples along each axis must be even so the Nyquist index has an
/// unambiguous convention: it is assigned its positive frequency.  The
/// discrete reciprocal lattice carries k_a = 2*pi*wrap(t)/length_a with
/// wrap(t) in (-n/2, n/2].
class Grid {
 public:
  Grid(int dim, std::array<int, 3> samples, std::array<double, 3> lengths);

  static Grid square(int dim, int n, double length = 1.0);

  int dim() const { return dim_; }
  int samples(int axis) const { return samples_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  std::size_t point_count() const { return points_; }

  /// Flat index with axis 0 fastest.
  std::size_t flat_index(std::array<int, 3> idx) const;
  std::array<int, 3> unflatten(std::size_t flat) const;

  /// Real-space coordinate of a grid point, in [0, length).
  Eigen::Vector3d coordinate(std::size_t flat) const;
  /// Coordinate shifted so the cell center is at the origin.
  Eigen::Vector3d centered_coordinate(std::size_t flat) const;

  /// Signed integer frequency for index t on an axis (Nyquist -> +n/2).
  int wrap(int axis, int index) const;
  /// Angular wavevector of the lattice frequency with flat index `flat`.
  Eigen::Vector3d wavevector(std::size_t flat) const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_;
  std::array<int, 3> samples_;
  std::array<double, 3> lengths_;
  std::size_t points_;
};

}  // namespace gammakit

#endif
