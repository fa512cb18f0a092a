#include "gammakit/grid.hpp"

#include <cmath>
#include <numbers>

namespace gammakit {

Grid::Grid(int dim, std::array<int, 3> samples, std::array<double, 3> lengths)
    : dim_(dim), samples_(samples), lengths_(lengths) {
  if (dim != 2 && dim != 3) throw UnsupportedDimensionError("grid dimension must be 2 or 3");
  points_ = 1;
  for (int a = 0; a < dim_; ++a) {
    if (samples_[a] < 2 || samples_[a] % 2 != 0)
      throw ShapeError("sample counts must be even and >= 2");
    if (!(lengths_[a] > 0.0)) throw ShapeError("cell lengths must be positive");
    points_ *= static_cast<std::size_t>(samples_[a]);
  }
  for (int a = dim_; a < 3; ++a) {
    samples_[a] = 1;
    lengths_[a] = 1.0;
  }
}

Grid Grid::square(int dim, int n, double length) {
  return Grid(dim, {n, n, n}, {length, length, length});
}

std::size_t Grid::flat_index(std::array<int, 3> idx) const {
  std::size_t flat = 0;
  for (int a = dim_ - 1; a >= 0; --a) flat = flat * samples_[a] + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<int>(flat % samples_[a]);
    flat /= samples_[a];
  }
  return idx;
}

Eigen::Vector3d Grid::coordinate(std::size_t flat) const {
  auto idx = unflatten(flat);
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int a = 0; a < dim_; ++a) x[a] = lengths_[a] * idx[a] / samples_[a];
  return x;
}

Eigen::Vector3d Grid::centered_coordinate(std::size_t flat) const {
  Eigen::Vector3d x = coordinate(flat);
  for (int a = 0; a < dim_; ++a) x[a] -= 0.5 * lengths_[a];
  return x;
}

int Grid::wrap(int axis, int index) const {
  const int n = samples_[axis];
  return index <= n / 2 ? index : index - n;
}

Eigen::Vector3d Grid::wavevector(std::size_t flat) const {
  auto idx = unflatten(flat);
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  for (int a = 0; a < dim_; ++a)
    k[a] = 2.0 * std::numbers::pi * wrap(a, idx[a]) / lengths_[a];
  return k;
}

bool Grid::operator==(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (samples_[a] != other.samples_[a] || lengths_[a] != other.lengths_[a]) return false;
  return true;
}

}  // namespace gammakit
