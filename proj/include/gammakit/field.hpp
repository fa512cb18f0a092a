#ifndef GAMMAKIT_FIELD_HPP
#define GAMMAKIT_FIELD_HPP

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gammakit/grid.hpp"
#include "gammakit/layout.hpp"

namespace gammakit {


enum class Space { real, fourier };

/// Complex supertensor samples on every grid point (real space) or every
/// lattice frequency (fourier space).  Storage is component index fastest,
/// then axis 0 fastest, matching the on-disk container.  Immutable from the
/// outside; all operations return new fields.
class Field {
 public:
  Field(Grid grid, SupertensorLayout layout, Space space, std::vector<Complex> values);

  static Field zeros(const Grid& grid, const SupertensorLayout& layout, Space space);
  static Field constant(const Grid& grid, const SupertensorLayout& layout,
                        const Eigen::VectorXcd& value);
  static Field from_function(const Grid& grid, const SupertensorLayout& layout,
                             const std::function<Eigen::VectorXcd(const Eigen::Vector3d&)>& fn);

  const Grid& grid() const { return grid_; }
  const SupertensorLayout& layout() const { return layout_; }
  Space space() const { return space_; }
  int components() const { return layout_.components(); }
  std::size_t point_count() const { return grid_.point_count(); }

  const std::vector<Complex>& values() const { return values_; }
  Complex value(std::size_t point, int component) const {
    return values_[point * layout_.components() + component];
  }
  Eigen::Map<const Eigen::VectorXcd> at(std::size_t point) const {
    return {values_.data() + point * layout_.components(),
            static_cast<Eigen::Index>(layout_.components())};
  }

  Field with_values(std::vector<Complex> values) const;

  // Arithmetic (same grid/layout/space).
  Field operator+(const Field& other) const;
  Field operator-(const Field& other) const;
  Field scaled(Complex factor) const;

  double max_abs() const;

 private:
  Grid grid_;
  SupertensorLayout layout_;
  Space space_;
  std::vector<Complex> values_;
};

/// Deterministic pairwise-tree sum; the result is independent of how callers
/// parallelize around it.
Complex pairwise_sum(std::size_t count, const std::function<Complex(std::size_t)>& term);

/// Cell-averaged supertensor inner product, conjugate-linear in the first
/// argument and Parseval-consistent between the two spaces.
Complex inner_product(const Field& a, const Field& b);
double norm(const Field& f);

/// Mean value = the k=0 Fourier coefficient, in either space.
Eigen::VectorXcd average(const Field& f);

/// Discrete Fourier transforms.  Forward divides by the point count, so the
/// k=0 coefficient is the cell mean; inverse is its exact inverse.
Field fft_forward(const Field& f);
Field fft_inverse(const Field& f);

// Block slicing utilities.
Field extract_block(const Field& f, std::size_t block);
Field replace_block(const Field& f, std::size_t block, const Field& part);

/// Spectral divergence of a single-vector-block field (acts on the first and
/// only block); returns a scalar field in the same space as the input allows:
/// input may be in either space, output is in fourier space.
Field spectral_divergence(const Field& v);

/// Spectral divergence on the first index of a full-matrix block field,
/// returning a vector field in fourier space.
Field spectral_divergence_matrix(const Field& m);

}  // namespace gammakit

#endif
