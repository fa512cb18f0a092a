#ifndef GAMMAKIT_PROBLEM_HPP
#define GAMMAKIT_PROBLEM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gammakit/field.hpp"
#include "gammakit/local_operator.hpp"
#include "gammakit/projections.hpp"

namespace gammakit {

struct PhysicsMeta {
  std::string tag;
  std::vector<std::string> notes;
};

/// A complete projected constitutive problem: J = L E - s with the
/// differential structure carried by the Fourier multiplier `gamma`.
struct Problem {
  Problem(Grid grid, SupertensorLayout layout, ProjectionSpec gamma, LocalOperator L,
          Field source, PhysicsMeta meta = {}, std::vector<bool> mean_mask = {});

  Grid grid;
  SupertensorLayout layout;
  ProjectionSpec gamma;
  LocalOperator L;
  Field source;
  PhysicsMeta meta;
  /// Components of the constant mean that span the admissible applied field.
  std::vector<bool> mean_mask;

  Problem with_source(Field s) const;
  Problem with_operator(LocalOperator op) const;
};

/// Piecewise-constant description of an N-phase medium: per-point labels in
/// 1..N with per-phase tensors and per-phase source values.
struct PhaseMap {
  PhaseMap(Grid grid, std::vector<std::uint8_t> labels, int phase_count);

  Grid grid;
  std::vector<std::uint8_t> labels;  // 1-based
  int phase_count;

  double volume_fraction(int phase) const;
  LocalOperator assemble_operator(const SupertensorLayout& layout,
                                  const std::vector<Eigen::MatrixXcd>& tensors) const;
  Field assemble_source(const SupertensorLayout& layout,
                        const std::vector<Eigen::VectorXcd>& values) const;
  /// Indicator field of one phase as a scalar 0/1 mask.
  std::vector<double> indicator(int phase) const;

  // Common two-phase test geometries, sampled at grid points.
  static PhaseMap checkerboard(const Grid& grid);
  static PhaseMap disk(const Grid& grid, double radius_fraction);
  static PhaseMap layers(const Grid& grid, int axis, double fraction);
};

}  // namespace gammakit

#endif
