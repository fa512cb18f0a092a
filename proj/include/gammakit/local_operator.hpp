#ifndef GAMMAKIT_LOCAL_OPERATOR_HPP
#define GAMMAKIT_LOCAL_OPERATOR_HPP

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gammakit/field.hpp"

namespace gammakit {

/// A penalty slot: a large finite multiple of a fixed matrix acting between
/// two layout blocks, standing in for an unbounded modulus.
struct PenaltyTerm {
  std::size_t row_block;
  std::size_t col_block;
  Eigen::MatrixXcd slot;  // block-sized action being penalized
  double lambda;
};

/// Pointwise m x m operator L(x).  The working matrices include any penalty
/// contributions; the finite part and the penalty terms are kept separately
/// so the same operator can be re-assembled at a different penalty strength.
class LocalOperator {
 public:
  LocalOperator(Grid grid, SupertensorLayout layout, std::vector<Complex> matrices,
                std::vector<PenaltyTerm> penalties = {});

  static LocalOperator constant(const Grid& grid, const SupertensorLayout& layout,
                                const Eigen::MatrixXcd& matrix,
                                std::vector<PenaltyTerm> penalties = {});
  static LocalOperator from_function(
      const Grid& grid, const SupertensorLayout& layout,
      const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& fn,
      std::vector<PenaltyTerm> penalties = {});

  const Grid& grid() const { return grid_; }
  const SupertensorLayout& layout() const { return layout_; }
  int components() const { return layout_.components(); }
  const std::vector<PenaltyTerm>& penalties() const { return penalties_; }
  bool has_penalties() const { return !penalties_.empty(); }

  Eigen::Map<const Eigen::MatrixXcd> at(std::size_t point) const {
    const int m = layout_.components();
    return {assembled_.data() + point * m * m, m, m};
  }

  /// Same operator with every penalty strength replaced by `lambda`.
  LocalOperator with_penalty(double lambda) const;

  LocalOperator adjoint() const;
  /// Pointwise inverse; throws SingularOperatorError naming the point.
  LocalOperator inverse() const;
  LocalOperator plus_constant(const Eigen::MatrixXcd& t) const;
  Eigen::MatrixXcd mean() const;

  double max_norm() const;
  /// Largest pointwise deviation from self-adjointness, relative to max_norm.
  double hermitian_defect() const;

 private:
  Grid grid_;
  SupertensorLayout layout_;
  std::vector<Complex> finite_;     // column-major m x m per point
  std::vector<Complex> assembled_;  // finite + sum of lambda * embedded slots
  std::vector<PenaltyTerm> penalties_;

  void assemble();
};

/// Pointwise matrix-vector product J(x) = L(x) f(x).  Requires a real-space
/// field; with no penalties this is exactly the stored matrix action.
Field apply_local(const LocalOperator& L, const Field& f);

}  // namespace gammakit

#endif
