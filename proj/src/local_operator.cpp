#include "gammakit/local_operator.hpp"

#include <algorithm>
#include <cmath>

namespace gammakit {

LocalOperator::LocalOperator(Grid grid, SupertensorLayout layout, std::vector<Complex> matrices,
                             std::vector<PenaltyTerm> penalties)
    : grid_(std::move(grid)),
      layout_(std::move(layout)),
      finite_(std::move(matrices)),
      penalties_(std::move(penalties)) {
  const std::size_t m = layout_.components();
  if (finite_.size() != grid_.point_count() * m * m)
    throw ShapeError("operator matrix array has the wrong size");
  for (const auto& t : penalties_) {
    if (t.row_block >= layout_.blocks().size() || t.col_block >= layout_.blocks().size())
      throw ShapeError("penalty block index out of range");
    if (t.slot.rows() != layout_.block_components(t.row_block) ||
        t.slot.cols() != layout_.block_components(t.col_block))
      throw ShapeError("penalty slot has the wrong block shape");
  }
  assemble();
}

void LocalOperator::assemble() {
  assembled_ = finite_;
  const int m = layout_.components();
  for (const auto& t : penalties_) {
    const int r0 = layout_.block_offset(t.row_block);
    const int c0 = layout_.block_offset(t.col_block);
    for (std::size_t p = 0; p < grid_.point_count(); ++p) {
      Complex* mat = assembled_.data() + p * m * m;
      for (int j = 0; j < t.slot.cols(); ++j)
        for (int i = 0; i < t.slot.rows(); ++i)
          mat[(r0 + i) + m * (c0 + j)] += t.lambda * t.slot(i, j);
    }
  }
}

LocalOperator LocalOperator::constant(const Grid& grid, const SupertensorLayout& layout,
                                      const Eigen::MatrixXcd& matrix,
                                      std::vector<PenaltyTerm> penalties) {
  const int m = layout.components();
  if (matrix.rows() != m || matrix.cols() != m) throw ShapeError("matrix size mismatch");
  std::vector<Complex> vals(grid.point_count() * m * m);
  for (std::size_t p = 0; p < grid.point_count(); ++p)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vals[p * m * m + i + m * j] = matrix(i, j);
  return LocalOperator(grid, layout, std::move(vals), std::move(penalties));
}

LocalOperator LocalOperator::from_function(
    const Grid& grid, const SupertensorLayout& layout,
    const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& fn,
    std::vector<PenaltyTerm> penalties) {
  const int m = layout.components();
  std::vector<Complex> vals(grid.point_count() * m * m);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::MatrixXcd mat = fn(grid.coordinate(p));
    if (mat.rows() != m || mat.cols() != m) throw ShapeError("sampler returned wrong matrix size");
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vals[p * m * m + i + m * j] = mat(i, j);
  }
  return LocalOperator(grid, layout, std::move(vals), std::move(penalties));
}

LocalOperator LocalOperator::with_penalty(double lambda) const {
  std::vector<PenaltyTerm> terms = penalties_;
  for (auto& t : terms) t.lambda = lambda;
  return LocalOperator(grid_, layout_, finite_, std::move(terms));
}

LocalOperator LocalOperator::adjoint() const {
  const int m = layout_.components();
  std::vector<Complex> vals(assembled_.size());
  for (std::size_t p = 0; p < grid_.point_count(); ++p) {
    const Complex* src = assembled_.data() + p * m * m;
    Complex* dst = vals.data() + p * m * m;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) dst[i + m * j] = std::conj(src[j + m * i]);
  }
  // Penalties are already folded into the adjoint matrices.
  return LocalOperator(grid_, layout_, std::move(vals));
}

LocalOperator LocalOperator::inverse() const {
  const int m = layout_.components();
  std::vector<Complex> vals(assembled_.size());
  for (std::size_t p = 0; p < grid_.point_count(); ++p) {
    Eigen::Map<const Eigen::MatrixXcd> mat(assembled_.data() + p * m * m, m, m);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(mat);
    if (!lu.isInvertible())
      throw SingularOperatorError("local operator is singular at point " + std::to_string(p), p);
    Eigen::MatrixXcd inv = lu.inverse();
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vals[p * m * m + i + m * j] = inv(i, j);
  }
  return LocalOperator(grid_, layout_, std::move(vals));
}

LocalOperator LocalOperator::plus_constant(const Eigen::MatrixXcd& t) const {
  const int m = layout_.components();
  if (t.rows() != m || t.cols() != m) throw ShapeError("shift matrix size mismatch");
  std::vector<Complex> vals = assembled_;
  for (std::size_t p = 0; p < grid_.point_count(); ++p)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vals[p * m * m + i + m * j] += t(i, j);
  return LocalOperator(grid_, layout_, std::move(vals));
}

Eigen::MatrixXcd LocalOperator::mean() const {
  const int m = layout_.components();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      acc(i, j) = pairwise_sum(grid_.point_count(), [&](std::size_t p) {
                    return assembled_[p * m * m + i + m * j];
                  }) /
                  static_cast<double>(grid_.point_count());
    }
  return acc;
}

double LocalOperator::max_norm() const {
  double v = 0.0;
  for (const auto& c : assembled_) v = std::max(v, std::abs(c));
  return v;
}

double LocalOperator::hermitian_defect() const {
  const int m = layout_.components();
  double worst = 0.0;
  for (std::size_t p = 0; p < grid_.point_count(); ++p) {
    const Complex* mat = assembled_.data() + p * m * m;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i <= j; ++i)
        worst = std::max(worst, std::abs(mat[i + m * j] - std::conj(mat[j + m * i])));
  }
  const double scale = max_norm();
  return scale > 0 ? worst / scale : 0.0;
}

Field apply_local(const LocalOperator& L, const Field& f) {
  if (f.space() != Space::real) throw SpaceError("apply_local expects a real-space field");
  if (f.grid() != L.grid() || f.layout() != L.layout())
    throw ShapeError("operator and field shapes differ");
  const int m = L.components();
  std::vector<Complex> out(f.values().size());
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    Eigen::Map<const Eigen::VectorXcd> x(f.values().data() + p * m, m);
    Eigen::Map<Eigen::VectorXcd> y(out.data() + p * m, m);
    y = L.at(p) * x;
  }
  return Field(f.grid(), f.layout(), Space::real, std::move(out));
}

}  // namespace gammakit
