#include "gammakit/layout.hpp"

#include <cmath>
#include <functional>

namespace gammakit {

std::string block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::scalar: return "scalar";
    case BlockKind::vector: return "vector";
    case BlockKind::sym_matrix: return "sym-matrix";
    case BlockKind::full_matrix: return "full-matrix";
  }
  return "?";
}

BlockKind block_kind_from_name(const std::string& name) {
  if (name == "scalar") return BlockKind::scalar;
  if (name == "vector") return BlockKind::vector;
  if (name == "sym-matrix") return BlockKind::sym_matrix;
  if (name == "full-matrix") return BlockKind::full_matrix;
  throw ConfigError("unknown block kind: " + name);
}

int block_size(BlockKind kind, int dim) {
  switch (kind) {
    case BlockKind::scalar: return 1;
    case BlockKind::vector: return dim;
    case BlockKind::sym_matrix: return dim * (dim + 1) / 2;
    case BlockKind::full_matrix: return dim * dim;
  }
  return 0;
}

SupertensorLayout::SupertensorLayout(int dim, std::vector<Block> blocks)
    : dim_(dim), blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ShapeError("layout needs at least one block");
  m_ = 0;
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    offsets_.push_back(m_);
    m_ += block_size(b.kind, dim_);
  }
  weights_ = Eigen::VectorXd::Ones(m_);
}

SupertensorLayout SupertensorLayout::sub_layout(std::size_t block) const {
  return SupertensorLayout(dim_, {blocks_.at(block)});
}

SupertensorLayout SupertensorLayout::concatenate(const std::vector<SupertensorLayout>& parts) {
  if (parts.empty()) throw ShapeError("cannot concatenate zero layouts");
  std::vector<Block> blocks;
  for (const auto& p : parts) {
    if (p.dim() != parts.front().dim()) throw ShapeError("layout dimensions differ");
    for (const auto& b : p.blocks()) blocks.push_back(b);
  }
  return SupertensorLayout(parts.front().dim(), std::move(blocks));
}

std::vector<std::string> SupertensorLayout::component_labels() const {
  std::vector<std::string> labels;
  labels.reserve(m_);
  for (const auto& b : blocks_) {
    switch (b.kind) {
      case BlockKind::scalar:
        labels.push_back(b.label);
        break;
      case BlockKind::vector:
        for (int i = 0; i < dim_; ++i) labels.push_back(b.label + "[" + std::to_string(i) + "]");
        break;
      case BlockKind::sym_matrix:
        for (int i = 0; i < dim_; ++i)
          labels.push_back(b.label + "[" + std::to_string(i) + std::to_string(i) + "]");
        for (int i = 0; i < dim_; ++i)
          for (int j = i + 1; j < dim_; ++j)
            labels.push_back(b.label + "[" + std::to_string(i) + std::to_string(j) + "]");
        break;
      case BlockKind::full_matrix:
        for (int j = 0; j < dim_; ++j)
          for (int i = 0; i < dim_; ++i)
            labels.push_back(b.label + "[" + std::to_string(i) + std::to_string(j) + "]");
        break;
    }
  }
  return labels;
}

bool SupertensorLayout::operator==(const SupertensorLayout& other) const {
  if (dim_ != other.dim_ || blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (blocks_[b].kind != other.blocks_[b].kind) return false;
  return true;
}

SupertensorLayout SupertensorLayout::scalar(int dim, std::string label) {
  return SupertensorLayout(dim, {Block{BlockKind::scalar, std::move(label)}});
}
SupertensorLayout SupertensorLayout::vector(int dim, std::string label) {
  return SupertensorLayout(dim, {Block{BlockKind::vector, std::move(label)}});
}
SupertensorLayout SupertensorLayout::sym_matrix(int dim, std::string label) {
  return SupertensorLayout(dim, {Block{BlockKind::sym_matrix, std::move(label)}});
}
SupertensorLayout SupertensorLayout::full_matrix(int dim, std::string label) {
  return SupertensorLayout(dim, {Block{BlockKind::full_matrix, std::move(label)}});
}

Eigen::VectorXcd sym_to_components(const Eigen::MatrixXcd& s) {
  const int d = static_cast<int>(s.rows());
  const double r2 = std::sqrt(2.0);
  Eigen::VectorXcd c(d * (d + 1) / 2);
  int idx = 0;
  for (int i = 0; i < d; ++i) c[idx++] = s(i, i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) c[idx++] = r2 * 0.5 * (s(i, j) + s(j, i));
  return c;
}

Eigen::MatrixXcd components_to_sym(const Eigen::VectorXcd& c, int dim) {
  const double r2 = std::sqrt(2.0);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
  int idx = 0;
  for (int i = 0; i < dim; ++i) s(i, i) = c[idx++];
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      s(i, j) = c[idx] / r2;
      s(j, i) = c[idx] / r2;
      ++idx;
    }
  return s;
}

Eigen::VectorXd sym_to_components_real(const Eigen::MatrixXd& s) {
  return sym_to_components(s.cast<std::complex<double>>()).real();
}

Eigen::VectorXcd full_to_components(const Eigen::MatrixXcd& a) {
  const int d = static_cast<int>(a.rows());
  Eigen::VectorXcd c(d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) c[i + d * j] = a(i, j);
  return c;
}

Eigen::MatrixXcd components_to_full(const Eigen::VectorXcd& c, int dim) {
  Eigen::MatrixXcd a(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) a(i, j) = c[i + dim * j];
  return a;
}

Eigen::MatrixXcd sym_operator_components(
    int dim, const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply) {
  const int m = dim * (dim + 1) / 2;
  Eigen::MatrixXcd rep(m, m);
  for (int col = 0; col < m; ++col) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(m);
    e[col] = 1.0;
    rep.col(col) = sym_to_components(apply(components_to_sym(e, dim)));
  }
  return rep;
}

}  // namespace gammakit
