#ifndef GAMMAKIT_LAYOUT_HPP
#define GAMMAKIT_LAYOUT_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gammakit/errors.hpp"

namespace gammakit {

using Complex = std::complex<double>;

enum class BlockKind { scalar, vector, sym_matrix, full_matrix };

std::string block_kind_name(BlockKind kind);
BlockKind block_kind_from_name(const std::string& name);
int block_size(BlockKind kind, int dim);

struct Block {
  BlockKind kind;
  std::string label;
};

/// Ordered list of per-point value blocks and the inner-product weights of
/// their components.
///
/// Components use orthonormal bases throughout, so all weights are one and
/// the plain component dot product is the supertensor inner product:
///   - vectors store Cartesian components;
///   - symmetric matrices store diagonal entries followed by off-diagonal
///     pairs scaled by sqrt(2), which makes the dot product equal the
///     Frobenius matrix dot product;
///   - full matrices store all entries, first index fastest.
class SupertensorLayout {
 public:
  SupertensorLayout(int dim, std::vector<Block> blocks);

  int dim() const { return dim_; }
  int components() const { return m_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int block_offset(std::size_t b) const { return offsets_[b]; }
  int block_components(std::size_t b) const { return block_size(blocks_[b].kind, dim_); }
  const Eigen::VectorXd& weights() const { return weights_; }

  SupertensorLayout sub_layout(std::size_t block) const;
  static SupertensorLayout concatenate(const std::vector<SupertensorLayout>& parts);

  /// Readable name per component, e.g. "e[0]" or "strain[01]".
  std::vector<std::string> component_labels() const;

  bool operator==(const SupertensorLayout& other) const;
  bool operator!=(const SupertensorLayout& other) const { return !(*this == other); }

  // Convenience single-block layouts.
  static SupertensorLayout scalar(int dim, std::string label = "s");
  static SupertensorLayout vector(int dim, std::string label = "v");
  static SupertensorLayout sym_matrix(int dim, std::string label = "t");
  static SupertensorLayout full_matrix(int dim, std::string label = "m");

 private:
  int dim_;
  std::vector<Block> blocks_;
  std::vector<int> offsets_;
  int m_;
  Eigen::VectorXd weights_;
};

/// Orthonormal (Mandel) components of a symmetric d x d matrix: diagonal
/// entries, then sqrt(2) times the off-diagonal entries in lexicographic
/// (i<j) order.
Eigen::VectorXcd sym_to_components(const Eigen::MatrixXcd& s);
Eigen::MatrixXcd components_to_sym(const Eigen::VectorXcd& c, int dim);
Eigen::VectorXd sym_to_components_real(const Eigen::MatrixXd& s);

/// Components of a full d x d matrix, first index fastest.
Eigen::VectorXcd full_to_components(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd components_to_full(const Eigen::VectorXcd& c, int dim);

/// Representation of a linear map on symmetric matrices in the orthonormal
/// basis; `apply` gives the image of each basis element.
Eigen::MatrixXcd sym_operator_components(
    int dim, const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& apply);

}  // namespace gammakit

#endif
