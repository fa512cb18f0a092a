#ifndef GAMMAKIT_PROJECTIONS_HPP
#define GAMMAKIT_PROJECTIONS_HPP

#include <array>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gammakit/layout.hpp"

namespace gammakit {

// ---------------------------------------------------------------------------
// Closed-form catalog, acting on orthonormal component bases throughout.
// Every entry is a Hermitian idempotent for k != 0.
// ---------------------------------------------------------------------------

/// Projection onto gradients: k (x) k / k^2.
Eigen::MatrixXcd gamma_grad(const Eigen::Vector3d& k, int dim);
/// Projection onto divergence-free vectors: I - k (x) k / k^2.
Eigen::MatrixXcd gamma_divfree(const Eigen::Vector3d& k, int dim);
/// Projection onto symmetrized tensor products a (x) k + k (x) a.
Eigen::MatrixXcd gamma_elastic(const Eigen::Vector3d& k, int dim);
/// Joint (full-matrix, vector) projection fixing fields of the form
/// (grad w, w); acts on the first index of the matrix block.  Well defined at
/// k = 0, where it keeps only the vector block.
Eigen::MatrixXcd gamma_z(const Eigen::Vector3d& k, int dim);
/// Cross-product operator: eta(k) a = k x a (three dimensions only).
Eigen::Matrix3d eta_cross(const Eigen::Vector3d& k);

// Projections onto pieces of the full-matrix block (component basis).
Eigen::MatrixXcd lambda_trace(int dim);       // matrices proportional to I
Eigen::MatrixXcd lambda_tracefree(int dim);   // trace-free matrices
Eigen::MatrixXcd lambda_sym_tracefree(int dim);

/// 90-degree rotation in two dimensions; the canonical constant operator
/// annihilated by the gradient projection.
Eigen::Matrix2d rot90();

// ---------------------------------------------------------------------------
// First-order (or general polynomial) matrix symbols D(ik) and the generic
// projection they induce, D [D^dagger D]^{-1} D^dagger with the inverse taken
// on the range of D^dagger.
// ---------------------------------------------------------------------------

class DSymbol {
 public:
  struct Term {
    std::array<int, 3> exponents;  // powers of (i k_x), (i k_y), (i k_z)
    Eigen::MatrixXcd coefficient;  // field components x potential components
  };

  DSymbol(int dim, int field_components, int potential_components, std::vector<Term> terms);

  int dim() const { return dim_; }
  int field_components() const { return field_m_; }
  int potential_components() const { return potential_m_; }
  const std::vector<Term>& terms() const { return terms_; }

  Eigen::MatrixXcd evaluate(const Eigen::Vector3d& k) const;
  Eigen::MatrixXcd evaluate_adjoint(const Eigen::Vector3d& k) const;

  static DSymbol gradient(int dim);
  static DSymbol sym_gradient(int dim);
  /// Divergence-free potentials: curl in 3D, perpendicular gradient in 2D.
  static DSymbol curl(int dim);
  static DSymbol block_diag(const std::vector<DSymbol>& parts);

 private:
  int dim_;
  int field_m_;
  int potential_m_;
  std::vector<Term> terms_;
};

/// D(ik) [F(k)]^+ D(ik)^dagger with eigenvalues of F below 1e-12 * ||F||
/// treated as structural zeros.  Throws SingularSymbolError when F vanishes.
Eigen::MatrixXcd gamma_from_D(const DSymbol& D, const Eigen::Vector3d& k);

// ---------------------------------------------------------------------------
// Composable projection specifications.
// ---------------------------------------------------------------------------

enum class GammaKind { grad, divfree, elastic, zero, z, block, from_d, complement };

std::string gamma_kind_name(GammaKind kind);

/// A declarative description of a Fourier-multiplier projection bound to the
/// layout it acts on.  `evaluate` returns the zero matrix at k = 0: constant
/// fields are handled by the mean projection, never by the multiplier.
class ProjectionSpec {
 public:
  static ProjectionSpec grad(int dim);
  static ProjectionSpec divfree(int dim);
  static ProjectionSpec elastic(int dim);
  static ProjectionSpec zero(const SupertensorLayout& layout);
  static ProjectionSpec z(int dim);
  static ProjectionSpec block(std::vector<ProjectionSpec> children);
  static ProjectionSpec from_d(DSymbol symbol, const SupertensorLayout& layout);
  static ProjectionSpec complement(ProjectionSpec child);

  GammaKind kind() const { return kind_; }
  const SupertensorLayout& layout() const { return layout_; }
  int components() const { return layout_.components(); }
  const std::vector<ProjectionSpec>& children() const { return children_; }
  const DSymbol& symbol() const;

  Eigen::MatrixXcd evaluate(const Eigen::Vector3d& k) const;

  /// Spectral norm of Gamma(k) T Gamma(k) maximized over `samples` random
  /// wavevectors; zero for a null-T operator.
  double null_t_violation(const Eigen::MatrixXcd& T, int samples, unsigned seed,
                          Eigen::Vector3d* worst_k = nullptr) const;

 private:
  ProjectionSpec(GammaKind kind, SupertensorLayout layout);
  GammaKind kind_;
  SupertensorLayout layout_;
  std::vector<ProjectionSpec> children_;
  std::shared_ptr<const DSymbol> symbol_;
};

// ---------------------------------------------------------------------------
// Self-verification.
// ---------------------------------------------------------------------------

struct ProjectionReport {
  std::string name;
  int samples = 0;
  double max_idempotence_defect = 0.0;
  double max_hermitian_defect = 0.0;
  Eigen::Vector3d worst_k = Eigen::Vector3d::Zero();
  int min_rank = 0;
  int max_rank = 0;
  bool pass = false;
};

/// Checks Hermitian symmetry and idempotence of an arbitrary evaluator at
/// random nonzero wavevectors; pass iff both defects stay within 1e-10.
ProjectionReport verify_projection_evaluator(
    const std::string& name, int dim,
    const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& evaluate, int samples,
    unsigned seed);

ProjectionReport verify_projection(const ProjectionSpec& spec, int samples, unsigned seed = 0,
                                   const std::string& name = "projection");

/// Random nonzero wavevector with unit-scale direction and log-uniform
/// magnitude; deterministic in the generator state.
Eigen::Vector3d random_wavevector(int dim, std::mt19937_64& rng);

}  // namespace gammakit

#endif
