#ifndef GAMMAKIT_EXACT_RELATIONS_HPP
#define GAMMAKIT_EXACT_RELATIONS_HPP

#include "gammakit/projections.hpp"

namespace gammakit {

/// Subspace of the supertensor space, held as a Frobenius-orthonormal basis.
class Subspace {
 public:
  explicit Subspace(const std::vector<Eigen::MatrixXcd>& generators);

  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<Eigen::MatrixXcd>& basis() const { return basis_; }

  Eigen::MatrixXcd project(const Eigen::MatrixXcd& m) const;
  double distance(const Eigen::MatrixXcd& m) const;

 private:
  std::vector<Eigen::MatrixXcd> basis_;
};

/// Reference operator gamma(k) = Gamma [Gamma L0 Gamma]^{-1} Gamma with the
/// inverse restricted to the range of the projection.
Eigen::MatrixXcd gamma_reference(const ProjectionSpec& gamma, const Eigen::MatrixXcd& L0,
                                 const Eigen::Vector3d& k);

/// K = (L - L0) [I + gamma(k0) (L - L0)]^{-1} and its inverse.
Eigen::MatrixXcd w_transform(const Eigen::MatrixXcd& L, const Eigen::MatrixXcd& L0,
                             const Eigen::MatrixXcd& gamma_k0);
Eigen::MatrixXcd inverse_w_transform(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& L0,
                                     const Eigen::MatrixXcd& gamma_k0);

struct ClosureWitness {
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  int basis_i = 0;
  int basis_j = 0;
  double distance = 0.0;
};

struct ClosureReport {
  bool pass = false;
  int samples = 0;
  double max_distance = 0.0;
  ClosureWitness worst;
  bool reverified = false;
};

/// Algebraic closure test K1 gamma(k) K2 within the span, sampled at random
/// wavevectors; a pass is re-verified at ten fresh samples.
ClosureReport check_closure(const Subspace& K, const ProjectionSpec& gamma,
                            const Eigen::MatrixXcd& L0, int samples, unsigned seed = 0);

/// Microstructure-independent effective expansion coefficient of a two-phase
/// composite with isotropic phases, from the effective bulk modulus.
double levin_alpha(double kappa1, double kappa2, double alpha1, double alpha2,
                   double kappa_star);

}  // namespace gammakit

#endif
