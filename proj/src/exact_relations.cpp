#include "gammakit/exact_relations.hpp"

#include <cmath>

namespace gammakit {

namespace {
Complex frobenius(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a.adjoint() * b).trace();
}
}  // namespace

Subspace::Subspace(const std::vector<Eigen::MatrixXcd>& generators) {
  if (generators.empty()) throw ShapeError("subspace needs at least one generator");
  for (const auto& g : generators) {
    if (g.rows() != generators.front().rows() || g.cols() != generators.front().cols())
      throw ShapeError("subspace generators have mixed shapes");
    Eigen::MatrixXcd r = g;
    for (const auto& b : basis_) r -= frobenius(b, r) * b;
    // One re-orthogonalization pass keeps the basis orthonormal to round-off.
    for (const auto& b : basis_) r -= frobenius(b, r) * b;
    const double n = std::sqrt(std::abs(frobenius(r, r).real()));
    if (n <= 1e-12 * std::max(1.0, g.norm()))
      throw ShapeError("subspace generators are linearly dependent");
    basis_.push_back(r / n);
  }
}

Eigen::MatrixXcd Subspace::project(const Eigen::MatrixXcd& m) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  for (const auto& b : basis_) out += frobenius(b, m) * b;
  return out;
}

double Subspace::distance(const Eigen::MatrixXcd& m) const { return (m - project(m)).norm(); }

Eigen::MatrixXcd gamma_reference(const ProjectionSpec& gamma, const Eigen::MatrixXcd& L0,
                                 const Eigen::Vector3d& k) {
  const int m = gamma.components();
  if (L0.rows() != m || L0.cols() != m) throw ShapeError("reference medium size mismatch");
  Eigen::MatrixXcd g = gamma.evaluate(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (g + g.adjoint()));
  int rank = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (eig.eigenvalues()[i] > 0.5) ++rank;
  if (rank == 0) return Eigen::MatrixXcd::Zero(m, m);
  Eigen::MatrixXcd q = eig.eigenvectors().rightCols(rank);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(q.adjoint() * L0 * q);
  if (!lu.isInvertible())
    throw SingularSymbolError("reference operator is singular on the projected space", k[0],
                              k[1], k[2]);
  return q * lu.inverse() * q.adjoint();
}

Eigen::MatrixXcd w_transform(const Eigen::MatrixXcd& L, const Eigen::MatrixXcd& L0,
                             const Eigen::MatrixXcd& gamma_k0) {
  Eigen::MatrixXcd delta = L - L0;
  Eigen::MatrixXcd resolvent =
      Eigen::MatrixXcd::Identity(L.rows(), L.cols()) + gamma_k0 * delta;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(resolvent);
  if (!lu.isInvertible())
    throw SingularOperatorError("w-transform resolvent is singular", 0);
  return delta * lu.inverse();
}

Eigen::MatrixXcd inverse_w_transform(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& L0,
                                     const Eigen::MatrixXcd& gamma_k0) {
  Eigen::MatrixXcd factor = Eigen::MatrixXcd::Identity(K.rows(), K.cols()) - K * gamma_k0;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(factor);
  if (!lu.isInvertible())
    throw SingularOperatorError("inverse w-transform resolvent is singular", 0);
  return L0 + lu.inverse() * K;
}

namespace {
ClosureReport closure_pass(const Subspace& K, const ProjectionSpec& gamma,
                           const Eigen::MatrixXcd& L0, int samples, unsigned seed) {
  ClosureReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Eigen::Vector3d k = random_wavevector(gamma.layout().dim(), rng);
    Eigen::MatrixXcd g = gamma_reference(gamma, L0, k);
    for (int i = 0; i < K.dimension(); ++i)
      for (int j = 0; j < K.dimension(); ++j) {
        const double dist = K.distance(K.basis()[i] * g * K.basis()[j]);
        if (dist > report.max_distance) {
          report.max_distance = dist;
          report.worst = ClosureWitness{k, i, j, dist};
        }
      }
  }
  report.pass = report.max_distance <= 1e-10;
  return report;
}
}  // namespace

ClosureReport check_closure(const Subspace& K, const ProjectionSpec& gamma,
                            const Eigen::MatrixXcd& L0, int samples, unsigned seed) {
  if (samples < 1) throw ShapeError("closure check needs at least one sample");
  ClosureReport report = closure_pass(K, gamma, L0, samples, seed);
  if (report.pass) {
    // A pass is only reported after holding up at fresh wavevectors.
    ClosureReport recheck = closure_pass(K, gamma, L0, 10, seed ^ 0x9e3779b9u);
    report.reverified = recheck.pass;
    if (!recheck.pass) {
      report.pass = false;
      report.max_distance = recheck.max_distance;
      report.worst = recheck.worst;
    }
  }
  return report;
}

double levin_alpha(double kappa1, double kappa2, double alpha1, double alpha2,
                   double kappa_star) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !(kappa_star > 0.0))
    throw ConstraintError("bulk moduli must be positive");
  if (kappa1 == kappa2)
    throw ConstraintError("equal phase bulk moduli leave the relation indeterminate");
  const double inv_diff = 1.0 / kappa1 - 1.0 / kappa2;
  return (alpha1 * (1.0 / kappa_star - 1.0 / kappa2) -
          alpha2 * (1.0 / kappa_star - 1.0 / kappa1)) /
         inv_diff;
}

}  // namespace gammakit
