#ifndef GAMMAKIT_HOMOGENIZE_HPP
#define GAMMAKIT_HOMOGENIZE_HPP

#include "gammakit/solver.hpp"

namespace gammakit {

/// Homogenized response of a periodic cell: mean flux = L_star * mean field
/// + s_star, on the admissible mean subspace of the problem.
struct EffectiveResponse {
  Eigen::MatrixXcd L_star;
  Eigen::VectorXcd s_star;
  std::vector<int> basis;                // component indices of the mean subspace
  std::vector<std::string> basis_labels;
  std::vector<SolveReport> reports;      // one per basis column
  std::vector<bool> column_ok;
  bool all_converged = false;
};

/// Columns of L_star are mean fluxes for unit applied means with the source
/// switched off.  Columns that fail to converge are flagged, not fatal.
EffectiveResponse effective_tensor(const Problem& p, const SolveOptions& opts = {});

/// Mean flux with zero applied mean and the problem's own source.
Eigen::VectorXcd effective_source(const Problem& p, const SolveOptions& opts = {},
                                  SolveReport* report = nullptr);

/// Linear map from per-phase constant source values to the effective source,
/// one column per (phase, component) pair.
Eigen::MatrixXcd response_tensor(const Problem& p, const PhaseMap& phases,
                                 const SolveOptions& opts = {});

/// || (L^dagger)_star - (L_star)^dagger ||, which vanishes for the exact
/// cell problem.
double check_adjoint(const Problem& p, const SolveOptions& opts = {});

/// First-order change of the effective tensor under L -> L + eps L',
/// assembled from the unperturbed fields and the adjoint fields only.
Eigen::MatrixXcd perturb_effective(const Problem& p, const LocalOperator& L_prime,
                                   const SolveOptions& opts = {});

}  // namespace gammakit

#endif
