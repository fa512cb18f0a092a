#ifndef GAMMAKIT_SOLVER_HPP
#define GAMMAKIT_SOLVER_HPP

#include <optional>
#include <string>

#include "gammakit/problem.hpp"

namespace gammakit {

enum class SolveMethod { automatic, hermitian_cg, general_krylov };

struct SolveOptions {
  double tolerance = 1e-10;   // relative residual target
  int max_iterations = 0;     // 0 picks 10 * m * max axis samples
  SolveMethod method = SolveMethod::automatic;
  /// Constant reference medium for the Fourier preconditioner; defaults to
  /// the mean of L.
  std::optional<Eigen::MatrixXcd> reference_medium;
  bool precondition = true;
  /// Worker cap for concurrent basis-column solves.
  int threads = 1;
  /// Track the quadratic energy per iteration on the Hermitian path.
  bool record_energy = false;
};

struct ResidualNorms {
  double constitutive = 0.0;  // || J - (L E - s) ||
  double gamma2_E = 0.0;      // fluctuating E outside the admissible space
  double gamma1_J = 0.0;      // fluctuating J inside the admissible space
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  std::string method_used;
  bool fallback = false;            // indefiniteness detected, switched method
  bool non_hermitian_path = false;
  bool penalty_active = false;
  double rhs_norm = 0.0;
  double krylov_residual = 0.0;     // ||A x - b|| / ||b||, recomputed from scratch
  ResidualNorms residual;
  double wall_time_s = 0.0;
  std::vector<double> energy_history;
};

struct SolveResult {
  Field E;
  Field J;
  SolveReport report;
};

/// One application of the projected operator: gamma fft(L ifft(e)), for a
/// fourier-space field e (projected onto range gamma internally).
Field apply_projected(const Problem& p, const Field& e);

/// Whole-cell solve with zero mean field: E = (gamma L gamma)^{-1} gamma s.
SolveResult solve_infinite(const Problem& p, const SolveOptions& opts = {});

/// Periodic cell problem with applied mean E0: E = E0 + fluctuation, the
/// fluctuating flux annihilated by gamma.  average(J) is the homogenized flux.
SolveResult solve_cell(const Problem& p, const Eigen::VectorXcd& E0,
                       const SolveOptions& opts = {});

/// Independent residual decomposition for any candidate field pair.
ResidualNorms residual(const Problem& p, const Field& E, const Field& J);

}  // namespace gammakit

#endif
