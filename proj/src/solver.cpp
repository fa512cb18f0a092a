#include "gammakit/solver.hpp"

#include <chrono>
#include <cmath>

namespace gammakit {

namespace {

using Vec = std::vector<Complex>;

/// Per-frequency m x m multiplier table stored flat.
struct MultiplierTable {
  std::size_t points;
  int m;
  Vec data;

  Eigen::Map<const Eigen::MatrixXcd> at(std::size_t p) const {
    return {data.data() + p * m * m, m, m};
  }
};

MultiplierTable build_gamma_table(const Grid& grid, const ProjectionSpec& gamma) {
  const int m = gamma.components();
  MultiplierTable t{grid.point_count(), m, Vec(grid.point_count() * m * m)};
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::MatrixXcd g = gamma.evaluate(grid.wavevector(p));
    Eigen::Map<Eigen::MatrixXcd>(t.data.data() + p * m * m, m, m) = g;
  }
  return t;
}

/// Reference-medium preconditioner gamma (gamma L0 gamma)^{-1} gamma per
/// frequency, inverted on the range of the projection.
MultiplierTable build_precond_table(const Grid& grid, const MultiplierTable& gamma,
                                    const Eigen::MatrixXcd& L0) {
  const int m = gamma.m;
  MultiplierTable t{grid.point_count(), m, Vec(grid.point_count() * m * m, Complex(0, 0))};
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::MatrixXcd g = gamma.at(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (g + g.adjoint()));
    int rank = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (eig.eigenvalues()[i] > 0.5) ++rank;
    if (rank == 0) continue;
    Eigen::MatrixXcd q = eig.eigenvectors().rightCols(rank);
    Eigen::MatrixXcd restricted = q.adjoint() * L0 * q;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(restricted);
    if (!lu.isInvertible()) {
      Eigen::Vector3d k = grid.wavevector(p);
      throw SingularSymbolError("reference medium is singular on the projected space", k[0],
                                k[1], k[2]);
    }
    Eigen::Map<Eigen::MatrixXcd>(t.data.data() + p * m * m, m, m) =
        q * lu.inverse() * q.adjoint();
  }
  return t;
}

Vec apply_table(const MultiplierTable& t, const Vec& x) {
  Vec y(x.size());
  const int m = t.m;
  for (std::size_t p = 0; p < t.points; ++p) {
    Eigen::Map<const Eigen::VectorXcd> xin(x.data() + p * m, m);
    Eigen::Map<Eigen::VectorXcd> yout(y.data() + p * m, m);
    yout = t.at(p) * xin;
  }
  return y;
}

Complex dot(const Vec& a, const Vec& b) {
  return pairwise_sum(a.size(), [&](std::size_t i) { return std::conj(a[i]) * b[i]; });
}

double norm2(const Vec& a) { return std::sqrt(std::abs(dot(a, a).real())); }

void axpy(Vec& y, Complex alpha, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

struct ProjectedOperator {
  const Problem& p;
  const MultiplierTable& gamma;

  Vec apply(const Vec& xhat) const {
    Field x = fft_inverse(Field(p.grid, p.layout, Space::fourier, xhat));
    Field lx = apply_local(p.L, x);
    Field lxh = fft_forward(lx);
    return apply_table(gamma, lxh.values());
  }
};

struct KrylovOutcome {
  Vec x;
  int iterations = 0;
  bool converged = false;
  bool indefinite = false;
  std::vector<double> energy;
};

KrylovOutcome run_cg(const ProjectedOperator& A, const MultiplierTable* M, const Vec& b,
                     double tol, int maxit, bool record_energy) {
  KrylovOutcome out;
  out.x.assign(b.size(), Complex(0, 0));
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Vec r = b;
  Vec z = M ? apply_table(*M, r) : r;
  Vec pvec = z;
  Complex rz = dot(r, z);
  for (int it = 0; it < maxit; ++it) {
    Vec q = A.apply(pvec);
    Complex pq = dot(pvec, q);
    if (!(pq.real() > 0.0) || std::abs(pq.imag()) > 1e-8 * std::abs(pq)) {
      out.indefinite = true;
      return out;
    }
    const Complex alpha = rz / pq;
    axpy(out.x, alpha, pvec);
    axpy(r, -alpha, q);
    out.iterations = it + 1;
    if (record_energy) {
      // phi = 1/2 <x, A x> - Re<b, x> evaluated from x and r = b - A x.
      const double phi = -0.5 * dot(out.x, b).real() - 0.5 * dot(out.x, r).real();
      out.energy.push_back(phi);
    }
    if (norm2(r) <= tol * bnorm) {
      out.converged = true;
      return out;
    }
    z = M ? apply_table(*M, r) : r;
    const Complex rz_next = dot(r, z);
    const Complex beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < pvec.size(); ++i) pvec[i] = z[i] + beta * pvec[i];
  }
  return out;
}

KrylovOutcome run_bicgstab(const ProjectedOperator& A, const MultiplierTable* M, const Vec& b,
                           double tol, int maxit) {
  auto apply = [&](const Vec& x) {
    Vec y = A.apply(x);
    return M ? apply_table(*M, y) : y;
  };
  KrylovOutcome out;
  out.x.assign(b.size(), Complex(0, 0));
  Vec bp = M ? apply_table(*M, b) : b;
  const double bnorm = norm2(bp);
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Vec r = bp;
  Vec rhat = r;
  Vec v(b.size(), Complex(0, 0)), pvec(b.size(), Complex(0, 0));
  Complex rho(1, 0), alpha(1, 0), omega(1, 0);
  for (int it = 0; it < maxit; ++it) {
    Complex rho_next = dot(rhat, r);
    if (std::abs(rho_next) < 1e-300) {  // stagnated shadow vector: restart
      rhat = r;
      rho_next = dot(rhat, r);
      if (std::abs(rho_next) < 1e-300) break;
    }
    const Complex beta = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    for (std::size_t i = 0; i < pvec.size(); ++i)
      pvec[i] = r[i] + beta * (pvec[i] - omega * v[i]);
    v = apply(pvec);
    alpha = rho / dot(rhat, v);
    Vec s = r;
    axpy(s, -alpha, v);
    out.iterations = it + 1;
    if (norm2(s) <= tol * bnorm) {
      axpy(out.x, alpha, pvec);
      out.converged = true;
      return out;
    }
    Vec t = apply(s);
    const Complex tt = dot(t, t);
    if (std::abs(tt) < 1e-300) break;
    omega = dot(t, s) / tt;
    axpy(out.x, alpha, pvec);
    axpy(out.x, omega, s);
    r = s;
    axpy(r, -omega, t);
    if (norm2(r) <= tol * bnorm) {
      out.converged = true;
      return out;
    }
    if (std::abs(omega) < 1e-300) break;
  }
  return out;
}

}  // namespace

Field apply_projected(const Problem& p, const Field& e) {
  if (e.space() != Space::fourier) throw SpaceError("apply_projected expects a fourier field");
  if (e.grid() != p.grid || e.layout() != p.layout)
    throw ShapeError("field does not match problem");
  MultiplierTable gamma = build_gamma_table(p.grid, p.gamma);
  ProjectedOperator A{p, gamma};
  return Field(p.grid, p.layout, Space::fourier, A.apply(apply_table(gamma, e.values())));
}

ResidualNorms residual(const Problem& p, const Field& E, const Field& J) {
  if (E.grid() != p.grid || J.grid() != p.grid) throw ShapeError("fields do not match problem");
  ResidualNorms out;
  Field mismatch = J - (apply_local(p.L, E) - p.source);
  out.constitutive = norm(mismatch);

  MultiplierTable gamma = build_gamma_table(p.grid, p.gamma);
  Field eh = fft_forward(E);
  Field jh = fft_forward(J);
  Vec g2e = eh.values();
  {
    Vec ge = apply_table(gamma, eh.values());
    const int m = p.layout.components();
    for (std::size_t i = 0; i < g2e.size(); ++i) g2e[i] -= ge[i];
    for (int c = 0; c < m; ++c) g2e[c] = 0;  // the mean belongs to neither space
  }
  out.gamma2_E = norm2(g2e);
  out.gamma1_J = norm2(apply_table(gamma, jh.values()));
  return out;
}

SolveResult solve_cell(const Problem& p, const Eigen::VectorXcd& E0, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = p.layout.components();
  if (E0.size() != m) throw ShapeError("applied mean has the wrong length");

  MultiplierTable gamma = build_gamma_table(p.grid, p.gamma);
  ProjectedOperator A{p, gamma};

  std::optional<MultiplierTable> precond;
  if (opts.precondition) {
    Eigen::MatrixXcd L0 = opts.reference_medium ? *opts.reference_medium : p.L.mean();
    precond = build_precond_table(p.grid, gamma, L0);
  }

  // b = gamma fft(s - L E0)
  Field e0_field = Field::constant(p.grid, p.layout, E0);
  Field rhs_real = p.source - apply_local(p.L, e0_field);
  Vec b = apply_table(gamma, fft_forward(rhs_real).values());

  int maxit = opts.max_iterations;
  if (maxit <= 0) {
    int nmax = 0;
    for (int a = 0; a < p.grid.dim(); ++a) nmax = std::max(nmax, p.grid.samples(a));
    maxit = 10 * m * nmax;
  }

  SolveReport report;
  report.penalty_active = p.L.has_penalties();
  const double herm_defect = p.L.hermitian_defect();
  bool use_cg = opts.method == SolveMethod::hermitian_cg ||
                (opts.method == SolveMethod::automatic && herm_defect <= 1e-13);

  // Iterate against a slightly tighter target so the independently recomputed
  // residual lands within the requested tolerance.
  const double inner_tol = 0.5 * opts.tolerance;
  KrylovOutcome outcome;
  const MultiplierTable* M = precond ? &*precond : nullptr;
  if (use_cg) {
    outcome = run_cg(A, M, b, inner_tol, maxit, opts.record_energy);
    report.method_used = "hermitian-cg";
    if (outcome.indefinite) {
      // The operator is not positive on the projected space; retry with the
      // general method and flag the switch.
      report.fallback = true;
      outcome = run_bicgstab(A, M, b, inner_tol, maxit);
      report.method_used = "general-krylov";
      report.non_hermitian_path = true;
    }
  } else {
    outcome = run_bicgstab(A, M, b, inner_tol, maxit);
    report.method_used = "general-krylov";
    report.non_hermitian_path = true;
  }

  report.iterations = outcome.iterations;
  report.energy_history = std::move(outcome.energy);

  // Independent residual, never the iteration's internal estimate.
  const double bnorm = norm2(b);
  report.rhs_norm = bnorm;
  if (bnorm > 0.0) {
    Vec ax = A.apply(outcome.x);
    double rn = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) rn += std::norm(ax[i] - b[i]);
    report.krylov_residual = std::sqrt(rn) / bnorm;
    report.converged = report.krylov_residual <= opts.tolerance;
  } else {
    report.krylov_residual = 0.0;
    report.converged = true;
  }

  Field E = fft_inverse(Field(p.grid, p.layout, Space::fourier, std::move(outcome.x))) + e0_field;
  Field J = apply_local(p.L, E) - p.source;
  report.residual = residual(p, E, J);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return SolveResult{std::move(E), std::move(J), std::move(report)};
}

SolveResult solve_infinite(const Problem& p, const SolveOptions& opts) {
  return solve_cell(p, Eigen::VectorXcd::Zero(p.layout.components()), opts);
}

}  // namespace gammakit
