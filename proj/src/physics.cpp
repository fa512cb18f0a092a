#include "gammakit/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gammakit {

namespace {

void require_grid(const TensorGrid& t, const Grid& grid, int rows, int cols, const char* what) {
  if (t.grid() != grid) throw ShapeError(std::string(what) + ": grid mismatch");
  if (t.rows() != rows || t.cols() != cols)
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " per-point matrices");
}

void require_source(const Field& s, const Grid& grid, const SupertensorLayout& layout,
                    const char* what) {
  if (s.grid() != grid || s.layout() != layout)
    throw ShapeError(std::string(what) + ": source has the wrong shape");
  if (s.space() != Space::real) throw SpaceError(std::string(what) + ": source must be real-space");
}

/// Worst minimum eigenvalue of the Hermitian parts of a per-point family;
/// throws when it is not strictly positive.
void require_pointwise_pd(const TensorGrid& t, const char* what) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_point = 0;
  for (std::size_t p = 0; p < t.grid().point_count(); ++p) {
    Eigen::MatrixXcd h = 0.5 * (t.at(p) + t.at(p).adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const double mn = eig.eigenvalues().minCoeff();
    if (mn < worst) {
      worst = mn;
      worst_point = p;
    }
  }
  if (!(worst > 0.0))
    throw DefinitenessError(std::string(what) + ": not positive definite (worst eigenvalue " +
                                std::to_string(worst) + " at point " +
                                std::to_string(worst_point) + ")",
                            worst_point, worst);
}

LocalOperator assemble_operator(
    const Grid& grid, const SupertensorLayout& layout,
    const std::function<void(std::size_t, Eigen::Ref<Eigen::MatrixXcd>)>& fill,
    std::vector<PenaltyTerm> penalties = {}) {
  const int m = layout.components();
  std::vector<Complex> vals(grid.point_count() * m * m);
  Eigen::MatrixXcd buf(m, m);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    buf.setZero();
    fill(p, buf);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vals[p * m * m + i + m * j] = buf(i, j);
  }
  return LocalOperator(grid, layout, std::move(vals), std::move(penalties));
}

}  // namespace

TensorGrid::TensorGrid(Grid grid, int rows, int cols, std::vector<Complex> data)
    : grid_(std::move(grid)), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != grid_.point_count() * static_cast<std::size_t>(rows_ * cols_))
    throw ShapeError("tensor grid data has the wrong size");
}

TensorGrid TensorGrid::constant(const Grid& grid, const Eigen::MatrixXcd& value) {
  const int r = static_cast<int>(value.rows()), c = static_cast<int>(value.cols());
  std::vector<Complex> data(grid.point_count() * r * c);
  for (std::size_t p = 0; p < grid.point_count(); ++p)
    Eigen::Map<Eigen::MatrixXcd>(data.data() + p * r * c, r, c) = value;
  return TensorGrid(grid, r, c, std::move(data));
}

TensorGrid TensorGrid::from_function(
    const Grid& grid, int rows, int cols,
    const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& fn) {
  std::vector<Complex> data(grid.point_count() * static_cast<std::size_t>(rows * cols));
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::MatrixXcd v = fn(grid.coordinate(p));
    if (v.rows() != rows || v.cols() != cols) throw ShapeError("sampler returned wrong shape");
    Eigen::Map<Eigen::MatrixXcd>(data.data() + p * rows * cols, rows, cols) = v;
  }
  return TensorGrid(grid, rows, cols, std::move(data));
}

TensorGrid TensorGrid::from_phases(const PhaseMap& phases,
                                   const std::vector<Eigen::MatrixXcd>& values) {
  if (values.size() != static_cast<std::size_t>(phases.phase_count))
    throw ShapeError("need one tensor per phase");
  const int r = static_cast<int>(values.front().rows());
  const int c = static_cast<int>(values.front().cols());
  std::vector<Complex> data(phases.grid.point_count() * static_cast<std::size_t>(r * c));
  for (std::size_t p = 0; p < phases.grid.point_count(); ++p)
    Eigen::Map<Eigen::MatrixXcd>(data.data() + p * r * c, r, c) = values[phases.labels[p] - 1];
  return TensorGrid(phases.grid, r, c, std::move(data));
}

Eigen::MatrixXcd isotropic_stiffness(int dim, Complex kappa, Complex mu) {
  return sym_operator_components(dim, [&](const Eigen::MatrixXcd& eps) -> Eigen::MatrixXcd {
    const Complex tr = eps.trace();
    Eigen::MatrixXcd dev = eps - (tr / static_cast<double>(dim)) *
                                     Eigen::MatrixXcd::Identity(dim, dim);
    return 2.0 * mu * dev + kappa * tr * Eigen::MatrixXcd::Identity(dim, dim);
  });
}

Eigen::MatrixXcd isotropic_compliance(int dim, Complex kappa, Complex mu) {
  return isotropic_stiffness(dim, kappa, mu).inverse();
}

// ---------------------------------------------------------------------------
// Conduction family
// ---------------------------------------------------------------------------

Problem build_conductivity(const Grid& grid, const TensorGrid& sigma, const Field& source) {
  const int d = grid.dim();
  require_grid(sigma, grid, d, d, "conductivity");
  SupertensorLayout layout = SupertensorLayout::vector(d, "e");
  require_source(source, grid, layout, "conductivity");
  LocalOperator L = assemble_operator(
      grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) { m = sigma.at(p); });
  return Problem(grid, layout, ProjectionSpec::grad(d), std::move(L), source,
                 PhysicsMeta{"conductivity", {}});
}

Problem build_magnetostatics(const Grid& grid, const TensorGrid& mu, const Field& magnetization,
                             const Field& current_potential) {
  const int d = grid.dim();
  require_grid(mu, grid, d, d, "magnetostatics");
  SupertensorLayout layout = SupertensorLayout::vector(d, "b");
  require_source(magnetization, grid, layout, "magnetostatics");
  require_source(current_potential, grid, layout, "magnetostatics");
  LocalOperator L = assemble_operator(grid, layout,
                                      [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
                                        Eigen::FullPivLU<Eigen::MatrixXcd> lu(mu.at(p));
                                        if (!lu.isInvertible())
                                          throw SingularOperatorError(
                                              "permeability is singular at point " +
                                                  std::to_string(p),
                                              p);
                                        m = lu.inverse();
                                      });
  return Problem(grid, layout, ProjectionSpec::divfree(d), std::move(L),
                 magnetization + current_potential, PhysicsMeta{"magnetostatics", {}});
}

Problem build_thermoelectric(const Grid& grid, const TensorGrid& L11, const TensorGrid& L12,
                             const TensorGrid& L21, const TensorGrid& L22, const Field& source) {
  const int d = grid.dim();
  require_grid(L11, grid, d, d, "thermoelectric");
  require_grid(L12, grid, d, d, "thermoelectric");
  require_grid(L21, grid, d, d, "thermoelectric");
  require_grid(L22, grid, d, d, "thermoelectric");
  SupertensorLayout layout(d, {Block{BlockKind::vector, "g1"}, Block{BlockKind::vector, "g2"}});
  require_source(source, grid, layout, "thermoelectric");
  LocalOperator L =
      assemble_operator(grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        m.topLeftCorner(d, d) = L11.at(p);
        m.topRightCorner(d, d) = L12.at(p);
        m.bottomLeftCorner(d, d) = L21.at(p);
        m.bottomRightCorner(d, d) = L22.at(p);
      });
  ProjectionSpec gamma =
      ProjectionSpec::block({ProjectionSpec::grad(d), ProjectionSpec::grad(d)});
  return Problem(grid, layout, std::move(gamma), std::move(L), source,
                 PhysicsMeta{"thermoelectric", {}});
}

Problem build_dielectric_cg(const Grid& grid, const TensorGrid& eps_real,
                            const TensorGrid& eps_imag, const Field& source) {
  const int d = grid.dim();
  require_grid(eps_real, grid, d, d, "dielectric");
  require_grid(eps_imag, grid, d, d, "dielectric");
  require_pointwise_pd(eps_imag, "dielectric loss part");
  SupertensorLayout vec = SupertensorLayout::vector(d, "e");
  require_source(source, grid, vec, "dielectric");
  SupertensorLayout layout(d, {Block{BlockKind::vector, "d"}, Block{BlockKind::vector, "e"}});

  const Complex I(0, 1);
  LocalOperator L =
      assemble_operator(grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        Eigen::MatrixXcd er = eps_real.at(p);
        Eigen::MatrixXcd ii = eps_imag.at(p).inverse();
        m.topLeftCorner(d, d) = ii;
        m.topRightCorner(d, d) = I * ii * er;
        m.bottomLeftCorner(d, d) = -I * er * ii;
        m.bottomRightCorner(d, d) = eps_imag.at(p) + er * ii * er;
      });

  std::vector<Complex> svals(grid.point_count() * 2 * d);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::VectorXcd s = source.at(p);
    Eigen::MatrixXcd ii = eps_imag.at(p).inverse();
    Eigen::VectorXcd top = -ii * s;
    Eigen::VectorXcd bottom = s + I * eps_real.at(p) * (ii * s);
    for (int c = 0; c < d; ++c) {
      svals[p * 2 * d + c] = top[c];
      svals[p * 2 * d + d + c] = bottom[c];
    }
  }
  Field s0(grid, layout, Space::real, std::move(svals));

  ProjectionSpec gamma =
      ProjectionSpec::block({ProjectionSpec::divfree(d), ProjectionSpec::grad(d)});
  return Problem(grid, layout, std::move(gamma), std::move(L), std::move(s0),
                 PhysicsMeta{"dielectric_cg", {}});
}

Problem build_magnetotransport(const Grid& grid, const TensorGrid& sigma_s,
                               const TensorGrid& sigma_a, const Field& source) {
  const int d = grid.dim();
  require_grid(sigma_s, grid, d, d, "magnetotransport");
  require_grid(sigma_a, grid, d, d, "magnetotransport");
  require_pointwise_pd(sigma_s, "symmetric conductivity part");
  SupertensorLayout vec = SupertensorLayout::vector(d, "e");
  require_source(source, grid, vec, "magnetotransport");
  SupertensorLayout layout(d, {Block{BlockKind::vector, "j"}, Block{BlockKind::vector, "e"}});

  LocalOperator L =
      assemble_operator(grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        Eigen::MatrixXcd si = sigma_s.at(p).inverse();
        Eigen::MatrixXcd sa = sigma_a.at(p);
        m.topLeftCorner(d, d) = si;
        m.topRightCorner(d, d) = -si * sa;
        m.bottomLeftCorner(d, d) = sa * si;
        m.bottomRightCorner(d, d) = sigma_s.at(p) - sa * si * sa;
      });

  std::vector<Complex> svals(grid.point_count() * 2 * d);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::VectorXcd s = source.at(p);
    Eigen::MatrixXcd si = sigma_s.at(p).inverse();
    Eigen::VectorXcd top = -si * s;
    Eigen::VectorXcd bottom = s - sigma_a.at(p) * (si * s);
    for (int c = 0; c < d; ++c) {
      svals[p * 2 * d + c] = top[c];
      svals[p * 2 * d + d + c] = bottom[c];
    }
  }
  Field s0(grid, layout, Space::real, std::move(svals));

  ProjectionSpec gamma =
      ProjectionSpec::block({ProjectionSpec::divfree(d), ProjectionSpec::grad(d)});
  return Problem(grid, layout, std::move(gamma), std::move(L), std::move(s0),
                 PhysicsMeta{"magnetotransport", {}});
}

TensorGrid antisymmetric_from_velocity(const Field& velocity) {
  const Grid& grid = velocity.grid();
  const int d = grid.dim();
  if (velocity.layout() != SupertensorLayout::vector(d))
    throw ShapeError("velocity must be a single vector block");
  Field vh = velocity.space() == Space::fourier ? velocity : fft_forward(velocity);

  // Solenoidality and zero mean, measured spectrally against the gradient
  // scale of the field itself.
  double div_norm = 0.0, grad_scale = 0.0;
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::Vector3d k = grid.wavevector(p);
    Complex div(0, 0);
    double row = 0.0;
    for (int a = 0; a < d; ++a) {
      div += Complex(0, k[a]) * vh.value(p, a);
      row += std::norm(vh.value(p, a));
    }
    div_norm += std::norm(div);
    grad_scale += k.squaredNorm() * row;
  }
  div_norm = std::sqrt(div_norm);
  grad_scale = std::sqrt(grad_scale);
  if (div_norm > 1e-10 * std::max(grad_scale, 1e-300))
    throw ConstraintError("velocity field is not solenoidal (relative spectral divergence " +
                          std::to_string(div_norm / grad_scale) + ")");
  double mean = 0.0;
  for (int a = 0; a < d; ++a) mean += std::abs(vh.value(0, a));
  if (mean > 1e-12 * std::max(1.0, velocity.max_abs()))
    throw ConstraintError("velocity field must have zero mean");

  if (d == 2) {
    // v = (d2 psi, -d1 psi): a scalar stream function from one Poisson solve.
    std::vector<Complex> psih(grid.point_count(), Complex(0, 0));
    for (std::size_t p = 1; p < grid.point_count(); ++p) {
      Eigen::Vector3d k = grid.wavevector(p);
      const double k2 = k.squaredNorm();
      if (k2 == 0.0) continue;
      psih[p] = (Complex(0, k[0]) * vh.value(p, 1) - Complex(0, k[1]) * vh.value(p, 0)) / k2;
    }
    Field psi = fft_inverse(Field(grid, SupertensorLayout::scalar(2), Space::fourier, psih));
    Eigen::Matrix2d r = rot90();
    std::vector<Complex> data(grid.point_count() * 4);
    for (std::size_t p = 0; p < grid.point_count(); ++p)
      Eigen::Map<Eigen::MatrixXcd>(data.data() + p * 4, 2, 2) =
          psi.value(p, 0) * r.cast<Complex>();
    return TensorGrid(grid, 2, 2, std::move(data));
  }

  // d == 3: w from a gauge-fixed curl inversion (k . w = 0), then eta(w).
  std::vector<Complex> wh(grid.point_count() * 3, Complex(0, 0));
  for (std::size_t p = 1; p < grid.point_count(); ++p) {
    Eigen::Vector3d k = grid.wavevector(p);
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) continue;
    Eigen::Vector3cd v(vh.value(p, 0), vh.value(p, 1), vh.value(p, 2));
    // cross product written out: Eigen's complex cross() conjugates
    Eigen::Vector3cd kxv(k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2],
                         k[0] * v[1] - k[1] * v[0]);
    for (int a = 0; a < 3; ++a) wh[p * 3 + a] = Complex(0, 1) * kxv[a] / k2;
  }
  Field w = fft_inverse(Field(grid, SupertensorLayout::vector(3), Space::fourier, wh));
  std::vector<Complex> data(grid.point_count() * 9);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::Vector3d wr(w.value(p, 0).real(), w.value(p, 1).real(), w.value(p, 2).real());
    Eigen::Map<Eigen::MatrixXcd>(data.data() + p * 9, 3, 3) = eta_cross(wr).cast<Complex>();
  }
  return TensorGrid(grid, 3, 3, std::move(data));
}

Problem build_magnetotransport_from_velocity(const Grid& grid, const TensorGrid& sigma_s,
                                             const Field& velocity, const Field& source) {
  return build_magnetotransport(grid, sigma_s, antisymmetric_from_velocity(velocity), source);
}

// ---------------------------------------------------------------------------
// Elasticity family
// ---------------------------------------------------------------------------

Problem build_elasticity(const Grid& grid, const TensorGrid& stiffness, const Field& body_source,
                         const Field& polarization_source) {
  const int d = grid.dim();
  const int ms = d * (d + 1) / 2;
  require_grid(stiffness, grid, ms, ms, "elasticity");
  SupertensorLayout layout = SupertensorLayout::sym_matrix(d, "strain");
  require_source(body_source, grid, layout, "elasticity");
  require_source(polarization_source, grid, layout, "elasticity");
  LocalOperator L = assemble_operator(
      grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) { m = stiffness.at(p); });
  return Problem(grid, layout, ProjectionSpec::elastic(d), std::move(L),
                 polarization_source + body_source, PhysicsMeta{"elasticity", {}});
}

Problem build_elasticity_compliance(const Grid& grid, const TensorGrid& compliance,
                                    const Field& strain_source) {
  const int d = grid.dim();
  const int ms = d * (d + 1) / 2;
  require_grid(compliance, grid, ms, ms, "elasticity");
  SupertensorLayout layout = SupertensorLayout::sym_matrix(d, "stress");
  require_source(strain_source, grid, layout, "elasticity");
  LocalOperator L = assemble_operator(
      grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) { m = compliance.at(p); });
  return Problem(grid, layout, ProjectionSpec::complement(ProjectionSpec::elastic(d)),
                 std::move(L), strain_source, PhysicsMeta{"elasticity_compliance", {}});
}

Field thermal_strain_source(const TensorGrid& alpha, double theta) {
  const Grid& grid = alpha.grid();
  const int d = grid.dim();
  require_grid(alpha, grid, d, d, "thermal source");
  SupertensorLayout layout = SupertensorLayout::sym_matrix(d, "strain");
  const int ms = layout.components();
  std::vector<Complex> vals(grid.point_count() * ms);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::VectorXcd c = sym_to_components(alpha.at(p));
    for (int i = 0; i < ms; ++i) vals[p * ms + i] = -theta * c[i];
  }
  return Field(grid, layout, Space::real, std::move(vals));
}

Problem build_torsion(const Grid& grid2d, const TensorGrid& c1313, const TensorGrid& c1323,
                      const TensorGrid& c2323, double tau, const Field& s_prime) {
  if (grid2d.dim() != 2) throw UnsupportedDimensionError("torsion needs a 2D grid");
  require_grid(c1313, grid2d, 1, 1, "torsion");
  require_grid(c1323, grid2d, 1, 1, "torsion");
  require_grid(c2323, grid2d, 1, 1, "torsion");
  SupertensorLayout layout = SupertensorLayout::vector(2, "du");
  require_source(s_prime, grid2d, layout, "torsion");

  LocalOperator L =
      assemble_operator(grid2d, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        m(0, 0) = c1313.at(p)(0, 0);
        m(0, 1) = c1323.at(p)(0, 0);
        m(1, 0) = c1323.at(p)(0, 0);
        m(1, 1) = c2323.at(p)(0, 0);
      });

  // s = L(x) (tau x2, -tau x1)^T + s', with cell-centered coordinates.
  std::vector<Complex> svals(grid2d.point_count() * 2);
  for (std::size_t p = 0; p < grid2d.point_count(); ++p) {
    Eigen::Vector3d x = grid2d.centered_coordinate(p);
    Eigen::Vector2cd twist(tau * x[1], -tau * x[0]);
    Eigen::Vector2cd v = L.at(p).topLeftCorner(2, 2) * twist;
    svals[p * 2 + 0] = v[0] + s_prime.value(p, 0);
    svals[p * 2 + 1] = v[1] + s_prime.value(p, 1);
  }

  PhysicsMeta meta{tau == 0.0 ? "antiplane" : "torsion", {}};
  if (tau != 0.0) {
    // The twist source is square integrable only for section moduli vanishing
    // away from the axis; flag moduli that reach the cell boundary.
    double boundary_max = 0.0;
    const double scale = L.max_norm();
    for (std::size_t p = 0; p < grid2d.point_count(); ++p) {
      Eigen::Vector3d x = grid2d.centered_coordinate(p);
      bool near = false;
      for (int a = 0; a < 2; ++a) {
        const double h = grid2d.length(a) / grid2d.samples(a);
        if (std::abs(x[a]) > 0.5 * grid2d.length(a) - 1.5 * h) near = true;
      }
      if (near) boundary_max = std::max(boundary_max, std::abs(L.at(p).cwiseAbs().maxCoeff()));
    }
    if (boundary_max > 1e-12 * scale)
      meta.notes.push_back("section moduli extend to the cell boundary; the twist source is "
                           "square integrable only for compactly supported moduli");
  }

  return Problem(grid2d, layout, ProjectionSpec::grad(2), std::move(L),
                 Field(grid2d, layout, Space::real, std::move(svals)), std::move(meta));
}

Problem build_thermoelasticity(const Grid& grid, const TensorGrid& compliance,
                               const TensorGrid& alpha, const TensorGrid& c_over_T0,
                               const Field& source) {
  const int d = grid.dim();
  const int ms = d * (d + 1) / 2;
  require_grid(compliance, grid, ms, ms, "thermoelasticity");
  require_grid(alpha, grid, d, d, "thermoelasticity");
  require_grid(c_over_T0, grid, 1, 1, "thermoelasticity");
  SupertensorLayout layout(d, {Block{BlockKind::sym_matrix, "stress"},
                               Block{BlockKind::scalar, "theta"}});
  require_source(source, grid, layout, "thermoelasticity");

  LocalOperator L =
      assemble_operator(grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        Eigen::VectorXcd a = sym_to_components(alpha.at(p));
        m.topLeftCorner(ms, ms) = compliance.at(p);
        m.block(0, ms, ms, 1) = a;
        m.block(ms, 0, 1, ms) = a.transpose();
        m(ms, ms) = c_over_T0.at(p)(0, 0);
      });

  ProjectionSpec gamma = ProjectionSpec::block(
      {ProjectionSpec::complement(ProjectionSpec::elastic(d)),
       ProjectionSpec::zero(SupertensorLayout::scalar(d, "theta"))});
  return Problem(grid, layout, std::move(gamma), std::move(L), source,
                 PhysicsMeta{"thermoelasticity", {}});
}

Problem build_coupled_eme(const Grid& grid, const TensorGrid& S, const TensorGrid& Dc,
                          const TensorGrid& Q, const TensorGrid& eps, const TensorGrid& beta,
                          const TensorGrid& mu, const Field& source) {
  const int d = grid.dim();
  const int ms = d * (d + 1) / 2;
  require_grid(S, grid, ms, ms, "coupled eme");
  require_grid(Dc, grid, ms, d, "coupled eme");
  require_grid(Q, grid, ms, d, "coupled eme");
  require_grid(eps, grid, d, d, "coupled eme");
  require_grid(beta, grid, d, d, "coupled eme");
  require_grid(mu, grid, d, d, "coupled eme");
  SupertensorLayout layout(d, {Block{BlockKind::sym_matrix, "stress"},
                               Block{BlockKind::vector, "e"}, Block{BlockKind::vector, "h"}});
  require_source(source, grid, layout, "coupled eme");

  LocalOperator L =
      assemble_operator(grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        m.block(0, 0, ms, ms) = S.at(p);
        m.block(0, ms, ms, d) = Dc.at(p);
        m.block(0, ms + d, ms, d) = Q.at(p);
        m.block(ms, 0, d, ms) = Dc.at(p).transpose();
        m.block(ms, ms, d, d) = eps.at(p);
        m.block(ms, ms + d, d, d) = beta.at(p);
        m.block(ms + d, 0, d, ms) = Q.at(p).transpose();
        m.block(ms + d, ms, d, d) = beta.at(p).transpose();
        m.block(ms + d, ms + d, d, d) = mu.at(p);
      });

  // Both vector fields are curl free: the electric field is a potential
  // gradient and the magnetizing field has no free current.
  ProjectionSpec gamma = ProjectionSpec::block(
      {ProjectionSpec::complement(ProjectionSpec::elastic(d)), ProjectionSpec::grad(d),
       ProjectionSpec::grad(d)});
  return Problem(grid, layout, std::move(gamma), std::move(L), source,
                 PhysicsMeta{"coupled_eme", {}});
}

Problem build_viscoelastic_cg(const Grid& grid, const TensorGrid& C_real,
                              const TensorGrid& C_imag, const Field& source) {
  const int d = grid.dim();
  const int ms = d * (d + 1) / 2;
  require_grid(C_real, grid, ms, ms, "viscoelasticity");
  require_grid(C_imag, grid, ms, ms, "viscoelasticity");
  require_pointwise_pd(C_imag, "viscous stiffness part");
  SupertensorLayout sym = SupertensorLayout::sym_matrix(d, "s");
  require_source(source, grid, sym, "viscoelasticity");
  SupertensorLayout layout(d, {Block{BlockKind::sym_matrix, "strain"},
                               Block{BlockKind::sym_matrix, "stress"}});

  const Complex I(0, 1);
  LocalOperator L =
      assemble_operator(grid, layout, [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        Eigen::MatrixXcd cr = C_real.at(p);
        Eigen::MatrixXcd ii = C_imag.at(p).inverse();
        m.topLeftCorner(ms, ms) = ii;
        m.topRightCorner(ms, ms) = I * ii * cr;
        m.bottomLeftCorner(ms, ms) = -I * cr * ii;
        m.bottomRightCorner(ms, ms) = C_imag.at(p) + cr * ii * cr;
      });

  std::vector<Complex> svals(grid.point_count() * 2 * ms);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::VectorXcd s = source.at(p);
    Eigen::MatrixXcd ii = C_imag.at(p).inverse();
    Eigen::VectorXcd top = -ii * s;
    Eigen::VectorXcd bottom = s + I * C_real.at(p) * (ii * s);
    for (int c = 0; c < ms; ++c) {
      svals[p * 2 * ms + c] = top[c];
      svals[p * 2 * ms + ms + c] = bottom[c];
    }
  }
  Field s0(grid, layout, Space::real, std::move(svals));

  ProjectionSpec gamma =
      ProjectionSpec::block({ProjectionSpec::complement(ProjectionSpec::elastic(d)),
                             ProjectionSpec::elastic(d)});
  return Problem(grid, layout, std::move(gamma), std::move(L), std::move(s0),
                 PhysicsMeta{"viscoelastic_cg", {}});
}

// ---------------------------------------------------------------------------
// Constrained-flow family (penalized unbounded moduli)
// ---------------------------------------------------------------------------

Problem build_graphene(const Grid& grid2d, double sigma0, double D_ell, double lambda_pen,
                       std::optional<Field> source) {
  if (grid2d.dim() != 2) throw UnsupportedDimensionError("graphene flow needs a 2D grid");
  if (!(sigma0 > 0.0)) throw ConstraintError("sigma0 must be positive");
  if (D_ell < 0.0) throw ConstraintError("D_ell must be nonnegative");
  const int d = 2;
  SupertensorLayout layout(d, {Block{BlockKind::full_matrix, "gradj"},
                               Block{BlockKind::vector, "j"}});

  // The prose limit forces div j = 0, so the unbounded modulus sits on the
  // trace slot; the momentum-diffusion term acts on the trace-free remainder.
  Eigen::MatrixXcd finite_upper = (D_ell / sigma0) * lambda_tracefree(d);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(layout.components(), layout.components());
  full.topLeftCorner(d * d, d * d) = finite_upper;
  full.bottomRightCorner(d, d) = (1.0 / sigma0) * Eigen::MatrixXcd::Identity(d, d);

  if (lambda_pen <= 0.0) lambda_pen = 1e8 * std::max(D_ell / sigma0, 1.0 / sigma0);
  std::vector<PenaltyTerm> penalties{{0, 0, lambda_trace(d), lambda_pen}};
  LocalOperator L = LocalOperator::constant(grid2d, layout, full, std::move(penalties));

  Field s = source ? *source : Field::zeros(grid2d, layout, Space::real);
  require_source(s, grid2d, layout, "graphene");
  std::vector<bool> mask(layout.components(), false);
  for (int c = 0; c < d; ++c) mask[d * d + c] = true;
  return Problem(grid2d, layout, ProjectionSpec::z(d), std::move(L), std::move(s),
                 PhysicsMeta{"graphene", {}}, std::move(mask));
}

Problem build_oseen(const Grid& grid, double rho, const Eigen::Vector3d& V,
                    const TensorGrid& eta_visc, double lambda_pen, const Field& body_force,
                    int advection_sign) {
  const int d = grid.dim();
  require_grid(eta_visc, grid, 1, 1, "oseen");
  SupertensorLayout layout(d, {Block{BlockKind::full_matrix, "stress"},
                               Block{BlockKind::vector, "w"}});
  SupertensorLayout vec = SupertensorLayout::vector(d, "w");
  require_source(body_force, grid, vec, "oseen");

  double eta_max = 0.0;
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const double ev = eta_visc.at(p)(0, 0).real();
    if (!(ev > 0.0)) throw ConstraintError("viscosity must be positive everywhere");
    eta_max = std::max(eta_max, ev);
  }
  if (lambda_pen <= 0.0)
    lambda_pen = 1e8 * std::max({eta_max, rho * V.norm(), 1.0});

  Eigen::MatrixXcd sym_tf = lambda_sym_tracefree(d);
  // rho V . grad w, contracted over the gradient index of the matrix block.
  Eigen::MatrixXcd advect = Eigen::MatrixXcd::Zero(d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) advect(j, i + d * j) = advection_sign * rho * V[i];

  std::vector<PenaltyTerm> penalties{{0, 0, lambda_trace(d), lambda_pen}};
  LocalOperator L = assemble_operator(
      grid, layout,
      [&](std::size_t p, Eigen::Ref<Eigen::MatrixXcd> m) {
        m.topLeftCorner(d * d, d * d) = eta_visc.at(p)(0, 0) * sym_tf;
        m.bottomLeftCorner(d, d * d) = advect;
      },
      std::move(penalties));

  std::vector<Complex> svals(grid.point_count() * layout.components(), Complex(0, 0));
  const int off = d * d;
  for (std::size_t p = 0; p < grid.point_count(); ++p)
    for (int c = 0; c < d; ++c)
      svals[p * layout.components() + off + c] = body_force.value(p, c);

  std::vector<bool> mask(layout.components(), false);
  for (int c = 0; c < d; ++c) mask[off + c] = true;
  return Problem(grid, layout, ProjectionSpec::z(d), std::move(L),
                 Field(grid, layout, Space::real, std::move(svals)),
                 PhysicsMeta{"oseen", {}}, std::move(mask));
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

Problem dualize(const Problem& p) {
  LocalOperator Linv = p.L.inverse();
  Field dual_source = apply_local(Linv, p.source).scaled(Complex(-1, 0));
  PhysicsMeta meta = p.meta;
  meta.tag += "+dual";
  return Problem(p.grid, p.layout, ProjectionSpec::complement(p.gamma), std::move(Linv),
                 std::move(dual_source), std::move(meta), p.mean_mask);
}

Problem cg_transform(const Problem& p, CgConvention convention) {
  const int m = p.layout.components();
  const Complex scale = convention == CgConvention::quasistatic ? Complex(0, -1) : Complex(1, 0);

  // Pointwise split of the (scaled) operator into Hermitian and
  // anti-Hermitian parts, with the Hermitian part required positive definite.
  const std::size_t n = p.grid.point_count();
  std::vector<Complex> lvals(n * 4 * m * m);
  std::vector<Complex> svals(n * 2 * m);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_point = 0;
  for (std::size_t pt = 0; pt < n; ++pt) {
    Eigen::MatrixXcd a = scale * p.L.at(pt);
    Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    Eigen::MatrixXcd nh = 0.5 * (a - a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    if (eig.eigenvalues().minCoeff() < worst) {
      worst = eig.eigenvalues().minCoeff();
      worst_point = pt;
    }
    Eigen::MatrixXcd hi = h.inverse();
    Eigen::MatrixXcd big(2 * m, 2 * m);
    big.topLeftCorner(m, m) = hi;
    big.topRightCorner(m, m) = -hi * nh;
    big.bottomLeftCorner(m, m) = nh * hi;
    big.bottomRightCorner(m, m) = h - nh * hi * nh;
    Eigen::Map<Eigen::MatrixXcd>(lvals.data() + pt * 4 * m * m, 2 * m, 2 * m) = big;

    Eigen::VectorXcd s = scale * p.source.at(pt);
    Eigen::Map<Eigen::VectorXcd>(svals.data() + pt * 2 * m, m) = -hi * s;
    Eigen::Map<Eigen::VectorXcd>(svals.data() + pt * 2 * m + m, m) = s - nh * (hi * s);
  }
  if (!(worst > 0.0))
    throw DefinitenessError("declared Hermitian part is not positive definite (worst eigenvalue " +
                                std::to_string(worst) + " at point " +
                                std::to_string(worst_point) + ")",
                            worst_point, worst);

  std::vector<Block> blocks;
  for (const auto& b : p.layout.blocks()) blocks.push_back(Block{b.kind, "flux_" + b.label});
  for (const auto& b : p.layout.blocks()) blocks.push_back(b);
  SupertensorLayout layout(p.layout.dim(), std::move(blocks));

  ProjectionSpec gamma = ProjectionSpec::block({ProjectionSpec::complement(p.gamma), p.gamma});
  PhysicsMeta meta = p.meta;
  meta.tag += "+cg";
  return Problem(p.grid, layout, std::move(gamma),
                 LocalOperator(p.grid, layout, std::move(lvals)),
                 Field(p.grid, layout, Space::real, std::move(svals)), std::move(meta));
}

Problem null_t_shift(const Problem& p, const Eigen::MatrixXcd& T, double c) {
  Eigen::Vector3d worst_k;
  const double violation = p.gamma.null_t_violation(T, 200, 0x6e756c74u, &worst_k);
  const double scale = std::max(T.norm(), 1e-300);
  if (violation > 1e-12 * scale)
    throw InvalidNullTError("candidate is not a null-T operator (gamma T gamma != 0)", worst_k[0],
                            worst_k[1], worst_k[2], violation);
  PhysicsMeta meta = p.meta;
  meta.notes.push_back("operator shifted by c*T with a null-T certificate; the flux is "
                       "reinterpreted as J + c*T*E");
  Problem shifted = p.with_operator(p.L.plus_constant(c * T));
  shifted.meta = std::move(meta);
  return shifted;
}

Problem linearize(const Problem& p, const LocalOperator& L_prime, const Field& s_prime,
                  const Field& E_base) {
  Field source = s_prime - apply_local(L_prime, E_base);
  PhysicsMeta meta = p.meta;
  meta.tag += "+perturbation";
  Problem out = p.with_source(std::move(source));
  out.meta = std::move(meta);
  return out;
}

bool satisfies_reality_constraint(const Eigen::MatrixXcd& eps_at_omega,
                                  const Eigen::MatrixXcd& eps_at_minus_conj_omega,
                                  double tol) {
  return (eps_at_minus_conj_omega - eps_at_omega.conjugate()).norm() <=
         tol * std::max(1.0, eps_at_omega.norm());
}

}  // namespace gammakit
