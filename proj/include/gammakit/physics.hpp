#ifndef GAMMAKIT_PHYSICS_HPP
#define GAMMAKIT_PHYSICS_HPP

#include <optional>

#include "gammakit/problem.hpp"

namespace gammakit {

/// Per-point r x c complex coefficient matrices on a grid; the common input
/// shape for the physics builders.
class TensorGrid {
 public:
  TensorGrid(Grid grid, int rows, int cols, std::vector<Complex> data);

  static TensorGrid constant(const Grid& grid, const Eigen::MatrixXcd& value);
  static TensorGrid from_function(const Grid& grid, int rows, int cols,
                                  const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& fn);
  static TensorGrid from_phases(const PhaseMap& phases, const std::vector<Eigen::MatrixXcd>& values);

  const Grid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::Map<const Eigen::MatrixXcd> at(std::size_t point) const {
    return {data_.data() + point * rows_ * cols_, rows_, cols_};
  }

 private:
  Grid grid_;
  int rows_, cols_;
  std::vector<Complex> data_;
};

/// Isotropic stiffness/compliance acting on symmetric matrices, in the
/// orthonormal component basis.  `kappa` is the d-dimensional bulk modulus,
/// so a unit hydrostatic stress produces trace strain 1/kappa.
Eigen::MatrixXcd isotropic_stiffness(int dim, Complex kappa, Complex mu);
Eigen::MatrixXcd isotropic_compliance(int dim, Complex kappa, Complex mu);

// ---------------------------------------------------------------------------
// Theory builders.  Each returns a self-contained Problem; fields and moduli
// are dimensionless.
// ---------------------------------------------------------------------------

/// Conduction-type transport: flux = sigma * gradient - source.
Problem build_conductivity(const Grid& grid, const TensorGrid& sigma, const Field& source);

/// Magnetostatics: L = mu^{-1} on the induction with a divergence-free
/// multiplier; source = magnetization + current potential.
Problem build_magnetostatics(const Grid& grid, const TensorGrid& mu, const Field& magnetization,
                             const Field& current_potential);

/// Two coupled conduction channels (particle and energy transport, or
/// electro-magneto statics on (e, h)).
Problem build_thermoelectric(const Grid& grid, const TensorGrid& L11, const TensorGrid& L12,
                             const TensorGrid& L21, const TensorGrid& L22, const Field& source);

/// Fixed-frequency complex dielectric, rewritten as an equivalent Hermitian
/// problem on the doubled (flux, field) layout.  `source` is the
/// admittivity-form source of the direct problem.
Problem build_dielectric_cg(const Grid& grid, const TensorGrid& eps_real,
                            const TensorGrid& eps_imag, const Field& source);

/// Transport with an antisymmetric conductivity part (Hall-type terms or
/// convection by a solenoidal velocity), in the doubled symmetric form.
Problem build_magnetotransport(const Grid& grid, const TensorGrid& sigma_s,
                               const TensorGrid& sigma_a, const Field& source);
Problem build_magnetotransport_from_velocity(const Grid& grid, const TensorGrid& sigma_s,
                                             const Field& velocity, const Field& source);

/// Antisymmetric tensor field A(x) with div A = v, built spectrally; throws
/// ConstraintError unless v is solenoidal (checked spectrally to 1e-10).
TensorGrid antisymmetric_from_velocity(const Field& velocity);

/// Linear elasticity in stiffness form: stress = C * strain - source.
Problem build_elasticity(const Grid& grid, const TensorGrid& stiffness, const Field& body_source,
                         const Field& polarization_source);

/// Compliance-form twin: strain = S * stress - source on divergence-free
/// symmetric fields; the natural cell for stress-driven loading.
Problem build_elasticity_compliance(const Grid& grid, const TensorGrid& compliance,
                                    const Field& strain_source);

/// Strain source of a temperature increment: -theta * alpha(x) in components.
Field thermal_strain_source(const TensorGrid& alpha, double theta);

/// Twist of a shaft whose section moduli depend on the cross-section only.
/// tau = 0 gives the antiplane special case.
Problem build_torsion(const Grid& grid2d, const TensorGrid& c1313, const TensorGrid& c1323,
                      const TensorGrid& c2323, double tau, const Field& s_prime);

/// Thermoelasticity (or poroelasticity) on (stress, temperature increment);
/// the scalar is a pure mean coordinate.
Problem build_thermoelasticity(const Grid& grid, const TensorGrid& compliance,
                               const TensorGrid& alpha, const TensorGrid& c_over_T0,
                               const Field& source);

/// Coupled elasto-electro-magnetics on (stress, electric field, magnetizing
/// field).
Problem build_coupled_eme(const Grid& grid, const TensorGrid& S, const TensorGrid& Dc,
                          const TensorGrid& Q, const TensorGrid& eps, const TensorGrid& beta,
                          const TensorGrid& mu, const Field& source);

/// Complex viscoelasticity in the doubled Hermitian form.
Problem build_viscoelastic_cg(const Grid& grid, const TensorGrid& C_real,
                              const TensorGrid& C_imag, const Field& source);

/// Viscous electron flow in a two-dimensional sheet; the flow-momentum
/// diffusion length enters through D_ell and the divergence constraint is
/// enforced by a penalty.  lambda_pen <= 0 picks the default strength.
Problem build_graphene(const Grid& grid2d, double sigma0, double D_ell, double lambda_pen,
                       std::optional<Field> source = std::nullopt);

/// Steady incompressible viscous flow past an object moving at velocity V.
/// `advection_sign` flips the advective block (both sign conventions appear
/// in derivations of the constitutive form).
Problem build_oseen(const Grid& grid, double rho, const Eigen::Vector3d& V,
                    const TensorGrid& eta_visc, double lambda_pen, const Field& body_force,
                    int advection_sign = +1);

// ---------------------------------------------------------------------------
// Structural transformations.
// ---------------------------------------------------------------------------

/// Swap the roles of the two field spaces: L -> L^{-1}, gamma -> complement,
/// source -> -L^{-1} s.  An involution on problems with invertible L.
Problem dualize(const Problem& p);

enum class CgConvention {
  real_part,    // split L itself into Hermitian / anti-Hermitian parts
  quasistatic,  // multiply the law by -i first (complex permittivity input)
};

/// Rewrite a problem with non-Hermitian L as an equivalent problem on the
/// doubled layout whose operator is Hermitian, and positive definite whenever
/// the declared Hermitian part is.
Problem cg_transform(const Problem& p, CgConvention convention);

/// Shift L by c*T for a constant T with gamma T gamma = 0; leaves the solved
/// field unchanged and re-labels the flux.  The candidate is validated at
/// random wavevectors and rejected with the offending k.
Problem null_t_shift(const Problem& p, const Eigen::MatrixXcd& T, double c);

/// First-order perturbation problem around a solved base state: same L and
/// gamma, source = s' - L' E_base.
Problem linearize(const Problem& p, const LocalOperator& L_prime, const Field& s_prime,
                  const Field& E_base);

/// Frequency-reality constraint for quasistatic moduli: eps(-conj(omega))
/// must equal conj(eps(omega)).  Validation utility only.
bool satisfies_reality_constraint(const Eigen::MatrixXcd& eps_at_omega,
                                  const Eigen::MatrixXcd& eps_at_minus_conj_omega,
                                  double tol = 1e-12);

}  // namespace gammakit

#endif
