#include <doctest.h>

#include "gammakit/exact_relations.hpp"
#include "gammakit/homogenize.hpp"
#include "gammakit/physics.hpp"
#include "laminate_oracle.hpp"
#include "test_helpers.hpp"

using namespace gammakit;
using gktest::laminate_effective;
using gktest::smooth_random_field;

namespace {

Field zero_vec(const Grid& g) {
  return Field::zeros(g, SupertensorLayout::vector(g.dim()), Space::real);
}

Problem cosine_conductivity(const Grid& g) {
  auto sigma = TensorGrid::from_function(g, g.dim(), g.dim(),
                                         [&](const Eigen::Vector3d& x) -> Eigen::MatrixXcd {
    return (2.0 + std::cos(2.0 * std::numbers::pi * x[0] / g.length(0))) *
           Eigen::MatrixXcd::Identity(g.dim(), g.dim());
  });
  return build_conductivity(g, sigma, zero_vec(g));
}

SolveOptions tight() {
  SolveOptions opts;
  opts.tolerance = 1e-12;
  return opts;
}

}  // namespace

TEST_CASE("effective tensor: homogeneous medium and cosine profile") {
  Grid g = Grid::square(2, 64);
  Eigen::MatrixXcd aniso(2, 2);
  aniso << 3.0, 0.4, 0.4, 1.2;
  Problem ph = build_conductivity(g, TensorGrid::constant(g, aniso), zero_vec(g));
  EffectiveResponse hom = effective_tensor(ph, tight());
  CHECK(hom.all_converged);
  CHECK((hom.L_star - aniso).norm() < 1e-11);

  EffectiveResponse cosr = effective_tensor(cosine_conductivity(g), tight());
  Eigen::MatrixXcd expect(2, 2);
  expect << std::sqrt(3.0), 0.0, 0.0, 2.0;
  CHECK((cosr.L_star - expect).norm() < 1e-9);
}

TEST_CASE("effective tensor in three dimensions") {
  Grid g = Grid::square(3, 32);
  EffectiveResponse hom = effective_tensor(cosine_conductivity(g), tight());
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(3, 3) * 2.0;
  expect(0, 0) = std::sqrt(3.0);
  CHECK((hom.L_star - expect).norm() < 1e-8);
}

TEST_CASE("two-phase laminate matches the closed-form oracle exactly") {
  Grid g = Grid::square(2, 16);
  PhaseMap layers = PhaseMap::layers(g, 0, 0.5);
  Eigen::MatrixXcd s1 = 4.0 * Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd s2(2, 2);
  s2 << 1.5, 0.3, 0.3, 1.0;
  Problem p = build_conductivity(g, TensorGrid::from_phases(layers, {s1, s2}), zero_vec(g));
  EffectiveResponse hom = effective_tensor(p, tight());

  Eigen::MatrixXcd oracle = laminate_effective(ProjectionSpec::grad(2), {1, 0, 0}, {s1, s2},
                                               {0.5, 0.5});
  CHECK((hom.L_star - oracle).norm() < 1e-10);

  // elasticity laminate through the same oracle
  Eigen::MatrixXcd c1 = isotropic_stiffness(2, 2.0, 1.0);
  Eigen::MatrixXcd c2 = isotropic_stiffness(2, 5.0, 0.4);
  Problem pe = build_elasticity(g, TensorGrid::from_phases(layers, {c1, c2}),
                                Field::zeros(g, SupertensorLayout::sym_matrix(2), Space::real),
                                Field::zeros(g, SupertensorLayout::sym_matrix(2), Space::real));
  EffectiveResponse home = effective_tensor(pe, tight());
  Eigen::MatrixXcd oracle_e =
      laminate_effective(ProjectionSpec::elastic(2), {1, 0, 0}, {c1, c2}, {0.5, 0.5});
  CHECK((home.L_star - oracle_e).norm() < 1e-9);
}

TEST_CASE("effective source: trivial cases and the thermal route") {
  Grid g = Grid::square(2, 32);
  auto sigma = TensorGrid::from_function(g, 2, 2, gktest::smooth_spd_coefficient(2, 31));

  // no source, no effective source
  Problem p0 = build_conductivity(g, sigma, zero_vec(g));
  CHECK(effective_source(p0, tight()).norm() < 1e-12);

  // homogeneous medium with a constant source: the zero-mean solve leaves
  // E = 0 and the mean flux is minus the source mean
  Eigen::VectorXcd c(2);
  c << 1.0, -2.0;
  Problem pc = build_conductivity(g, TensorGrid::constant(g, Eigen::MatrixXcd::Identity(2, 2)),
                                  Field::constant(g, SupertensorLayout::vector(2), c));
  CHECK((effective_source(pc, tight()) + c).norm() < 1e-12);

  // thermoelastic consistency: the strain source route reproduces the
  // coupling column of the full operator route
  PhaseMap disk = PhaseMap::disk(g, 0.3);
  const double k1 = 1.0, mu1 = 0.5, a1 = 1.0;
  const double k2 = 3.0, mu2 = 1.0, a2 = 0.2;
  auto S = TensorGrid::from_phases(
      disk, {isotropic_compliance(2, k1, mu1), isotropic_compliance(2, k2, mu2)});
  auto alpha = TensorGrid::from_phases(disk, {a1 * Eigen::MatrixXcd::Identity(2, 2),
                                              a2 * Eigen::MatrixXcd::Identity(2, 2)});
  auto heat = TensorGrid::constant(g, Eigen::MatrixXcd::Identity(1, 1));
  SupertensorLayout th_layout(2, {Block{BlockKind::sym_matrix, "stress"},
                                  Block{BlockKind::scalar, "theta"}});
  Problem pth = build_thermoelasticity(g, S, alpha, heat,
                                       Field::zeros(g, th_layout, Space::real));
  EffectiveResponse full = effective_tensor(pth, tight());

  const double theta = 2.0;
  Problem psrc = build_elasticity_compliance(g, S, thermal_strain_source(alpha, theta));
  Eigen::VectorXcd s_star = effective_source(psrc, tight());
  // theta column of the thermoelastic tensor = effective expansion components
  Eigen::VectorXcd alpha_star = full.L_star.col(3).head(3);
  CHECK((s_star - theta * alpha_star).norm() < 1e-9);
}

TEST_CASE("response tensor is the per-phase source map") {
  Grid g = Grid::square(2, 16);
  PhaseMap layers = PhaseMap::layers(g, 0, 0.5);

  // homogeneous medium: the map depends on volume fractions only
  Problem ph = build_conductivity(g, TensorGrid::constant(g, Eigen::MatrixXcd::Identity(2, 2)),
                                  zero_vec(g));
  Eigen::MatrixXcd smap = response_tensor(ph, layers, tight());
  // uniform-field algebra: s_star = -(f1 s1 + f2 s2), diagonal in components
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 4);
  expect(0, 0) = expect(1, 1) = -0.5;
  expect(0, 2) = expect(1, 3) = -0.5;
  CHECK((smap - expect).norm() < 1e-10);

  // random two-phase medium: the assembled map reproduces a direct run
  auto sigma = TensorGrid::from_phases(layers, {3.0 * Eigen::MatrixXcd::Identity(2, 2),
                                                Eigen::MatrixXcd::Identity(2, 2)});
  Problem pr = build_conductivity(g, sigma, zero_vec(g));
  Eigen::MatrixXcd smap_r = response_tensor(pr, layers, tight());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd per_phase(4);
  for (int i = 0; i < 4; ++i) per_phase[i] = Complex(unif(rng), unif(rng));
  std::vector<Eigen::VectorXcd> phase_values = {per_phase.head(2), per_phase.tail(2)};
  Field s = layers.assemble_source(pr.layout, phase_values);
  Eigen::VectorXcd direct = effective_source(pr.with_source(s), tight());
  CHECK((smap_r * per_phase - direct).norm() < 1e-9);
}

TEST_CASE("adjoint identity for the effective tensor") {
  Grid g = Grid::square(2, 32);

  // homogeneous: identity holds at round-off
  Eigen::MatrixXcd aniso(2, 2);
  aniso << 2.0, 0.3, -0.1, 1.5;
  Problem ph = build_conductivity(g, TensorGrid::constant(g, aniso), zero_vec(g));
  CHECK(check_adjoint(ph, tight()) < 1e-12);

  // pointwise Hermitian: effective tensor Hermitian
  auto herm = TensorGrid::from_function(g, 2, 2, gktest::smooth_spd_coefficient(2, 41));
  Problem phh = build_conductivity(g, herm, zero_vec(g));
  EffectiveResponse hom = effective_tensor(phh, tight());
  CHECK((hom.L_star - hom.L_star.adjoint()).norm() < 1e-8);
  CHECK(check_adjoint(phh, tight()) < 1e-8);

  // random non-symmetric coefficient
  auto sym_fn = gktest::smooth_spd_coefficient(2, 42, 2.5, 0.6);
  auto rot_fn = [](const Eigen::Vector3d& x) {
    return 0.4 * std::sin(2.0 * std::numbers::pi * x[1]);
  };
  auto nonsym = TensorGrid::from_function(g, 2, 2,
                                          [&](const Eigen::Vector3d& x) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd m = sym_fn(x);
    m += rot_fn(x) * rot90().cast<Complex>();
    return m;
  });
  Problem pn = build_conductivity(g, nonsym, zero_vec(g));
  CHECK(check_adjoint(pn, tight()) < 1e-8);
}

TEST_CASE("duality inverts the effective tensor") {
  Grid g = Grid::square(2, 32);
  auto sigma = TensorGrid::from_function(g, 2, 2, gktest::smooth_spd_coefficient(2, 51));
  Problem p = build_conductivity(g, sigma, zero_vec(g));
  EffectiveResponse direct = effective_tensor(p, tight());
  EffectiveResponse dual = effective_tensor(dualize(p), tight());
  CHECK((dual.L_star * direct.L_star - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("constant null operator shifts the effective tensor exactly") {
  Grid g = Grid::square(2, 32);
  PhaseMap board = PhaseMap::checkerboard(g);
  auto sigma = TensorGrid::from_phases(board, {2.0 * Eigen::MatrixXcd::Identity(2, 2),
                                               Eigen::MatrixXcd::Identity(2, 2)});
  Problem p = build_conductivity(g, sigma, zero_vec(g));
  Eigen::MatrixXcd rperp = rot90().cast<Complex>();
  const double c = 0.3;
  Problem shifted = null_t_shift(p, rperp, c);

  Eigen::VectorXcd e0(2);
  e0 << 1.0, 0.0;
  SolveResult a = solve_cell(p, e0, tight());
  SolveResult b = solve_cell(shifted, e0, tight());
  CHECK(norm(a.E - b.E) < 1e-10 * std::max(1.0, norm(a.E)));

  EffectiveResponse ha = effective_tensor(p, tight());
  EffectiveResponse hb = effective_tensor(shifted, tight());
  CHECK((hb.L_star - ha.L_star - c * rperp).norm() < 1e-10);
}

TEST_CASE("uniaxial pattern is preserved end to end") {
  Grid g = Grid::square(2, 32);
  auto sigma = TensorGrid::from_function(g, 2, 2,
                                         [](const Eigen::Vector3d& x) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 0) += 0.8 + 0.5 * std::cos(2.0 * std::numbers::pi * x[0]) *
                         std::cos(2.0 * std::numbers::pi * x[1]);
    return m;
  });
  Problem p = build_conductivity(g, sigma, zero_vec(g));
  EffectiveResponse hom = effective_tensor(p, tight());
  CHECK(std::abs(hom.L_star(1, 1) - 1.0) < 1e-9);
  CHECK(std::abs(hom.L_star(0, 1)) < 1e-8);
  CHECK(std::abs(hom.L_star(1, 0)) < 1e-8);
  CHECK(hom.L_star(0, 0).real() > 1.0);
}

TEST_CASE("eigenvalues sit between the harmonic and arithmetic means") {
  Grid g = Grid::square(2, 32);
  PhaseMap board = PhaseMap::checkerboard(g);
  const double s1 = 5.0, s2 = 1.0;
  auto sigma = TensorGrid::from_phases(board, {s1 * Eigen::MatrixXcd::Identity(2, 2),
                                               s2 * Eigen::MatrixXcd::Identity(2, 2)});
  Problem p = build_conductivity(g, sigma, zero_vec(g));
  EffectiveResponse hom = effective_tensor(p, tight());
  const double f1 = board.volume_fraction(1);
  const double harmonic = 1.0 / (f1 / s1 + (1 - f1) / s2);
  const double arithmetic = f1 * s1 + (1 - f1) * s2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
      0.5 * (hom.L_star + hom.L_star.adjoint()));
  CHECK(eig.eigenvalues().minCoeff() > harmonic - 1e-9);
  CHECK(eig.eigenvalues().maxCoeff() < arithmetic + 1e-9);
}

TEST_CASE("first-order perturbation of the effective tensor") {
  Grid g = Grid::square(2, 32);

  // homogeneous identity: the formula collapses to the perturbation itself
  Problem ph = build_conductivity(g, TensorGrid::constant(g, Eigen::MatrixXcd::Identity(2, 2)),
                                  zero_vec(g));
  const double delta = 0.7;
  auto dI = LocalOperator::constant(g, ph.layout,
                                    (delta * Eigen::MatrixXcd::Identity(2, 2)).eval());
  Eigen::MatrixXcd pert = perturb_effective(ph, dI, tight());
  CHECK((pert - delta * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-11);

  // inhomogeneous medium: antisymmetric (Hall-type) perturbation gives an
  // antisymmetric first-order change
  auto sigma = TensorGrid::from_function(g, 2, 2, gktest::smooth_spd_coefficient(2, 61));
  Problem p = build_conductivity(g, sigma, zero_vec(g));
  auto hall = LocalOperator::from_function(g, p.layout,
                                           [](const Eigen::Vector3d& x) -> Eigen::MatrixXcd {
    return (0.5 + 0.3 * std::cos(2.0 * std::numbers::pi * x[0])) * rot90().cast<Complex>();
  });
  Eigen::MatrixXcd dhall = perturb_effective(p, hall, tight());
  CHECK((dhall + dhall.transpose()).norm() < 1e-9);

  // finite differences confirm first-order accuracy
  auto dL_fn = gktest::smooth_spd_coefficient(2, 62, 0.0, 0.8);
  auto dL = LocalOperator::from_function(g, p.layout, dL_fn);
  Eigen::MatrixXcd predicted = perturb_effective(p, dL, tight());
  Eigen::MatrixXcd base = effective_tensor(p, tight()).L_star;
  for (double eps : {1e-3, 1e-4}) {
    auto pert_sigma = TensorGrid::from_function(g, 2, 2,
                                                [&](const Eigen::Vector3d& x) -> Eigen::MatrixXcd {
      Eigen::MatrixXcd base_m = gktest::smooth_spd_coefficient(2, 61)(x);
      return base_m + eps * dL_fn(x);
    });
    Eigen::MatrixXcd lstar_eps =
        effective_tensor(build_conductivity(g, pert_sigma, zero_vec(g)), tight()).L_star;
    Eigen::MatrixXcd fd = (lstar_eps - base) / eps;
    CHECK((fd - predicted).norm() <= 10.0 * eps * predicted.norm());
  }
}

TEST_CASE("coupled physics decouple block by block") {
  Grid g = Grid::square(2, 16);
  PhaseMap layers = PhaseMap::layers(g, 0, 0.5);
  Eigen::MatrixXcd s1 = 3.0 * Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Identity(2, 2);

  // thermoelectric with zero coupling restores two single-channel runs
  auto a = TensorGrid::from_phases(layers, {s1, s2});
  auto b = TensorGrid::from_phases(layers, {2.0 * s1, 0.5 * s2});
  auto zero = TensorGrid::constant(g, Eigen::MatrixXcd::Zero(2, 2));
  SupertensorLayout dual_layout(2, {Block{BlockKind::vector, "g1"},
                                    Block{BlockKind::vector, "g2"}});
  Problem coupled = build_thermoelectric(g, a, zero, zero, b,
                                         Field::zeros(g, dual_layout, Space::real));
  EffectiveResponse hom = effective_tensor(coupled, tight());
  EffectiveResponse single1 =
      effective_tensor(build_conductivity(g, a, zero_vec(g)), tight());
  EffectiveResponse single2 =
      effective_tensor(build_conductivity(g, b, zero_vec(g)), tight());
  CHECK((hom.L_star.topLeftCorner(2, 2) - single1.L_star).norm() < 1e-12);
  CHECK((hom.L_star.bottomRightCorner(2, 2) - single2.L_star).norm() < 1e-12);
  CHECK(hom.L_star.topRightCorner(2, 2).norm() < 1e-12);
}

TEST_CASE("product property: coupling appears where none exists pointwise") {
  // layered piezoelectric/piezomagnetic composite: both phases have zero
  // magnetoelectric coupling, the laminate does not
  Grid g = Grid::square(2, 16);
  PhaseMap layers = PhaseMap::layers(g, 0, 0.5);
  const int ms = 3, d = 2;

  Eigen::MatrixXcd S1 = isotropic_compliance(2, 2.0, 1.0);
  Eigen::MatrixXcd S2 = isotropic_compliance(2, 4.0, 1.5);
  Eigen::MatrixXcd D1 = Eigen::MatrixXcd::Zero(ms, d), D2 = Eigen::MatrixXcd::Zero(ms, d);
  D1 << 0.4, 0.0, 0.0, 0.3, 0.1, 0.0;  // piezoelectric phase
  Eigen::MatrixXcd Q1 = Eigen::MatrixXcd::Zero(ms, d), Q2 = Eigen::MatrixXcd::Zero(ms, d);
  Q2 << 0.0, 0.2, 0.3, 0.0, 0.0, 0.15;  // piezomagnetic phase
  Eigen::MatrixXcd eps1 = 2.0 * Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd eps2 = 1.0 * Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd mu1 = 1.0 * Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd mu2 = 3.0 * Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd beta0 = Eigen::MatrixXcd::Zero(d, d);

  auto block_tensor = [&](const Eigen::MatrixXcd& S, const Eigen::MatrixXcd& D,
                          const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& eps,
                          const Eigen::MatrixXcd& mu) {
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(ms + 2 * d, ms + 2 * d);
    L.block(0, 0, ms, ms) = S;
    L.block(0, ms, ms, d) = D;
    L.block(0, ms + d, ms, d) = Q;
    L.block(ms, 0, d, ms) = D.transpose();
    L.block(ms, ms, d, d) = eps;
    L.block(ms + d, 0, d, ms) = Q.transpose();
    L.block(ms + d, ms + d, d, d) = mu;
    return L;
  };
  Eigen::MatrixXcd L1 = block_tensor(S1, D1, Q1, eps1, mu1);
  Eigen::MatrixXcd L2 = block_tensor(S2, D2, Q2, eps2, mu2);

  SupertensorLayout layout(2, {Block{BlockKind::sym_matrix, "stress"},
                               Block{BlockKind::vector, "e"}, Block{BlockKind::vector, "h"}});
  Problem p = build_coupled_eme(
      g, TensorGrid::from_phases(layers, {S1, S2}),
      TensorGrid::from_phases(layers, {D1, D2}), TensorGrid::from_phases(layers, {Q1, Q2}),
      TensorGrid::from_phases(layers, {eps1, eps2}),
      TensorGrid::from_phases(layers, {beta0, beta0}),
      TensorGrid::from_phases(layers, {mu1, mu2}), Field::zeros(g, layout, Space::real));
  EffectiveResponse hom = effective_tensor(p, tight());

  Eigen::MatrixXcd oracle = laminate_effective(p.gamma, {1, 0, 0}, {L1, L2}, {0.5, 0.5});
  CHECK((hom.L_star - oracle).norm() < 1e-8);
  // the homogenized magnetoelectric block is nonzero
  Eigen::MatrixXcd beta_star = hom.L_star.block(ms, ms + d, d, d);
  CHECK(beta_star.norm() > 1e-4);
  CHECK((beta_star - oracle.block(ms, ms + d, d, d)).norm() < 1e-9);
}

TEST_CASE("effective tensors are deterministic across worker counts") {
  Grid g = Grid::square(2, 16);
  auto sigma = TensorGrid::from_function(g, 2, 2, gktest::smooth_spd_coefficient(2, 71));
  Problem p = build_conductivity(g, sigma, zero_vec(g));
  SolveOptions serial = tight();
  serial.threads = 1;
  SolveOptions parallel = tight();
  parallel.threads = 2;
  EffectiveResponse a = effective_tensor(p, serial);
  EffectiveResponse b = effective_tensor(p, parallel);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(a.L_star(i, j).real() == b.L_star(i, j).real());
      CHECK(a.L_star(i, j).imag() == b.L_star(i, j).imag());
    }
}

TEST_CASE("hermitianized transforms solve to the same fields") {
  Grid g = Grid::square(2, 32);
  auto er_fn = gktest::smooth_spd_coefficient(2, 81, 1.5, 0.6);
  auto ei_fn = gktest::smooth_spd_coefficient(2, 82, 2.0, 0.5);
  Field s = smooth_random_field(g, SupertensorLayout::vector(2), 83, 2, true);

  auto sigma = TensorGrid::from_function(g, 2, 2,
                                         [&](const Eigen::Vector3d& x) -> Eigen::MatrixXcd {
    return Complex(0, -1) * (er_fn(x) + Complex(0, 1) * ei_fn(x));
  });
  Problem direct = build_conductivity(g, sigma, s);
  SolveResult rd = solve_infinite(direct, tight());
  CHECK(rd.report.non_hermitian_path);

  Problem cg = build_dielectric_cg(g, TensorGrid::from_function(g, 2, 2, er_fn),
                                   TensorGrid::from_function(g, 2, 2, ei_fn), s);
  SolveResult rc = solve_infinite(cg, tight());
  CHECK(rc.report.method_used == "hermitian-cg");
  Field e_from_cg = extract_block(rc.E, 1);
  CHECK(norm(e_from_cg - rd.E) < 1e-8 * std::max(1.0, norm(rd.E)));
}

TEST_CASE("penalty scaling of the constrained divergence") {
  Grid g = Grid::square(2, 32);
  Field force = smooth_random_field(g, SupertensorLayout::vector(2), 91, 2, true);

  auto div_norm_graphene = [&](double lambda) {
    SupertensorLayout layout(2, {Block{BlockKind::full_matrix, "gradj"},
                                 Block{BlockKind::vector, "j"}});
    std::vector<Complex> svals(g.point_count() * 6, Complex(0, 0));
    for (std::size_t pt = 0; pt < g.point_count(); ++pt)
      for (int c = 0; c < 2; ++c) svals[pt * 6 + 4 + c] = force.value(pt, c);
    Problem p = build_graphene(g, 1.0, 0.3, lambda,
                               Field(g, layout, Space::real, std::move(svals)));
    SolveResult res = solve_infinite(p, tight());
    REQUIRE(res.report.converged);
    Field j = extract_block(res.E, 1);
    return std::make_pair(norm(fft_inverse(spectral_divergence(j))), norm(j));
  };

  auto [d4, n4] = div_norm_graphene(1e4);
  auto [d6, n6] = div_norm_graphene(1e6);
  CHECK(d4 / d6 > 100.0 / 3.0);
  CHECK(d4 / d6 < 300.0);
  CHECK(n6 > 1e-8);  // the current itself does not vanish
}
