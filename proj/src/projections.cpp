#include "gammakit/projections.hpp"

#include <cmath>
#include <random>

namespace gammakit {

namespace {
Eigen::VectorXd head(const Eigen::Vector3d& k, int dim) { return k.head(dim); }
}  // namespace

Eigen::MatrixXcd gamma_grad(const Eigen::Vector3d& k, int dim) {
  Eigen::VectorXd kd = head(k, dim);
  const double k2 = kd.squaredNorm();
  if (k2 == 0.0) return Eigen::MatrixXcd::Zero(dim, dim);
  return ((kd * kd.transpose()) / k2).cast<Complex>();
}

Eigen::MatrixXcd gamma_divfree(const Eigen::Vector3d& k, int dim) {
  Eigen::VectorXd kd = head(k, dim);
  if (kd.squaredNorm() == 0.0) return Eigen::MatrixXcd::Zero(dim, dim);
  return Eigen::MatrixXcd::Identity(dim, dim) - gamma_grad(k, dim);
}

Eigen::MatrixXcd gamma_elastic(const Eigen::Vector3d& k, int dim) {
  const int m = dim * (dim + 1) / 2;
  Eigen::VectorXd kd = head(k, dim);
  const double k2 = kd.squaredNorm();
  if (k2 == 0.0) return Eigen::MatrixXcd::Zero(m, m);
  return sym_operator_components(dim, [&](const Eigen::MatrixXcd& c) -> Eigen::MatrixXcd {
    Eigen::VectorXcd ck = c * kd.cast<Complex>();
    Complex kck = kd.cast<Complex>().dot(ck);  // k . C k (real k)
    Eigen::MatrixXcd out =
        (ck * kd.transpose().cast<Complex>() + kd.cast<Complex>() * ck.transpose()) / k2 -
        kck * (kd * kd.transpose()).cast<Complex>() / (k2 * k2);
    return out;
  });
}

Eigen::MatrixXcd gamma_z(const Eigen::Vector3d& k, int dim) {
  Eigen::VectorXd kd = head(k, dim);
  const double k2 = kd.squaredNorm();
  // u = (i k, 1); Z acts on the first index of the matrix block and jointly
  // on the vector block, one rank-1 projector per second index.
  Eigen::VectorXcd u(dim + 1);
  for (int i = 0; i < dim; ++i) u[i] = Complex(0, kd[i]);
  u[dim] = Complex(1, 0);
  Eigen::MatrixXcd zsmall = u * u.adjoint() / (1.0 + k2);

  const int m = dim * dim + dim;
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(m, m);
  auto row = [&](int slot, int j) { return slot < dim ? slot + dim * j : dim * dim + j; };
  for (int j = 0; j < dim; ++j)
    for (int a = 0; a <= dim; ++a)
      for (int b = 0; b <= dim; ++b) z(row(a, j), row(b, j)) = zsmall(a, b);
  return z;
}

Eigen::Matrix3d eta_cross(const Eigen::Vector3d& k) {
  Eigen::Matrix3d e;
  e << 0, -k[2], k[1], k[2], 0, -k[0], -k[1], k[0], 0;
  return e;
}

Eigen::MatrixXcd lambda_trace(int dim) {
  const int m = dim * dim;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) p(i + dim * i, j + dim * j) = 1.0 / dim;
  return p;
}

Eigen::MatrixXcd lambda_tracefree(int dim) {
  const int m = dim * dim;
  return Eigen::MatrixXcd::Identity(m, m) - lambda_trace(dim);
}

Eigen::MatrixXcd lambda_sym_tracefree(int dim) {
  const int m = dim * dim;
  Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      sym(i + dim * j, i + dim * j) += 0.5;
      sym(i + dim * j, j + dim * i) += 0.5;
    }
  return sym - lambda_trace(dim);
}

Eigen::Matrix2d rot90() {
  Eigen::Matrix2d r;
  r << 0, -1, 1, 0;
  return r;
}

// ---------------------------------------------------------------------------
// DSymbol
// ---------------------------------------------------------------------------

DSymbol::DSymbol(int dim, int field_components, int potential_components, std::vector<Term> terms)
    : dim_(dim), field_m_(field_components), potential_m_(potential_components),
      terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.coefficient.rows() != field_m_ || t.coefficient.cols() != potential_m_)
      throw ShapeError("symbol coefficient has the wrong shape");
  }
}

Eigen::MatrixXcd DSymbol::evaluate(const Eigen::Vector3d& k) const {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(field_m_, potential_m_);
  for (const auto& t : terms_) {
    Complex factor(1, 0);
    for (int a = 0; a < dim_; ++a)
      for (int e = 0; e < t.exponents[a]; ++e) factor *= Complex(0, k[a]);
    d += factor * t.coefficient;
  }
  return d;
}

Eigen::MatrixXcd DSymbol::evaluate_adjoint(const Eigen::Vector3d& k) const {
  return evaluate(k).adjoint();
}

DSymbol DSymbol::gradient(int dim) {
  std::vector<Term> terms;
  for (int a = 0; a < dim; ++a) {
    Term t;
    t.exponents = {0, 0, 0};
    t.exponents[a] = 1;
    t.coefficient = Eigen::MatrixXcd::Zero(dim, 1);
    t.coefficient(a, 0) = 1.0;
    terms.push_back(std::move(t));
  }
  return DSymbol(dim, dim, 1, std::move(terms));
}

DSymbol DSymbol::sym_gradient(int dim) {
  const int m = dim * (dim + 1) / 2;
  std::vector<Term> terms;
  for (int a = 0; a < dim; ++a) {
    Term t;
    t.exponents = {0, 0, 0};
    t.exponents[a] = 1;
    t.coefficient = Eigen::MatrixXcd::Zero(m, dim);
    for (int j = 0; j < dim; ++j) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(dim, dim);
      sym(a, j) += 0.5;
      sym(j, a) += 0.5;
      t.coefficient.col(j) = sym_to_components(sym);
    }
    terms.push_back(std::move(t));
  }
  return DSymbol(dim, m, dim, std::move(terms));
}

DSymbol DSymbol::curl(int dim) {
  std::vector<Term> terms;
  if (dim == 3) {
    // D(ik) a = i k x a
    for (int a = 0; a < 3; ++a) {
      Term t;
      t.exponents = {0, 0, 0};
      t.exponents[a] = 1;
      Eigen::Vector3d unit = Eigen::Vector3d::Zero();
      unit[a] = 1.0;
      t.coefficient = eta_cross(unit).cast<Complex>();
      terms.push_back(std::move(t));
    }
    return DSymbol(3, 3, 3, std::move(terms));
  }
  if (dim == 2) {
    // Scalar stream potential: D(ik) = i (k_y, -k_x)^T.
    Term ty;
    ty.exponents = {0, 1, 0};
    ty.coefficient = Eigen::MatrixXcd::Zero(2, 1);
    ty.coefficient(0, 0) = 1.0;
    Term tx;
    tx.exponents = {1, 0, 0};
    tx.coefficient = Eigen::MatrixXcd::Zero(2, 1);
    tx.coefficient(1, 0) = -1.0;
    return DSymbol(2, 2, 1, {std::move(ty), std::move(tx)});
  }
  throw UnsupportedDimensionError("curl symbol needs dim 2 or 3");
}

DSymbol DSymbol::block_diag(const std::vector<DSymbol>& parts) {
  if (parts.empty()) throw ShapeError("block_diag needs at least one symbol");
  const int dim = parts.front().dim();
  int fm = 0, pm = 0;
  for (const auto& p : parts) {
    if (p.dim() != dim) throw ShapeError("symbol dimensions differ");
    fm += p.field_components();
    pm += p.potential_components();
  }
  // Gather distinct exponent patterns so each term stays block-embedded.
  std::vector<Term> terms;
  int frow = 0, pcol = 0;
  for (const auto& p : parts) {
    for (const auto& t : p.terms()) {
      Term big;
      big.exponents = t.exponents;
      big.coefficient = Eigen::MatrixXcd::Zero(fm, pm);
      big.coefficient.block(frow, pcol, t.coefficient.rows(), t.coefficient.cols()) =
          t.coefficient;
      terms.push_back(std::move(big));
    }
    frow += p.field_components();
    pcol += p.potential_components();
  }
  return DSymbol(dim, fm, pm, std::move(terms));
}

Eigen::MatrixXcd gamma_from_D(const DSymbol& D, const Eigen::Vector3d& k) {
  Eigen::MatrixXcd d = D.evaluate(k);
  Eigen::MatrixXcd f = d.adjoint() * d;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(f);
  const double cutoff = 1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(cutoff > 0.0))
    throw SingularSymbolError("symbol normal matrix vanishes", k[0], k[1], k[2]);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(f.rows());
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    if (eig.eigenvalues()[i] > cutoff) inv[i] = 1.0 / eig.eigenvalues()[i];
  Eigen::MatrixXcd fpinv =
      eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().adjoint();
  return d * fpinv * d.adjoint();
}

// ---------------------------------------------------------------------------
// ProjectionSpec
// ---------------------------------------------------------------------------

std::string gamma_kind_name(GammaKind kind) {
  switch (kind) {
    case GammaKind::grad: return "grad";
    case GammaKind::divfree: return "divfree";
    case GammaKind::elastic: return "elastic";
    case GammaKind::zero: return "zero";
    case GammaKind::z: return "Z";
    case GammaKind::block: return "block";
    case GammaKind::from_d: return "from-D";
    case GammaKind::complement: return "complement";
  }
  return "?";
}

ProjectionSpec::ProjectionSpec(GammaKind kind, SupertensorLayout layout)
    : kind_(kind), layout_(std::move(layout)) {}

ProjectionSpec ProjectionSpec::grad(int dim) {
  return ProjectionSpec(GammaKind::grad, SupertensorLayout::vector(dim, "e"));
}
ProjectionSpec ProjectionSpec::divfree(int dim) {
  return ProjectionSpec(GammaKind::divfree, SupertensorLayout::vector(dim, "b"));
}
ProjectionSpec ProjectionSpec::elastic(int dim) {
  return ProjectionSpec(GammaKind::elastic, SupertensorLayout::sym_matrix(dim, "strain"));
}
ProjectionSpec ProjectionSpec::zero(const SupertensorLayout& layout) {
  return ProjectionSpec(GammaKind::zero, layout);
}
ProjectionSpec ProjectionSpec::z(int dim) {
  SupertensorLayout layout(dim, {Block{BlockKind::full_matrix, "gradw"},
                                 Block{BlockKind::vector, "w"}});
  return ProjectionSpec(GammaKind::z, layout);
}
ProjectionSpec ProjectionSpec::block(std::vector<ProjectionSpec> children) {
  std::vector<SupertensorLayout> parts;
  parts.reserve(children.size());
  for (const auto& c : children) parts.push_back(c.layout());
  ProjectionSpec spec(GammaKind::block, SupertensorLayout::concatenate(parts));
  spec.children_ = std::move(children);
  return spec;
}
ProjectionSpec ProjectionSpec::from_d(DSymbol symbol, const SupertensorLayout& layout) {
  if (symbol.field_components() != layout.components())
    throw ShapeError("symbol field size does not match layout");
  ProjectionSpec spec(GammaKind::from_d, layout);
  spec.symbol_ = std::make_shared<DSymbol>(std::move(symbol));
  return spec;
}
ProjectionSpec ProjectionSpec::complement(ProjectionSpec child) {
  if (child.kind() == GammaKind::complement) return child.children_.front();
  // grad and divfree are exact complements of each other
  if (child.kind() == GammaKind::grad) return divfree(child.layout().dim());
  if (child.kind() == GammaKind::divfree) return grad(child.layout().dim());
  ProjectionSpec spec(GammaKind::complement, child.layout());
  spec.children_.push_back(std::move(child));
  return spec;
}

const DSymbol& ProjectionSpec::symbol() const {
  if (!symbol_) throw ShapeError("projection spec carries no symbol");
  return *symbol_;
}

Eigen::MatrixXcd ProjectionSpec::evaluate(const Eigen::Vector3d& k) const {
  const int m = components();
  const int dim = layout_.dim();
  if (k.head(dim).squaredNorm() == 0.0) return Eigen::MatrixXcd::Zero(m, m);
  switch (kind_) {
    case GammaKind::grad: return gamma_grad(k, dim);
    case GammaKind::divfree: return gamma_divfree(k, dim);
    case GammaKind::elastic: return gamma_elastic(k, dim);
    case GammaKind::zero: return Eigen::MatrixXcd::Zero(m, m);
    case GammaKind::z: return gamma_z(k, dim);
    case GammaKind::from_d: return gamma_from_D(*symbol_, k);
    case GammaKind::complement:
      return Eigen::MatrixXcd::Identity(m, m) - children_.front().evaluate(k);
    case GammaKind::block: {
      Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
      int off = 0;
      for (const auto& c : children_) {
        const int cm = c.components();
        out.block(off, off, cm, cm) = c.evaluate(k);
        off += cm;
      }
      return out;
    }
  }
  return Eigen::MatrixXcd::Zero(m, m);
}

double ProjectionSpec::null_t_violation(const Eigen::MatrixXcd& T, int samples, unsigned seed,
                                        Eigen::Vector3d* worst_k) const {
  if (T.rows() != components() || T.cols() != components())
    throw ShapeError("null-T candidate has the wrong size");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::Vector3d k = random_wavevector(layout_.dim(), rng);
    Eigen::MatrixXcd g = evaluate(k);
    const double v = (g * T * g).norm();
    if (v > worst) {
      worst = v;
      if (worst_k) *worst_k = k;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

Eigen::Vector3d random_wavevector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> mag(std::log(0.25), std::log(4.0));
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  double n2 = 0.0;
  do {
    for (int a = 0; a < dim; ++a) k[a] = gauss(rng);
    n2 = k.squaredNorm();
  } while (n2 < 1e-8);
  return k / std::sqrt(n2) * std::exp(mag(rng));
}

ProjectionReport verify_projection_evaluator(
    const std::string& name, int dim,
    const std::function<Eigen::MatrixXcd(const Eigen::Vector3d&)>& evaluate, int samples,
    unsigned seed) {
  ProjectionReport report;
  report.name = name;
  report.samples = samples;
  report.min_rank = -1;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Eigen::Vector3d k = random_wavevector(dim, rng);
    Eigen::MatrixXcd g = evaluate(k);
    const double idem = (g * g - g).norm();
    const double herm = (g - g.adjoint()).norm();
    if (std::max(idem, herm) > std::max(report.max_idempotence_defect,
                                        report.max_hermitian_defect))
      report.worst_k = k;
    report.max_idempotence_defect = std::max(report.max_idempotence_defect, idem);
    report.max_hermitian_defect = std::max(report.max_hermitian_defect, herm);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (g + g.adjoint()));
    int rank = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
      if (eig.eigenvalues()[i] > 0.5) ++rank;
    if (report.min_rank < 0) report.min_rank = rank;
    report.min_rank = std::min(report.min_rank, rank);
    report.max_rank = std::max(report.max_rank, rank);
  }
  report.pass =
      report.max_idempotence_defect <= 1e-10 && report.max_hermitian_defect <= 1e-10;
  return report;
}

ProjectionReport verify_projection(const ProjectionSpec& spec, int samples, unsigned seed,
                                   const std::string& name) {
  return verify_projection_evaluator(
      name, spec.layout().dim(), [&](const Eigen::Vector3d& k) { return spec.evaluate(k); },
      samples, seed);
}

}  // namespace gammakit
