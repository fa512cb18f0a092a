#include "gammakit/homogenize.hpp"

#include <future>

namespace gammakit {

namespace {

std::vector<int> mean_basis(const Problem& p) {
  std::vector<int> basis;
  for (int c = 0; c < p.layout.components(); ++c)
    if (p.mean_mask[c]) basis.push_back(c);
  if (basis.empty()) throw ShapeError("problem admits no mean degrees of freedom");
  return basis;
}

}  // namespace

EffectiveResponse effective_tensor(const Problem& p, const SolveOptions& opts) {
  const std::vector<int> basis = mean_basis(p);
  const int m0 = static_cast<int>(basis.size());
  const int m = p.layout.components();

  Problem driven = p.with_source(Field::zeros(p.grid, p.layout, Space::real));

  EffectiveResponse out;
  out.L_star = Eigen::MatrixXcd::Zero(m0, m0);
  out.s_star = Eigen::VectorXcd::Zero(m0);
  out.basis = basis;
  const auto labels = p.layout.component_labels();
  for (int c : basis) out.basis_labels.push_back(labels[c]);
  out.reports.resize(m0);
  out.column_ok.assign(m0, false);

  auto solve_column = [&](int j) {
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(m);
    e0[basis[j]] = 1.0;
    return solve_cell(driven, e0, opts);
  };

  const int workers = std::max(1, opts.threads);
  for (int j0 = 0; j0 < m0; j0 += workers) {
    const int batch = std::min(workers, m0 - j0);
    std::vector<std::future<SolveResult>> futures;
    futures.reserve(batch);
    for (int b = 0; b < batch; ++b)
      futures.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred,
                                   solve_column, j0 + b));
    for (int b = 0; b < batch; ++b) {
      SolveResult res = futures[b].get();
      const int j = j0 + b;
      Eigen::VectorXcd j0_mean = average(res.J);
      for (int i = 0; i < m0; ++i) out.L_star(i, j) = j0_mean[basis[i]];
      out.column_ok[j] = res.report.converged;
      out.reports[j] = std::move(res.report);
    }
  }
  out.all_converged = true;
  for (bool ok : out.column_ok) out.all_converged = out.all_converged && ok;
  return out;
}

Eigen::VectorXcd effective_source(const Problem& p, const SolveOptions& opts,
                                  SolveReport* report) {
  const std::vector<int> basis = mean_basis(p);
  SolveResult res = solve_cell(p, Eigen::VectorXcd::Zero(p.layout.components()), opts);
  if (report) *report = res.report;
  Eigen::VectorXcd j0 = average(res.J);
  Eigen::VectorXcd s_star(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) s_star[i] = j0[basis[i]];
  return s_star;
}

Eigen::MatrixXcd response_tensor(const Problem& p, const PhaseMap& phases,
                                 const SolveOptions& opts) {
  if (phases.grid != p.grid) throw ShapeError("phase map grid mismatch");
  const std::vector<int> basis = mean_basis(p);
  const int m = p.layout.components();
  Eigen::MatrixXcd S_star(basis.size(), phases.phase_count * m);
  for (int phase = 1; phase <= phases.phase_count; ++phase) {
    const std::vector<double> mask = phases.indicator(phase);
    for (int c = 0; c < m; ++c) {
      std::vector<Complex> svals(p.grid.point_count() * m, Complex(0, 0));
      for (std::size_t pt = 0; pt < p.grid.point_count(); ++pt)
        svals[pt * m + c] = mask[pt];
      Problem driven = p.with_source(Field(p.grid, p.layout, Space::real, std::move(svals)));
      S_star.col((phase - 1) * m + c) = effective_source(driven, opts);
    }
  }
  return S_star;
}

double check_adjoint(const Problem& p, const SolveOptions& opts) {
  EffectiveResponse direct = effective_tensor(p, opts);
  EffectiveResponse adj = effective_tensor(p.with_operator(p.L.adjoint()), opts);
  return (adj.L_star - direct.L_star.adjoint()).norm();
}

Eigen::MatrixXcd perturb_effective(const Problem& p, const LocalOperator& L_prime,
                                   const SolveOptions& opts) {
  if (L_prime.grid() != p.grid || L_prime.layout() != p.layout)
    throw ShapeError("perturbation operator does not match problem");
  const std::vector<int> basis = mean_basis(p);
  const int m0 = static_cast<int>(basis.size());
  const int m = p.layout.components();

  Problem driven = p.with_source(Field::zeros(p.grid, p.layout, Space::real));
  auto fields_for = [&](const Problem& prob) {
    std::vector<Field> fields;
    fields.reserve(m0);
    for (int j = 0; j < m0; ++j) {
      Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(m);
      e0[basis[j]] = 1.0;
      fields.push_back(solve_cell(prob, e0, opts).E);
    }
    return fields;
  };

  std::vector<Field> primal = fields_for(driven);
  // Adjoint fields need a second solve with the adjoint operator unless the
  // operator is self-adjoint to round-off.
  std::vector<Field> adjoint;
  if (p.L.hermitian_defect() <= 1e-13)
    adjoint = primal;
  else
    adjoint = fields_for(driven.with_operator(p.L.adjoint()));

  Eigen::MatrixXcd d_star(m0, m0);
  for (int j = 0; j < m0; ++j) {
    Field lpe = apply_local(L_prime, primal[j]);
    for (int i = 0; i < m0; ++i) d_star(i, j) = inner_product(adjoint[i], lpe);
  }
  return d_star;
}

}  // namespace gammakit
