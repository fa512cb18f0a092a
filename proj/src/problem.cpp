#include "gammakit/problem.hpp"

#include <cmath>

namespace gammakit {

Problem::Problem(Grid grid_in, SupertensorLayout layout_in, ProjectionSpec gamma_in,
                 LocalOperator L_in, Field source_in, PhysicsMeta meta_in,
                 std::vector<bool> mean_mask_in)
    : grid(std::move(grid_in)),
      layout(std::move(layout_in)),
      gamma(std::move(gamma_in)),
      L(std::move(L_in)),
      source(std::move(source_in)),
      meta(std::move(meta_in)),
      mean_mask(std::move(mean_mask_in)) {
  if (gamma.layout() != layout) throw ShapeError("projection layout does not match problem");
  if (L.layout() != layout || L.grid() != grid) throw ShapeError("operator does not match problem");
  if (source.layout() != layout || source.grid() != grid)
    throw ShapeError("source does not match problem");
  if (mean_mask.empty()) mean_mask.assign(layout.components(), true);
  if (mean_mask.size() != static_cast<std::size_t>(layout.components()))
    throw ShapeError("mean mask has the wrong length");
}

Problem Problem::with_source(Field s) const {
  return Problem(grid, layout, gamma, L, std::move(s), meta, mean_mask);
}

Problem Problem::with_operator(LocalOperator op) const {
  return Problem(grid, layout, gamma, std::move(op), source, meta, mean_mask);
}

PhaseMap::PhaseMap(Grid grid_in, std::vector<std::uint8_t> labels_in, int phase_count_in)
    : grid(std::move(grid_in)), labels(std::move(labels_in)), phase_count(phase_count_in) {
  if (labels.size() != grid.point_count()) throw ShapeError("label array has the wrong size");
  for (auto l : labels)
    if (l < 1 || l > phase_count) throw ShapeError("phase label out of range");
}

double PhaseMap::volume_fraction(int phase) const {
  std::size_t count = 0;
  for (auto l : labels)
    if (l == phase) ++count;
  return static_cast<double>(count) / static_cast<double>(labels.size());
}

LocalOperator PhaseMap::assemble_operator(const SupertensorLayout& layout,
                                          const std::vector<Eigen::MatrixXcd>& tensors) const {
  if (tensors.size() != static_cast<std::size_t>(phase_count))
    throw ShapeError("need one tensor per phase");
  const int m = layout.components();
  std::vector<Complex> vals(grid.point_count() * m * m);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const auto& t = tensors[labels[p] - 1];
    if (t.rows() != m || t.cols() != m) throw ShapeError("phase tensor size mismatch");
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) vals[p * m * m + i + m * j] = t(i, j);
  }
  return LocalOperator(grid, layout, std::move(vals));
}

Field PhaseMap::assemble_source(const SupertensorLayout& layout,
                                const std::vector<Eigen::VectorXcd>& values) const {
  if (values.size() != static_cast<std::size_t>(phase_count))
    throw ShapeError("need one source value per phase");
  const int m = layout.components();
  std::vector<Complex> vals(grid.point_count() * m);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const auto& v = values[labels[p] - 1];
    if (v.size() != m) throw ShapeError("phase source size mismatch");
    for (int c = 0; c < m; ++c) vals[p * m + c] = v[c];
  }
  return Field(grid, layout, Space::real, std::move(vals));
}

std::vector<double> PhaseMap::indicator(int phase) const {
  std::vector<double> mask(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) mask[p] = labels[p] == phase ? 1.0 : 0.0;
  return mask;
}

PhaseMap PhaseMap::checkerboard(const Grid& grid) {
  std::vector<std::uint8_t> labels(grid.point_count());
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::Vector3d x = grid.coordinate(p);
    int parity = 0;
    for (int a = 0; a < 2; ++a) parity += x[a] < 0.5 * grid.length(a) ? 0 : 1;
    labels[p] = parity % 2 == 0 ? 1 : 2;
  }
  return PhaseMap(grid, std::move(labels), 2);
}

PhaseMap PhaseMap::disk(const Grid& grid, double radius_fraction) {
  std::vector<std::uint8_t> labels(grid.point_count());
  const double r = radius_fraction * grid.length(0);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::Vector3d x = grid.centered_coordinate(p);
    double rho2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) rho2 += x[a] * x[a];
    labels[p] = rho2 <= r * r ? 2 : 1;
  }
  return PhaseMap(grid, std::move(labels), 2);
}

PhaseMap PhaseMap::layers(const Grid& grid, int axis, double fraction) {
  std::vector<std::uint8_t> labels(grid.point_count());
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::Vector3d x = grid.coordinate(p);
    labels[p] = x[axis] < fraction * grid.length(axis) ? 1 : 2;
  }
  return PhaseMap(grid, std::move(labels), 2);
}

}  // namespace gammakit
