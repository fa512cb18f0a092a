#include "gammakit/field.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace gammakit {

Field::Field(Grid grid, SupertensorLayout layout, Space space, std::vector<Complex> values)
    : grid_(std::move(grid)), layout_(std::move(layout)), space_(space), values_(std::move(values)) {
  if (grid_.dim() != layout_.dim()) throw ShapeError("grid and layout dimensions differ");
  if (values_.size() != grid_.point_count() * static_cast<std::size_t>(layout_.components()))
    throw ShapeError("field value array has the wrong size");
}

Field Field::zeros(const Grid& grid, const SupertensorLayout& layout, Space space) {
  return Field(grid, layout, space,
               std::vector<Complex>(grid.point_count() * layout.components(), Complex(0, 0)));
}

Field Field::constant(const Grid& grid, const SupertensorLayout& layout,
                      const Eigen::VectorXcd& value) {
  if (value.size() != layout.components()) throw ShapeError("constant value has wrong length");
  std::vector<Complex> vals(grid.point_count() * layout.components());
  const int m = layout.components();
  for (std::size_t p = 0; p < grid.point_count(); ++p)
    for (int c = 0; c < m; ++c) vals[p * m + c] = value[c];
  return Field(grid, layout, Space::real, std::move(vals));
}

Field Field::from_function(const Grid& grid, const SupertensorLayout& layout,
                           const std::function<Eigen::VectorXcd(const Eigen::Vector3d&)>& fn) {
  const int m = layout.components();
  std::vector<Complex> vals(grid.point_count() * m);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    Eigen::VectorXcd v = fn(grid.coordinate(p));
    if (v.size() != m) throw ShapeError("sampler returned wrong component count");
    for (int c = 0; c < m; ++c) vals[p * m + c] = v[c];
  }
  return Field(grid, layout, Space::real, std::move(vals));
}

Field Field::with_values(std::vector<Complex> values) const {
  return Field(grid_, layout_, space_, std::move(values));
}

namespace {
void check_compatible(const Field& a, const Field& b) {
  if (a.grid() != b.grid() || a.layout() != b.layout()) throw ShapeError("field shapes differ");
  if (a.space() != b.space()) throw SpaceError("fields live in different spaces");
}
}  // namespace

Field Field::operator+(const Field& other) const {
  check_compatible(*this, other);
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] + other.values_[i];
  return with_values(std::move(out));
}

Field Field::operator-(const Field& other) const {
  check_compatible(*this, other);
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] - other.values_[i];
  return with_values(std::move(out));
}

Field Field::scaled(Complex factor) const {
  std::vector<Complex> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * values_[i];
  return with_values(std::move(out));
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

Complex pairwise_sum(std::size_t count, const std::function<Complex(std::size_t)>& term) {
  struct Rec {
    const std::function<Complex(std::size_t)>& f;
    Complex run(std::size_t begin, std::size_t end) {
      if (end - begin <= 32) {
        Complex s(0, 0);
        for (std::size_t i = begin; i < end; ++i) s += f(i);
        return s;
      }
      const std::size_t mid = begin + (end - begin) / 2;
      return run(begin, mid) + run(mid, end);
    }
  };
  if (count == 0) return {0, 0};
  Rec rec{term};
  return rec.run(0, count);
}

Complex inner_product(const Field& a, const Field& b) {
  check_compatible(a, b);
  const int m = a.components();
  const Eigen::VectorXd& w = a.layout().weights();
  const auto& av = a.values();
  const auto& bv = b.values();
  Complex total = pairwise_sum(a.point_count(), [&](std::size_t p) {
    Complex s(0, 0);
    const std::size_t base = p * m;
    for (int c = 0; c < m; ++c) s += w[c] * std::conj(av[base + c]) * bv[base + c];
    return s;
  });
  if (a.space() == Space::real) total /= static_cast<double>(a.point_count());
  return total;
}

double norm(const Field& f) { return std::sqrt(std::abs(inner_product(f, f).real())); }

Eigen::VectorXcd average(const Field& f) {
  const int m = f.components();
  Eigen::VectorXcd mean(m);
  if (f.space() == Space::fourier) {
    for (int c = 0; c < m; ++c) mean[c] = f.value(0, c);  // flat 0 is k = 0
    return mean;
  }
  for (int c = 0; c < m; ++c) {
    mean[c] = pairwise_sum(f.point_count(), [&](std::size_t p) { return f.value(p, c); }) /
              static_cast<double>(f.point_count());
  }
  return mean;
}

// ---------------------------------------------------------------------------
// FFT engine: cached FFTW plans per (grid shape, component count).  Plans are
// created under a global mutex (the FFTW planner is not thread safe) and each
// thread keeps its own cache, so transforms never share buffers.
// ---------------------------------------------------------------------------
namespace {

struct FftEngine {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_complex* buffer = nullptr;
  std::size_t total = 0;

  FftEngine(const Grid& grid, int m) {
    static std::mutex planner_mutex;
    total = grid.point_count() * static_cast<std::size_t>(m);
    buffer = fftw_alloc_complex(total);
    // FFTW is row-major with the last listed dimension contiguous; our axis 0
    // is fastest, so axes are listed in reverse.
    int n[3];
    int rank = grid.dim();
    for (int a = 0; a < rank; ++a) n[a] = grid.samples(rank - 1 - a);
    std::lock_guard<std::mutex> lock(planner_mutex);
    forward = fftw_plan_many_dft(rank, n, m, buffer, nullptr, m, 1, buffer, nullptr, m, 1,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_many_dft(rank, n, m, buffer, nullptr, m, 1, buffer, nullptr, m, 1,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftEngine() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;
};

FftEngine& engine_for(const Grid& grid, int m) {
  struct Key {
    int dim, n0, n1, n2, m;
    auto operator<=>(const Key&) const = default;
  };
  thread_local std::map<Key, std::unique_ptr<FftEngine>> cache;
  Key key{grid.dim(), grid.samples(0), grid.samples(1), grid.samples(2), m};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftEngine>(grid, m)).first;
  return *it->second;
}

std::vector<Complex> run_fft(const Field& f, bool forward) {
  FftEngine& eng = engine_for(f.grid(), f.components());
  const auto& in = f.values();
  for (std::size_t i = 0; i < eng.total; ++i) {
    eng.buffer[i][0] = in[i].real();
    eng.buffer[i][1] = in[i].imag();
  }
  fftw_execute(forward ? eng.forward : eng.backward);
  std::vector<Complex> out(eng.total);
  const double scale = forward ? 1.0 / static_cast<double>(f.point_count()) : 1.0;
  for (std::size_t i = 0; i < eng.total; ++i)
    out[i] = Complex(eng.buffer[i][0] * scale, eng.buffer[i][1] * scale);
  return out;
}

}  // namespace

Field fft_forward(const Field& f) {
  if (f.space() != Space::real) throw SpaceError("fft_forward expects a real-space field");
  return Field(f.grid(), f.layout(), Space::fourier, run_fft(f, true));
}

Field fft_inverse(const Field& f) {
  if (f.space() != Space::fourier) throw SpaceError("fft_inverse expects a fourier-space field");
  return Field(f.grid(), f.layout(), Space::real, run_fft(f, false));
}

Field extract_block(const Field& f, std::size_t block) {
  const auto& layout = f.layout();
  if (block >= layout.blocks().size()) throw ShapeError("block index out of range");
  SupertensorLayout sub = layout.sub_layout(block);
  const int off = layout.block_offset(block);
  const int bm = sub.components();
  const int m = layout.components();
  std::vector<Complex> vals(f.point_count() * bm);
  for (std::size_t p = 0; p < f.point_count(); ++p)
    for (int c = 0; c < bm; ++c) vals[p * bm + c] = f.values()[p * m + off + c];
  return Field(f.grid(), sub, f.space(), std::move(vals));
}

Field replace_block(const Field& f, std::size_t block, const Field& part) {
  const auto& layout = f.layout();
  if (block >= layout.blocks().size()) throw ShapeError("block index out of range");
  if (part.grid() != f.grid() || part.space() != f.space())
    throw ShapeError("block replacement is incompatible");
  const int off = layout.block_offset(block);
  const int bm = part.components();
  if (bm != layout.block_components(block)) throw ShapeError("block size mismatch");
  const int m = layout.components();
  std::vector<Complex> vals = f.values();
  for (std::size_t p = 0; p < f.point_count(); ++p)
    for (int c = 0; c < bm; ++c) vals[p * m + off + c] = part.values()[p * bm + c];
  return Field(f.grid(), layout, f.space(), std::move(vals));
}

Field spectral_divergence(const Field& v) {
  if (v.layout().blocks().size() != 1 || v.layout().blocks()[0].kind != BlockKind::vector)
    throw ShapeError("spectral_divergence expects a single vector block");
  Field vh = v.space() == Space::fourier ? v : fft_forward(v);
  const Grid& g = vh.grid();
  const int d = g.dim();
  std::vector<Complex> out(g.point_count());
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    Eigen::Vector3d k = g.wavevector(p);
    Complex s(0, 0);
    for (int a = 0; a < d; ++a) s += Complex(0, k[a]) * vh.value(p, a);
    out[p] = s;
  }
  return Field(g, SupertensorLayout::scalar(d, "div"), Space::fourier, std::move(out));
}

Field spectral_divergence_matrix(const Field& mfield) {
  if (mfield.layout().blocks().size() != 1 ||
      mfield.layout().blocks()[0].kind != BlockKind::full_matrix)
    throw ShapeError("spectral_divergence_matrix expects a single full-matrix block");
  Field mh = mfield.space() == Space::fourier ? mfield : fft_forward(mfield);
  const Grid& g = mh.grid();
  const int d = g.dim();
  std::vector<Complex> out(g.point_count() * d);
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    Eigen::Vector3d k = g.wavevector(p);
    for (int j = 0; j < d; ++j) {
      Complex s(0, 0);
      for (int i = 0; i < d; ++i) s += Complex(0, k[i]) * mh.value(p, i + d * j);
      out[p * d + j] = s;
    }
  }
  return Field(g, SupertensorLayout::vector(d, "div"), Space::fourier, std::move(out));
}

}  // namespace gammakit
