#include "rlab/extension.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include "rlab/errors.hpp"
#include "rlab/parallel.hpp"
#include "rlab/summation.hpp"

namespace rlab {

// ---------------------------------------------------------------- SpaceGrid

SpaceGrid::SpaceGrid(std::vector<double> half_extent, std::vector<std::size_t> points_per_axis)
    : half_extent_(std::move(half_extent)), points_(std::move(points_per_axis)) {
  if (half_extent_.empty()) throw InvalidArgument("grid needs at least one axis");
  if (half_extent_.size() != points_.size())
    throw InvalidArgument("grid half extents and point counts differ in length");
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < points_.size(); ++a) {
    if (points_[a] < 2) throw InvalidArgument("grid axes need at least 2 points");
    if (!(half_extent_[a] > 0.0) || !std::isfinite(half_extent_[a]))
      throw InvalidArgument("grid half extents must be positive");
    size_ *= points_[a];
    cell_volume_ *= spacing(a);
  }
}

SpaceGrid SpaceGrid::cube(std::size_t dim, double half_extent, std::size_t points) {
  return SpaceGrid(std::vector<double>(dim, half_extent), std::vector<std::size_t>(dim, points));
}

double SpaceGrid::spacing(std::size_t axis) const {
  return 2.0 * half_extent_[axis] / static_cast<double>(points_[axis]);
}

double SpaceGrid::coordinate(std::size_t axis, std::size_t k) const {
  const double n = static_cast<double>(points_[axis]);
  return (2.0 * static_cast<double>(k) + 1.0 - n) * half_extent_[axis] / n;
}

std::size_t SpaceGrid::center_flat_index() const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) flat = flat * points_[a] + center_index(a);
  return flat;
}

std::vector<std::size_t> SpaceGrid::multi_index(std::size_t flat) const {
  std::vector<std::size_t> idx(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    idx[a] = flat % points_[a];
    flat /= points_[a];
  }
  return idx;
}

std::vector<double> SpaceGrid::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  std::vector<double> x(dim());
  for (std::size_t a = 0; a < dim(); ++a) x[a] = coordinate(a, idx[a]);
  return x;
}

// ---------------------------------------------------------------- helpers

namespace {

void require_dims(const DiscreteMeasure& measure, const SpaceGrid& grid) {
  if (measure.dim() != grid.dim())
    throw InvalidArgument("grid dimension " + std::to_string(grid.dim()) +
                          " does not match measure dimension " + std::to_string(measure.dim()));
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDestroy>;

struct LatticeInfo {
  std::size_t spatial_axes = 0;
  double origin = 0.0;   // first lattice centre
  double spacing = 0.0;  // dxi
  std::vector<std::size_t> fft_size;
};

// Returns the FFT sizes when compatible, empty optional otherwise.
std::optional<LatticeInfo> lattice_for(const DiscreteMeasure& measure, const SpaceGrid& grid) {
  if (measure.family() != Family::Parabola1D && measure.family() != Family::Paraboloid2D)
    return std::nullopt;
  if (measure.dim() != grid.dim()) return std::nullopt;
  LatticeInfo info;
  info.spatial_axes = measure.dim() - 1;
  const double M = measure.truncation();
  const double res = static_cast<double>(measure.resolution());
  info.spacing = 2.0 * M / res;
  info.origin = (1.0 - res) * M / res;
  for (std::size_t a = 0; a < info.spatial_axes; ++a) {
    const double n_real = 2.0 * std::numbers::pi / (grid.spacing(a) * info.spacing);
    const double n_round = std::round(n_real);
    if (std::abs(n_real - n_round) > 1e-9 * n_round) return std::nullopt;
    if (n_round < res) return std::nullopt;
    info.fft_size.push_back(static_cast<std::size_t>(n_round));
  }
  return info;
}

}  // namespace

bool fft_compatible(const DiscreteMeasure& measure, const SpaceGrid& grid) {
  return lattice_for(measure, grid).has_value();
}

SpaceGrid fft_compatible_grid(const DiscreteMeasure& measure, std::size_t fft_size,
                              std::size_t spatial_points, double time_half_extent,
                              std::size_t time_points) {
  if (measure.family() != Family::Parabola1D && measure.family() != Family::Paraboloid2D)
    throw UnsupportedOperation("FFT-compatible grids exist for parabola/paraboloid lattices only");
  if (fft_size < measure.resolution())
    throw InvalidArgument("FFT size must be at least the lattice resolution");
  const double dxi = 2.0 * measure.truncation() / static_cast<double>(measure.resolution());
  const double dx = 2.0 * std::numbers::pi / (static_cast<double>(fft_size) * dxi);
  const std::size_t spatial = measure.dim() - 1;
  std::vector<double> extents(spatial, 0.5 * dx * static_cast<double>(spatial_points));
  std::vector<std::size_t> counts(spatial, spatial_points);
  extents.push_back(time_half_extent);
  counts.push_back(time_points);
  return SpaceGrid(std::move(extents), std::move(counts));
}

// ---------------------------------------------------------------- operator

struct ExtensionOperator::Impl {
  DiscreteMeasure measure;
  SpaceGrid grid;
  EvaluationPath path = EvaluationPath::Direct;

  // Direct path: phase[a][k * J + j] = exp(i x_{a,k} xi_{j,a}); the last
  // axis is also kept transposed for the adjoint's inner loop.
  std::vector<std::vector<Complex>> phase;
  std::vector<Complex> last_phase_by_atom;
  std::size_t rows = 1;  // product of all but the last axis

  // FFT path.
  LatticeInfo lattice;
  std::vector<std::size_t> lattice_index;  // flat FFT-buffer slot of atom j
  std::vector<Complex> pre_phase;          // exp(i x_0 . xi_j), spatial part
  std::vector<Complex> time_phase;         // [t * J + j] = exp(i t tau_j)
  std::vector<std::vector<Complex>> post_phase;  // [a][k] = exp(i k dx_a xi_0)
  std::size_t fft_total = 0;
  FftwBuffer buffer;
  FftwPlan backward;
  FftwPlan forward;

  Impl(const DiscreteMeasure& m, const SpaceGrid& g) : measure(m), grid(g) {}

  void build_direct() {
    const std::size_t J = measure.size();
    const std::size_t d = grid.dim();
    phase.assign(d, {});
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t n = grid.points(a);
      phase[a].resize(n * J);
      for (std::size_t k = 0; k < n; ++k) {
        const double x = grid.coordinate(a, k);
        for (std::size_t j = 0; j < J; ++j) phase[a][k * J + j] = std::polar(1.0, x * measure.point(j)[a]);
      }
    }
    const std::size_t n_last = grid.points(d - 1);
    last_phase_by_atom.resize(n_last * J);
    for (std::size_t k = 0; k < n_last; ++k)
      for (std::size_t j = 0; j < J; ++j) last_phase_by_atom[j * n_last + k] = phase[d - 1][k * J + j];
    rows = grid.size() / n_last;
  }

  void build_fft(const LatticeInfo& info) {
    lattice = info;
    const std::size_t J = measure.size();
    const std::size_t s = lattice.spatial_axes;
    const std::size_t n_t = grid.points(s);

    fft_total = 1;
    for (auto n : lattice.fft_size) fft_total *= n;

    lattice_index.resize(J);
    pre_phase.resize(J);
    std::vector<char> taken(fft_total, 0);
    for (std::size_t j = 0; j < J; ++j) {
      std::size_t flat = 0;
      double pre = 0.0;
      for (std::size_t a = 0; a < s; ++a) {
        const double xi = measure.point(j)[a];
        const long long m = std::llround((xi - lattice.origin) / lattice.spacing);
        if (m < 0 || static_cast<std::size_t>(m) >= measure.resolution())
          throw UnsupportedOperation("atom off the lattice; FFT path unavailable");
        flat = flat * lattice.fft_size[a] + static_cast<std::size_t>(m);
        pre += grid.coordinate(a, 0) * xi;
      }
      if (taken[flat]++) throw UnsupportedOperation("two atoms share a lattice site");
      lattice_index[j] = flat;
      pre_phase[j] = std::polar(1.0, pre);
    }

    time_phase.resize(n_t * J);
    for (std::size_t t = 0; t < n_t; ++t) {
      const double time = grid.coordinate(s, t);
      for (std::size_t j = 0; j < J; ++j)
        time_phase[t * J + j] = std::polar(1.0, time * measure.point(j)[s]);
    }

    post_phase.assign(s, {});
    for (std::size_t a = 0; a < s; ++a) {
      const double dx = grid.spacing(a);
      post_phase[a].resize(grid.points(a));
      for (std::size_t k = 0; k < grid.points(a); ++k)
        post_phase[a][k] = std::polar(1.0, static_cast<double>(k) * dx * lattice.origin);
    }

    buffer.reset(fftw_alloc_complex(fft_total));
    std::vector<int> dims(lattice.fft_size.begin(), lattice.fft_size.end());
    std::lock_guard lock(fftw_planner_mutex());
    backward.reset(fftw_plan_dft(static_cast<int>(s), dims.data(), buffer.get(), buffer.get(),
                                 FFTW_BACKWARD, FFTW_ESTIMATE));
    forward.reset(fftw_plan_dft(static_cast<int>(s), dims.data(), buffer.get(), buffer.get(),
                                FFTW_FORWARD, FFTW_ESTIMATE));
  }

  Complex* fft_data() const { return reinterpret_cast<Complex*>(buffer.get()); }

  // Maps a spatial multi-index (grid flat index without the time axis) to
  // the FFT slot k mod N, and the combined post-phase.
  void spatial_slot(std::size_t spatial_flat, std::size_t& slot, Complex& post) const {
    const std::size_t s = lattice.spatial_axes;
    std::size_t idx[3] = {0, 0, 0};
    std::size_t rest = spatial_flat;
    for (std::size_t a = s; a-- > 0;) {
      idx[a] = rest % grid.points(a);
      rest /= grid.points(a);
    }
    slot = 0;
    post = Complex(1.0, 0.0);
    for (std::size_t a = 0; a < s; ++a) {
      slot = slot * lattice.fft_size[a] + idx[a] % lattice.fft_size[a];
      post *= post_phase[a][idx[a]];
    }
  }

  Field apply_direct(const Density& h) const {
    const std::size_t J = measure.size();
    const std::size_t d = grid.dim();
    const std::size_t n_last = grid.points(d - 1);
    std::vector<Complex> weighted(J);
    for (std::size_t j = 0; j < J; ++j) weighted[j] = measure.weight(j) * h.coeffs[j];

    Field out;
    out.values.resize(grid.size());
    parallel_for(rows, [&](std::size_t begin, std::size_t end) {
      std::vector<Complex> partial(J);
      std::vector<Complex> terms(J);
      std::vector<std::size_t> idx(d, 0);
      for (std::size_t row = begin; row < end; ++row) {
        std::size_t rest = row;
        for (std::size_t a = d - 1; a-- > 0;) {
          idx[a] = rest % grid.points(a);
          rest /= grid.points(a);
        }
        partial = weighted;
        for (std::size_t a = 0; a + 1 < d; ++a) {
          const Complex* ph = &phase[a][idx[a] * J];
          for (std::size_t j = 0; j < J; ++j) partial[j] *= ph[j];
        }
        for (std::size_t k = 0; k < n_last; ++k) {
          const Complex* ph = &phase[d - 1][k * J];
          for (std::size_t j = 0; j < J; ++j) terms[j] = partial[j] * ph[j];
          out.values[row * n_last + k] = pairwise_sum(std::span<const Complex>(terms));
        }
      }
    });
    return out;
  }

  Density adjoint_direct(const Field& u) const {
    const std::size_t J = measure.size();
    const std::size_t d = grid.dim();
    const std::size_t n_last = grid.points(d - 1);
    const double vol = grid.cell_volume();

    Density out;
    out.coeffs.resize(J);
    parallel_for(J, [&](std::size_t begin, std::size_t end) {
      std::vector<Complex> row_sums(rows);
      std::vector<Complex> terms(n_last);
      std::vector<std::size_t> idx(d, 0);
      for (std::size_t j = begin; j < end; ++j) {
        const Complex* last = &last_phase_by_atom[j * n_last];
        for (std::size_t row = 0; row < rows; ++row) {
          std::size_t rest = row;
          for (std::size_t a = d - 1; a-- > 0;) {
            idx[a] = rest % grid.points(a);
            rest /= grid.points(a);
          }
          Complex lead(1.0, 0.0);
          for (std::size_t a = 0; a + 1 < d; ++a) lead *= phase[a][idx[a] * J + j];
          const Complex* values = &u.values[row * n_last];
          for (std::size_t k = 0; k < n_last; ++k) terms[k] = values[k] * std::conj(last[k]);
          row_sums[row] = pairwise_sum(std::span<const Complex>(terms)) * std::conj(lead);
        }
        out.coeffs[j] = vol * pairwise_sum(std::span<const Complex>(row_sums));
      }
    });
    return out;
  }

  Field apply_fft(const Density& h) const {
    const std::size_t J = measure.size();
    const std::size_t s = lattice.spatial_axes;
    const std::size_t n_t = grid.points(s);
    const std::size_t n_space = grid.size() / n_t;
    Complex* buf = fft_data();

    std::vector<Complex> lifted(J);
    for (std::size_t j = 0; j < J; ++j) lifted[j] = measure.weight(j) * h.coeffs[j] * pre_phase[j];

    std::vector<std::size_t> slots(n_space);
    std::vector<Complex> posts(n_space);
    for (std::size_t q = 0; q < n_space; ++q) spatial_slot(q, slots[q], posts[q]);

    Field out;
    out.values.resize(grid.size());
    for (std::size_t t = 0; t < n_t; ++t) {
      std::fill(buf, buf + fft_total, Complex(0.0, 0.0));
      const Complex* tp = &time_phase[t * J];
      for (std::size_t j = 0; j < J; ++j) buf[lattice_index[j]] = lifted[j] * tp[j];
      fftw_execute_dft(backward.get(), buffer.get(), buffer.get());
      for (std::size_t q = 0; q < n_space; ++q) out.values[q * n_t + t] = buf[slots[q]] * posts[q];
    }
    return out;
  }

  Density adjoint_fft(const Field& u) const {
    const std::size_t J = measure.size();
    const std::size_t s = lattice.spatial_axes;
    const std::size_t n_t = grid.points(s);
    const std::size_t n_space = grid.size() / n_t;
    Complex* buf = fft_data();

    std::vector<std::size_t> slots(n_space);
    std::vector<Complex> posts(n_space);
    for (std::size_t q = 0; q < n_space; ++q) spatial_slot(q, slots[q], posts[q]);

    // slices[j * n_t + t]: contribution of time slice t to coefficient j.
    std::vector<Complex> slices(J * n_t);
    for (std::size_t t = 0; t < n_t; ++t) {
      std::fill(buf, buf + fft_total, Complex(0.0, 0.0));
      for (std::size_t q = 0; q < n_space; ++q) buf[slots[q]] += u.values[q * n_t + t] * std::conj(posts[q]);
      fftw_execute_dft(forward.get(), buffer.get(), buffer.get());
      const Complex* tp = &time_phase[t * J];
      for (std::size_t j = 0; j < J; ++j)
        slices[j * n_t + t] = buf[lattice_index[j]] * std::conj(tp[j]);
    }
    const double vol = grid.cell_volume();
    Density out;
    out.coeffs.resize(J);
    for (std::size_t j = 0; j < J; ++j)
      out.coeffs[j] =
          vol * std::conj(pre_phase[j]) * pairwise_sum(std::span<const Complex>(&slices[j * n_t], n_t));
    return out;
  }
};

ExtensionOperator::ExtensionOperator(const DiscreteMeasure& measure, const SpaceGrid& grid,
                                     EvaluationPath path)
    : impl_(std::make_unique<Impl>(measure, grid)) {
  require_dims(measure, grid);
  if (path == EvaluationPath::Direct) {
    impl_->build_direct();
    return;
  }
  const auto info = lattice_for(measure, grid);
  if (!info) {
    if (path == EvaluationPath::Fft)
      throw UnsupportedOperation(
          "FFT path needs a Parabola1D/Paraboloid2D lattice and a grid with dx * dxi = 2 pi / N");
    impl_->build_direct();
    return;
  }
  impl_->path = EvaluationPath::Fft;
  impl_->build_fft(*info);
}

ExtensionOperator::~ExtensionOperator() = default;
ExtensionOperator::ExtensionOperator(ExtensionOperator&&) noexcept = default;
ExtensionOperator& ExtensionOperator::operator=(ExtensionOperator&&) noexcept = default;

Field ExtensionOperator::apply(const Density& density) const {
  require_matching(impl_->measure, density);
  return impl_->path == EvaluationPath::Fft ? impl_->apply_fft(density) : impl_->apply_direct(density);
}

Density ExtensionOperator::adjoint(const Field& field) const {
  require_matching(impl_->grid, field);
  return impl_->path == EvaluationPath::Fft ? impl_->adjoint_fft(field) : impl_->adjoint_direct(field);
}

EvaluationPath ExtensionOperator::path() const noexcept { return impl_->path; }
const DiscreteMeasure& ExtensionOperator::measure() const noexcept { return impl_->measure; }
const SpaceGrid& ExtensionOperator::grid() const noexcept { return impl_->grid; }

// ---------------------------------------------------------------- free functions

Field extend(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid) {
  return ExtensionOperator(measure, grid, EvaluationPath::Direct).apply(density);
}

Field extend_fft(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid) {
  return ExtensionOperator(measure, grid, EvaluationPath::Fft).apply(density);
}

Density restrict_adjoint(const DiscreteMeasure& measure, const Field& field, const SpaceGrid& grid) {
  return ExtensionOperator(measure, grid, EvaluationPath::Direct).adjoint(field);
}

Complex evaluate_at(const DiscreteMeasure& measure, const Density& density,
                    std::span<const double> x) {
  require_matching(measure, density);
  if (x.size() != measure.dim()) throw InvalidArgument("evaluation point has the wrong dimension");
  std::vector<Complex> terms(measure.size());
  for (std::size_t j = 0; j < measure.size(); ++j) {
    double phase = 0.0;
    const auto xi = measure.point(j);
    for (std::size_t a = 0; a < x.size(); ++a) phase += x[a] * xi[a];
    terms[j] = measure.weight(j) * density.coeffs[j] * std::polar(1.0, phase);
  }
  return pairwise_sum(std::span<const Complex>(terms));
}

void require_matching(const SpaceGrid& grid, const Field& field) {
  if (field.size() != grid.size())
    throw InvalidArgument("field has " + std::to_string(field.size()) + " values but grid has " +
                          std::to_string(grid.size()) + " points");
}

Complex grid_inner(const Field& u, const Field& v, const SpaceGrid& grid) {
  require_matching(grid, u);
  require_matching(grid, v);
  std::vector<Complex> terms(u.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = u.values[i] * std::conj(v.values[i]);
  return grid.cell_volume() * pairwise_sum(std::span<const Complex>(terms));
}

SupNorm sup_norm(const Field& field) {
  SupNorm best;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double m = std::abs(field.values[i]);
    if (m > best.value) {
      best.value = m;
      best.index = i;
    }
  }
  return best;
}

namespace {

void require_exponent(double p) {
  if (!(p > 1.0)) throw InvalidArgument("L^p exponent must exceed 1");
}

// sum (|u_i| / scale)^p over the selected points, pairwise.
template <typename Select>
double scaled_power_sum(const Field& field, double p, double scale, Select&& keep) {
  std::vector<double> terms(field.size(), 0.0);
  for (std::size_t i = 0; i < field.size(); ++i)
    if (keep(i)) terms[i] = std::pow(std::abs(field.values[i]) / scale, p);
  return pairwise_sum(std::span<const double>(terms));
}

}  // namespace

double lp_norm_pow(const Field& field, const SpaceGrid& grid, double p) {
  require_exponent(p);
  if (std::isinf(p)) throw InvalidArgument("lp_norm_pow needs a finite exponent");
  require_matching(grid, field);
  const double scale = sup_norm(field).value;
  if (scale == 0.0) return 0.0;
  const double sum = scaled_power_sum(field, p, scale, [](std::size_t) { return true; });
  return grid.cell_volume() * sum * std::pow(scale, p);
}

double lp_norm(const Field& field, const SpaceGrid& grid, double p) {
  require_exponent(p);
  require_matching(grid, field);
  const double scale = sup_norm(field).value;
  if (std::isinf(p) || scale == 0.0) return scale;
  const double sum = scaled_power_sum(field, p, scale, [](std::size_t) { return true; });
  return scale * std::pow(grid.cell_volume() * sum, 1.0 / p);
}

double tail_fraction(const Field& field, const SpaceGrid& grid, double p) {
  require_exponent(p);
  require_matching(grid, field);
  const double q = std::isinf(p) ? 2.0 : p;
  const double scale = sup_norm(field).value;
  if (scale == 0.0) return 0.0;
  const std::size_t d = grid.dim();
  auto in_shell = [&](std::size_t flat) {
    std::size_t rest = flat;
    for (std::size_t a = d; a-- > 0;) {
      const std::size_t k = rest % grid.points(a);
      rest /= grid.points(a);
      if (std::abs(grid.coordinate(a, k)) > 0.9 * grid.half_extent(a)) return true;
    }
    return false;
  };
  const double total = scaled_power_sum(field, q, scale, [](std::size_t) { return true; });
  const double shell = scaled_power_sum(field, q, scale, in_shell);
  return shell / total;
}

Density translate_modulate(const DiscreteMeasure& measure, const Density& density,
                           std::span<const double> shift) {
  require_matching(measure, density);
  if (shift.size() != measure.dim()) throw InvalidArgument("shift has the wrong dimension");
  Density out = density;
  for (std::size_t j = 0; j < measure.size(); ++j) {
    double phase = 0.0;
    const auto xi = measure.point(j);
    for (std::size_t a = 0; a < shift.size(); ++a) phase += shift[a] * xi[a];
    if (phase != 0.0) out.coeffs[j] *= std::polar(1.0, phase);
  }
  return out;
}

}  // namespace rlab
