#pragma once

// The extension operator T h^(x) = sum_j w_j h^_j exp(i x . xi_j) evaluated
// on a uniform grid of cell centres, its discrete adjoint, and L^p norms.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rlab/measure.hpp"

namespace rlab {

class SpaceGrid {
 public:
  // Axis a covers [-half_extent[a], half_extent[a]] with points_per_axis[a]
  // cell centres. Requires n_a >= 2 and L_a > 0.
  SpaceGrid(std::vector<double> half_extent, std::vector<std::size_t> points_per_axis);

  static SpaceGrid cube(std::size_t dim, double half_extent, std::size_t points);

  std::size_t dim() const noexcept { return half_extent_.size(); }
  std::size_t size() const noexcept { return size_; }
  double half_extent(std::size_t axis) const { return half_extent_[axis]; }
  std::size_t points(std::size_t axis) const { return points_[axis]; }
  const std::vector<double>& half_extents() const noexcept { return half_extent_; }
  const std::vector<std::size_t>& points_per_axis() const noexcept { return points_; }
  double spacing(std::size_t axis) const;
  double cell_volume() const noexcept { return cell_volume_; }
  double total_volume() const noexcept { return cell_volume_ * static_cast<double>(size_); }

  // Cell centre k on an axis; exactly symmetric, and exactly 0 at the middle
  // point of an odd axis.
  double coordinate(std::size_t axis, std::size_t k) const;

  // Index of the point nearest the origin (the lower one for even counts).
  std::size_t center_index(std::size_t axis) const { return (points_[axis] - 1) / 2; }
  std::size_t center_flat_index() const;

  // Flat indices are row-major with the last axis fastest, which is also
  // lexicographic order of the multi-index.
  std::vector<std::size_t> multi_index(std::size_t flat) const;
  std::vector<double> point(std::size_t flat) const;

 private:
  std::vector<double> half_extent_;
  std::vector<std::size_t> points_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

struct Field {
  std::vector<Complex> values;

  std::size_t size() const noexcept { return values.size(); }
};

enum class EvaluationPath { Direct, Fft, Auto };

// True when the measure is a Parabola1D/Paraboloid2D lattice and every
// spatial axis satisfies dx * dxi = 2 pi / N for an integer N >= resolution.
// The last grid axis is time (the |xi|^2 coordinate) and is always direct.
bool fft_compatible(const DiscreteMeasure& measure, const SpaceGrid& grid);

// Builds a grid on which extend_fft applies: the spatial spacing is
// 2 pi / (fft_size * dxi), the last axis spans [-time_half_extent, time_half_extent].
SpaceGrid fft_compatible_grid(const DiscreteMeasure& measure, std::size_t fft_size,
                              std::size_t spatial_points, double time_half_extent,
                              std::size_t time_points);

// T_mu bound to one (measure, grid) pair with its phase tables or FFT plans
// precomputed. Apply and adjoint are exact adjoints of each other for the
// pairings l2_inner and grid_inner.
class ExtensionOperator {
 public:
  ExtensionOperator(const DiscreteMeasure& measure, const SpaceGrid& grid,
                    EvaluationPath path = EvaluationPath::Direct);
  ~ExtensionOperator();
  ExtensionOperator(ExtensionOperator&&) noexcept;
  ExtensionOperator& operator=(ExtensionOperator&&) noexcept;

  Field apply(const Density& density) const;
  Density adjoint(const Field& field) const;

  // Direct or Fft; Auto is resolved at construction.
  EvaluationPath path() const noexcept;
  const DiscreteMeasure& measure() const noexcept;
  const SpaceGrid& grid() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Field extend(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid);
Field extend_fft(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid);
Density restrict_adjoint(const DiscreteMeasure& measure, const Field& field, const SpaceGrid& grid);

// T h^ at a single point, summed in atom order.
Complex evaluate_at(const DiscreteMeasure& measure, const Density& density,
                    std::span<const double> x);

void require_matching(const SpaceGrid& grid, const Field& field);

// cell_volume * sum u conj(v)
Complex grid_inner(const Field& u, const Field& v, const SpaceGrid& grid);

struct SupNorm {
  double value = 0.0;
  std::size_t index = 0;  // smallest flat index attaining the maximum
};
SupNorm sup_norm(const Field& field);

// (cell_volume * sum |u|^p)^{1/p} for finite p, max |u| for p = infinity.
double lp_norm(const Field& field, const SpaceGrid& grid, double p);
// cell_volume * sum |u|^p, finite p only.
double lp_norm_pow(const Field& field, const SpaceGrid& grid, double p);

// Share of cell_volume * sum |u|^p carried by points with |x_a| > 0.9 L_a on
// some axis. For p = infinity the L^2 share is reported.
double tail_fraction(const Field& field, const SpaceGrid& grid, double p);

// h^_j -> exp(i shift . xi_j) h^_j, so that T(out)(x) = T(h^)(x + shift).
Density translate_modulate(const DiscreteMeasure& measure, const Density& density,
                           std::span<const double> shift);

}  // namespace rlab
