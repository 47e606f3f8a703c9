#pragma once

// Quadrature discretizations of compactly supported measures on frequency
// space and the L^2(dmu) geometry built on top of them.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rlab {

using Complex = std::complex<double>;

enum class Family { Parabola1D, Paraboloid2D, Cone3D, Custom };

std::string to_string(Family family);
// Accepts the lowercase names used in config files ("parabola1d", ...).
Family family_from_string(const std::string& name);

struct Atom {
  std::vector<double> point;
  double weight = 0.0;
};

// Immutable list of weighted atoms. Points are stored flat, dim() doubles
// per atom, in the construction order documented on build_family.
class DiscreteMeasure {
 public:
  std::size_t size() const noexcept { return weights_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  Family family() const noexcept { return family_; }
  double truncation() const noexcept { return truncation_; }
  // Per-axis cell count used by build_family; 0 for Custom measures.
  std::size_t resolution() const noexcept { return resolution_; }
  std::optional<double> endpoint_exponent() const noexcept { return endpoint_exponent_; }

  std::span<const double> point(std::size_t j) const {
    return std::span<const double>(points_).subspan(j * dim_, dim_);
  }
  double weight(std::size_t j) const { return weights_[j]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> points() const noexcept { return points_; }

  // Largest Euclidean norm of an atom point in the ambient space.
  double max_point_norm() const noexcept;

 private:
  friend struct MeasureAccess;

  std::size_t dim_ = 0;
  Family family_ = Family::Custom;
  double truncation_ = 0.0;
  std::size_t resolution_ = 0;
  std::optional<double> endpoint_exponent_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

// Coefficients of a density h^ at the atoms of one measure.
struct Density {
  std::vector<Complex> coeffs;

  std::size_t size() const noexcept { return coeffs.size(); }
};

/// Midpoint-rule discretization of one of the named families with truncation M.
///
/// Parabola1D: `resolution` cells on (-M, M); atoms (xi, xi^2) in R^2 with
///   weight = cell width (pushforward of Lebesgue measure).
/// Paraboloid2D: resolution x resolution tensor cells on [-M, M]^2, keeping
///   cells whose centre lies in the closed disk; atoms (xi, |xi|^2) in R^3.
/// Cone3D: polar cells, `resolution` radial x `resolution` polar x
///   2*resolution azimuthal; atoms (xi, +|xi|) and (xi, -|xi|) in R^4 with
///   weight r^{-1/2} times the exact polar cell volume at the radial midpoint.
///
/// Atoms are ordered lexicographically by parameter index: (i) for the
/// parabola, (i, j) for the paraboloid, (radial, polar, azimuth, sheet) for
/// the cone with the + sheet first.
DiscreteMeasure build_family(Family family, double truncation, std::size_t resolution);

// Default per-axis resolution used by the CLI when none is configured.
std::size_t default_resolution(Family family);

DiscreteMeasure build_custom(std::span<const Atom> atoms, std::size_t dim);

double total_mass(const DiscreteMeasure& measure);

// Closed-form mass of the continuum family: 2M, pi M^2, (16 pi / 5) M^{5/2}.
double closed_form_mass(Family family, double truncation);

// sum_j w_j f_j conj(g_j)
Complex l2_inner(const DiscreteMeasure& measure, const Density& f, const Density& g);
double l2_norm(const DiscreteMeasure& measure, const Density& f);

// Returns f / l2_norm(f); throws DegenerateInput for the zero density.
Density normalized(const DiscreteMeasure& measure, const Density& f);

// Throws InvalidArgument unless f has one coefficient per atom.
void require_matching(const DiscreteMeasure& measure, const Density& f);

struct RescaledProblem {
  DiscreteMeasure measure;
  Density density;
};

// Parabolic rescaling xi -> lambda xi of a Parabola1D problem: returns the
// measure truncated at lambda M (weights times lambda) and the density
// lambda^{-1/2} h^(xi / lambda). Both the L^2(dmu) norm and the L^p ratio
// over a correspondingly rescaled space-time domain are preserved.
RescaledProblem parabolic_rescale(const DiscreteMeasure& measure, const Density& density,
                                  double lambda);

}  // namespace rlab
