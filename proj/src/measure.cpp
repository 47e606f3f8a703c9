#include "rlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlab/errors.hpp"
#include "rlab/summation.hpp"

namespace rlab {

struct MeasureAccess {
  static DiscreteMeasure make(std::size_t dim, Family family, double truncation,
                              std::size_t resolution, std::optional<double> endpoint,
                              std::vector<double> points, std::vector<double> weights) {
    DiscreteMeasure m;
    m.dim_ = dim;
    m.family_ = family;
    m.truncation_ = truncation;
    m.resolution_ = resolution;
    m.endpoint_exponent_ = endpoint;
    m.points_ = std::move(points);
    m.weights_ = std::move(weights);
    return m;
  }
};

namespace {

// Cell centre k of n cells on (-extent, extent); exactly symmetric about 0.
double cell_center(std::size_t k, std::size_t n, double extent) {
  return (static_cast<double>(2 * k + 1) - static_cast<double>(n)) * extent /
         static_cast<double>(n);
}

DiscreteMeasure build_parabola(double M, std::size_t n) {
  std::vector<double> points;
  std::vector<double> weights;
  points.reserve(2 * n);
  weights.reserve(n);
  const double width = 2.0 * M / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = cell_center(i, n, M);
    points.push_back(xi);
    points.push_back(xi * xi);
    weights.push_back(width);
  }
  return MeasureAccess::make(2, Family::Parabola1D, M, n, 6.0, std::move(points),
                             std::move(weights));
}

DiscreteMeasure build_paraboloid(double M, std::size_t n) {
  std::vector<double> points;
  std::vector<double> weights;
  const double width = 2.0 * M / static_cast<double>(n);
  const double area = width * width;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = cell_center(i, n, M);
    for (std::size_t j = 0; j < n; ++j) {
      const double b = cell_center(j, n, M);
      const double r2 = a * a + b * b;
      if (r2 > M * M) continue;
      points.insert(points.end(), {a, b, r2});
      weights.push_back(area);
    }
  }
  return MeasureAccess::make(3, Family::Paraboloid2D, M, n, 4.0, std::move(points),
                             std::move(weights));
}

DiscreteMeasure build_cone(double M, std::size_t n) {
  using std::numbers::pi;
  const std::size_t n_polar = n;
  const std::size_t n_azimuth = 2 * n;
  const double dr = M / static_cast<double>(n);
  const double dtheta = pi / static_cast<double>(n_polar);
  const double dphi = 2.0 * pi / static_cast<double>(n_azimuth);

  std::vector<double> points;
  std::vector<double> weights;
  points.reserve(4 * 2 * n * n_polar * n_azimuth);
  weights.reserve(2 * n * n_polar * n_azimuth);
  for (std::size_t ir = 0; ir < n; ++ir) {
    const double r = (static_cast<double>(ir) + 0.5) * dr;
    // |xi|^{-1/2} times the r^2 Jacobian, integrated by the midpoint rule.
    const double radial = r * std::sqrt(r) * dr;
    for (std::size_t it = 0; it < n_polar; ++it) {
      const double t0 = static_cast<double>(it) * dtheta;
      const double t1 = t0 + dtheta;
      const double theta = t0 + 0.5 * dtheta;
      const double solid = (std::cos(t0) - std::cos(t1)) * dphi;
      for (std::size_t ip = 0; ip < n_azimuth; ++ip) {
        const double phi = (static_cast<double>(ip) + 0.5) * dphi;
        const double x = r * std::sin(theta) * std::cos(phi);
        const double y = r * std::sin(theta) * std::sin(phi);
        const double z = r * std::cos(theta);
        for (double sheet : {1.0, -1.0}) {
          points.insert(points.end(), {x, y, z, sheet * r});
          weights.push_back(radial * solid);
        }
      }
    }
  }
  return MeasureAccess::make(4, Family::Cone3D, M, n, 4.0, std::move(points),
                             std::move(weights));
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::Parabola1D:
      return "parabola1d";
    case Family::Paraboloid2D:
      return "paraboloid2d";
    case Family::Cone3D:
      return "cone3d";
    case Family::Custom:
      return "custom";
  }
  return "custom";
}

Family family_from_string(const std::string& name) {
  if (name == "parabola1d") return Family::Parabola1D;
  if (name == "paraboloid2d") return Family::Paraboloid2D;
  if (name == "cone3d") return Family::Cone3D;
  if (name == "custom") return Family::Custom;
  throw InvalidArgument("unknown measure family '" + name + "'");
}

double DiscreteMeasure::max_point_norm() const noexcept {
  double best = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    double s = 0.0;
    for (double c : point(j)) s += c * c;
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

DiscreteMeasure build_family(Family family, double truncation, std::size_t resolution) {
  if (!(truncation > 0.0) || !std::isfinite(truncation))
    throw InvalidArgument("truncation M must be positive and finite");
  if (resolution == 0) throw InvalidArgument("resolution must be at least 1");
  switch (family) {
    case Family::Parabola1D:
      return build_parabola(truncation, resolution);
    case Family::Paraboloid2D:
      return build_paraboloid(truncation, resolution);
    case Family::Cone3D:
      return build_cone(truncation, resolution);
    case Family::Custom:
      break;
  }
  throw InvalidArgument("custom measures are built from an explicit atom list");
}

std::size_t default_resolution(Family family) {
  switch (family) {
    case Family::Parabola1D:
      return 128;
    case Family::Paraboloid2D:
      return 48;
    case Family::Cone3D:
      return 4;
    case Family::Custom:
      return 0;
  }
  return 0;
}

DiscreteMeasure build_custom(std::span<const Atom> atoms, std::size_t dim) {
  if (atoms.empty()) throw InvalidArgument("custom measure needs at least one atom");
  if (dim == 0) throw InvalidArgument("custom measure dimension must be at least 1");
  std::vector<double> points;
  std::vector<double> weights;
  points.reserve(atoms.size() * dim);
  weights.reserve(atoms.size());
  double radius = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const Atom& a = atoms[j];
    if (a.point.size() != dim)
      throw InvalidArgument("atom " + std::to_string(j) + " has dimension " +
                            std::to_string(a.point.size()) + ", expected " + std::to_string(dim));
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw InvalidArgument("atom " + std::to_string(j) + " has nonpositive weight");
    double s = 0.0;
    for (double c : a.point) {
      if (!std::isfinite(c)) throw InvalidArgument("atom " + std::to_string(j) + " is not finite");
      s += c * c;
      points.push_back(c);
    }
    radius = std::max(radius, std::sqrt(s));
    weights.push_back(a.weight);
  }
  return MeasureAccess::make(dim, Family::Custom, radius, 0, std::nullopt, std::move(points),
                             std::move(weights));
}

double total_mass(const DiscreteMeasure& measure) { return pairwise_sum(measure.weights()); }

double closed_form_mass(Family family, double M) {
  using std::numbers::pi;
  switch (family) {
    case Family::Parabola1D:
      return 2.0 * M;
    case Family::Paraboloid2D:
      return pi * M * M;
    case Family::Cone3D:
      return 16.0 * pi / 5.0 * std::pow(M, 2.5);
    case Family::Custom:
      break;
  }
  throw InvalidArgument("custom measures have no closed-form mass");
}

void require_matching(const DiscreteMeasure& measure, const Density& f) {
  if (f.size() != measure.size())
    throw InvalidArgument("density has " + std::to_string(f.size()) + " coefficients but measure has " +
                          std::to_string(measure.size()) + " atoms");
}

Complex l2_inner(const DiscreteMeasure& measure, const Density& f, const Density& g) {
  require_matching(measure, f);
  require_matching(measure, g);
  std::vector<Complex> terms(measure.size());
  for (std::size_t j = 0; j < terms.size(); ++j)
    terms[j] = measure.weight(j) * f.coeffs[j] * std::conj(g.coeffs[j]);
  return pairwise_sum(std::span<const Complex>(terms));
}

double l2_norm(const DiscreteMeasure& measure, const Density& f) {
  require_matching(measure, f);
  std::vector<double> terms(measure.size());
  for (std::size_t j = 0; j < terms.size(); ++j) terms[j] = measure.weight(j) * std::norm(f.coeffs[j]);
  return std::sqrt(pairwise_sum(std::span<const double>(terms)));
}

Density normalized(const DiscreteMeasure& measure, const Density& f) {
  const double n = l2_norm(measure, f);
  if (!(n > 0.0)) throw DegenerateInput("cannot normalize the zero density");
  Density out = f;
  for (auto& c : out.coeffs) c /= n;
  return out;
}

RescaledProblem parabolic_rescale(const DiscreteMeasure& measure, const Density& density,
                                  double lambda) {
  if (measure.family() != Family::Parabola1D)
    throw UnsupportedOperation("parabolic_rescale is defined for the Parabola1D family only");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("rescaling factor must be positive");
  require_matching(measure, density);

  std::vector<double> points;
  std::vector<double> weights;
  points.reserve(2 * measure.size());
  weights.reserve(measure.size());
  for (std::size_t j = 0; j < measure.size(); ++j) {
    const double xi = lambda * measure.point(j)[0];
    points.push_back(xi);
    points.push_back(xi * xi);
    weights.push_back(lambda * measure.weight(j));
  }
  RescaledProblem out{
      MeasureAccess::make(2, Family::Parabola1D, lambda * measure.truncation(),
                          measure.resolution(), measure.endpoint_exponent(), std::move(points),
                          std::move(weights)),
      density};
  const double amplitude = 1.0 / std::sqrt(lambda);
  for (auto& c : out.density.coeffs) c *= amplitude;
  return out;
}

}  // namespace rlab
