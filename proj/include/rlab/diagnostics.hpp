#pragma once

// Runtime checks mirroring the compactness argument for maximizing
// sequences: Brezis-Lieb splitting, the convexity dichotomy, the L^p
// interpolation inequality and the W^{1,infinity} bound on T h^.

#include <string>

#include "rlab/extension.hpp"
#include "rlab/measure.hpp"

namespace rlab {

enum class Dichotomy { MassOnLimit, MassEscaped, Undetermined };

std::string to_string(Dichotomy d);

inline constexpr double kDichotomyThreshold = 0.05;

struct DichotomyResult {
  Dichotomy verdict = Dichotomy::Undetermined;
  double delta = 0.0;  // (a^p + b^p)^{2/p} - (a^2 + b^2) <= 0
  double threshold = kDichotomyThreshold;
};

struct InterpolationResult {
  bool ok = true;
  double slack = 0.0;  // rhs - lhs
  double theta = 0.0;  // p_bar / p
};

struct GradientBoundResult {
  bool ok = true;
  double measured_ratio = 0.0;  // sup |grad T h^| / (sqrt(mass) sup|xi| |h^|)
};

struct DiagnosticsReport {
  double weak_mass = 0.0;
  double residual_norm = 0.0;
  DichotomyResult dichotomy;
  double bl_gap = 0.0;
  bool interpolation_checked = false;
  bool interpolation_ok = true;
  double interpolation_slack = 0.0;  // worst case over checked fields
  bool gradient_bound_ok = true;
  double gradient_ratio = 0.0;  // worst case over checked iterates
  double theta = 0.0;
  double p_bar = 0.0;
  std::size_t checked_iterates = 0;
};

// | ||T h_n - T h_bar||_p^p - (||T h_n||_p^p - ||T h_bar||_p^p) |
double brezis_lieb_gap(const DiscreteMeasure& measure, const SpaceGrid& grid, double p,
                       const Density& h_n, const Density& h_bar);
// Same, for fields already evaluated on the grid.
double brezis_lieb_gap(const Field& t_hn, const Field& t_hbar, const SpaceGrid& grid, double p);

// a = norm_residual, b = norm_limit; MassOnLimit if a < threshold,
// MassEscaped if b < threshold, Undetermined otherwise.
DichotomyResult dichotomy_check(double norm_limit, double norm_residual, double p,
                                double threshold = kDichotomyThreshold);

// Checks ||u||_p <= ||u||_{p_bar}^theta ||u||_inf^{1 - theta}, theta = p_bar / p.
InterpolationResult interpolation_check(const Field& field, const SpaceGrid& grid, double p,
                                        double p_bar);

// Evaluates grad T h^ exactly as T(i xi h^) on the grid.
GradientBoundResult gradient_bound_check(const DiscreteMeasure& measure, const Density& density,
                                         const SpaceGrid& grid);

// Intermediate exponent used for the interpolation check at exponent p:
// midway between max(2, p0) and p (p0 = 2 when the endpoint is unknown).
double interpolation_exponent(const DiscreteMeasure& measure, double p);

// Flat "key=value" lines, each prefixed by "# ".
std::string to_footer(const DiagnosticsReport& report);

}  // namespace rlab
