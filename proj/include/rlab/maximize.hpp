#pragma once

// Maximization of Phi(h^) = ||T h^||_{L^p} / ||h^||_{L^2(dmu)} by the
// nonlinear power iteration h^ <- T*(|T h^|^{p-2} T h^), normalized, with
// translation recentering between steps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rlab/diagnostics.hpp"
#include "rlab/extension.hpp"
#include "rlab/measure.hpp"

namespace rlab {

enum class InitKind { TruncatedGaussian, RandomComplex, Provided };

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

struct RunConfig {
  double p = 6.0;  // in (2, infinity]
  std::size_t max_iters = 2000;
  double ratio_tol = 1e-10;
  double cauchy_tol = 1e-7;
  std::size_t recenter_every = 1;
  std::uint64_t seed = 1;
  InitKind init = InitKind::TruncatedGaussian;
  std::optional<Density> initial;  // used when init == Provided
  EvaluationPath path = EvaluationPath::Auto;
  // Run the interpolation and gradient checks on every iterate rather than
  // only on the final one.
  bool check_iterates = false;
  // Number of trailing iterates averaged into the weak-limit candidate.
  std::size_t weak_window = 10;

  void validate() const;
};

struct SolverRun {
  double p = 0.0;
  std::size_t dim = 0;
  Density final_density;
  // Index k holds iterate k; iterate 0 is the normalized initial density.
  std::vector<double> ratio_history;
  std::vector<double> peak_history;  // max |T h^_k| on the grid
  std::vector<double> tail_history;
  // Index k - 1 holds the data of step k (k >= 1).
  std::vector<std::vector<double>> shifts;
  std::vector<double> increments;
  std::size_t iterations = 0;
  bool converged = false;
  double tail_fraction = 0.0;
  DiagnosticsReport diagnostics;

  double final_ratio() const { return ratio_history.back(); }
};

double ratio(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid, double p);

// One Euler-Lagrange step for 2 < p < infinity; h must have unit norm.
Density power_step(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid,
                   double p);

// The p = 2 step T*T h^ / |T*T h^|. Only meant for checking the iteration
// against a dense eigensolver.
Density power_step_quadratic(const DiscreteMeasure& measure, const Density& density,
                             const SpaceGrid& grid);

struct Recentered {
  Density density;
  std::vector<double> shift;
};

// Relative margin by which the grid maximum must beat the value at the
// central grid point before recenter moves anything.
inline constexpr double kRecenterTolerance = 1e-9;

// Moves the grid maximum of |T h^| onto the central grid point (the origin
// for odd point counts) by translate_modulate. The shift is a whole number
// of grid cells on every axis.
Recentered recenter(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid);
Recentered recenter(const Density& density, const Field& field, const DiscreteMeasure& measure,
                    const SpaceGrid& grid);

// Rotates the largest-modulus coefficient onto the positive real axis and
// returns the unimodular factor applied.
Complex gauge_fix(Density& density);

Density initial_density(const DiscreteMeasure& measure, const RunConfig& cfg);

struct LinfMaximizer {
  Density density;
  double norm = 0.0;
};

// h^ = 1 / sqrt(mass) attains ||T||_{L^2 -> L^inf} = sqrt(mass) at x = 0.
LinfMaximizer maximize_linf(const DiscreteMeasure& measure);

SolverRun solve(const DiscreteMeasure& measure, const SpaceGrid& grid, const RunConfig& cfg);

// Columns iter,ratio,increment,shift_0..,tail_fraction,max_field followed by
// the diagnostics footer.
void write_run_csv(std::ostream& out, const SolverRun& run);

}  // namespace rlab
