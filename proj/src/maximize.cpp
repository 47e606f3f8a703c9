#include "rlab/maximize.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <random>

#include "rlab/errors.hpp"
#include "rlab/io.hpp"

namespace rlab {

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::TruncatedGaussian:
      return "gaussian";
    case InitKind::RandomComplex:
      return "random";
    case InitKind::Provided:
      return "provided";
  }
  return "gaussian";
}

InitKind init_kind_from_string(const std::string& name) {
  if (name == "gaussian") return InitKind::TruncatedGaussian;
  if (name == "random") return InitKind::RandomComplex;
  if (name == "provided") return InitKind::Provided;
  throw InvalidArgument("unknown initialization '" + name + "'");
}

void RunConfig::validate() const {
  if (!(p > 2.0)) throw InvalidArgument("exponent p must exceed 2");
  if (!(ratio_tol > 0.0) || !(cauchy_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (recenter_every == 0) throw InvalidArgument("recenter_every must be at least 1");
  if (weak_window == 0) throw InvalidArgument("weak_window must be at least 1");
  if (init == InitKind::Provided && !initial) throw InvalidArgument("provided init needs a density");
}

double ratio(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid, double p) {
  const double norm = l2_norm(measure, density);
  if (!(norm > 0.0)) throw InvalidArgument("ratio of the zero density is undefined");
  return lp_norm(extend(measure, density, grid), grid, p) / norm;
}

namespace {

// T*(|u|^{p-2} u), normalized.
Density euler_lagrange(const ExtensionOperator& op, const Field& field, double p) {
  Field v = field;
  if (p != 2.0) {
    for (auto& c : v.values) {
      const double m = std::abs(c);
      c *= m == 0.0 ? 0.0 : std::pow(m, p - 2.0);
    }
  }
  const Density g = op.adjoint(v);
  const double n = l2_norm(op.measure(), g);
  if (!(n > 0.0)) throw DegenerateInput("power step produced the zero density");
  Density out = g;
  for (auto& c : out.coeffs) c /= n;
  return out;
}

bool all_finite(const Field& f) {
  for (const Complex& c : f.values)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace

Density power_step(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid,
                   double p) {
  if (!(p > 2.0) || std::isinf(p)) throw InvalidArgument("power step needs 2 < p < infinity");
  const ExtensionOperator op(measure, grid);
  return euler_lagrange(op, op.apply(density), p);
}

Density power_step_quadratic(const DiscreteMeasure& measure, const Density& density,
                             const SpaceGrid& grid) {
  const ExtensionOperator op(measure, grid);
  return euler_lagrange(op, op.apply(density), 2.0);
}

Recentered recenter(const Density& density, const Field& field, const DiscreteMeasure& measure,
                    const SpaceGrid& grid) {
  const SupNorm peak = sup_norm(field);
  if (!(peak.value > 0.0)) throw InvalidArgument("cannot recenter the zero density");
  const std::size_t center = grid.center_flat_index();
  Recentered out{density, std::vector<double>(grid.dim(), 0.0)};
  if (std::abs(field.values[center]) >= (1.0 - kRecenterTolerance) * peak.value) return out;
  const auto target = grid.multi_index(peak.index);
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const double cells = static_cast<double>(target[a]) - static_cast<double>(grid.center_index(a));
    out.shift[a] = cells * grid.spacing(a);
  }
  out.density = translate_modulate(measure, density, out.shift);
  return out;
}

Recentered recenter(const DiscreteMeasure& measure, const Density& density, const SpaceGrid& grid) {
  return recenter(density, extend(measure, density, grid), measure, grid);
}

Complex gauge_fix(Density& density) {
  std::size_t best = 0;
  double best_mod = -1.0;
  for (std::size_t j = 0; j < density.size(); ++j) {
    const double m = std::abs(density.coeffs[j]);
    if (m > best_mod) {
      best_mod = m;
      best = j;
    }
  }
  if (!(best_mod > 0.0)) return Complex(1.0, 0.0);
  const Complex factor = std::conj(density.coeffs[best]) / best_mod;
  for (auto& c : density.coeffs) c *= factor;
  // Exactly real and positive, independent of rounding in the product.
  density.coeffs[best] = Complex(best_mod, 0.0);
  return factor;
}

Density initial_density(const DiscreteMeasure& measure, const RunConfig& cfg) {
  Density h;
  switch (cfg.init) {
    case InitKind::Provided:
      if (!cfg.initial) throw InvalidArgument("provided init needs a density");
      require_matching(measure, *cfg.initial);
      h = *cfg.initial;
      break;
    case InitKind::RandomComplex: {
      std::mt19937_64 rng(cfg.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      h.coeffs.resize(measure.size());
      for (auto& c : h.coeffs) {
        const double re = normal(rng);
        const double im = normal(rng);
        c = Complex(re, im);
      }
      break;
    }
    case InitKind::TruncatedGaussian: {
      // Gaussian in the surface parameter: the graph coordinate is dropped
      // for the named families.
      const std::size_t params = measure.family() == Family::Custom ? measure.dim() : measure.dim() - 1;
      h.coeffs.resize(measure.size());
      for (std::size_t j = 0; j < measure.size(); ++j) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < params; ++a) r2 += measure.point(j)[a] * measure.point(j)[a];
        h.coeffs[j] = Complex(std::exp(-0.5 * r2), 0.0);
      }
      break;
    }
  }
  Density out = normalized(measure, h);
  gauge_fix(out);
  return out;
}

LinfMaximizer maximize_linf(const DiscreteMeasure& measure) {
  const double mass = total_mass(measure);
  LinfMaximizer out;
  out.norm = std::sqrt(mass);
  out.density.coeffs.assign(measure.size(), Complex(1.0 / out.norm, 0.0));
  return out;
}

namespace {

struct IterateChecks {
  bool enabled = false;
  double p = 0.0;
  double p_bar = 0.0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double worst_gradient = 0.0;
  std::size_t count = 0;

  void check(const DiscreteMeasure& measure, const SpaceGrid& grid, const Density& h, const Field& u) {
    if (!std::isinf(p)) worst_slack = std::min(worst_slack, interpolation_check(u, grid, p, p_bar).slack);
    worst_gradient = std::max(worst_gradient, gradient_bound_check(measure, h, grid).measured_ratio);
    ++count;
  }
};

void fill_report(SolverRun& run, const DiscreteMeasure& measure, const SpaceGrid& grid,
                 const ExtensionOperator& op, const std::deque<Density>& window, const Field& final_field,
                 IterateChecks& checks) {
  DiagnosticsReport& r = run.diagnostics;
  const double p = run.p;

  Density mean;
  mean.coeffs.assign(measure.size(), Complex(0.0, 0.0));
  for (const Density& d : window)
    for (std::size_t j = 0; j < measure.size(); ++j) mean.coeffs[j] += d.coeffs[j];
  for (auto& c : mean.coeffs) c /= static_cast<double>(window.size());

  Density residual = run.final_density;
  for (std::size_t j = 0; j < measure.size(); ++j) residual.coeffs[j] -= mean.coeffs[j];
  r.weak_mass = l2_norm(measure, mean);
  r.residual_norm = l2_norm(measure, residual);
  r.dichotomy = dichotomy_check(r.weak_mass, r.residual_norm, std::isinf(p) ? 4.0 : p);
  if (!std::isinf(p)) r.bl_gap = brezis_lieb_gap(final_field, op.apply(mean), grid, p);

  if (!checks.enabled) checks.check(measure, grid, run.final_density, final_field);
  r.interpolation_checked = !std::isinf(p);
  if (r.interpolation_checked) {
    r.p_bar = checks.p_bar;
    r.theta = checks.p_bar / p;
    r.interpolation_slack = checks.worst_slack;
    r.interpolation_ok = checks.worst_slack >= -1e-12;
  }
  r.gradient_ratio = checks.worst_gradient;
  r.gradient_bound_ok = checks.worst_gradient <= 1.0 + 1e-12;
  r.checked_iterates = checks.count;
}

}  // namespace

SolverRun solve(const DiscreteMeasure& measure, const SpaceGrid& grid, const RunConfig& cfg) {
  cfg.validate();
  if (measure.dim() != grid.dim()) throw InvalidArgument("grid and measure dimensions differ");

  SolverRun run;
  run.p = cfg.p;
  run.dim = grid.dim();
  const ExtensionOperator op(measure, grid, cfg.path);
  IterateChecks checks{cfg.check_iterates, cfg.p, std::isinf(cfg.p) ? 0.0 : interpolation_exponent(measure, cfg.p)};

  if (std::isinf(cfg.p)) {
    const LinfMaximizer best = maximize_linf(measure);
    run.final_density = best.density;
    const Field u = op.apply(best.density);
    run.ratio_history.push_back(best.norm);
    run.peak_history.push_back(sup_norm(u).value);
    run.tail_fraction = tail_fraction(u, grid, cfg.p);
    run.tail_history.push_back(run.tail_fraction);
    run.converged = true;
    if (checks.enabled) checks.check(measure, grid, best.density, u);
    fill_report(run, measure, grid, op, std::deque<Density>{best.density}, u, checks);
    return run;
  }

  Density h = initial_density(measure, cfg);
  Field u = op.apply(h);
  if (!all_finite(u)) throw NumericFailure("non-finite field value", 0);
  auto record = [&](const Density& d, const Field& f) {
    run.ratio_history.push_back(lp_norm(f, grid, cfg.p) / l2_norm(measure, d));
    run.peak_history.push_back(sup_norm(f).value);
    run.tail_history.push_back(tail_fraction(f, grid, cfg.p));
    if (checks.enabled) checks.check(measure, grid, d, f);
  };
  record(h, u);

  std::deque<Density> window{h};
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    Density g = euler_lagrange(op, u, cfg.p);
    Field v = op.apply(g);
    std::vector<double> shift(grid.dim(), 0.0);
    if (k % cfg.recenter_every == 0) {
      Recentered rc = recenter(g, v, measure, grid);
      if (std::any_of(rc.shift.begin(), rc.shift.end(), [](double s) { return s != 0.0; })) {
        // The window is not translation invariant; keep the shift only if
        // it does not cost ratio, so the iteration stays monotone.
        Field moved = op.apply(rc.density);
        if (lp_norm_pow(moved, grid, cfg.p) >= lp_norm_pow(v, grid, cfg.p)) {
          g = std::move(rc.density);
          v = std::move(moved);
          shift = std::move(rc.shift);
        }
      }
    }
    const Complex factor = gauge_fix(g);
    for (auto& c : v.values) c *= factor;
    if (!all_finite(v)) throw NumericFailure("non-finite field value", k);

    Density step = g;
    for (std::size_t j = 0; j < step.size(); ++j) step.coeffs[j] -= h.coeffs[j];
    const double increment = l2_norm(measure, step);

    record(g, v);
    run.shifts.push_back(std::move(shift));
    run.increments.push_back(increment);
    run.iterations = k;
    h = std::move(g);
    u = std::move(v);
    window.push_back(h);
    if (window.size() > cfg.weak_window) window.pop_front();

    const double prev = run.ratio_history[k - 1];
    const double cur = run.ratio_history[k];
    if (!std::isfinite(cur)) throw NumericFailure("non-finite ratio", k);
    if (std::abs(cur - prev) < cfg.ratio_tol * prev && increment < cfg.cauchy_tol) {
      run.converged = true;
      break;
    }
  }
  run.final_density = h;
  run.tail_fraction = run.tail_history.back();
  fill_report(run, measure, grid, op, window, u, checks);
  return run;
}

void write_run_csv(std::ostream& out, const SolverRun& run) {
  out << "iter,ratio,increment";
  for (std::size_t a = 0; a < run.dim; ++a) out << ",shift_" << a;
  out << ",tail_fraction,max_field\n";
  for (std::size_t k = 0; k < run.ratio_history.size(); ++k) {
    out << k << ',' << format_real(run.ratio_history[k]) << ',';
    if (k > 0) out << format_real(run.increments[k - 1]);
    for (std::size_t a = 0; a < run.dim; ++a) out << ',' << format_real(k > 0 ? run.shifts[k - 1][a] : 0.0);
    out << ',' << format_real(run.tail_history[k]) << ',' << format_real(run.peak_history[k]) << '\n';
  }
  out << "# p=" << format_real(run.p) << '\n';
  out << "# iterations=" << run.iterations << '\n';
  out << "# converged=" << (run.converged ? "true" : "false") << '\n';
  out << "# final_ratio=" << format_real(run.final_ratio()) << '\n';
  out << "# tail_fraction=" << format_real(run.tail_fraction) << '\n';
  out << to_footer(run.diagnostics);
}

}  // namespace rlab
