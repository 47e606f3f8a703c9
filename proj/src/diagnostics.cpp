#include "rlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/io.hpp"

namespace rlab {

std::string to_string(Dichotomy d) {
  switch (d) {
    case Dichotomy::MassOnLimit:
      return "mass_on_limit";
    case Dichotomy::MassEscaped:
      return "mass_escaped";
    case Dichotomy::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

double brezis_lieb_gap(const Field& t_hn, const Field& t_hbar, const SpaceGrid& grid, double p) {
  if (!(p > 2.0) || std::isinf(p)) throw InvalidArgument("Brezis-Lieb gap needs a finite p > 2");
  require_matching(grid, t_hn);
  require_matching(grid, t_hbar);
  Field diff;
  diff.values.resize(t_hn.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] = t_hn.values[i] - t_hbar.values[i];
  const double split = lp_norm_pow(t_hn, grid, p) - lp_norm_pow(t_hbar, grid, p);
  return std::abs(lp_norm_pow(diff, grid, p) - split);
}

double brezis_lieb_gap(const DiscreteMeasure& measure, const SpaceGrid& grid, double p,
                       const Density& h_n, const Density& h_bar) {
  const ExtensionOperator op(measure, grid);
  return brezis_lieb_gap(op.apply(h_n), op.apply(h_bar), grid, p);
}

DichotomyResult dichotomy_check(double norm_limit, double norm_residual, double p,
                                double threshold) {
  if (!(p > 2.0)) throw InvalidArgument("dichotomy check needs p > 2");
  if (!(norm_limit >= 0.0) || !(norm_residual >= 0.0))
    throw InvalidArgument("dichotomy check needs nonnegative norms");
  const double a = norm_residual;
  const double b = norm_limit;
  DichotomyResult out;
  out.threshold = threshold;
  if (std::isinf(p)) {
    out.delta = std::max(a, b) * std::max(a, b) - (a * a + b * b);
  } else if (a == 0.0 || b == 0.0) {
    out.delta = 0.0;
  } else {
    // Factor out the larger norm so a^p cannot underflow to zero prematurely.
    const double big = std::max(a, b);
    const double ra = a / big;
    const double rb = b / big;
    const double mixed = std::pow(std::pow(ra, p) + std::pow(rb, p), 2.0 / p);
    out.delta = big * big * (mixed - (ra * ra + rb * rb));
  }
  if (a < threshold)
    out.verdict = Dichotomy::MassOnLimit;
  else if (b < threshold)
    out.verdict = Dichotomy::MassEscaped;
  else
    out.verdict = Dichotomy::Undetermined;
  return out;
}

InterpolationResult interpolation_check(const Field& field, const SpaceGrid& grid, double p,
                                        double p_bar) {
  if (!(p_bar > 1.0) || !(p > p_bar) || std::isinf(p))
    throw InvalidArgument("interpolation check needs 1 < p_bar < p < infinity");
  InterpolationResult out;
  out.theta = p_bar / p;
  const double lhs = lp_norm(field, grid, p);
  const double rhs =
      std::pow(lp_norm(field, grid, p_bar), out.theta) * std::pow(sup_norm(field).value, 1.0 - out.theta);
  out.slack = rhs - lhs;
  out.ok = out.slack >= -1e-12;
  return out;
}

GradientBoundResult gradient_bound_check(const DiscreteMeasure& measure, const Density& density,
                                         const SpaceGrid& grid) {
  const double h_norm = l2_norm(measure, density);
  if (!(h_norm > 0.0)) throw InvalidArgument("gradient bound needs a nonzero density");
  const ExtensionOperator op(measure, grid);
  std::vector<double> grad_sq(grid.size(), 0.0);
  for (std::size_t a = 0; a < measure.dim(); ++a) {
    Density component = density;
    for (std::size_t j = 0; j < measure.size(); ++j)
      component.coeffs[j] *= Complex(0.0, measure.point(j)[a]);
    const Field g = op.apply(component);
    for (std::size_t i = 0; i < grid.size(); ++i) grad_sq[i] += std::norm(g.values[i]);
  }
  const double sup_grad = std::sqrt(*std::max_element(grad_sq.begin(), grad_sq.end()));
  const double bound = std::sqrt(total_mass(measure)) * measure.max_point_norm() * h_norm;
  GradientBoundResult out;
  out.measured_ratio = bound > 0.0 ? sup_grad / bound : 0.0;
  out.ok = out.measured_ratio <= 1.0 + 1e-12;
  return out;
}

double interpolation_exponent(const DiscreteMeasure& measure, double p) {
  const double low = std::max(2.0, measure.endpoint_exponent().value_or(2.0));
  if (p <= low) return 0.5 * (2.0 + p);
  return 0.5 * (low + p);
}

std::string to_footer(const DiagnosticsReport& r) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& value) { out << "# " << key << '=' << value << '\n'; };
  line("weak_mass", format_real(r.weak_mass));
  line("residual_norm", format_real(r.residual_norm));
  line("dichotomy", to_string(r.dichotomy.verdict));
  line("dichotomy_delta", format_real(r.dichotomy.delta));
  line("dichotomy_threshold", format_real(r.dichotomy.threshold));
  line("bl_gap", format_real(r.bl_gap));
  line("interpolation_checked", r.interpolation_checked ? "true" : "false");
  line("interpolation_ok", r.interpolation_ok ? "true" : "false");
  line("interpolation_slack", format_real(r.interpolation_slack));
  line("theta", format_real(r.theta));
  line("p_bar", format_real(r.p_bar));
  line("gradient_bound_ok", r.gradient_bound_ok ? "true" : "false");
  line("gradient_ratio", format_real(r.gradient_ratio));
  line("checked_iterates", std::to_string(r.checked_iterates));
  return out.str();
}

}  // namespace rlab
