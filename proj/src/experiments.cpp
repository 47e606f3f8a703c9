#include "rlab/experiments.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/io.hpp"

namespace rlab {

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  return out;
}

void write_run_file(const std::string& path, const SolverRun& run, const ExperimentConfig& cfg) {
  auto out = open_output(path);
  write_run_csv(out, run);
  out << provenance_footer(cfg);
}

double single_truncation(const ExperimentConfig& cfg) {
  return cfg.measure.truncations.empty() ? 0.0 : cfg.measure.truncations.front();
}

}  // namespace

std::string provenance_footer(const ExperimentConfig& cfg) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.canonical)));
  return std::string("# config_hash=") + hash + "\n# version=" + kVersion + "\n";
}

Problem make_problem(const ExperimentConfig& cfg, double truncation) {
  DiscreteMeasure measure =
      cfg.measure.family == Family::Custom
          ? read_atom_table_file(cfg.measure.atoms_path)
          : build_family(cfg.measure.family, truncation,
                         cfg.measure.resolution ? cfg.measure.resolution : default_resolution(cfg.measure.family));
  GridSpec spec = default_grid(measure.family(), measure.dim());
  if (!cfg.grid.half_extent.empty()) spec.half_extent = cfg.grid.half_extent;
  if (!cfg.grid.points.empty()) spec.points = cfg.grid.points;
  const std::size_t d = measure.dim();
  if (spec.half_extent.size() == 1) spec.half_extent.assign(d, spec.half_extent.front());
  if (spec.points.size() == 1) spec.points.assign(d, spec.points.front());
  if (spec.half_extent.size() != d || spec.points.size() != d)
    throw ConfigError("grid needs 1 or " + std::to_string(d) + " values per key", 0);
  try {
    return Problem{std::move(measure), SpaceGrid(spec.half_extent, spec.points)};
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), 0);
  }
}

double effective_p(const ExperimentConfig& cfg, const DiscreteMeasure& measure) {
  if (cfg.p_explicit) return cfg.run.p;
  const auto p0 = measure.endpoint_exponent();
  if (!p0) return 4.0;
  return cfg.command == Command::ScanM ? *p0 : *p0 + 2.0;
}

RunConfig effective_run(const ExperimentConfig& cfg, const DiscreteMeasure& measure, double p) {
  RunConfig run = cfg.run;
  run.p = p;
  if (run.init == InitKind::Provided) {
    run.initial = read_density_file(cfg.density_path);
    require_matching(measure, *run.initial);
  }
  return run;
}

NormReport cmd_norm(const ExperimentConfig& cfg, std::ostream& out) {
  NormReport report{make_problem(cfg, single_truncation(cfg)), {}, 0.0, {}};
  const DiscreteMeasure& mu = report.problem.measure;
  const RunConfig run = effective_run(cfg, mu, effective_p(cfg, mu));
  report.run = solve(mu, report.problem.grid, run);
  report.norm = report.run.final_ratio();

  std::ostringstream s;
  s << "norm=" << format_real(report.norm) << " p=" << format_real(run.p) << " family=" << to_string(mu.family())
    << " M=" << format_real(mu.truncation()) << " atoms=" << mu.size() << " iterations=" << report.run.iterations
    << " converged=" << (report.run.converged ? "true" : "false")
    << " tail_fraction=" << format_real(report.run.tail_fraction);
  report.summary = s.str();
  out << report.summary << '\n';
  write_run_file(cfg.output_prefix + "_run.csv", report.run, cfg);
  return report;
}

NormReport cmd_maximize(const ExperimentConfig& cfg, std::ostream& out) {
  NormReport report = cmd_norm(cfg, out);
  {
    auto file = open_output(cfg.output_prefix + "_density.txt");
    write_density(file, report.run.final_density);
  }
  auto file = open_output(cfg.output_prefix + "_field.csv");
  const Field u = extend(report.problem.measure, report.run.final_density, report.problem.grid);
  write_field_csv(file, u, report.problem.grid);
  return report;
}

NormReport cmd_diagnose(const ExperimentConfig& cfg, std::ostream& out) {
  ExperimentConfig checked = cfg;
  checked.run.check_iterates = true;
  NormReport report = cmd_norm(checked, out);
  out << to_footer(report.run.diagnostics);
  return report;
}

std::optional<double> aitken_limit(std::span<const double> v) {
  if (v.size() < 3) return std::nullopt;
  const double a = v[v.size() - 3];
  const double b = v[v.size() - 2];
  const double c = v[v.size() - 1];
  const double denom = (c - b) - (b - a);
  if (denom == 0.0) return std::nullopt;
  return c - (c - b) * (c - b) / denom;
}

ScanReport cmd_scan_m(const ExperimentConfig& cfg, std::ostream& out) {
  const auto& Ms = cfg.measure.truncations;
  if (Ms.empty()) throw InvalidArgument("scan-m needs at least one M");
  for (std::size_t i = 1; i < Ms.size(); ++i)
    if (!(Ms[i] > Ms[i - 1])) throw InvalidArgument("scan-m needs a strictly ascending M list");

  ScanReport report;
  std::optional<Problem> previous;
  for (double M : Ms) {
    Problem problem = make_problem(cfg, M);
    report.p = effective_p(cfg, problem.measure);
    const SolverRun run = solve(problem.measure, problem.grid, effective_run(cfg, problem.measure, report.p));
    ScanRow row{M, run.final_ratio(), run.iterations, run.converged, run.diagnostics.weak_mass, run.tail_fraction,
                std::nullopt, run.diagnostics};
    if (previous && problem.measure.family() == Family::Parabola1D) {
      const auto moved = parabolic_rescale(previous->measure, report.final_densities.back(), M / previous->measure.truncation());
      row.rescaled_previous = ratio(moved.measure, moved.density, problem.grid, report.p);
    }
    out << "M=" << format_real(M) << " ratio=" << format_real(row.ratio) << " iterations=" << row.iterations
        << " converged=" << (row.converged ? "true" : "false") << '\n';
    report.rows.push_back(row);
    report.final_densities.push_back(run.final_density);
    previous.emplace(std::move(problem));
  }

  std::vector<double> ratios;
  for (const auto& r : report.rows) ratios.push_back(r.ratio);
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (!(ratios[i] > ratios[i - 1])) report.strictly_increasing = false;
  for (std::size_t i = 2; i < ratios.size(); ++i)
    if (!(ratios[i] - ratios[i - 1] < ratios[i - 1] - ratios[i - 2])) report.gaps_decreasing = false;
  report.extrapolated_limit = aitken_limit(ratios);
  for (const auto& r : report.rows)
    if (r.rescaled_previous) {
      report.has_rescale_witness = true;
      if (!(r.ratio - *r.rescaled_previous > kEndpointWitnessMargin)) report.rescale_witness = false;
    }

  auto file = open_output(cfg.output_prefix + "_scan.csv");
  write_scan_csv(file, report, cfg);
  return report;
}

void write_scan_csv(std::ostream& out, const ScanReport& report, const ExperimentConfig& cfg) {
  out << "M,ratio,iterations,converged,weak_mass,tail_fraction,rescaled_previous_ratio\n";
  for (const auto& r : report.rows) {
    out << format_real(r.truncation) << ',' << format_real(r.ratio) << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << format_real(r.weak_mass) << ',' << format_real(r.tail_fraction)
        << ',';
    if (r.rescaled_previous) out << format_real(*r.rescaled_previous);
    out << '\n';
  }
  out << "# p=" << format_real(report.p) << '\n';
  if (report.rows.size() >= 2) out << "# strictly_increasing=" << (report.strictly_increasing ? "true" : "false") << '\n';
  if (report.rows.size() >= 3) out << "# gaps_decreasing=" << (report.gaps_decreasing ? "true" : "false") << '\n';
  if (report.has_rescale_witness)
    out << "# rescaled_iterates_improved=" << (report.rescale_witness ? "true" : "false") << '\n';
  if (report.extrapolated_limit) out << "# extrapolated_limit=" << format_real(*report.extrapolated_limit) << '\n';
  out << provenance_footer(cfg);
}

EndpointReport cmd_endpoint_demo(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.measure.family == Family::Custom)
    throw ConfigError("endpoint-demo needs a named family with a known endpoint exponent", 0);
  const double M = single_truncation(cfg);
  Problem problem = make_problem(cfg, M);
  const double p0 = *problem.measure.endpoint_exponent();
  if (cfg.p_explicit && cfg.run.p < p0)
    throw OutOfValidity("p=" + format_real(cfg.run.p) + " is below the endpoint exponent " + format_real(p0) +
                        " where the restriction estimate fails");

  EndpointReport report;
  report.endpoint_p = p0;
  report.above_p = cfg.p_explicit && cfg.run.p > p0 ? cfg.run.p : p0 + 2.0;
  report.endpoint = solve(problem.measure, problem.grid, effective_run(cfg, problem.measure, report.endpoint_p));
  report.above = solve(problem.measure, problem.grid, effective_run(cfg, problem.measure, report.above_p));

  // Move the endpoint iterate to the 2M problem and keep optimizing there.
  // A maximizer would already be optimal after the move; any further gain
  // certifies that the supremum is not attained at M.
  const Problem wider = make_problem(cfg, 2.0 * M);
  RunConfig resume = effective_run(cfg, wider.measure, report.endpoint_p);
  if (problem.measure.family() == Family::Parabola1D) {
    const auto moved = parabolic_rescale(problem.measure, report.endpoint.final_density, 2.0);
    report.witness_before = ratio(moved.measure, moved.density, wider.grid, report.endpoint_p);
    resume.init = InitKind::Provided;
    resume.initial = moved.density;
  } else {
    report.witness_before = report.endpoint.final_ratio();
  }
  report.witness_after = solve(wider.measure, wider.grid, resume).final_ratio();
  report.not_attained = report.witness_after - report.witness_before > kEndpointWitnessMargin;

  const double last_increment = report.above.increments.empty() ? 0.0 : report.above.increments.back();
  std::ostringstream v;
  v << "verdict: p=" << format_real(report.above_p) << " converged=" << (report.above.converged ? "true" : "false")
    << " final_increment=" << format_real(last_increment) << "; endpoint p=" << format_real(p0) << " ratio "
    << format_real(report.witness_before) << " moved to M=" << format_real(2.0 * M) << ", "
    << format_real(report.witness_after) << " after re-optimizing" << (report.not_attained ? " (endpoint maximizer not attained)" : " (inconclusive)");
  report.verdict = v.str();
  out << report.verdict << '\n';

  write_run_file(cfg.output_prefix + "_endpoint.csv", report.endpoint, cfg);
  write_run_file(cfg.output_prefix + "_above.csv", report.above, cfg);
  return report;
}

int run_command(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::Norm:
        cmd_norm(cfg, out);
        break;
      case Command::Maximize:
        cmd_maximize(cfg, out);
        break;
      case Command::Diagnose:
        cmd_diagnose(cfg, out);
        break;
      case Command::ScanM:
        cmd_scan_m(cfg, out);
        break;
      case Command::EndpointDemo:
        cmd_endpoint_demo(cfg, out);
        break;
    }
  } catch (const OutOfValidity& e) {
    err << "error: " << e.what() << '\n';
    return kExitOutOfValidity;
  } catch (const NumericFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedOperation& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace rlab
