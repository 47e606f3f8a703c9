#pragma once

// Experiment drivers behind the restriction-lab subcommands. Each driver
// writes its CSV files under the configured output prefix and a short
// human-readable summary to `out`.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlab/config.hpp"
#include "rlab/extension.hpp"
#include "rlab/maximize.hpp"

namespace rlab {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitOutOfValidity = 4 };

// A request outside the range where the restriction estimate holds.
class OutOfValidity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Problem {
  DiscreteMeasure measure;
  SpaceGrid grid;
};

// Measure at truncation M (ignored for custom atom tables) and its grid.
Problem make_problem(const ExperimentConfig& cfg, double truncation);

// p used by the command when none is configured: the endpoint exponent for
// scan-m, endpoint + 2 otherwise (4 for custom measures).
double effective_p(const ExperimentConfig& cfg, const DiscreteMeasure& measure);

RunConfig effective_run(const ExperimentConfig& cfg, const DiscreteMeasure& measure, double p);

// "# config_hash=..." and "# version=..." lines.
std::string provenance_footer(const ExperimentConfig& cfg);

struct NormReport {
  Problem problem;
  SolverRun run;
  double norm = 0.0;
  std::string summary;
};

NormReport cmd_norm(const ExperimentConfig& cfg, std::ostream& out);
// norm plus the final density table and its field on the grid.
NormReport cmd_maximize(const ExperimentConfig& cfg, std::ostream& out);
// norm with per-iterate checks, printing the diagnostics block.
NormReport cmd_diagnose(const ExperimentConfig& cfg, std::ostream& out);

inline constexpr double kEndpointWitnessMargin = 1e-5;

struct ScanRow {
  double truncation = 0.0;
  double ratio = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double weak_mass = 0.0;
  double tail_fraction = 0.0;
  // Ratio of the previous row's final density after parabolic rescaling
  // onto this row's truncation (Parabola1D only). ratio exceeding it means
  // the previous truncation's maximizer is beaten at this one.
  std::optional<double> rescaled_previous;
  DiagnosticsReport diagnostics;
};

struct ScanReport {
  double p = 0.0;
  std::vector<ScanRow> rows;
  std::vector<Density> final_densities;
  bool strictly_increasing = true;
  bool gaps_decreasing = true;
  // Every row beats the rescaled previous iterate by kEndpointWitnessMargin.
  bool has_rescale_witness = false;
  bool rescale_witness = true;
  std::optional<double> extrapolated_limit;
};

// Aitken delta-squared estimate from the last three entries.
std::optional<double> aitken_limit(std::span<const double> values);

ScanReport cmd_scan_m(const ExperimentConfig& cfg, std::ostream& out);
void write_scan_csv(std::ostream& out, const ScanReport& report, const ExperimentConfig& cfg);

struct EndpointReport {
  double endpoint_p = 0.0;
  double above_p = 0.0;
  SolverRun endpoint;
  SolverRun above;
  // Ratio of the endpoint iterate moved to the 2M problem (parabolic
  // rescaling for Parabola1D, the M ratio otherwise) and the ratio reached
  // by re-optimizing there.
  double witness_before = 0.0;
  double witness_after = 0.0;
  bool not_attained = false;
  std::string verdict;
};

EndpointReport cmd_endpoint_demo(const ExperimentConfig& cfg, std::ostream& out);

// Dispatches on cfg.command and maps failures to exit codes.
int run_command(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace rlab
