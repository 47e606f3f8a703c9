#pragma once

// Sectioned key=value experiment configuration:
//
//   [measure]  family, M (comma list for scan-m), resolution, atoms
//   [grid]     half_extent, points (scalar or one value per axis)
//   [run]      p, max_iters, ratio_tol, cauchy_tol, recenter_every, seed,
//              init, density, path, check_iterates, weak_window
//   [output]   prefix
//
// '#' and ';' start comments. Unknown keys, malformed values and missing
// required keys raise ConfigError with the offending line.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/maximize.hpp"
#include "rlab/measure.hpp"

namespace rlab {

class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : InvalidArgument(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class Command { Norm, Maximize, ScanM, EndpointDemo, Diagnose };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

struct MeasureSpec {
  Family family = Family::Parabola1D;
  std::vector<double> truncations;  // one entry except for scan-m
  std::size_t resolution = 0;       // 0 = family default
  std::string atoms_path;           // custom family only
};

struct GridSpec {
  std::vector<double> half_extent;  // empty = family default
  std::vector<std::size_t> points;
};

struct ExperimentConfig {
  Command command = Command::Norm;
  MeasureSpec measure;
  GridSpec grid;
  RunConfig run;
  bool p_explicit = false;
  std::string density_path;
  std::string output_prefix = "restriction_lab";
  // Effective settings as sorted key=value lines, output prefix excluded;
  // hashed into CSV footers.
  std::string canonical;
};

ExperimentConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                                   Command command = Command::Norm);
ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides,
                              Command command = Command::Norm);

// Grid used when [grid] is not configured: Parabola1D 256^2 on (20, 20),
// Paraboloid2D 64^3 on (10, 10, 10), Cone3D 48^4 on (8, 8, 8, 8).
GridSpec default_grid(Family family, std::size_t dim);

}  // namespace rlab
