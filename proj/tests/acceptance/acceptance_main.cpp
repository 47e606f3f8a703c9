// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rlab/config.hpp"
#include "rlab/diagnostics.hpp"
#include "rlab/experiments.hpp"
#include "rlab/extension.hpp"
#include "rlab/io.hpp"
#include "rlab/maximize.hpp"
#include "rlab/measure.hpp"

using namespace rlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "rlab_acceptance";
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Worst interpolation slack and gradient ratio seen over all iterates of the
// runs of criteria 6 to 8.
struct IterateLedger {
  double worst_slack = kInf;
  double worst_gradient = 0.0;
  std::size_t iterates = 0;

  void add(const DiagnosticsReport& d) {
    worst_slack = std::min(worst_slack, d.interpolation_slack);
    worst_gradient = std::max(worst_gradient, d.gradient_ratio);
    iterates += d.checked_iterates;
  }
};

IterateLedger g_ledger;

// 1. Total masses against closed forms derived by hand.
Outcome masses() {
  Outcome o;
  const double pi = std::numbers::pi;
  for (double M : {1.0, 2.0}) {
    const double exact[] = {2 * M, pi * M * M, 2 * 4 * pi * std::pow(M, 2.5) / 2.5};
    const Family families[] = {Family::Parabola1D, Family::Paraboloid2D, Family::Cone3D};
    for (int k = 0; k < 3; ++k) {
      const double mass = total_mass(build_family(families[k], M, default_resolution(families[k])));
      const double err = std::abs(mass - exact[k]) / exact[k];
      o.require(err < 0.01, to_string(families[k]) + " M=" + fmt(M) + " relative error " + fmt(err));
      if (M == 1.0) o.detail += (o.detail.empty() ? "" : " ") + to_string(families[k]) + "=" + fmt(err);
    }
  }
  return o;
}

// 2. Discrete adjointness on 100 random instances.
Outcome adjointness() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-4.0, 4.0), weight(0.05, 3.0), extent(1.0, 12.0);
  std::uniform_int_distribution<int> atoms(1, 32), points(2, 32), dims(1, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = static_cast<std::size_t>(dims(rng));
    std::vector<Atom> list(static_cast<std::size_t>(atoms(rng)));
    for (auto& a : list) {
      for (std::size_t d = 0; d < dim; ++d) a.point.push_back(coord(rng));
      a.weight = weight(rng);
    }
    const auto mu = build_custom(list, dim);
    std::vector<double> half;
    std::vector<std::size_t> n;
    for (std::size_t d = 0; d < dim; ++d) {
      half.push_back(extent(rng));
      n.push_back(static_cast<std::size_t>(points(rng)));
    }
    const SpaceGrid grid(half, n);
    const auto h = oracle::random_density(mu.size(), 1000 + trial);
    const auto u = oracle::random_field(grid.size(), 5000 + trial);
    const Complex lhs = grid_inner(extend(mu, h, grid), u, grid);
    const Complex rhs = l2_inner(mu, h, restrict_adjoint(mu, u, grid));
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  o.require(worst <= 1e-10, "worst relative mismatch " + fmt(worst));
  o.detail = "worst relative mismatch " + fmt(worst);
  return o;
}

// 3. FFT path against direct summation.
Outcome fft_equivalence() {
  Outcome o;
  const auto mu = build_family(Family::Parabola1D, 1.0, 64);
  const auto grid = fft_compatible_grid(mu, 64, 64, 8.0, 64);
  o.require(fft_compatible(mu, grid), "grid not FFT compatible");
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto h = oracle::random_density(64, seed);
    const Field a = extend_fft(mu, h, grid);
    const Field b = extend(mu, h, grid);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      num += std::norm(a.values[i] - b.values[i]);
      den += std::norm(b.values[i]);
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  o.require(worst <= 1e-10, "relative L2 error " + fmt(worst));
  o.detail = "relative L2 error " + fmt(worst);
  return o;
}

// 4. The sup norm maximizer attains sqrt(mass) and random densities do not beat it.
Outcome linf_sharpness() {
  Outcome o;
  struct Case {
    Family family;
    std::size_t resolution;
    SpaceGrid grid;
  };
  const Case cases[] = {{Family::Parabola1D, 128, SpaceGrid::cube(2, 10.0, 33)},
                        {Family::Paraboloid2D, 24, SpaceGrid::cube(3, 6.0, 9)},
                        {Family::Cone3D, 3, SpaceGrid::cube(4, 4.0, 5)}};
  double worst_attain = 0.0, worst_excess = -kInf;
  for (const Case& c : cases) {
    const auto mu = build_family(c.family, 1.0, c.resolution);
    const auto best = maximize_linf(mu);
    const double root = std::sqrt(total_mass(mu));
    const SupNorm sup = sup_norm(extend(mu, best.density, c.grid));
    worst_attain = std::max({worst_attain, std::abs(best.norm - root), std::abs(sup.value - root)});
    o.require(sup.index == c.grid.center_flat_index(), to_string(c.family) + " maximum not at the origin");
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto h = oracle::random_density(mu.size(), seed);
      worst_excess = std::max(worst_excess, ratio(mu, h, c.grid, kInf) - best.norm);
    }
  }
  o.require(worst_attain <= 1e-10, "attainment error " + fmt(worst_attain));
  o.require(worst_excess <= 1e-12, "random density exceeded the bound by " + fmt(worst_excess));
  o.detail = "attainment error " + fmt(worst_attain) + ", best random margin " + fmt(-worst_excess);
  return o;
}

// 5. solve against exhaustive phase/amplitude search on 2 and 3 atoms.
Outcome small_oracle() {
  Outcome o;
  const SpaceGrid grid({4.0, 4.0}, {24, 24});
  const std::vector<std::vector<Atom>> measures{
      {{{0.0, 0.0}, 1.0}, {{1.0, 1.0}, 1.0}},
      {{{0.2, -0.4}, 0.5}, {{1.3, 0.6}, 1.5}},
      {{{0.0, 0.0}, 1.0}, {{1.0, 0.5}, 0.7}, {{-0.6, 1.2}, 1.2}},
      {{{0.5, 0.25}, 1.0}, {{-0.5, 0.25}, 1.0}, {{0.0, 0.0}, 1.0}},
  };
  double worst = 0.0;
  for (const auto& atoms : measures) {
    const auto mu = build_custom(atoms, 2);
    // Multistart: the Gaussian start plus three seeded random starts. The
    // real Gaussian start can stall on a local maximum.
    RunConfig cfg;
    cfg.p = 4.0;
    cfg.ratio_tol = 1e-13;
    cfg.cauchy_tol = 1e-9;
    cfg.max_iters = 20000;
    double best = 0.0;
    for (std::uint64_t start = 0; start < 4; ++start) {
      cfg.init = start == 0 ? InitKind::TruncatedGaussian : InitKind::RandomComplex;
      cfg.seed = start;
      const auto run = solve(mu, grid, cfg);
      o.require(run.converged, std::to_string(atoms.size()) + "-atom run did not converge");
      best = std::max(best, run.final_ratio());
    }
    const double ref = oracle::grid_search_norm(mu, grid, 4.0, atoms.size() == 2 ? 96 : 24);
    worst = std::max(worst, std::abs(best - ref) / ref);
  }
  o.require(worst <= 1e-4, "relative mismatch " + fmt(worst));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("worst relative mismatch ") + fmt(worst);
  return o;
}

// 6. Ratio histories never decrease.
Outcome monotone() {
  Outcome o;
  struct Case {
    Family family;
    std::size_t resolution;
    SpaceGrid grid;
  };
  const Case cases[] = {{Family::Parabola1D, 64, SpaceGrid({20.0, 20.0}, {128, 128})},
                        {Family::Paraboloid2D, 12, SpaceGrid::cube(3, 8.0, 20)},
                        {Family::Cone3D, 3, SpaceGrid::cube(4, 6.0, 10)}};
  double worst_drop = 0.0;
  std::size_t runs = 0;
  for (const Case& c : cases) {
    const auto mu = build_family(c.family, 1.0, c.resolution);
    for (double p : {4.0, 6.0, 8.0}) {
      RunConfig cfg;
      cfg.p = p;
      cfg.max_iters = 200;
      cfg.ratio_tol = 1e-300;  // run all 200 iterations
      cfg.check_iterates = true;
      const auto run = solve(mu, c.grid, cfg);
      g_ledger.add(run.diagnostics);
      ++runs;
      for (std::size_t k = 1; k < run.ratio_history.size(); ++k)
        worst_drop = std::max(worst_drop, run.ratio_history[k - 1] - run.ratio_history[k]);
    }
  }
  o.require(worst_drop <= 1e-12, "largest ratio decrease " + fmt(worst_drop));
  o.detail = std::to_string(runs) + " runs, largest decrease " + fmt(worst_drop);
  return o;
}

// 7. Above the endpoint the recentered iterates converge strongly.
Outcome existence_regime() {
  Outcome o;
  const auto mu = build_family(Family::Parabola1D, 1.0, 128);
  RunConfig cfg;
  cfg.p = 8.0;
  cfg.check_iterates = true;
  double ratios[2];
  const SpaceGrid grids[] = {SpaceGrid({24.0, 16.0}, {192, 192}), SpaceGrid({24.0, 16.0}, {256, 256})};
  for (int k = 0; k < 2; ++k) {
    const auto run = solve(mu, grids[k], cfg);
    g_ledger.add(run.diagnostics);
    ratios[k] = run.final_ratio();
    const std::string tag = "grid " + std::to_string(k) + ": ";
    o.require(run.converged, tag + "not converged");
    o.require(run.increments.back() < 1e-6, tag + "final increment " + fmt(run.increments.back()));
    o.require(run.diagnostics.weak_mass >= 0.99, tag + "weak mass " + fmt(run.diagnostics.weak_mass));
    o.require(run.tail_fraction < 1e-3, tag + "tail fraction " + fmt(run.tail_fraction));
    if (k == 0)
      o.detail = "increment " + fmt(run.increments.back()) + ", weak mass " + fmt(run.diagnostics.weak_mass) +
                 ", tail " + fmt(run.tail_fraction);
  }
  o.require(std::abs(ratios[0] - ratios[1]) <= 1e-3, "ratios differ by " + fmt(std::abs(ratios[0] - ratios[1])));
  o.detail += ", ratios " + fmt(ratios[0]) + " / " + fmt(ratios[1]);
  return o;
}

// The scan of criteria 8 and 10, run through the CLI driver.
const char* kScanConfig =
    "[measure]\n"
    "family = parabola1d\n"
    "M = 1, 2, 4, 8\n"
    "resolution = 256\n"
    "[grid]\n"
    "half_extent = 20, 5\n"
    "points = 256, 410\n"
    "[run]\n"
    "p = 6\n"
    "seed = 1\n"
    "check_iterates = true\n";

ScanReport run_scan(const std::string& prefix) {
  const auto cfg = parse_config_text(kScanConfig, {"--prefix=" + prefix}, Command::ScanM);
  std::ostringstream out;
  return cmd_scan_m(cfg, out);
}

ScanReport g_scan;

// 8. Endpoint non-attainment and scaling.
Outcome endpoint_scan() {
  Outcome o;
  g_scan = run_scan(scratch_dir() + "/scan_a");
  const auto& rows = g_scan.rows;
  std::string ratios;
  for (const auto& r : rows) {
    ratios += (ratios.empty() ? "" : ", ") + fmt(r.ratio);
    o.require(r.converged, "M=" + fmt(r.truncation) + " not converged");
    g_ledger.add(r.diagnostics);
  }
  o.require(g_scan.strictly_increasing, "ratios not strictly increasing");
  o.require(g_scan.gaps_decreasing, "gaps not decreasing");
  double worst_gain = kInf;
  for (const auto& r : rows)
    if (r.rescaled_previous) worst_gain = std::min(worst_gain, r.ratio - *r.rescaled_previous);
  o.require(worst_gain > 1e-5, "rescaled iterate gain " + fmt(worst_gain));
  const double closed = oracle::gaussian_strichartz_closed_form();
  const double quad = oracle::gaussian_strichartz_quadrature(400);
  o.require(std::abs(closed - quad) < 1e-9, "Gaussian oracle quadrature disagrees with closed form");
  const double limit = g_scan.extrapolated_limit.value_or(std::nan(""));
  o.require(std::abs(limit - quad) <= 1e-3, "extrapolated limit " + fmt(limit) + " vs oracle " + fmt(quad));
  o.detail = "R* = " + ratios + "; smallest rescale gain " + fmt(worst_gain) + "; limit " + fmt(limit) +
             " vs Gaussian " + fmt(quad);
  return o;
}

// 9. Diagnostics suite.
Outcome diagnostics_suite() {
  Outcome o;
  const auto mu = build_family(Family::Parabola1D, 4.0, 128);
  const SpaceGrid grid({20.0, 1.0}, {160, 8});
  Density bar;
  for (std::size_t j = 0; j < mu.size(); ++j) bar.coeffs.push_back(std::exp(-0.5 * mu.point(j)[0] * mu.point(j)[0]));
  bar = normalized(mu, bar);
  o.require(brezis_lieb_gap(mu, grid, 6.0, bar, bar) == 0.0, "gap nonzero for identical sequences");
  double prev = kInf;
  for (int s = 0; s <= 10; ++s) {
    const double shift[] = {1.0 * s, 0.0};
    const Density bump = translate_modulate(mu, bar, shift);
    Density hn = bar;
    for (std::size_t j = 0; j < mu.size(); ++j) hn.coeffs[j] += bump.coeffs[j];
    const double gap = brezis_lieb_gap(mu, grid, 6.0, hn, bar);
    o.require(gap < prev, "gap did not decrease at shift " + std::to_string(s));
    prev = gap;
  }

  std::size_t violations = 0;
  for (int i = 0; i < 100; ++i)
    for (int k = 0; k < 100; ++k) {
      const double delta = dichotomy_check(k / 99.0, i / 99.0, 6.0).delta;
      const bool axis = i == 0 || k == 0;
      if (delta > 0.0 || (axis ? delta != 0.0 : delta >= 0.0)) ++violations;
    }
  o.require(violations == 0, std::to_string(violations) + " dichotomy lattice violations");

  o.require(g_ledger.iterates > 0, "no iterates were checked");
  o.require(g_ledger.worst_slack >= -1e-12, "interpolation slack " + fmt(g_ledger.worst_slack));
  o.require(g_ledger.worst_gradient <= 1.0 + 1e-12, "gradient ratio " + fmt(g_ledger.worst_gradient));
  o.detail = std::to_string(g_ledger.iterates) + " iterates checked, worst slack " + fmt(g_ledger.worst_slack) +
             ", worst gradient ratio " + fmt(g_ledger.worst_gradient);
  return o;
}

// 10. Byte-identical reruns of the scan.
Outcome determinism() {
  Outcome o;
  run_scan(scratch_dir() + "/scan_b");
  const std::string a = slurp(scratch_dir() + "/scan_a_scan.csv");
  const std::string b = slurp(scratch_dir() + "/scan_b_scan.csv");
  o.require(!a.empty(), "first scan CSV missing");
  o.require(a == b, "scan CSVs differ");
  o.detail = std::to_string(a.size()) + " bytes compared";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "mass closed forms", masses},
      {2, "adjointness", adjointness},
      {3, "FFT path equivalence", fft_equivalence},
      {4, "p = infinity sharpness", linf_sharpness},
      {5, "small-instance oracle", small_oracle},
      {6, "monotone ratio", monotone},
      {7, "existence regime", existence_regime},
      {8, "endpoint non-attainment and scaling", endpoint_scan},
      {9, "diagnostics suite", diagnostics_suite},
      {10, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s (%.1f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures;
}
