#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorfall/core.hpp"
#include "mirrorfall/io.hpp"
#include "mirrorfall/tdse.hpp"

namespace mirrorfall {

enum class Oracle { free_fall, image_plain, image_corrected, modulus, spectral_numeric, spectral_thin };

/// CLI spelling: free-fall, image-plain, image-corrected, modulus,
/// spectral-numeric, spectral-thin.
std::string oracle_name(Oracle oracle);
Oracle parse_oracle(std::string_view name);
std::vector<Oracle> all_oracles();
std::string oracle_description(Oracle oracle);

/// One solver run plus the analytic references it is compared against.
struct Scenario {
  std::string name;
  std::string species = "sodium";
  PacketSpec packet;
  PhysicalParams params;
  SolverConfig solver;
  double dz = 0.0;           // <= 0 selects default_spacing()
  double dt_factor = 1.0;    // multiplies the chosen step (fault injection)
  std::vector<Oracle> oracles;
};

/// A named group of runs that belong to one figure.
struct Preset {
  std::string name;
  std::string description;
  std::vector<Scenario> runs;
  bool slow = false;
};

std::vector<std::string> preset_names();
/// Accepts the full names and the short forms fig2 ... fig11. Unknown names
/// raise ConfigError listing what is available.
Preset preset(std::string_view name);

/// Config file: JSON object with optional keys preset, name, description,
/// species, packet {z0, sigma, q}, params {mass, gravity, gp_strength,
/// barrier_height, barrier_width, barrier_base}, solver {dt, dz, snapshots,
/// frame, norm_tolerance, energy_tolerance, check_interval}, oracles [...],
/// runs [ {name, ...same keys...} ]. Unknown keys are rejected.
Preset parse_config(const Json& doc);
Preset load_config(const std::filesystem::path& path);

/// Preset name or path to a config file.
Preset resolve_scenario(const std::string& preset_or_path);

struct Overrides {
  std::optional<double> dz;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<std::vector<double>> snapshots;
  std::optional<double> gp;
  std::optional<double> dt_factor;
};

/// Snapshots replace the list; t_max drops later snapshots and appends
/// itself when missing.
void apply_overrides(Preset& preset, const Overrides& overrides);

/// Starting field: mirror packet when the barrier is repulsive, plain
/// Gaussian otherwise.
WaveField initial_field(const Scenario& scenario, const Grid& grid);

struct OracleComparison {
  Oracle oracle = Oracle::free_fall;
  double time = 0.0;
  std::optional<Comparison> result;
  CompareMode mode = CompareMode::modulus;
  std::string note;  // reason for a skip, or a validity warning
};

struct ScenarioReport {
  std::string run_id;
  RunResult result;
  std::vector<OracleComparison> comparisons;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> files;
};

/// Runs the solver with the contract recorded rather than thrown, then writes
/// <id>_t<ms>.csv and <id>_t<ms>.svg per snapshot, <id>_diagnostics.json,
/// <id>_comparison.json and coefficient CSVs for spectral oracles.
/// DomainTooSmallError and step-guard AccuracyError still propagate.
ScenarioReport run_scenario(const Scenario& scenario, const std::string& run_id,
                            const std::filesystem::path& out_dir);

/// run_id for each run of a preset: the preset name alone for single runs.
std::string run_id(const Preset& preset, std::size_t index);

struct SweepRow {
  double value = 0.0;
  std::optional<double> epsilon;
  std::optional<double> visibility;
  std::size_t peak_count = 0;
  bool contract_ok = true;
  std::string error;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
  /// Visibility non-increasing in epsilon over the successful rows, with an
  /// undefined visibility counted as 0. Empty when epsilon does not vary.
  std::optional<bool> monotone;
};

std::vector<std::string> sweep_parameters();

/// Runs the scenario once per value (in parallel) in <out>/<parameter>_<value>/
/// and writes <out>/sweep.csv (value,epsilon,visibility,peak_count,status)
/// and <out>/sweep_summary.json. Failed runs are recorded per row.
SweepResult run_sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                      const std::filesystem::path& out_dir);

/// Visibility monotonicity check used by run_sweep.
std::optional<bool> visibility_monotone(const std::vector<SweepRow>& rows);

}  // namespace mirrorfall
