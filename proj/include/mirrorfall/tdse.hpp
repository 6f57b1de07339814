#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mirrorfall/analysis.hpp"
#include "mirrorfall/core.hpp"
#include "mirrorfall/errors.hpp"

namespace mirrorfall {

/// Coordinates the solver works in. `free_fall` integrates in y = z + g t^2/2,
/// where gravity drops out and the mirror accelerates upward; snapshots are
/// always returned in laboratory coordinates.
enum class Frame { lab, free_fall };

struct SolverConfig {
  double dt = 0.0;  // <= 0 selects default_time_step()
  std::vector<double> snapshot_times;
  Frame frame = Frame::lab;
  /// Throw AccuracyError on drift beyond tolerance. When false the drift is
  /// only recorded in RunResult::contract_ok.
  bool enforce_contract = true;
  double norm_tolerance = 2e-3;
  double energy_tolerance = 2e-2;
  std::size_t check_interval = 50;  // steps between drift/edge checks
  double edge_tolerance = 1e-5;
  std::size_t edge_nodes = 10;

  /// Throws ConfigError for unsorted or negative snapshot times.
  void validate() const;
};

struct RunResult {
  std::vector<WaveField> snapshots;  // lab frame, aligned with snapshot_times
  std::vector<DiagnosticsReport> diagnostics;
  DriftHistory drift;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
  bool contract_ok = true;
  double dt = 0.0;
  std::size_t steps = 0;
  double wall_time = 0.0;  // seconds
};

/// Largest accepted value of dt * (|<H>| + 4 dH + gp max|psi|^2).
inline constexpr double kStepPhaseLimit = 0.5;

/// Step used when SolverConfig::dt is not set: min(1e-3, 0.05 / spread),
/// spread being the guarded quantity above for `initial`.
double default_time_step(const WaveField& initial, const PhysicalParams& params, Frame frame);

/// Spacing that resolves the packet, the fringes expected by t_max, the
/// mirror skin depth and the fastest phase gradient.
double default_spacing(const PacketSpec& spec, const PhysicalParams& params, double t_max, Frame frame);

/// Computational grid for a run to t_max. Lab: from below the classical fall
/// minus ten spread widths up to 5 um above the mirror. Free-fall: ten
/// spread widths on either side of z0, clipped 5 um above the mirror top.
/// A packet that reaches the mirror gets extra room below for the momentum
/// tail left by the cut at the face.
Grid default_grid(const PacketSpec& spec, const PhysicalParams& params, double t_max, double dz,
                  Frame frame);

/// Crank-Nicolson integration of the linear problem (gp_strength must be 0).
/// Throws AccuracyError when the step is too coarse or the drift contract
/// fails (if enforced), DomainTooSmallError when the packet reaches an edge.
RunResult propagate(const WaveField& initial, const PhysicalParams& params, const SolverConfig& config);

/// Same integrator with Strang splitting of the mean-field phase. With
/// gp_strength == 0 the result is identical to propagate().
RunResult propagate_gp(const WaveField& initial, const PhysicalParams& params, const SolverConfig& config);

/// Energy expectation and spread of the discrete Hamiltonian used by the
/// solver (frame dependent), evaluated at t = 0.
struct HamiltonianSpread {
  double mean = 0.0;
  double spread = 0.0;
};
HamiltonianSpread hamiltonian_spread(const WaveField& field, const PhysicalParams& params, Frame frame);

struct ConvergenceReport {
  std::vector<double> dt_values;
  std::vector<double> dt_differences;  // ||u(dt_k) - u(dt_{k+1})||_2 / ||u||_2
  std::vector<double> dz_values;
  std::vector<double> dz_differences;
  std::vector<double> oracle_errors;  // relative L2 vs oracle, both refined together
  double dt_order = 0.0;
  double dz_order = 0.0;
  bool inconclusive = false;
};

/// Self-convergence in dt (fixed grid) and in dz (nested grids, fixed dt),
/// halving per level, up to the last snapshot time of `base`. When `oracle`
/// is given, also records its distance to each jointly refined run.
ConvergenceReport convergence_study(const PacketSpec& spec, const PhysicalParams& params,
                                    const Grid& base_grid, const SolverConfig& base, int levels,
                                    const std::function<WaveField(const Grid&, double)>& oracle = {});

/// Solver for the symmetric tridiagonal system with constant off-diagonal
/// c and diagonal d (Thomas algorithm, no pivoting).
class TridiagonalSolver {
 public:
  TridiagonalSolver() = default;
  TridiagonalSolver(std::vector<Complex> diagonal, Complex off_diagonal);

  /// Replace diagonal entries from `first` on and redo the elimination there.
  void update(const std::vector<Complex>& diagonal, std::size_t first);
  /// Solves in place.
  void solve(std::vector<Complex>& rhs) const;
  std::size_t size() const { return diag_.size(); }

 private:
  void factor(std::size_t first);

  std::vector<Complex> diag_;
  std::vector<Complex> inv_pivot_;
  std::vector<Complex> upper_;  // c / pivot
  Complex off_{};
};

}  // namespace mirrorfall
