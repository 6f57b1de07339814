#include "mirrorfall/tdse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "parallel.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace mirrorfall {
namespace {

constexpr Complex kI{0.0, 1.0};

// Gaussian tails decay into subnormal numbers, which are an order of
// magnitude slower on x86. Flush them to zero for the duration of a run.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

// Potential seen by the integrator. In the lab frame it is m g z plus the
// snapped mirror and never changes. In the free-fall frame it is only the
// mirror, displaced by g t^2/2, with cell-fraction weights at its faces.
class FramePotential {
 public:
  FramePotential(const PhysicalParams& params, const Grid& grid, Frame frame)
      : params_(params), grid_(grid), frame_(frame) {
    if (frame_ == Frame::lab) {
      values_ = assemble_potential(params_, grid_);
    } else {
      values_.assign(grid_.size(), 0.0);
      shift_ = 0.0;
      fill(0.0, 0, grid_.size());
    }
  }

  const std::vector<double>& values() const { return values_; }
  bool moving() const { return frame_ == Frame::free_fall && params_.barrier_height != 0.0; }

  // Moves the mirror to its position at time t; returns the lowest index
  // whose value may have changed (size() when nothing changed).
  std::size_t advance(double t) {
    if (!moving()) return grid_.size();
    const double shift = params_.gravity * t * t / 2.0;
    const double old_shift = shift_;
    shift_ = shift;
    std::size_t first = grid_.size();
    for (double face : {params_.barrier_base, params_.barrier_top()}) {
      const double a = std::min(face + old_shift, face + shift);
      const double b = std::max(face + old_shift, face + shift);
      const auto [i0, i1] = index_window(a, b);
      if (i0 < i1) {
        fill(shift, i0, i1);
        first = std::min(first, i0);
      }
    }
    return first;
  }

 private:
  std::pair<std::size_t, std::size_t> index_window(double a, double b) const {
    const double dz = grid_.spacing();
    const double lo = std::floor((a - grid_.z_min()) / dz) - 2.0;
    const double hi = std::ceil((b - grid_.z_min()) / dz) + 3.0;
    const double n = static_cast<double>(grid_.size());
    return {static_cast<std::size_t>(std::clamp(lo, 0.0, n)), static_cast<std::size_t>(std::clamp(hi, 0.0, n))};
  }

  void fill(double shift, std::size_t i0, std::size_t i1) {
    const double dz = grid_.spacing();
    const double lo = params_.barrier_base + shift;
    const double hi = params_.barrier_top() + shift;
    for (std::size_t j = i0; j < i1; ++j) {
      const double y = grid_.z(j);
      const double overlap = std::max(0.0, std::min(y + dz / 2.0, hi) - std::max(y - dz / 2.0, lo));
      values_[j] = params_.barrier_height * overlap / dz;
    }
  }

  PhysicalParams params_;
  Grid grid_;
  Frame frame_;
  std::vector<double> values_;
  double shift_ = 0.0;
};

std::vector<Complex> lhs_diagonal(const std::vector<double>& v, double kin, double h) {
  std::vector<Complex> d(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) d[j] = Complex{1.0, h / 2.0 * (v[j] + kin)};
  return d;
}

WaveField to_lab(const std::vector<Complex>& psi, const Grid& grid, const PhysicalParams& params, Frame frame,
                 double t) {
  if (frame == Frame::lab) return WaveField(grid, psi, t);
  const double shift = params.gravity * t * t / 2.0;
  const Grid lab(grid.z_min() - shift, grid.z_max() - shift, grid.size());
  const double m = params.mass;
  const double g = params.gravity;
  const double const_phase = -m * g * g * t * t * t / 6.0;
  std::vector<Complex> out(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) {
    out[j] = psi[j] * std::polar(1.0, -m * g * lab.z(j) * t + const_phase);
  }
  return WaveField(lab, std::move(out), t);
}

double edge_amplitude(const std::vector<Complex>& psi, std::size_t nodes, bool lower) {
  const std::size_t k = std::min(nodes, psi.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    worst = std::max(worst, std::abs(lower ? psi[i] : psi[psi.size() - 1 - i]));
  }
  return worst;
}

double spread_sum(const HamiltonianSpread& hs, double gp, double peak_density) {
  return std::abs(hs.mean) + 4.0 * hs.spread + gp * peak_density;
}

double max_density(std::span<const Complex> psi) {
  double top = 0.0;
  for (const auto& c : psi) top = std::max(top, std::norm(c));
  return top;
}

RunResult integrate(const WaveField& initial, const PhysicalParams& params, const SolverConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const FlushSubnormals ftz;
  params.validate();
  config.validate();
  if (config.snapshot_times.empty()) throw ConfigError("no snapshot times requested");
  const double n0 = initial.norm();
  if (std::abs(n0 - 1.0) > 1e-6) {
    throw ConfigError("initial state must be normalized to 1 +- 1e-6 (norm " + std::to_string(n0) + ")");
  }

  const Grid& grid = initial.grid();
  const std::size_t n = grid.size();
  const double dz = grid.spacing();
  const double m = params.mass;
  const double gp = params.gp_strength;
  const bool nonlinear = gp != 0.0;

  const double dt = config.dt > 0.0 ? config.dt : default_time_step(initial, params, config.frame);
  const auto hs = hamiltonian_spread(initial, params, config.frame);
  const double guard = dt * spread_sum(hs, gp, max_density(initial.samples()));
  if (guard > kStepPhaseLimit) {
    std::ostringstream msg;
    msg << "time step " << dt << " ms too coarse: dt * energy spread = " << guard << " exceeds "
        << kStepPhaseLimit;
    throw AccuracyError(msg.str(), DriftHistory{});
  }

  FramePotential potential(params, grid, config.frame);
  const double kin = 1.0 / (m * dz * dz);  // diagonal part of the kinetic stencil
  const double off = -1.0 / (2.0 * m * dz * dz);

  std::vector<Complex> psi(initial.samples().begin(), initial.samples().end());
  std::vector<Complex> rhs(n);

  RunResult result;
  result.dt = dt;
  const auto f0 = conserved_functionals(initial, params);
  const double e0 = f0.energy;
  const double e_scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;

  auto check = [&](double t) {
    // The upper edge is not checked while a reflecting mirror stands between
    // it and the packet: only over-barrier components of negligible weight
    // can get there.
    const double lab_top = grid.z_max() - (config.frame == Frame::free_fall ? params.gravity * t * t / 2.0 : 0.0);
    const bool shielded = params.barrier_height > 0.0 && lab_top >= params.barrier_base;
    for (bool lower : {true, false}) {
      if (!lower && shielded) continue;
      const double edge = edge_amplitude(psi, config.edge_nodes, lower);
      if (edge >= config.edge_tolerance) {
        std::ostringstream msg;
        msg << "packet reached the " << (lower ? "lower" : "upper") << " grid edge at t = " << t
            << " ms (|psi| = " << edge << " within " << config.edge_nodes << " nodes)";
        throw DomainTooSmallError(msg.str());
      }
    }
    const auto f = conserved_functionals(to_lab(psi, grid, params, config.frame, t), params);
    const double nd = std::abs(f.norm - n0) / n0;
    const double ed = std::abs(f.energy - e0) / e_scale;
    result.drift.times.push_back(t);
    result.drift.norm_drift.push_back(nd);
    result.drift.energy_drift.push_back(ed);
    result.max_norm_drift = std::max(result.max_norm_drift, nd);
    result.max_energy_drift = std::max(result.max_energy_drift, ed);
    if (nd > config.norm_tolerance || ed > config.energy_tolerance) {
      result.contract_ok = false;
      if (config.enforce_contract) {
        std::ostringstream msg;
        msg << "conservation contract violated at t = " << t << " ms: norm drift " << nd << ", energy drift "
            << ed;
        throw AccuracyError(msg.str(), result.drift);
      }
    }
  };

  std::map<double, TridiagonalSolver> fixed_solvers;
  TridiagonalSolver moving_solver;
  double moving_h = -1.0;

  auto nonlinear_half = [&](double h) {
    for (auto& c : psi) c *= std::polar(1.0, -gp * std::norm(c) * h / 2.0);
  };

  auto linear_step = [&](double t, double h) {
    const TridiagonalSolver* solver = nullptr;
    if (potential.moving()) {
      const std::size_t first = potential.advance(t + h / 2.0);
      if (h != moving_h) {
        moving_solver = TridiagonalSolver(lhs_diagonal(potential.values(), kin, h), kI * (h / 2.0) * off);
        moving_h = h;
      } else if (first < n) {
        moving_solver.update(lhs_diagonal(potential.values(), kin, h), first);
      }
      solver = &moving_solver;
    } else {
      auto it = fixed_solvers.find(h);
      if (it == fixed_solvers.end()) {
        it = fixed_solvers.emplace(h, TridiagonalSolver(lhs_diagonal(potential.values(), kin, h), kI * (h / 2.0) * off))
                 .first;
      }
      solver = &it->second;
    }
    const auto& v = potential.values();
    const Complex half{0.0, -h / 2.0};
    for (std::size_t j = 0; j < n; ++j) {
      Complex hpsi = (v[j] + kin) * psi[j];
      if (j > 0) hpsi += off * psi[j - 1];
      if (j + 1 < n) hpsi += off * psi[j + 1];
      rhs[j] = psi[j] + half * hpsi;
    }
    solver->solve(rhs);
    psi.swap(rhs);
  };

  double t = 0.0;
  std::size_t steps = 0;
  for (const double target : config.snapshot_times) {
    if (target > t) {
      const double span = target - t;
      const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
      const double h = span / static_cast<double>(count);
      const double t_start = t;
      for (std::size_t s = 0; s < count; ++s) {
        const double ts = t_start + static_cast<double>(s) * h;
        if (nonlinear) nonlinear_half(h);
        linear_step(ts, h);
        if (nonlinear) nonlinear_half(h);
        ++steps;
        if (steps % config.check_interval == 0 && s + 1 < count) check(t_start + static_cast<double>(s + 1) * h);
      }
      t = target;
    }
    check(t);
    result.snapshots.push_back(to_lab(psi, grid, params, config.frame, t));
    result.diagnostics.push_back(diagnose(result.snapshots.back(), params));
  }
  result.steps = steps;
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Momentum spread of the packet, counting the mean-field energy
// (gp/2) integral |psi|^4 as released into kinetic energy.
double momentum_spread(const PacketSpec& spec, const PhysicalParams& params) {
  const double interaction = params.gp_strength / (4.0 * spec.sigma * std::sqrt(kPi));
  return std::sqrt(1.0 / (4.0 * spec.sigma * spec.sigma) + 2.0 * params.mass * std::max(interaction, 0.0));
}

double sampled_extent(const PacketSpec& spec, const PhysicalParams& params, double t_max, double gravity,
                      bool upper) {
  const double dp = momentum_spread(spec, params);
  double best = upper ? -INFINITY : INFINITY;
  constexpr int kSamples = 400;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = t_max * k / kSamples;
    const double c = spec.z0 + spec.q * t / params.mass - gravity * t * t / 2.0;
    const double v = dp * t / params.mass;
    const double s = 10.0 * std::sqrt(spec.sigma * spec.sigma + v * v);
    best = upper ? std::max(best, c + s) : std::min(best, c - s);
  }
  return best;
}

// A packet cut off by the mirror keeps a slope S at the face, so its momentum
// tail falls like S/k^2 and spreads ahead of the Gaussian estimate. Distance
// covered by the slowest k whose amplitude at time t is still above 1e-5.
double truncation_margin(const PacketSpec& spec, const PhysicalParams& params, double t) {
  if (!(params.barrier_height > 0.0) || !(t > 0.0)) return 0.0;
  const double d = params.barrier_base - spec.z0;
  const double s2 = spec.sigma * spec.sigma;
  const double amp = std::pow(2.0 * kPi * s2, -0.25);
  const double slope = amp * std::exp(-d * d / (4.0 * s2)) * std::abs(d) / s2;
  constexpr double kTail = 1e-5;
  const double k = std::sqrt(slope * std::sqrt(params.mass / t) / (std::sqrt(2.0 * kPi) * kTail));
  return k * t / params.mass;
}

}  // namespace

void SolverConfig::validate() const {
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (!(snapshot_times[i] >= 0.0) || !std::isfinite(snapshot_times[i])) {
      throw ConfigError("snapshot times must be finite and non-negative");
    }
    if (i > 0 && snapshot_times[i] < snapshot_times[i - 1]) {
      throw ConfigError("snapshot times must be sorted ascending");
    }
  }
  if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (check_interval == 0) throw ConfigError("check_interval must be positive");
}

TridiagonalSolver::TridiagonalSolver(std::vector<Complex> diagonal, Complex off_diagonal)
    : diag_(std::move(diagonal)), inv_pivot_(diag_.size()), upper_(diag_.size()), off_(off_diagonal) {
  factor(0);
}

void TridiagonalSolver::update(const std::vector<Complex>& diagonal, std::size_t first) {
  if (diagonal.size() != diag_.size()) throw ConfigError("tridiagonal update changes the system size");
  std::copy(diagonal.begin() + static_cast<std::ptrdiff_t>(first), diagonal.end(),
            diag_.begin() + static_cast<std::ptrdiff_t>(first));
  factor(first);
}

void TridiagonalSolver::factor(std::size_t first) {
  for (std::size_t j = first; j < diag_.size(); ++j) {
    const Complex pivot = j == 0 ? diag_[0] : diag_[j] - off_ * upper_[j - 1];
    inv_pivot_[j] = 1.0 / pivot;
    upper_[j] = off_ * inv_pivot_[j];
  }
}

void TridiagonalSolver::solve(std::vector<Complex>& rhs) const {
  const std::size_t n = diag_.size();
  if (rhs.size() != n) throw ConfigError("tridiagonal right-hand side has the wrong size");
  if (n == 0) return;
  rhs[0] *= inv_pivot_[0];
  for (std::size_t j = 1; j < n; ++j) rhs[j] = (rhs[j] - off_ * rhs[j - 1]) * inv_pivot_[j];
  for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= upper_[j] * rhs[j + 1];
}

HamiltonianSpread hamiltonian_spread(const WaveField& field, const PhysicalParams& params, Frame frame) {
  const Grid& grid = field.grid();
  const std::size_t n = grid.size();
  const double dz = grid.spacing();
  const FramePotential potential(params, grid, frame);
  const auto& v = potential.values();
  const double kin = 1.0 / (params.mass * dz * dz);
  const double off = -1.0 / (2.0 * params.mass * dz * dz);
  double norm = 0.0, mean = 0.0, square = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Complex hpsi = (v[j] + kin) * field[j];
    if (j > 0) hpsi += off * field[j - 1];
    if (j + 1 < n) hpsi += off * field[j + 1];
    norm += std::norm(field[j]);
    mean += (std::conj(field[j]) * hpsi).real();
    square += std::norm(hpsi);
  }
  HamiltonianSpread hs;
  if (!(norm > 0.0)) return hs;
  hs.mean = mean / norm;
  hs.spread = std::sqrt(std::max(0.0, square / norm - hs.mean * hs.mean));
  return hs;
}

double default_time_step(const WaveField& initial, const PhysicalParams& params, Frame frame) {
  const auto hs = hamiltonian_spread(initial, params, frame);
  const double spread = spread_sum(hs, params.gp_strength, max_density(initial.samples()));
  return spread > 0.0 ? std::min(1e-3, 0.05 / spread) : 1e-3;
}

double default_spacing(const PacketSpec& spec, const PhysicalParams& params, double t_max, Frame frame) {
  double dz = spec.sigma / 10.0;
  if (spec.z0 != 0.0 && t_max > 0.0) dz = std::min(dz, kPi * t_max / (params.mass * std::abs(spec.z0)) / 10.0);
  if (params.barrier_height > 0.0) {
    dz = std::min(dz, 1.0 / std::sqrt(2.0 * params.mass * params.barrier_height) / 4.0);
  }
  double t_ref = t_max;
  if (frame == Frame::free_fall && params.gravity > 0.0) {
    t_ref = std::min(t_max, 6.0 / (params.mass * params.gravity * spec.sigma));
  }
  const double k_max = params.mass * params.gravity * t_ref + std::abs(spec.q) + 3.0 * momentum_spread(spec, params);
  return std::min(dz, 0.09 / k_max);
}

Grid default_grid(const PacketSpec& spec, const PhysicalParams& params, double t_max, double dz, Frame frame) {
  const double g = frame == Frame::lab ? params.gravity : 0.0;
  double lo = sampled_extent(spec, params, t_max, g, false);
  const double margin = truncation_margin(spec, params, t_max);
  if (margin > 0.0) lo = std::min(lo, spec.z0 - g * t_max * t_max / 2.0 - 10.0 * spec.sigma - margin);
  double hi = sampled_extent(spec, params, t_max, g, true);
  const double above_mirror = params.barrier_top() + 5.0;
  if (frame == Frame::lab) {
    hi = params.barrier_height > 0.0 ? above_mirror : std::max(hi, above_mirror);
  } else if (params.barrier_height > 0.0) {
    hi = std::min(hi, above_mirror + params.gravity * t_max * t_max / 2.0);
  }
  return Grid::with_spacing(lo, hi, dz);
}

RunResult propagate(const WaveField& initial, const PhysicalParams& params, const SolverConfig& config) {
  if (params.gp_strength != 0.0) throw ConfigError("propagate: use propagate_gp for a nonzero mean-field term");
  return integrate(initial, params, config);
}

RunResult propagate_gp(const WaveField& initial, const PhysicalParams& params, const SolverConfig& config) {
  if (params.gp_strength < 0.0) throw ConfigError("propagate_gp: gp_strength must be non-negative");
  return integrate(initial, params, config);
}

ConvergenceReport convergence_study(const PacketSpec& spec, const PhysicalParams& params, const Grid& base_grid,
                                    const SolverConfig& base, int levels,
                                    const std::function<WaveField(const Grid&, double)>& oracle) {
  if (levels < 3) throw ConfigError("convergence study needs at least three levels");
  if (base.snapshot_times.empty()) throw ConfigError("convergence study needs a final time");
  if (!(base.dt > 0.0)) throw ConfigError("convergence study needs an explicit base dt");
  const double t_end = base.snapshot_times.back();
  SolverConfig cfg = base;
  cfg.snapshot_times = {t_end};
  const auto lv = static_cast<std::size_t>(levels);
  auto refined_grid = [&](std::size_t k) {
    return Grid(base_grid.z_min(), base_grid.z_max(), ((base_grid.size() - 1) << k) + 1);
  };
  auto solve = [&](const Grid& grid, double dt) {
    SolverConfig c = cfg;
    c.dt = dt;
    const auto init = make_gaussian(spec, grid);
    return propagate_gp(init, params, c).snapshots.back();
  };

  // Runs: [0, lv) vary dt on the base grid, [lv, 2lv) vary dz at the finest
  // dt, [2lv, 3lv) refine both (only with an oracle).
  const std::size_t runs = oracle ? 3 * lv : 2 * lv;
  std::vector<std::optional<WaveField>> out(runs);
  const double dt_fine = base.dt / static_cast<double>(1u << (lv - 1));
  detail::parallel_for(runs, [&](std::size_t r) {
    const std::size_t k = r % lv;
    const double dt_k = base.dt / static_cast<double>(1u << k);
    if (r < lv) {
      out[r] = solve(base_grid, dt_k);
    } else if (r < 2 * lv) {
      out[r] = solve(refined_grid(k), dt_fine);
    } else {
      out[r] = solve(refined_grid(k), dt_k);
    }
  });

  ConvergenceReport rep;
  auto rel_diff = [](const WaveField& a, const WaveField& b, std::size_t stride_a, std::size_t stride_b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i * stride_a < a.size() && i * stride_b < b.size(); ++i) {
      num += std::norm(a[i * stride_a] - b[i * stride_b]);
      den += std::norm(b[i * stride_b]);
    }
    return std::sqrt(num / den);
  };
  for (std::size_t k = 0; k < lv; ++k) {
    rep.dt_values.push_back(base.dt / static_cast<double>(1u << k));
    rep.dz_values.push_back(refined_grid(k).spacing());
  }
  for (std::size_t k = 0; k + 1 < lv; ++k) {
    rep.dt_differences.push_back(rel_diff(*out[k], *out[k + 1], 1, 1));
    rep.dz_differences.push_back(rel_diff(*out[lv + k], *out[lv + k + 1], 1, 2));
  }
  auto order = [&](const std::vector<double>& d) {
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
      if (!(d[k + 1] < d[k])) rep.inconclusive = true;
    }
    return std::log2(d[d.size() - 2] / d.back());
  };
  rep.dt_order = order(rep.dt_differences);
  rep.dz_order = order(rep.dz_differences);
  if (oracle) {
    for (std::size_t k = 0; k < lv; ++k) {
      const auto& u = *out[2 * lv + k];
      rep.oracle_errors.push_back(compare_fields(u, oracle(u.grid(), t_end), CompareMode::full).l2_rel);
    }
  }
  return rep;
}

}  // namespace mirrorfall
