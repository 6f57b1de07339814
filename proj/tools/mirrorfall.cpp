// Command-line front end: run presets or config files, sweeps, self test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mirrorfall/airy.hpp"
#include "mirrorfall/analytic.hpp"
#include "mirrorfall/errors.hpp"
#include "mirrorfall/scenario.hpp"
#include "mirrorfall/spectral.hpp"

using namespace mirrorfall;

namespace {

constexpr int kConfigExit = 1;
constexpr int kContractExit = 2;

struct CommonOptions {
  std::string out = "out";
  std::optional<double> dz;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::vector<double> snapshots;
  std::optional<double> gp;
  double inject_dt_factor = 1.0;
  std::string only_run;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--dz", o.dz, "grid spacing (um)")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", o.dt, "time step (ms)")->check(CLI::PositiveNumber);
  cmd->add_option("--t-max", o.t_max, "final time (ms)")->check(CLI::PositiveNumber);
  cmd->add_option("--snapshots", o.snapshots, "snapshot times t1,t2,... (ms)")->delimiter(',');
  cmd->add_option("--gp", o.gp, "mean-field strength")->check(CLI::NonNegativeNumber);
  cmd->add_option("--run", o.only_run, "only the named run of a multi-run preset");
  cmd->add_option("--inject-dt-factor", o.inject_dt_factor, "multiply the chosen time step (fault injection)")
      ->check(CLI::PositiveNumber)
      ->group("");
}

Overrides overrides_from(const CommonOptions& o) {
  Overrides ov;
  ov.dz = o.dz;
  ov.dt = o.dt;
  ov.t_max = o.t_max;
  if (!o.snapshots.empty()) ov.snapshots = o.snapshots;
  ov.gp = o.gp;
  if (o.inject_dt_factor != 1.0) ov.dt_factor = o.inject_dt_factor;
  return ov;
}

Preset load(const std::string& target, const CommonOptions& o) {
  Preset p = resolve_scenario(target);
  if (!o.only_run.empty()) {
    std::vector<Scenario> keep;
    for (const auto& r : p.runs) {
      if (r.name == o.only_run) keep.push_back(r);
    }
    if (keep.empty()) {
      std::string names;
      for (const auto& r : p.runs) names += " " + r.name;
      throw ConfigError("preset " + p.name + " has no run '" + o.only_run + "'; runs:" + names);
    }
    p.runs = keep;
  }
  apply_overrides(p, overrides_from(o));
  return p;
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_run(const std::string& target, const CommonOptions& o) {
  Preset p = load(target, o);
  if (p.slow) {
    std::cerr << "warning: preset " << p.name << " is expensive (tens of minutes on one core)\n";
  }
  bool ok = true;
  Json summary = Json::array();
  for (std::size_t i = 0; i < p.runs.size(); ++i) {
    const std::string id = run_id(p, i);
    const auto rep = run_scenario(p.runs[i], id, o.out);
    const auto& r = rep.result;
    const auto& last = r.diagnostics.back();
    std::cout << id << ": " << r.steps << " steps, dt " << fmt(r.dt) << " ms, " << fmt(r.wall_time, "%.1f")
              << " s, norm drift " << fmt(r.max_norm_drift) << ", energy drift " << fmt(r.max_energy_drift)
              << (r.contract_ok ? "" : "  CONTRACT VIOLATED") << '\n';
    std::cout << "  t = " << last.time << " ms: " << last.peaks.size() << " peaks, visibility "
              << (last.visibility ? fmt(*last.visibility) : std::string("undefined")) << ", argmax "
              << fmt(last.center_argmax) << " um\n";
    for (const auto& c : rep.comparisons) {
      std::cout << "  " << oracle_name(c.oracle) << " t = " << c.time << ": ";
      if (c.result) {
        std::cout << "l2_rel " << fmt(c.result->l2_rel) << ", linf_rel " << fmt(c.result->linf_rel);
      } else {
        std::cout << "skipped";
      }
      if (!c.note.empty()) std::cout << " (" << c.note << ")";
      std::cout << '\n';
    }
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    ok = ok && r.contract_ok;
    summary.push_back(Json{{"run_id", id},
                           {"contract_ok", r.contract_ok},
                           {"peak_count", last.peaks.size()},
                           {"visibility", last.visibility ? Json(*last.visibility) : Json(nullptr)}});
  }
  write_json(Json{{"preset", p.name}, {"description", p.description}, {"runs", summary}},
             std::filesystem::path(o.out) / (p.name + "_summary.json"));
  if (!ok) {
    std::cerr << "error: solver contract violated (norm or energy drift beyond tolerance)\n";
    return kContractExit;
  }
  return 0;
}

int cmd_sweep(const std::string& target, const std::string& parameter, const std::vector<double>& values,
              const CommonOptions& o) {
  Preset p = load(target, o);
  if (p.runs.size() != 1) {
    throw ConfigError("sweep needs a single base run; choose one with --run");
  }
  const auto res = run_sweep(p.runs.front(), parameter, values, o.out);
  bool ok = true;
  for (const auto& r : res.rows) {
    std::cout << parameter << " = " << r.value << ": ";
    if (!r.error.empty()) {
      std::cout << "failed (" << r.error << ")\n";
      continue;
    }
    std::cout << "epsilon " << (r.epsilon ? fmt(*r.epsilon) : std::string("-")) << ", visibility "
              << (r.visibility ? fmt(*r.visibility) : std::string("undefined")) << ", " << r.peak_count
              << " peaks" << (r.contract_ok ? "" : ", CONTRACT VIOLATED") << '\n';
    ok = ok && r.contract_ok;
  }
  if (res.monotone) {
    std::cout << "visibility non-increasing in epsilon: " << (*res.monotone ? "yes" : "no") << '\n';
  } else {
    std::cout << "visibility monotonicity: not applicable (epsilon constant)\n";
  }
  return ok ? 0 : kContractExit;
}

int cmd_oracles() {
  for (Oracle o : all_oracles()) std::cout << oracle_name(o) << "  " << oracle_description(o) << '\n';
  std::cout << "\npresets:";
  for (const auto& n : preset_names()) std::cout << ' ' << n;
  std::cout << '\n';
  return 0;
}

// Quick invariant suite; the full checks live in the test binaries.
int cmd_selftest() {
  int failures = 0;
  auto report = [&](bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!pass) ++failures;
  };

  {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double x = -50.0 + 60.0 * k / 199.0;
      worst = std::max(worst, std::abs(airy(x).wronskian() - 1.0 / kPi));
    }
    report(worst <= 1e-10, "airy wronskian", "max |W - 1/pi| = " + fmt(worst));
    const auto a0 = airy(0.0);
    const double ai0 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
    const double bi0 = 1.0 / (std::pow(3.0, 1.0 / 6.0) * std::tgamma(2.0 / 3.0));
    const double e = std::max(std::abs(a0.ai - ai0), std::abs(a0.bi - bi0));
    report(e <= 1e-10, "airy at zero", "error " + fmt(e));
  }
  {
    PacketSpec spec{-7.0, 0.35, 0.0};
    PhysicalParams p = sodium_params();
    const double dz = default_spacing(spec, p, 1.0, Frame::lab);
    const Grid g = default_grid(spec, p, 1.0, dz, Frame::lab);
    SolverConfig c;
    c.snapshot_times = {1.0};
    c.enforce_contract = false;
    const auto r = propagate(make_gaussian(spec, g), p, c);
    const auto cmp = compare_fields(r.snapshots.back(), FreeFallPacket(spec, p).sample(g, 1.0));
    report(cmp.linf_rel <= 0.01, "free fall 1 ms", "linf_rel " + fmt(cmp.linf_rel));
    const auto again = propagate(make_gaussian(spec, g), p, c);
    bool same = true;
    for (std::size_t i = 0; i < g.size(); ++i) same = same && again.snapshots.back()[i] == r.snapshots.back()[i];
    report(same, "determinism", same ? "bit-identical repeat" : "repeat differs");
  }
  {
    PacketSpec spec{-7.0, 0.3, 0.0};
    PhysicalParams p = sodium_params();
    p.barrier_height = kMirrorHeight;
    const double dz = default_spacing(spec, p, 1.0, Frame::lab);
    const Grid g = default_grid(spec, p, 1.0, dz, Frame::lab);
    SolverConfig c;
    c.snapshot_times = {1.0};
    c.enforce_contract = false;
    const auto r = propagate(make_mirror_packet(spec, g, p), p, c);
    report(r.contract_ok, "mirror conservation 1 ms",
           "norm drift " + fmt(r.max_norm_drift) + ", energy drift " + fmt(r.max_energy_drift));
  }
  {
    PacketSpec spec{-7.0, 0.5, 0.0};
    PhysicalParams p = sodium_params();
    p.barrier_height = kMirrorHeight;
    const Grid g(-7.0 - 8.0, 0.0, 3001);
    const auto init = make_mirror_packet(spec, g, p);
    const auto c = coefficients_numeric(init, p, label_grid(spec, p, 0.0, deepest_point(g, p)));
    report(std::abs(c.parseval() - 1.0) <= 1e-3, "spectral parseval", fmt(c.parseval(), "%.8f"));
  }
  {
    PacketSpec spec{-7.0, 0.3, 0.0};
    const PhysicalParams p = sodium_params();
    const ImagePacket img(spec, p);
    const auto f = [&](double z, double t) { return img.value(z, t); };
    const double r1 = schrodinger_residual(f, -9.0, 2.0, 1e-3, p);
    const double r2 = schrodinger_residual(f, -9.0, 2.0, 5e-4, p);
    report(r2 < r1 || r2 < 1e-8, "image packet residual", fmt(r1) + " -> " + fmt(r2));
  }
  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : kContractExit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavepackets falling beneath a mirror: solver, analytic references, sweeps"};
  app.require_subcommand(1);
  bool seedless = false;
  app.add_flag("--seedless", seedless, "assert that no random numbers are used (none are)");

  CommonOptions run_opts;
  std::string run_target;
  auto* run = app.add_subcommand("run", "run a preset or a JSON config file");
  run->add_option("target", run_target, "preset name or config path")->required();
  add_common(run, run_opts);
  run->add_flag("--seedless", seedless, "assert that no random numbers are used (none are)");

  CommonOptions sweep_opts;
  std::string sweep_target = "fig3-thin-vs-wide";
  std::string sweep_param = "sigma";
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "repeat a run over values of one parameter");
  sweep->add_option("target", sweep_target, "preset name or config path")->capture_default_str();
  sweep->add_option("--param", sweep_param, "sigma, z0, gp_strength or barrier_height")->capture_default_str();
  sweep->add_option("--values", sweep_values, "comma-separated values")->delimiter(',')->required();
  add_common(sweep, sweep_opts);
  sweep->add_flag("--seedless", seedless, "assert that no random numbers are used (none are)");

  auto* oracles = app.add_subcommand("oracles", "list analytic references and presets");
  auto* selftest = app.add_subcommand("selftest", "quick invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (seedless) std::cerr << "seedless: the pipeline draws no random numbers\n";
    if (*run) return cmd_run(run_target, run_opts);
    if (*sweep) {
      if (sweep_opts.only_run.empty()) {
        // Multi-run presets sweep their first run.
        Preset p = resolve_scenario(sweep_target);
        sweep_opts.only_run = p.runs.front().name;
      }
      return cmd_sweep(sweep_target, sweep_param, sweep_values, sweep_opts);
    }
    if (*oracles) return cmd_oracles();
    if (*selftest) return cmd_selftest();
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kContractExit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
