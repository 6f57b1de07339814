// Acceptance run: one PASS/FAIL line per criterion.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mirrorfall/airy.hpp"
#include "mirrorfall/analysis.hpp"
#include "mirrorfall/analytic.hpp"
#include "mirrorfall/errors.hpp"
#include "mirrorfall/scenario.hpp"
#include "mirrorfall/spectral.hpp"
#include "mirrorfall/tdse.hpp"

using namespace mirrorfall;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Collects "name value op limit" fragments and the overall result.
class Checks {
 public:
  void le(const std::string& what, double value, double limit) { add(what, value, "<=", limit, value <= limit); }
  void ge(const std::string& what, double value, double limit) { add(what, value, ">=", limit, value >= limit); }
  void gt(const std::string& what, double value, double limit) { add(what, value, ">", limit, value > limit); }
  void flag(const std::string& what, bool ok) {
    pass_ = pass_ && ok;
    parts_.push_back(what + (ok ? " yes" : " NO"));
  }
  void note(const std::string& text) { parts_.push_back(text); }
  Verdict verdict() const {
    std::string d;
    for (std::size_t i = 0; i < parts_.size(); ++i) d += (i ? "; " : "") + parts_[i];
    return {pass_, d};
  }

 private:
  void add(const std::string& what, double value, const char* op, double limit, bool ok) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %.4g %s %.4g%s", what.c_str(), value, op, limit, ok ? "" : " (fails)");
    pass_ = pass_ && ok;
    parts_.push_back(buf);
  }
  bool pass_ = true;
  std::vector<std::string> parts_;
};

std::string show(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", *v);
  return buf;
}

class Context {
 public:
  explicit Context(fs::path out) : out_(std::move(out)) {}

  // Preset runs are shared between criteria.
  const std::vector<ScenarioReport>& runs(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    const Preset p = preset(name);
    std::vector<ScenarioReport> reports;
    for (std::size_t i = 0; i < p.runs.size(); ++i) {
      reports.push_back(run_scenario(p.runs[i], run_id(p, i), out_ / p.name));
    }
    return cache_.emplace(name, std::move(reports)).first->second;
  }

  const ScenarioReport& run(const std::string& preset_name, std::size_t index = 0) {
    return runs(preset_name).at(index);
  }

  const fs::path& out() const { return out_; }

 private:
  fs::path out_;
  std::map<std::string, std::vector<ScenarioReport>> cache_;
};

const OracleComparison* comparison(const ScenarioReport& r, Oracle o, double t) {
  for (const auto& c : r.comparisons) {
    if (c.oracle == o && c.time == t) return &c;
  }
  return nullptr;
}

WaveField below_face(const WaveField& f, double face) {
  const Grid& g = f.grid();
  std::size_t n = 0;
  while (n < g.size() && g.z(n) < face) ++n;
  if (n < 2) throw DomainError("no grid nodes below the mirror face");
  std::vector<Complex> v(f.samples().begin(), f.samples().begin() + static_cast<std::ptrdiff_t>(n));
  return WaveField(Grid(g.z_min(), g.z(n - 1), n), std::move(v), f.time());
}

PhysicalParams mirror_params() {
  PhysicalParams p = sodium_params();
  p.barrier_height = kMirrorHeight;
  return p;
}

// Criterion implementations ---------------------------------------------

Verdict conservation(Context& ctx) {
  const auto& r = ctx.run("fig3-thin-vs-wide", 0).result;
  Checks c;
  c.le("norm drift", r.max_norm_drift, 2e-3);
  c.le("energy drift", r.max_energy_drift, 2e-2);
  c.le("wall time s", r.wall_time, 120.0);
  return c.verdict();
}

Verdict free_fall(Context& ctx) {
  const auto& r = ctx.run("fig7-freefall");
  const auto* cmp = comparison(r, Oracle::free_fall, 4.0);
  Checks c;
  if (!cmp || !cmp->result) {
    c.flag("comparison available", false);
    return c.verdict();
  }
  c.le("Linf rel", cmp->result->linf_rel, 0.01);
  c.le("L2 rel", cmp->result->l2_rel, 0.005);
  return c.verdict();
}

Verdict regimes(Context& ctx) {
  const auto& thin = ctx.run("fig3-thin-vs-wide", 0).result.diagnostics.back();
  const auto& wide = ctx.run("fig3-thin-vs-wide", 1).result.diagnostics.back();
  const PhysicalParams p = sodium_params();
  Checks c;
  c.ge("thin peaks", static_cast<double>(thin.peaks.size()), 3);
  c.ge("thin visibility", thin.visibility.value_or(0.0), 0.5);
  c.le("wide peaks", static_cast<double>(wide.peaks.size()), 1);
  c.note("wide visibility " + show(wide.visibility));
  c.flag("wide visibility <= 0.05 or undefined", !wide.visibility || *wide.visibility <= 0.05);
  const double expected = kPi * 4.0 / (p.mass * 7.0);
  const auto spacing = fringe_spacing(thin.peaks);
  if (spacing) {
    c.le("thin spacing rel error", std::abs(*spacing - expected) / expected, 0.10);
  } else {
    c.flag("thin spacing defined", false);
  }
  return c.verdict();
}

Verdict gp_enhancement(Context& ctx) {
  const auto vis = [&](const std::string& name, std::size_t i) {
    return ctx.run(name, i).result.diagnostics.back().visibility;
  };
  const auto v0 = vis("fig5-gp", 0);
  const auto v25 = vis("fig5-gp", 1);
  const auto e0 = vis("fig6-borderline", 0);
  const auto e25 = vis("fig6-borderline", 1);
  Checks c;
  c.note("sigma 0.3: gp0 " + show(v0) + ", gp25 " + show(v25));
  c.flag("sigma 0.3 gp25 > gp0", v25.value_or(0.0) > v0.value_or(0.0));
  c.note("eps 1: gp0 " + show(e0) + ", gp25 " + show(e25));
  c.flag("eps 1 gp25 > gp0", e25.value_or(0.0) > e0.value_or(0.0));
  c.le("eps 1 gp0 visibility", e0.value_or(0.0), 0.1);
  return c.verdict();
}

Verdict monotonicity(Context& ctx) {
  Scenario base = preset("fig2").runs[0];
  base.solver.snapshot_times = {4.0};
  const auto res = run_sweep(base, "sigma", {0.1, 0.2, 0.3, 0.5, 1.0, 2.0}, ctx.out() / "sweep_sigma");
  Checks c;
  std::ostringstream rows;
  bool all_ok = true;
  for (const auto& r : res.rows) {
    rows << (rows.tellp() > 0 ? ", " : "") << "eps " << show(r.epsilon) << " vis " << show(r.visibility);
    if (!r.error.empty()) {
      all_ok = false;
      rows << " (" << r.error << ")";
    }
  }
  c.note(rows.str());
  c.flag("all runs succeeded", all_ok);
  c.flag("visibility non-increasing in eps", res.monotone.value_or(false));
  return c.verdict();
}

Verdict image_packet(Context&) {
  const PhysicalParams p = sodium_params();
  const PacketSpec s{-7.0, 0.3, 0.0};
  const ImagePacket plain(s, p, ImageVariant::plain);
  const ImagePacket corr(s, p, ImageVariant::corrected);
  const auto f = [&](double z, double t) { return plain.value(z, t); };
  const double t = 4.0;
  const double z = -7.0 - p.gravity * t * t / 2.0 + 2.0;
  const double r1 = schrodinger_residual(f, z, t, 4e-3, p);
  const double r2 = schrodinger_residual(f, z, t, 2e-3, p);
  Checks c;
  c.ge("residual order", std::log2(r1 / r2), 1.7);
  c.le("residual order", std::log2(r1 / r2), 2.3);
  const double edge_plain = std::abs(plain.value(0.0, t));
  const double edge_corr = std::abs(corr.value(0.0, t));
  c.flag("corrected |Phi(0,4)| < plain", edge_corr < edge_plain);
  c.le("|lambda(30) - 1|", std::abs(corr.admixture(30.0) - 1.0), 0.01);
  return c.verdict();
}

Verdict airy_kernel(Context&) {
  Checks c;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = -200.0 + 299.0 * i / 199.0;
    worst = std::max(worst, std::abs(airy(x).wronskian() - 1.0 / kPi) * kPi);
  }
  c.le("Wronskian rel error", worst, 1e-10);
  const double ai0 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
  const double bi0 = 1.0 / (std::pow(3.0, 1.0 / 6.0) * std::tgamma(2.0 / 3.0));
  const AiryPair z = airy(0.0);
  c.le("Ai(0) error", std::abs(z.ai - ai0), 1e-10);
  c.le("Bi(0) error", std::abs(z.bi - bi0), 1e-10);
  const double x = -2.3;
  const AiryPair px = airy(x);
  const double order = std::log2(airy_solution_check(x, px, 0.02, AiryKind::ai) /
                                 airy_solution_check(x, px, 0.01, AiryKind::ai));
  c.ge("ODE residual order", order, 1.8);
  c.le("ODE residual order", order, 2.2);
  return c.verdict();
}

Verdict round_trip(Context&) {
  const PhysicalParams p = mirror_params();
  const PacketSpec s{-7.0, 0.3, 0.0};
  const double dz = default_spacing(s, p, 4.0, Frame::lab);
  const Grid grid = default_grid(s, p, 4.0, dz, Frame::lab);
  const WaveField below = below_face(make_mirror_packet(s, grid, p), p.barrier_base);
  const LabelGrid labels = label_grid(s, p, 4.0, deepest_point(below.grid(), p));
  const auto coeffs = coefficients_numeric(below, p, labels);
  const WaveField back = evolve_spectral(coeffs, 0.0, below.grid());
  Checks c;
  c.le("reconstruction L2", compare_fields(back, below, CompareMode::full).l2_rel, 1e-3);
  c.le("|Parseval - 1|", std::abs(coeffs.parseval() - 1.0), 1e-3);
  const double a = -(-7.0 / gravitational_length(p));
  c.le("|smoothed delta - 1|", std::abs(smoothed_delta_weight(a, p, -400.0, 0.01) - 1.0), 0.01);
  return c.verdict();
}

Verdict cross_solver(Context& ctx) {
  Checks c;
  const auto& thin = ctx.run("fig10-spectral-thin");
  for (Oracle o : {Oracle::spectral_numeric, Oracle::spectral_thin}) {
    const auto* cmp = comparison(thin, o, 4.0);
    if (cmp && cmp->result) {
      c.le("sigma 0.3 " + oracle_name(o) + " L2", cmp->result->l2_rel, 0.05);
    } else {
      c.flag("sigma 0.3 " + oracle_name(o) + " available", false);
    }
  }
  const auto& wide = ctx.run("fig11-spectral-wide");
  const auto* num = comparison(wide, Oracle::spectral_numeric, 4.0);
  if (num && num->result) {
    c.le("sigma 2 spectral-numeric L2", num->result->l2_rel, 0.05);
  } else {
    c.flag("sigma 2 spectral-numeric available", false);
  }
  bool warned = false;
  for (const auto& w : wide.warnings) warned = warned || w.find("gamma") != std::string::npos;
  c.flag("gamma warning raised", warned);
  const auto* th = comparison(wide, Oracle::spectral_thin, 4.0);
  bool discrepancy = false;
  if (th && th->result) {
    discrepancy = th->result->l2_rel > 0.05;
    char buf[96];
    std::snprintf(buf, sizeof buf, "thin formula L2 %.3g", th->result->l2_rel);
    c.note(buf);
  } else if (th) {
    discrepancy = true;
    c.note("thin formula unusable: " + th->note);
  }
  c.flag("sigma 2 thin-formula discrepancy documented", discrepancy);
  return c.verdict();
}

Verdict thin_formula(Context&) {
  const PhysicalParams p = mirror_params();
  const double lg = gravitational_length(p);
  Checks c;
  std::vector<double> dist;
  for (double gamma : {0.14, 0.27, 0.41}) {
    const PacketSpec s{-7.0, gamma * lg, 0.0};
    const double dz = default_spacing(s, p, 4.0, Frame::lab);
    const WaveField below = below_face(make_mirror_packet(s, default_grid(s, p, 4.0, dz, Frame::lab), p), 0.0);
    const LabelGrid labels = label_grid(s, p, 4.0, deepest_point(below.grid(), p));
    const auto num = coefficients_numeric(below, p, labels);
    const auto thin = coefficients_thin_packet(s, p, labels);
    dist.push_back(coefficient_distance(thin, num));
    char buf[64];
    std::snprintf(buf, sizeof buf, "gamma %.2f: %.3g", gamma, dist.back());
    c.note(buf);
  }
  c.le("distance at gamma 0.41", dist.back(), 0.15);
  c.flag("distance shrinks as gamma decreases", dist[0] < dist[1] && dist[1] < dist[2]);
  return c.verdict();
}

Verdict persistence(Context& ctx) {
  const auto& r = ctx.run("long-persistence").result;
  const PhysicalParams p = sodium_params();
  const auto& d = r.diagnostics;
  const DiagnosticsReport* at4 = nullptr;
  const DiagnosticsReport* at30 = nullptr;
  for (const auto& x : d) {
    if (x.time == 4.0) at4 = &x;
    if (x.time == 30.0) at30 = &x;
  }
  Checks c;
  if (!at4 || !at30) {
    c.flag("snapshots at 4 and 30 ms", false);
    return c.verdict();
  }
  const double expected = -p.gravity * 30.0 * 30.0 / 2.0;
  c.le("argmax center rel error", std::abs(at30->center_argmax - expected) / std::abs(expected), 0.05);
  c.ge("peaks at 30 ms", static_cast<double>(at30->peaks.size()), static_cast<double>(at4->peaks.size()) - 1.0);
  c.note("peaks at 4 ms " + std::to_string(at4->peaks.size()));
  c.le("wall time s", r.wall_time, 1800.0);
  return c.verdict();
}

Verdict barrier_vs_well(Context& ctx) {
  const WaveField barrier = below_face(ctx.run("barrier-vs-well", 0).result.snapshots.back(), 0.0);
  const WaveField well = below_face(ctx.run("barrier-vs-well", 1).result.snapshots.back(), 0.0);
  Checks c;
  c.le("Linf rel", compare_fields(well, barrier, CompareMode::modulus).linf_rel, 0.02);
  return c.verdict();
}

Verdict convergence(Context&) {
  const PacketSpec s{-7.0, 0.35, 0.0};
  const PhysicalParams p = sodium_params();
  const Grid base(-21.0, 5.0, 521);
  SolverConfig cfg;
  cfg.snapshot_times = {0.25};
  cfg.dt = 0.01;
  const auto rep = convergence_study(s, p, base, cfg, 4,
                                     [&](const Grid& g, double t) { return FreeFallPacket(s, p).sample(g, t); });
  Checks c;
  c.flag("conclusive", !rep.inconclusive);
  c.le("|dt order - 2|", std::abs(rep.dt_order - 2.0), 0.3);
  c.le("|dz order - 2|", std::abs(rep.dz_order - 2.0), 0.3);
  return c.verdict();
}

struct Criterion {
  int id;
  const char* name;
  bool slow;
  std::function<Verdict(Context&)> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  bool skip_slow = false;
  std::string out = "acceptance_out";
  app.add_option("--only", only, "criterion numbers to run");
  app.add_flag("--skip-slow", skip_slow, "skip criteria marked slow");
  app.add_option("--out", out, "directory for run outputs");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "conservation contract", false, conservation},
      {2, "free-fall oracle", false, free_fall},
      {3, "regime separation", false, regimes},
      {4, "mean-field enhancement", false, gp_enhancement},
      {5, "crossover monotonicity", false, monotonicity},
      {6, "image-packet oracle", false, image_packet},
      {7, "Airy kernel", false, airy_kernel},
      {8, "spectral round trip", false, round_trip},
      {9, "cross-solver agreement", false, cross_solver},
      {10, "thin-packet coefficients", false, thin_formula},
      {11, "long-time persistence", true, persistence},
      {12, "barrier vs well", false, barrier_vs_well},
      {13, "convergence orders", false, convergence},
  };
  const std::set<int> wanted(only.begin(), only.end());
  Context ctx(out);
  int failed = 0;
  for (const auto& cr : criteria) {
    if (!wanted.empty() && !wanted.count(cr.id)) continue;
    if (wanted.empty() && skip_slow && cr.slow) continue;
    Verdict v;
    try {
      v = cr.check(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("C%-2d %s  %s: %s\n", cr.id, v.pass ? "PASS" : "FAIL", cr.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
