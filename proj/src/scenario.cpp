#include "mirrorfall/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mirrorfall/analytic.hpp"
#include "mirrorfall/errors.hpp"
#include "mirrorfall/spectral.hpp"
#include "parallel.hpp"

namespace mirrorfall {
namespace {

struct OracleInfo {
  Oracle oracle;
  const char* name;
  const char* description;
};

constexpr OracleInfo kOracles[] = {
    {Oracle::free_fall, "free-fall", "exact Gaussian in free fall, mirror ignored (|psi|^2 compared)"},
    {Oracle::image_plain, "image-plain", "packet minus its mirror image (|psi|^2 below the face)"},
    {Oracle::image_corrected, "image-corrected",
     "image scaled by the admixture factor so the field vanishes at the face"},
    {Oracle::modulus, "modulus", "long-time closed-form modulus of the image packet (q = 0 only)"},
    {Oracle::spectral_numeric, "spectral-numeric",
     "mirror eigenbasis, coefficients by quadrature of the initial field"},
    {Oracle::spectral_thin, "spectral-thin", "mirror eigenbasis, closed-form coefficients of a thin Gaussian"},
};

Scenario base_scenario(const std::string& name, double sigma) {
  Scenario s;
  s.name = name;
  s.params = sodium_params();
  s.params.barrier_height = kMirrorHeight;
  s.packet = PacketSpec{-7.0, sigma, 0.0};
  s.solver.snapshot_times = {4.0};
  return s;
}

Preset single(const std::string& name, const std::string& description, Scenario run) {
  return Preset{name, description, {std::move(run)}};
}

Preset build_preset(const std::string& name) {
  if (name == "fig2") {
    auto s = base_scenario("thin", 0.3);
    s.solver.snapshot_times = {1.0, 2.0, 3.0, 4.0};
    return single(name, "thin packet under the mirror, profiles at 1-4 ms", s);
  }
  if (name == "fig3-thin-vs-wide" || name == "fig4-gp-thin-vs-wide") {
    const bool gp = name == "fig4-gp-thin-vs-wide";
    Preset p{name, gp ? "thin and wide packets with the mean-field term, 4 ms" : "thin and wide packets, 4 ms", {}};
    for (auto [run, sigma] : {std::pair{"thin", 0.3}, std::pair{"wide", 2.0}}) {
      auto s = base_scenario(run, sigma);
      if (gp) s.params.gp_strength = 25.0;
      p.runs.push_back(s);
    }
    return p;
  }
  if (name == "fig5-gp" || name == "fig6-borderline") {
    const bool border = name == "fig6-borderline";
    const double sigma = border ? sigma_for_crossover(1.0, -7.0, sodium_params()) : 0.3;
    Preset p{name, border ? "crossover ratio 1 with and without the mean-field term"
                          : "thin packet with and without the mean-field term",
             {}};
    for (auto [run, gp] : {std::pair{"gp0", 0.0}, std::pair{"gp25", 25.0}}) {
      auto s = base_scenario(run, sigma);
      s.params.gp_strength = gp;
      p.runs.push_back(s);
    }
    return p;
  }
  if (name == "fig7-freefall") {
    auto s = base_scenario("freefall", 0.35);
    s.params.barrier_height = 0.0;
    s.oracles = {Oracle::free_fall};
    return single(name, "free fall without mirror against the exact packet", s);
  }
  if (name == "fig8-image-thin" || name == "fig9-image-wide") {
    const bool wide = name == "fig9-image-wide";
    auto s = base_scenario(wide ? "wide" : "thin", wide ? 2.0 : 0.3);
    s.oracles = {Oracle::image_plain, Oracle::image_corrected, Oracle::modulus};
    return single(name, "image-packet approximations against the solver", s);
  }
  if (name == "fig10-spectral-thin" || name == "fig11-spectral-wide") {
    const bool wide = name == "fig11-spectral-wide";
    auto s = base_scenario(wide ? "wide" : "thin", wide ? 2.0 : 0.3);
    s.oracles = {Oracle::spectral_numeric, Oracle::spectral_thin};
    return single(name, "mirror eigenbasis expansion against the solver", s);
  }
  if (name == "long-persistence") {
    auto s = base_scenario("thin", 0.3);
    s.solver.snapshot_times = {4.0, 10.0, 20.0, 30.0};
    s.solver.frame = Frame::free_fall;
    Preset p = single(name, "thin packet followed to 30 ms in the falling frame", s);
    p.slow = true;
    return p;
  }
  if (name == "barrier-vs-well") {
    Preset p{name, "repulsive mirror against a shallow well, q = 0", {}};
    for (auto [run, u] : {std::pair{"barrier", kMirrorHeight}, std::pair{"well", kShallowWellDepth}}) {
      auto s = base_scenario(run, 0.3);
      s.params.barrier_height = u;
      p.runs.push_back(s);
    }
    return p;
  }
  if (name == "hydrogen-fig2") {
    auto s = base_scenario("thin", 2.0);
    s.species = "hydrogen";
    s.params.mass = hydrogen_params().mass;
    s.solver.snapshot_times = {1.0, 2.0, 3.0, 4.0};
    return single(name, "hydrogen packet of 2 um under the mirror", s);
  }
  std::ostringstream msg;
  msg << "unknown preset '" << name << "'; available:";
  for (const auto& n : preset_names()) msg << ' ' << n;
  throw ConfigError(msg.str());
}

const std::pair<const char*, const char*> kAliases[] = {
    {"fig3", "fig3-thin-vs-wide"},   {"fig4", "fig4-gp-thin-vs-wide"}, {"fig5", "fig5-gp"},
    {"fig6", "fig6-borderline"},     {"fig7", "fig7-freefall"},        {"fig8", "fig8-image-thin"},
    {"fig9", "fig9-image-wide"},     {"fig10", "fig10-spectral-thin"}, {"fig11", "fig11-spectral-wide"},
};

// Config parsing ---------------------------------------------------------

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return j.get<double>();
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
  }
}

Frame parse_frame(const Json& j) {
  if (!j.is_string()) throw ConfigError("config: 'frame' must be a string");
  const auto s = j.get<std::string>();
  if (s == "lab") return Frame::lab;
  if (s == "free-fall" || s == "free_fall") return Frame::free_fall;
  throw ConfigError("config: frame must be 'lab' or 'free-fall', got '" + s + "'");
}

void apply_json(Scenario& s, const Json& j, bool allow_name) {
  if (!j.is_object()) throw ConfigError("config: scenario entries must be objects");
  if (allow_name) {
    reject_unknown(j, {"name", "species", "packet", "params", "solver", "oracles"}, "run");
  }
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("config: 'name' must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("species")) {
    if (!j["species"].is_string()) throw ConfigError("config: 'species' must be a string");
    s.species = j["species"].get<std::string>();
    s.params.mass = species_params(s.species).mass;
  }
  if (j.contains("packet")) {
    const Json& p = j["packet"];
    if (!p.is_object()) throw ConfigError("config: 'packet' must be an object");
    reject_unknown(p, {"z0", "sigma", "q"}, "packet");
    if (p.contains("z0")) s.packet.z0 = number(p["z0"], "z0");
    if (p.contains("sigma")) s.packet.sigma = number(p["sigma"], "sigma");
    if (p.contains("q")) s.packet.q = number(p["q"], "q");
  }
  if (j.contains("params")) {
    const Json& p = j["params"];
    if (!p.is_object()) throw ConfigError("config: 'params' must be an object");
    reject_unknown(p, {"mass", "gravity", "gp_strength", "barrier_height", "barrier_width", "barrier_base"},
                   "params");
    if (p.contains("mass")) s.params.mass = number(p["mass"], "mass");
    if (p.contains("gravity")) s.params.gravity = number(p["gravity"], "gravity");
    if (p.contains("gp_strength")) s.params.gp_strength = number(p["gp_strength"], "gp_strength");
    if (p.contains("barrier_height")) s.params.barrier_height = number(p["barrier_height"], "barrier_height");
    if (p.contains("barrier_width")) s.params.barrier_width = number(p["barrier_width"], "barrier_width");
    if (p.contains("barrier_base")) s.params.barrier_base = number(p["barrier_base"], "barrier_base");
  }
  if (j.contains("solver")) {
    const Json& p = j["solver"];
    if (!p.is_object()) throw ConfigError("config: 'solver' must be an object");
    reject_unknown(p, {"dt", "dz", "snapshots", "frame", "norm_tolerance", "energy_tolerance", "check_interval"},
                   "solver");
    if (p.contains("dt")) s.solver.dt = number(p["dt"], "dt");
    if (p.contains("dz")) s.dz = number(p["dz"], "dz");
    if (p.contains("frame")) s.solver.frame = parse_frame(p["frame"]);
    if (p.contains("norm_tolerance")) s.solver.norm_tolerance = number(p["norm_tolerance"], "norm_tolerance");
    if (p.contains("energy_tolerance")) {
      s.solver.energy_tolerance = number(p["energy_tolerance"], "energy_tolerance");
    }
    if (p.contains("check_interval")) {
      const double c = number(p["check_interval"], "check_interval");
      if (!(c >= 1.0)) throw ConfigError("config: check_interval must be at least 1");
      s.solver.check_interval = static_cast<std::size_t>(c);
    }
    if (p.contains("snapshots")) {
      if (!p["snapshots"].is_array()) throw ConfigError("config: 'snapshots' must be an array");
      s.solver.snapshot_times.clear();
      for (const auto& v : p["snapshots"]) s.solver.snapshot_times.push_back(number(v, "snapshots"));
    }
  }
  if (j.contains("oracles")) {
    if (!j["oracles"].is_array()) throw ConfigError("config: 'oracles' must be an array");
    s.oracles.clear();
    for (const auto& v : j["oracles"]) {
      if (!v.is_string()) throw ConfigError("config: oracle names must be strings");
      s.oracles.push_back(parse_oracle(v.get<std::string>()));
    }
  }
}

void validate(const Scenario& s) {
  s.params.validate();
  if (s.params.gp_strength < 0.0) throw ConfigError("gp_strength must be non-negative");
  if (!(s.packet.sigma > 0.0) || !std::isfinite(s.packet.sigma)) throw ConfigError("sigma must be positive");
  if (!std::isfinite(s.packet.z0) || !std::isfinite(s.packet.q)) throw ConfigError("packet must be finite");
  if (s.solver.snapshot_times.empty()) throw ConfigError("scenario '" + s.name + "' has no snapshot times");
  s.solver.validate();
  if (s.dz < 0.0 || !std::isfinite(s.dz)) throw ConfigError("dz must be non-negative");
  if (s.solver.dt < 0.0 || !std::isfinite(s.solver.dt)) throw ConfigError("dt must be non-negative");
}

Json scenario_json(const Scenario& s) {
  Json oracles = Json::array();
  for (Oracle o : s.oracles) oracles.push_back(oracle_name(o));
  return Json{{"name", s.name},
              {"species", s.species},
              {"packet", Json{{"z0", s.packet.z0}, {"sigma", s.packet.sigma}, {"q", s.packet.q}}},
              {"params", Json{{"mass", s.params.mass},
                              {"gravity", s.params.gravity},
                              {"gp_strength", s.params.gp_strength},
                              {"barrier_height", s.params.barrier_height},
                              {"barrier_width", s.params.barrier_width},
                              {"barrier_base", s.params.barrier_base}}},
              {"solver", Json{{"dt", s.solver.dt},
                              {"dz", s.dz},
                              {"snapshots", s.solver.snapshot_times},
                              {"frame", s.solver.frame == Frame::lab ? "lab" : "free-fall"},
                              {"norm_tolerance", s.solver.norm_tolerance},
                              {"energy_tolerance", s.solver.energy_tolerance},
                              {"check_interval", s.solver.check_interval}}},
              {"oracles", oracles}};
}

// Running ----------------------------------------------------------------

// Nodes of `grid` at or below z_hi, as a grid of the same spacing.
std::optional<Grid> nodes_below(const Grid& grid, double z_hi) {
  if (grid.z_min() > z_hi) return std::nullopt;
  std::size_t last = grid.size() - 1;
  while (last > 0 && grid.z(last) > z_hi) --last;
  if (last < 1) return std::nullopt;
  return Grid(grid.z_min(), grid.z(last), last + 1);
}

WaveField modulus_field(const ClosedFormModulus& form, const Grid& grid, double t) {
  std::vector<Complex> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = form.value(grid.z(i));
  return WaveField(grid, std::move(v), t);
}

std::string plot_title(const std::string& id, double t) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << id << ", t = " << t << " ms";
  return s.str();
}

PlotSeries intensity_series(const std::string& label, const WaveField& field, ZInterval region) {
  PlotSeries s{label, {}, {}};
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double z = field.grid().z(i);
    if (z < region.lo || z > region.hi) continue;
    s.x.push_back(z);
    s.y.push_back(std::norm(field[i]));
  }
  return s;
}

std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string oracle_name(Oracle oracle) {
  for (const auto& o : kOracles) {
    if (o.oracle == oracle) return o.name;
  }
  throw ConfigError("unknown oracle");
}

Oracle parse_oracle(std::string_view name) {
  for (const auto& o : kOracles) {
    if (name == o.name) return o.oracle;
  }
  std::ostringstream msg;
  msg << "unknown oracle '" << name << "'; available:";
  for (const auto& o : kOracles) msg << ' ' << o.name;
  throw ConfigError(msg.str());
}

std::vector<Oracle> all_oracles() {
  std::vector<Oracle> out;
  for (const auto& o : kOracles) out.push_back(o.oracle);
  return out;
}

std::string oracle_description(Oracle oracle) {
  for (const auto& o : kOracles) {
    if (o.oracle == oracle) return o.description;
  }
  throw ConfigError("unknown oracle");
}

std::vector<std::string> preset_names() {
  return {"fig2",
          "fig3-thin-vs-wide",
          "fig4-gp-thin-vs-wide",
          "fig5-gp",
          "fig6-borderline",
          "fig7-freefall",
          "fig8-image-thin",
          "fig9-image-wide",
          "fig10-spectral-thin",
          "fig11-spectral-wide",
          "long-persistence",
          "barrier-vs-well",
          "hydrogen-fig2"};
}

Preset preset(std::string_view name) {
  std::string key(name);
  for (const auto& [alias, full] : kAliases) {
    if (key == alias) key = full;
  }
  return build_preset(key);
}

Preset parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, {"preset", "name", "description", "species", "packet", "params", "solver", "oracles", "runs"},
                 "config");
  Preset out;
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("config: 'preset' must be a string");
    out = preset(doc["preset"].get<std::string>());
  } else {
    Scenario s;
    s.name = "run";
    s.params = sodium_params();
    s.solver.snapshot_times = {4.0};
    out.name = "config";
    out.runs = {s};
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("config: 'name' must be a string");
    out.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description") && doc["description"].is_string()) {
    out.description = doc["description"].get<std::string>();
  }
  Json shared = doc;
  for (const char* k : {"preset", "name", "description", "runs"}) shared.erase(k);
  for (auto& run : out.runs) apply_json(run, shared, false);
  if (doc.contains("runs")) {
    if (!doc["runs"].is_array() || doc["runs"].empty()) throw ConfigError("config: 'runs' must be a non-empty array");
    const Scenario base = out.runs.front();
    out.runs.clear();
    std::size_t k = 0;
    for (const auto& r : doc["runs"]) {
      Scenario s = base;
      s.name = "run" + std::to_string(k++);
      apply_json(s, r, true);
      out.runs.push_back(s);
    }
  }
  for (const auto& run : out.runs) validate(run);
  return out;
}

Preset load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

Preset resolve_scenario(const std::string& preset_or_path) {
  const std::filesystem::path p(preset_or_path);
  if (p.extension() == ".json" || std::filesystem::is_regular_file(p)) return load_config(p);
  return preset(preset_or_path);
}

void apply_overrides(Preset& preset, const Overrides& o) {
  for (auto& s : preset.runs) {
    if (o.dz) s.dz = *o.dz;
    if (o.dt) s.solver.dt = *o.dt;
    if (o.gp) s.params.gp_strength = *o.gp;
    if (o.dt_factor) s.dt_factor = *o.dt_factor;
    if (o.snapshots) s.solver.snapshot_times = *o.snapshots;
    if (o.t_max) {
      auto& ts = s.solver.snapshot_times;
      ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double t) { return t > *o.t_max; }), ts.end());
      if (ts.empty() || ts.back() < *o.t_max) ts.push_back(*o.t_max);
    }
    if (!(s.dt_factor > 0.0)) throw ConfigError("dt factor must be positive");
    validate(s);
  }
}

WaveField initial_field(const Scenario& s, const Grid& grid) {
  if (s.params.barrier_height > 0.0) {
    const auto model = s.solver.frame == Frame::lab ? FaceModel::snapped : FaceModel::cell_fraction;
    return make_mirror_packet(s.packet, grid, s.params, model);
  }
  return make_gaussian(s.packet, grid);
}

std::string run_id(const Preset& preset, std::size_t index) {
  if (preset.runs.size() == 1) return preset.name;
  return preset.name + "-" + preset.runs.at(index).name;
}

ScenarioReport run_scenario(const Scenario& scenario, const std::string& id, const std::filesystem::path& out) {
  validate(scenario);
  const PhysicalParams& params = scenario.params;
  const double t_max = scenario.solver.snapshot_times.back();
  const Frame frame = scenario.solver.frame;
  const double dz = scenario.dz > 0.0 ? scenario.dz : default_spacing(scenario.packet, params, t_max, frame);
  const Grid grid = default_grid(scenario.packet, params, t_max, dz, frame);
  const WaveField init = initial_field(scenario, grid);

  SolverConfig cfg = scenario.solver;
  cfg.enforce_contract = false;
  const double dt0 = cfg.dt > 0.0 ? cfg.dt : default_time_step(init, params, frame);
  cfg.dt = dt0 * scenario.dt_factor;

  ScenarioReport report;
  report.run_id = id;
  report.result = propagate_gp(init, params, cfg);
  const RunResult& res = report.result;

  // Oracle setup shared across snapshots.
  std::optional<SpectralCoefficients> numeric;
  std::optional<SpectralCoefficients> thin;
  const auto below = nodes_below(grid, params.barrier_base);
  auto wants = [&](Oracle o) {
    return std::find(scenario.oracles.begin(), scenario.oracles.end(), o) != scenario.oracles.end();
  };
  std::string spectral_error;
  if ((wants(Oracle::spectral_numeric) || wants(Oracle::spectral_thin)) && below) {
    try {
      const LabelGrid labels = label_grid(scenario.packet, params, t_max, deepest_point(*below, params));
      if (wants(Oracle::spectral_numeric)) {
        numeric = coefficients_numeric(init, params, labels);
        const auto path = out / (id + "_coefficients_numeric.csv");
        write_coefficients_csv(*numeric, path);
        report.files.push_back(path);
      }
      if (wants(Oracle::spectral_thin)) {
        thin = coefficients_thin_packet(scenario.packet, params, labels);
        if (thin->validity_warning) report.warnings.push_back(thin->warning);
        const auto path = out / (id + "_coefficients_thin.csv");
        write_coefficients_csv(*thin, path);
        report.files.push_back(path);
      }
    } catch (const ContractError&) {
      throw;
    } catch (const Error& e) {
      spectral_error = e.what();
    }
  }

  Json diag_snaps = Json::array();
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    const WaveField& field = res.snapshots[k];
    const double t = field.time();
    diag_snaps.push_back(diagnostics_json(res.diagnostics[k]));
    const auto csv = out / snapshot_file_name(id, t);
    write_snapshot_csv(field, csv);
    report.files.push_back(csv);

    const ZInterval region = packet_region(field, 1e-4);
    std::vector<PlotSeries> series{intensity_series("numeric", field, region)};
    for (Oracle o : scenario.oracles) {
      OracleComparison c;
      c.oracle = o;
      c.time = t;
      try {
        std::optional<WaveField> ref;
        switch (o) {
          case Oracle::free_fall:
            ref = FreeFallPacket(scenario.packet, params).sample(grid, t);
            break;
          case Oracle::image_plain:
          case Oracle::image_corrected:
            if (!below) throw DomainError("no grid nodes below the mirror face");
            ref = ImagePacket(scenario.packet, params,
                              o == Oracle::image_plain ? ImageVariant::plain : ImageVariant::corrected)
                      .sample(*below, t);
            break;
          case Oracle::modulus:
            if (!below) throw DomainError("no grid nodes below the mirror face");
            ref = modulus_field(ClosedFormModulus(scenario.packet, params, t), *below, t);
            break;
          case Oracle::spectral_numeric:
          case Oracle::spectral_thin: {
            const auto& coeffs = o == Oracle::spectral_numeric ? numeric : thin;
            if (!coeffs) throw DomainError(spectral_error.empty() ? "no coefficients" : spectral_error);
            ref = evolve_spectral(*coeffs, t, *below, false);
            if (o == Oracle::spectral_thin && coeffs->validity_warning) c.note = coeffs->warning;
            break;
          }
        }
        c.mode = CompareMode::modulus;
        c.result = compare_fields(field, *ref, c.mode);
        series.push_back(intensity_series(oracle_name(o), *ref, region));
      } catch (const ContractError&) {
        throw;
      } catch (const Error& e) {
        c.note = e.what();
      }
      report.comparisons.push_back(std::move(c));
    }
    const auto svg = out / std::filesystem::path(snapshot_file_name(id, t)).replace_extension(".svg");
    write_text(render_svg(plot_title(id, t), "z (um)", "|psi|^2 (1/um)", series), svg);
    report.files.push_back(svg);
  }

  Json diag{{"run_id", id},
            {"config", scenario_json(scenario)},
            {"grid", Json{{"z_min", grid.z_min()}, {"z_max", grid.z_max()}, {"points", grid.size()},
                          {"dz", grid.spacing()}}},
            {"dt", res.dt},
            {"steps", res.steps},
            {"contract_ok", res.contract_ok},
            {"max_norm_drift", res.max_norm_drift},
            {"max_energy_drift", res.max_energy_drift},
            {"wall_time_s", res.wall_time},
            {"drift", drift_json(res.drift)},
            {"snapshots", diag_snaps}};
  const auto diag_path = out / (id + "_diagnostics.json");
  write_json(diag, diag_path);
  report.files.push_back(diag_path);

  Json comps = Json::array();
  for (const auto& c : report.comparisons) {
    Json e{{"oracle", oracle_name(c.oracle)}, {"time", c.time}};
    if (c.result) {
      e["mode"] = c.mode == CompareMode::modulus ? "modulus" : "full";
      e["l2_rel"] = c.result->l2_rel;
      e["linf_rel"] = c.result->linf_rel;
    } else {
      e["skipped"] = true;
    }
    e["note"] = c.note;
    comps.push_back(std::move(e));
  }
  const auto comp_path = out / (id + "_comparison.json");
  write_json(Json{{"run_id", id}, {"comparisons", comps}, {"warnings", report.warnings}}, comp_path);
  report.files.push_back(comp_path);
  return report;
}

std::vector<std::string> sweep_parameters() { return {"sigma", "z0", "gp_strength", "barrier_height"}; }

std::optional<bool> visibility_monotone(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (!r.error.empty() || !r.epsilon) continue;
    pts.emplace_back(*r.epsilon, r.visibility.value_or(0.0));
  }
  std::sort(pts.begin(), pts.end());
  bool varies = false;
  for (std::size_t i = 1; i < pts.size(); ++i) varies = varies || pts[i].first != pts[0].first;
  if (!varies) return std::nullopt;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first > pts[i - 1].first && pts[i].second > pts[i - 1].second) return false;
  }
  return true;
}

SweepResult run_sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                      const std::filesystem::path& out) {
  const auto names = sweep_parameters();
  if (std::find(names.begin(), names.end(), parameter) == names.end()) {
    std::ostringstream msg;
    msg << "unknown sweep parameter '" << parameter << "'; available:";
    for (const auto& n : names) msg << ' ' << n;
    throw ConfigError(msg.str());
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");

  SweepResult result;
  result.parameter = parameter;
  result.rows.resize(values.size());
  detail::parallel_for(values.size(), [&](std::size_t i) {
    SweepRow& row = result.rows[i];
    row.value = values[i];
    Scenario s = base;
    if (parameter == "sigma") s.packet.sigma = values[i];
    if (parameter == "z0") s.packet.z0 = values[i];
    if (parameter == "gp_strength") s.params.gp_strength = values[i];
    if (parameter == "barrier_height") s.params.barrier_height = values[i];
    try {
      if (s.params.gravity > 0.0 && s.packet.z0 != 0.0) row.epsilon = crossover_ratio(s.packet, s.params);
      const std::string id = parameter + "_" + format_value(values[i]);
      const auto rep = run_scenario(s, id, out / id);
      const auto& d = rep.result.diagnostics.back();
      row.visibility = d.visibility;
      row.peak_count = d.peaks.size();
      row.contract_ok = rep.result.contract_ok;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  result.monotone = visibility_monotone(result.rows);

  std::ostringstream csv;
  csv << "value,epsilon,visibility,peak_count,status\n";
  Json rows = Json::array();
  for (const auto& r : result.rows) {
    const std::string status = !r.error.empty() ? "error" : (r.contract_ok ? "ok" : "contract");
    csv << format_number(r.value) << ',' << (r.epsilon ? format_number(*r.epsilon) : "") << ','
        << (r.visibility ? format_number(*r.visibility) : "") << ',' << r.peak_count << ',' << status << '\n';
    rows.push_back(Json{{"value", r.value},
                        {"epsilon", r.epsilon ? Json(*r.epsilon) : Json(nullptr)},
                        {"visibility", r.visibility ? Json(*r.visibility) : Json(nullptr)},
                        {"peak_count", r.peak_count},
                        {"status", status},
                        {"error", r.error}});
  }
  write_text(csv.str(), out / "sweep.csv");
  write_json(Json{{"parameter", parameter},
                  {"base", scenario_json(base)},
                  {"visibility_non_increasing_in_epsilon", result.monotone ? Json(*result.monotone) : Json(nullptr)},
                  {"rows", rows}},
             out / "sweep_summary.json");
  return result;
}

}  // namespace mirrorfall
