#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mirrorfall/analysis.hpp"
#include "mirrorfall/core.hpp"
#include "mirrorfall/spectral.hpp"
#include "mirrorfall/tdse.hpp"

namespace mirrorfall {

using Json = nlohmann::ordered_json;

/// 17 significant digits, locale independent.
std::string format_number(double v);

/// "<run_id>_t<ms>.csv" with the shortest exact spelling of t.
std::string snapshot_file_name(const std::string& run_id, double t_ms);

/// Columns z,re,im,abs2 with a header row.
void write_snapshot_csv(const WaveField& field, const std::filesystem::path& path);

/// Columns a,re,im,abs2 with a header row.
void write_coefficients_csv(const SpectralCoefficients& coeffs, const std::filesystem::path& path);

/// Fixed keys: time, norm, energy, energy_parts, peaks, visibility (null
/// when undefined), center_mean, center_argmax, width_rms.
Json diagnostics_json(const DiagnosticsReport& report);

Json drift_json(const DriftHistory& drift);

void write_json(const Json& doc, const std::filesystem::path& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line plot: frame, tick labels, one polyline per series, legend.
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace mirrorfall
