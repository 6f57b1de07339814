#include "mirrorfall/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mirrorfall/errors.hpp"

namespace mirrorfall {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  return out;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(4);
  s << v;
  return s.str();
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string snapshot_file_name(const std::string& run_id, double t_ms) {
  return run_id + "_t" + shortest(t_ms) + ".csv";
}

void write_snapshot_csv(const WaveField& field, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "z,re,im,abs2\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Complex c = field[i];
    out << format_number(field.grid().z(i)) << ',' << format_number(c.real()) << ',' << format_number(c.imag())
        << ',' << format_number(std::norm(c)) << '\n';
  }
}

void write_coefficients_csv(const SpectralCoefficients& coeffs, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "a,re,im,abs2\n";
  for (std::size_t i = 0; i < coeffs.values.size(); ++i) {
    const Complex c = coeffs.values[i];
    out << format_number(coeffs.labels.a(i)) << ',' << format_number(c.real()) << ',' << format_number(c.imag())
        << ',' << format_number(std::norm(c)) << '\n';
  }
}

Json diagnostics_json(const DiagnosticsReport& r) {
  Json j;
  j["time"] = r.time;
  j["norm"] = r.norm;
  j["energy"] = r.energy;
  j["energy_parts"] = Json{{"kinetic", r.energy_parts.kinetic},
                           {"gravity", r.energy_parts.gravity},
                           {"barrier", r.energy_parts.barrier},
                           {"interaction", r.energy_parts.interaction}};
  Json peaks = Json::array();
  for (const auto& p : r.peaks) peaks.push_back(Json{{"z", p.z}, {"height", p.height}, {"prominence", p.prominence}});
  j["peaks"] = std::move(peaks);
  j["visibility"] = r.visibility ? Json(*r.visibility) : Json(nullptr);
  j["center_mean"] = r.center_mean;
  j["center_argmax"] = r.center_argmax;
  j["width_rms"] = r.width_rms;
  return j;
}

Json drift_json(const DriftHistory& drift) {
  return Json{{"times", drift.times}, {"norm_drift", drift.norm_drift}, {"energy_drift", drift.energy_drift}};
}

void write_json(const Json& doc, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << text;
}

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
  constexpr double kW = 800, kH = 500, kL = 80, kR = 20, kT = 40, kB = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  const auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };

  static const char* colors[] = {"#1f4e9c", "#c0392b", "#27813b", "#8e44ad"};
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
    << kW << ' ' << kH << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << escape_xml(title) << "</text>\n";
  s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    s << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv) << "</text>\n";
    s << "<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv) << "</text>\n";
  }
  s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 18 " << kH / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(y_label)
    << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const char* color = colors[k % 4];
    // Thin the polyline to at most ~2000 vertices.
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      s << px(ser.x[i]) << ',' << py(ser.y[i]) << ' ';
    }
    s << "\"/>\n";
    const double ly = kT + 16 + 18 * static_cast<double>(k);
    s << "<line x1=\"" << kW - kR - 150 << "\" y1=\"" << ly << "\" x2=\"" << kW - kR - 125 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << kW - kR - 120 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(ser.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mirrorfall
