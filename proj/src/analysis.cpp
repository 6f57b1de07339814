#include "mirrorfall/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mirrorfall/errors.hpp"

namespace mirrorfall {
namespace {

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

// Topographic prominence of the maximum at i within v[lo..hi].
double prominence_of_max(const std::vector<double>& v, std::size_t i, std::size_t lo, std::size_t hi) {
  double left_min = v[i];
  for (std::size_t j = i; j-- > lo;) {
    if (v[j] > v[i]) break;
    left_min = std::min(left_min, v[j]);
  }
  double right_min = v[i];
  for (std::size_t j = i + 1; j <= hi; ++j) {
    if (v[j] > v[i]) break;
    right_min = std::min(right_min, v[j]);
  }
  return v[i] - std::max(left_min, right_min);
}

struct Extremum {
  std::size_t index;
  double prominence;
};

// Interior strict maxima of v[lo..hi]; a flat top is reported at its centre.
std::vector<Extremum> local_maxima(const std::vector<double>& v, std::size_t lo, std::size_t hi,
                                   double min_height, double min_prominence) {
  std::vector<Extremum> out;
  if (hi < lo + 2) return out;
  std::size_t i = lo + 1;
  while (i < hi) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) {
      std::size_t k = i;
      while (k + 1 < hi && v[k + 1] == v[i]) ++k;
      if (v[k + 1] < v[i] && v[i] >= min_height) {
        const std::size_t mid = i + (k - i) / 2;
        const double prom = prominence_of_max(v, mid, lo, hi);
        if (prom >= min_prominence) out.push_back({mid, prom});
      }
      i = k + 1;
    } else {
      ++i;
    }
  }
  return out;
}

// Vertex of the parabola through (i-1, i, i+1): offset in cells and value.
std::pair<double, double> refine(const std::vector<double>& v, std::size_t i) {
  if (i == 0 || i + 1 >= v.size()) return {0.0, v[i]};
  const double a = v[i - 1];
  const double b = v[i];
  const double c = v[i + 1];
  const double den = a - 2.0 * b + c;
  if (den == 0.0) return {0.0, b};
  const double delta = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
  return {delta, b - 0.25 * (a - c) * delta};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename T>
T cubic_sample(const std::vector<T>& values, const Grid& grid, double z) {
  const std::size_t n = values.size();
  const double u = (z - grid.z_min()) / grid.spacing();
  if (n < 4) {
    const auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(n - 2)));
    const double f = u - static_cast<double>(i);
    return values[i] * (1.0 - f) + values[i + 1] * f;
  }
  const double base = std::clamp(std::floor(u) - 1.0, 0.0, static_cast<double>(n - 4));
  const auto i0 = static_cast<std::size_t>(base);
  const double x = u - base;  // position relative to node i0, nodes at 0,1,2,3
  const std::array<double, 4> w = {
      -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
      x * (x - 2.0) * (x - 3.0) / 2.0,
      -x * (x - 1.0) * (x - 3.0) / 2.0,
      x * (x - 1.0) * (x - 2.0) / 6.0,
  };
  T out = values[i0] * w[0];
  for (std::size_t k = 1; k < 4; ++k) out += values[i0 + k] * w[k];
  return out;
}

}  // namespace

Functionals conserved_functionals(const WaveField& field, const PhysicalParams& params) {
  const Grid& grid = field.grid();
  const std::size_t n = field.size();
  const double dz = grid.spacing();
  Complex corr{0.0, 0.0};
  for (std::size_t j = 0; j + 1 < n; ++j) corr += std::conj(field[j]) * field[j + 1];
  const double kbar = std::arg(corr) / dz;

  std::vector<Complex> phi(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] = field[j] * std::polar(1.0, -kbar * grid.z(j));

  const auto span = barrier_span(params, grid);
  const double slope = params.mass * params.gravity;
  Functionals out;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = trapezoid_weight(j, n) * dz;
    Complex dphi;
    if (j == 0) {
      dphi = (phi[1] - phi[0]) / dz;
    } else if (j + 1 == n) {
      dphi = (phi[j] - phi[j - 1]) / dz;
    } else {
      dphi = (phi[j + 1] - phi[j - 1]) / (2.0 * dz);
    }
    const Complex grad = dphi + Complex{0.0, kbar} * phi[j];
    const double rho = std::norm(field[j]);
    out.norm += w * rho;
    out.parts.kinetic += w * std::norm(grad) / (2.0 * params.mass);
    out.parts.gravity += w * slope * grid.z(j) * rho;
    if (!span.empty && j >= span.first && j <= span.last) out.parts.barrier += w * params.barrier_height * rho;
    out.parts.interaction += w * 0.5 * params.gp_strength * rho * rho;
  }
  out.energy = out.parts.total();
  return out;
}

std::vector<Peak> find_peaks(const WaveField& field, double min_prominence) {
  if (!(min_prominence > 0.0 && min_prominence < 1.0)) {
    throw ConfigError("peak prominence fraction must lie in (0, 1)");
  }
  const auto inten = field.intensity();
  std::vector<Peak> peaks;
  if (inten.size() < 3) return peaks;
  const double top = *std::max_element(inten.begin(), inten.end());
  if (!(top > 0.0)) return peaks;
  const double thr = min_prominence * top;
  const auto maxima = local_maxima(inten, 0, inten.size() - 1, thr, thr);
  const Grid& grid = field.grid();
  for (const auto& e : maxima) {
    const auto [delta, height] = refine(inten, e.index);
    peaks.push_back({grid.z(e.index) + delta * grid.spacing(), height, e.prominence});
  }
  return peaks;
}

ZInterval packet_region(const WaveField& field, double fraction) {
  const auto inten = field.intensity();
  const double top = *std::max_element(inten.begin(), inten.end());
  const double thr = fraction * top;
  std::size_t first = 0;
  while (first < inten.size() && inten[first] < thr) ++first;
  std::size_t last = inten.size() - 1;
  while (last > first && inten[last] < thr) --last;
  return {field.grid().z(first), field.grid().z(last)};
}

std::optional<double> fringe_visibility(const WaveField& field, std::optional<ZInterval> region) {
  const ZInterval r = region.value_or(packet_region(field));
  const Grid& grid = field.grid();
  const auto inten = field.intensity();
  const double u_lo = std::ceil((r.lo - grid.z_min()) / grid.spacing() - 1e-9);
  const double u_hi = std::floor((r.hi - grid.z_min()) / grid.spacing() + 1e-9);
  const double last = static_cast<double>(grid.size() - 1);
  const auto lo = static_cast<std::size_t>(std::clamp(u_lo, 0.0, last));
  const auto hi = static_cast<std::size_t>(std::clamp(u_hi, 0.0, last));
  if (hi < lo + 2) return std::nullopt;

  const double top = *std::max_element(inten.begin() + static_cast<std::ptrdiff_t>(lo),
                                       inten.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  if (!(top > 0.0)) return std::nullopt;
  const double thr = 0.01 * top;

  std::vector<double> neg(inten.size());
  std::transform(inten.begin(), inten.end(), neg.begin(), [](double v) { return -v; });
  const auto maxima = local_maxima(inten, lo, hi, -INFINITY, thr);
  const auto minima = local_maxima(neg, lo, hi, -INFINITY, thr);

  struct Ext {
    std::size_t index;
    bool is_max;
  };
  std::vector<Ext> ext;
  for (const auto& e : maxima) ext.push_back({e.index, true});
  for (const auto& e : minima) ext.push_back({e.index, false});
  std::sort(ext.begin(), ext.end(), [](const Ext& a, const Ext& b) { return a.index < b.index; });

  // Enforce alternation, keeping the more extreme of two like neighbours.
  std::vector<Ext> alt;
  for (const auto& e : ext) {
    if (!alt.empty() && alt.back().is_max == e.is_max) {
      const bool better = e.is_max ? inten[e.index] > inten[alt.back().index]
                                   : inten[e.index] < inten[alt.back().index];
      if (better) alt.back() = e;
      continue;
    }
    alt.push_back(e);
  }
  while (!alt.empty() && !alt.front().is_max) alt.erase(alt.begin());
  while (!alt.empty() && !alt.back().is_max) alt.pop_back();
  if (alt.size() < 3) return std::nullopt;

  std::vector<double> contrasts;
  for (std::size_t k = 0; k + 1 < alt.size(); ++k) {
    const double a = inten[alt[k].index];
    const double b = inten[alt[k + 1].index];
    const double imax = std::max(a, b);
    const double imin = std::min(a, b);
    contrasts.push_back((imax - imin) / (imax + imin));
  }
  return std::clamp(median(std::move(contrasts)), 0.0, 1.0);
}

std::optional<double> fringe_spacing(const std::vector<Peak>& peaks) {
  if (peaks.size() < 2) return std::nullopt;
  std::vector<double> gaps;
  for (std::size_t k = 0; k + 1 < peaks.size(); ++k) gaps.push_back(peaks[k + 1].z - peaks[k].z);
  return median(std::move(gaps));
}

Comparison compare_fields(const WaveField& field, const WaveField& reference, CompareMode mode) {
  const Grid& g = field.grid();
  const Grid& rg = reference.grid();
  const double tol = 1e-9 * std::max(1.0, g.spacing());
  std::size_t first = g.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.z(i) >= rg.z_min() - tol && g.z(i) <= rg.z_max() + tol) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first >= g.size() || last <= first) throw DomainError("compare_fields: grids do not overlap");

  const bool same = g.same_nodes(rg);
  const std::size_t n = last - first + 1;
  std::vector<Complex> a(n);
  std::vector<Complex> b(n);
  std::vector<Complex> ref_samples;
  std::vector<double> ref_intensity;
  if (!same) {
    if (mode == CompareMode::full) {
      ref_samples.assign(reference.samples().begin(), reference.samples().end());
    } else {
      ref_intensity = reference.intensity();
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = first + k;
    a[k] = field[i];
    if (same) {
      b[k] = reference[i];
    } else if (mode == CompareMode::full) {
      b[k] = cubic_sample(ref_samples, rg, g.z(i));
    } else {
      b[k] = std::sqrt(std::max(0.0, cubic_sample(ref_intensity, rg, g.z(i))));
    }
  }

  if (mode == CompareMode::modulus) {
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = std::abs(a[k]);
      b[k] = std::abs(b[k]);
    }
  } else {
    Complex overlap{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) overlap += std::conj(b[k]) * a[k];
    const Complex rot = std::polar(1.0, -std::arg(overlap));
    for (auto& v : a) v *= rot;
  }

  double num = 0.0, den = 0.0, dmax = 0.0, bmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = trapezoid_weight(k, n);
    const double d = std::abs(a[k] - b[k]);
    num += w * d * d;
    den += w * std::norm(b[k]);
    dmax = std::max(dmax, d);
    bmax = std::max(bmax, std::abs(b[k]));
  }
  if (!(den > 0.0)) throw DomainError("compare_fields: reference vanishes on the overlap");
  return {std::sqrt(num / den), dmax / bmax};
}

DiagnosticsReport diagnose(const WaveField& field, const PhysicalParams& params, double min_prominence) {
  DiagnosticsReport r;
  r.time = field.time();
  const auto f = conserved_functionals(field, params);
  r.norm = f.norm;
  r.energy = f.energy;
  r.energy_parts = f.parts;
  r.peaks = find_peaks(field, min_prominence);
  r.visibility = fringe_visibility(field);

  const Grid& grid = field.grid();
  const auto inten = field.intensity();
  const std::size_t n = inten.size();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = trapezoid_weight(i, n) * inten[i];
    m0 += w;
    m1 += w * grid.z(i);
  }
  r.center_mean = m0 > 0.0 ? m1 / m0 : 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = grid.z(i) - r.center_mean;
    m2 += trapezoid_weight(i, n) * inten[i] * d * d;
  }
  r.width_rms = m0 > 0.0 ? std::sqrt(m2 / m0) : 0.0;
  const auto imax = static_cast<std::size_t>(std::max_element(inten.begin(), inten.end()) - inten.begin());
  r.center_argmax = grid.z(imax) + refine(inten, imax).first * grid.spacing();
  return r;
}

}  // namespace mirrorfall
