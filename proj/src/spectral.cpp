#include "mirrorfall/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mirrorfall/airy.hpp"
#include "mirrorfall/errors.hpp"
#include "parallel.hpp"

namespace mirrorfall {
namespace {

double label_integral(const LabelGrid& labels, const std::vector<double>& f) {
  const auto w = simpson_weights(f.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
  return sum * labels.da;
}

void require_same_labels(const LabelGrid& a, const LabelGrid& b) {
  if (a.count != b.count || std::abs(a.a_min - b.a_min) > 1e-12 || std::abs(a.da - b.da) > 1e-15) {
    throw ConfigError("coefficient sets use different label grids");
  }
}

}  // namespace

std::vector<double> simpson_weights(std::size_t n) {
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  if (n == 2) {
    w[0] = w[1] = 0.5;
    return w;
  }
  // Simpson on the first m points (m odd), 3/8 rule on the last four if n is even.
  const std::size_t m = (n % 2 == 1) ? n : n - 3;
  if (m >= 3) {
    for (std::size_t i = 0; i < m; ++i) {
      if (i == 0 || i + 1 == m) {
        w[i] += 1.0 / 3.0;
      } else {
        w[i] += (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
      }
    }
  }
  if (m != n) {
    const std::size_t s = n - 4;
    w[s] += 3.0 / 8.0;
    w[s + 1] += 9.0 / 8.0;
    w[s + 2] += 9.0 / 8.0;
    w[s + 3] += 3.0 / 8.0;
  }
  return w;
}

MirrorEigenfunction::MirrorEigenfunction(double a, const PhysicalParams& params) : a_(a) {
  const AiryPair p = airy(a);
  const double h = std::hypot(p.ai, p.bi);
  ai_ = p.ai / h;
  bi_ = p.bi / h;
  energy_ = params.mass * params.gravity * params.barrier_base - a * gravitational_energy(params);
}

double MirrorEigenfunction::continued_value(double x) const {
  const AiryPair p = airy(x + a_);
  return bi_ * p.ai - ai_ * p.bi;
}

double MirrorEigenfunction::value(double x) const {
  if (x > 0.0) throw DomainError("mirror eigenfunction is defined for x <= 0 only");
  return continued_value(x);
}

LabelGrid label_grid(const PacketSpec& spec, const PhysicalParams& params, double t_max, double x_min) {
  const double lg = gravitational_length(params);
  const double x0 = (spec.z0 - params.barrier_base) / lg;
  const double gamma = spec.sigma / lg;
  // The low side carries the kinetic tail, which decays like exp(-2 gamma^2 da).
  const double below = 6.0 / (gamma * gamma) + 8.0 / gamma + 10.0;
  const double above = 8.0 / gamma + 4.0 * gamma + 10.0;
  LabelGrid labels;
  labels.a_min = -x0 - below;
  const double reach = std::sqrt(std::max(0.0, -std::min(x_min, x0) - labels.a_min)) +
                       std::sqrt(std::max(0.0, -x0 - labels.a_min)) +
                       gravitational_energy(params) * std::max(0.0, t_max);
  labels.da = std::min(0.05, kPi / (4.0 * reach));
  labels.count = static_cast<std::size_t>(std::floor((below + above) / labels.da)) + 1;
  return labels;
}

double deepest_point(const Grid& grid, const PhysicalParams& params) {
  return (grid.z_min() - params.barrier_base) / gravitational_length(params);
}

double SpectralCoefficients::parseval() const {
  std::vector<double> f(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) f[i] = std::norm(values[i]);
  return label_integral(labels, f);
}

SpectralCoefficients coefficients_numeric(const WaveField& packet, const PhysicalParams& params,
                                          const LabelGrid& labels) {
  const Grid& grid = packet.grid();
  const double lg = gravitational_length(params);
  const double dz = grid.spacing();

  double above = 0.0;
  double peak = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    peak = std::max(peak, std::abs(packet[j]));
    if (grid.z(j) > params.barrier_base) above += std::norm(packet[j]) * dz;
  }
  if (above > 1e-6) {
    throw DomainError("packet is not supported below the mirror face (norm above: " + std::to_string(above) + ")");
  }
  // Contiguous range of significant samples below the face.
  std::size_t first = grid.size();
  std::size_t last = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid.z(j) > params.barrier_base) break;
    if (std::abs(packet[j]) > 1e-14 * peak) {
      first = std::min(first, j);
      last = j;
    }
  }
  if (first >= grid.size()) throw DomainError("packet vanishes below the mirror face");

  const std::size_t n = last - first + 1;
  const auto w = simpson_weights(n);
  const double dx = dz / lg;
  const double scale = std::sqrt(lg);
  std::vector<double> xs(n);
  std::vector<Complex> weighted(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = (grid.z(first + k) - params.barrier_base) / lg;
    weighted[k] = w[k] * dx * scale * packet[first + k];
  }

  SpectralCoefficients out;
  out.labels = labels;
  out.values.assign(labels.count, Complex{});
  out.source = CoefficientSource::numeric;
  out.params = params;
  detail::parallel_for(labels.count, [&](std::size_t i) {
    const MirrorEigenfunction chi(labels.a(i), params);
    Complex sum{};
    for (std::size_t k = 0; k < n; ++k) sum += chi.value(xs[k]) * weighted[k];
    out.values[i] = sum;
  });

  const double captured = out.parseval() / packet.norm();
  if (captured < 0.99) {
    std::ostringstream msg;
    msg << "label range captures only " << captured << " of the packet norm";
    throw ResolutionError(msg.str());
  }
  return out;
}

SpectralCoefficients coefficients_thin_packet(const PacketSpec& spec, const PhysicalParams& params,
                                              const LabelGrid& labels, ThinPacketArgument argument) {
  if (spec.q != 0.0) throw DomainError("thin-packet coefficients require q = 0");
  const double lg = gravitational_length(params);
  const double x0 = (spec.z0 - params.barrier_base) / lg;
  const double gamma = spec.sigma / lg;
  const double g2 = gamma * gamma;
  const double shift = argument == ThinPacketArgument::quartic ? g2 * g2 : g2;
  const double pref = std::pow(8.0 * kPi * g2, 0.25);

  SpectralCoefficients out;
  out.labels = labels;
  out.values.assign(labels.count, Complex{});
  out.source = CoefficientSource::thin_packet;
  out.params = params;
  if (gamma > 0.5) {
    out.validity_warning = true;
    std::ostringstream msg;
    msg << "gamma = sigma/l_g = " << gamma << " exceeds 0.5; thin-packet coefficients are unreliable";
    out.warning = msg.str();
  }
  detail::parallel_for(labels.count, [&](std::size_t i) {
    const double a = labels.a(i);
    const MirrorEigenfunction chi(a, params);
    out.values[i] = pref * std::exp((a + x0) * g2 + 2.0 * g2 * g2 * g2 / 3.0) * chi.continued_value(x0 + shift);
  });
  const auto bad = std::count_if(out.values.begin(), out.values.end(),
                                 [](const Complex& c) { return !std::isfinite(std::norm(c)); });
  if (bad > 0) {
    out.validity_warning = true;
    out.warning += (out.warning.empty() ? "" : "; ") + std::to_string(bad) + " coefficients overflow";
  }
  return out;
}

WaveField evolve_spectral(const SpectralCoefficients& coeffs, double t, const Grid& out_grid, bool check_norm) {
  if (!(t >= 0.0)) throw DomainError("evolve_spectral requires t >= 0");
  const PhysicalParams& params = coeffs.params;
  for (const auto& c : coeffs.values) {
    if (!std::isfinite(std::norm(c))) throw DomainError("cannot evolve coefficients whose squares overflow");
  }
  const double lg = gravitational_length(params);
  const std::size_t na = coeffs.labels.count;
  const auto w = simpson_weights(na);

  std::vector<MirrorEigenfunction> basis;
  basis.reserve(na);
  std::vector<Complex> factor(na);
  for (std::size_t i = 0; i < na; ++i) {
    basis.emplace_back(coeffs.labels.a(i), params);
    factor[i] = w[i] * coeffs.labels.da * coeffs.values[i] * std::polar(1.0, -basis.back().energy() * t) /
                std::sqrt(lg);
  }

  std::vector<Complex> samples(out_grid.size());
  detail::parallel_for(out_grid.size(), [&](std::size_t j) {
    const double x = (out_grid.z(j) - params.barrier_base) / lg;
    if (x > 0.0) return;
    Complex sum{};
    for (std::size_t i = 0; i < na; ++i) sum += factor[i] * basis[i].value(x);
    samples[j] = sum;
  });
  WaveField field(out_grid, std::move(samples), t);
  if (check_norm) {
    const double expected = coeffs.parseval();
    const double got = field.norm();
    if (std::abs(got - expected) > 0.01 * expected) {
      std::ostringstream msg;
      msg << "synthesized norm " << got << " differs from the Parseval sum " << expected
          << "; refine the label spacing (da = " << coeffs.labels.da << ")";
      throw ResolutionError(msg.str());
    }
  }
  return field;
}

double coefficient_energy(const SpectralCoefficients& coeffs) {
  const double eg = gravitational_energy(coeffs.params);
  const double base = coeffs.params.mass * coeffs.params.gravity * coeffs.params.barrier_base;
  std::vector<double> p(coeffs.values.size());
  std::vector<double> pe(coeffs.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::norm(coeffs.values[i]);
    pe[i] = p[i] * (base - coeffs.labels.a(i) * eg);
  }
  return label_integral(coeffs.labels, pe) / label_integral(coeffs.labels, p);
}

double coefficient_distance(const SpectralCoefficients& coeffs, const SpectralCoefficients& reference) {
  require_same_labels(coeffs.labels, reference.labels);
  std::vector<double> d(coeffs.values.size());
  std::vector<double> r(coeffs.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = std::norm(coeffs.values[i] - reference.values[i]);
    r[i] = std::norm(reference.values[i]);
  }
  return std::sqrt(label_integral(coeffs.labels, d) / label_integral(reference.labels, r));
}

OverlapResult orthonormality_check(double a, double b, const PhysicalParams& params, double x_cutoff, double dx) {
  if (!(x_cutoff < 0.0) || !(dx > 0.0)) throw ConfigError("overlap needs x_cutoff < 0 and dx > 0");
  const MirrorEigenfunction fa(a, params);
  const MirrorEigenfunction fb(b, params);
  const auto cells = static_cast<std::size_t>(std::ceil(-x_cutoff / dx));
  const double h = -x_cutoff / static_cast<double>(cells);
  const auto w = simpson_weights(cells + 1);
  double sum = 0.0;
  for (std::size_t k = 0; k <= cells; ++k) {
    const double x = std::min(0.0, x_cutoff + static_cast<double>(k) * h);
    sum += w[k] * fa.value(x) * fb.value(x);
  }
  return {sum * h, x_cutoff > -200.0};
}

double smoothed_delta_weight(double a, const PhysicalParams& params, double x_cutoff, double dx, double half_width,
                             double db) {
  if (!(x_cutoff < 0.0) || !(dx > 0.0) || !(db > 0.0) || !(half_width > 0.0)) {
    throw ConfigError("smoothed delta weight needs x_cutoff < 0 and positive steps");
  }
  const auto nb_cells = static_cast<std::size_t>(std::ceil(2.0 * half_width / db));
  const double hb = 2.0 * half_width / static_cast<double>(nb_cells);
  const auto wb = simpson_weights(nb_cells + 1);
  std::vector<MirrorEigenfunction> family;
  for (std::size_t i = 0; i <= nb_cells; ++i) family.emplace_back(a - half_width + static_cast<double>(i) * hb, params);

  const MirrorEigenfunction fa(a, params);
  const auto cells = static_cast<std::size_t>(std::ceil(-x_cutoff / dx));
  const double h = -x_cutoff / static_cast<double>(cells);
  const auto wx = simpson_weights(cells + 1);
  std::vector<double> terms(cells + 1);
  detail::parallel_for(cells + 1, [&](std::size_t k) {
    const double x = std::min(0.0, x_cutoff + static_cast<double>(k) * h);
    double inner = 0.0;
    for (std::size_t i = 0; i <= nb_cells; ++i) inner += wb[i] * family[i].value(x);
    terms[k] = wx[k] * fa.value(x) * inner * hb;
  });
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum * h;
}

}  // namespace mirrorfall
