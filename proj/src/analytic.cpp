#include "mirrorfall/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mirrorfall/errors.hpp"

namespace mirrorfall {
namespace {

constexpr Complex kI{0.0, 1.0};

Complex gravity_phase(double z, double t, const PhysicalParams& p) {
  const double m = p.mass;
  const double g = p.gravity;
  return std::polar(1.0, -m * g * z * t - m * g * g * t * t * t / 6.0);
}

}  // namespace

Complex accelerated_plane_wave(double k, double z, double t, const PhysicalParams& params) {
  const double m = params.mass;
  const double g = params.gravity;
  const double phi = -m * g * z * t + k * (z + g * t * t / 2.0) - k * k * t / (2.0 * m) -
                     m * g * g * t * t * t / 6.0;
  return std::polar(1.0, phi);
}

FreeFallPacket::FreeFallPacket(PacketSpec spec, PhysicalParams params)
    : spec_(spec), params_(params) {
  if (!(spec_.sigma > 0.0)) throw ConfigError("packet sigma must be positive");
  if (!(params_.mass > 0.0)) throw ConfigError("mass must be positive");
}

Complex FreeFallPacket::value(double z, double t) const {
  const double m = params_.mass;
  const double s = spec_.sigma;
  const Complex s2t{s * s, t / (2.0 * m)};
  const double y = z + params_.gravity * t * t / 2.0;
  const double d = y - spec_.z0 - spec_.q * t / m;
  const Complex amp = std::pow(2.0 * kPi, -0.25) * std::sqrt(s) / std::sqrt(s2t);
  const Complex expo = -d * d / (4.0 * s2t) +
                       kI * (spec_.q * (y - spec_.z0) - spec_.q * spec_.q * t / (2.0 * m));
  return amp * std::exp(expo) * gravity_phase(z, t, params_);
}

WaveField FreeFallPacket::sample(const Grid& grid, double t) const {
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = value(grid.z(i), t);
  return WaveField(grid, std::move(out), t);
}

double FreeFallPacket::center(double t) const {
  return spec_.z0 + spec_.q * t / params_.mass - params_.gravity * t * t / 2.0;
}

double FreeFallPacket::effective_width(double t) const {
  return spread_width(spec_, params_.mass, t);
}

ImagePacket::ImagePacket(PacketSpec spec, PhysicalParams params, ImageVariant variant)
    : direct_(spec, params),
      image_(PacketSpec{-spec.z0, spec.sigma, -spec.q}, params),
      variant_(variant) {}

Complex ImagePacket::admixture(double t) const {
  // Ratio of the two Gaussians at z = 0, taken in closed form so that it
  // survives when both values underflow.
  const auto& spec = direct_.spec();
  const auto& p = direct_.params();
  const Complex s2t{spec.sigma * spec.sigma, t / (2.0 * p.mass)};
  const double y = p.gravity * t * t / 2.0;
  const double a = spec.z0 + spec.q * t / p.mass;
  const Complex lambda = std::exp(y * a / s2t + 2.0 * kI * spec.q * y);
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
    throw DomainError("image term vanishes at the origin; admixture undefined");
  }
  return lambda;
}

Complex ImagePacket::value(double z, double t) const {
  if (variant_ == ImageVariant::plain) return direct_.value(z, t) - image_.value(z, t);
  return direct_.value(z, t) - admixture(t) * image_.value(z, t);
}

WaveField ImagePacket::sample(const Grid& grid, double t) const {
  const Complex lambda = variant_ == ImageVariant::plain ? Complex{1.0, 0.0} : admixture(t);
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = direct_.value(grid.z(i), t) - lambda * image_.value(grid.z(i), t);
  }
  return WaveField(grid, std::move(out), t);
}

double ClosedFormModulus::min_time(const PacketSpec& spec, const PhysicalParams& params) {
  return 10.0 * 2.0 * params.mass * spec.sigma * spec.sigma;
}

ClosedFormModulus::ClosedFormModulus(PacketSpec spec, PhysicalParams params, double t,
                                     ModulusForm form)
    : spec_(spec), params_(params), t_(t), form_(form) {
  if (spec_.q != 0.0) throw DomainError("closed-form modulus requires q = 0");
  const double tmin = min_time(spec_, params_);
  if (!(t_ >= tmin)) {
    throw DomainError("closed-form modulus needs t >= 20 m sigma^2 = " + std::to_string(tmin) +
                      " ms, got t = " + std::to_string(t_));
  }
  // Peak-match against the plain image packet on a window around the fall.
  const ImagePacket exact(spec_, params_);
  const double c = -params_.gravity * t_ * t_ / 2.0;
  const double half = 8.0 * spread_width(spec_, params_.mass, t_) + std::abs(spec_.z0);
  const double hi = std::min(0.0, c + half);
  const Grid window(c - half, hi, 20001);
  double peak_exact = 0.0;
  double peak_raw = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    peak_exact = std::max(peak_exact, std::abs(exact.value(window.z(i), t_)));
    peak_raw = std::max(peak_raw, raw(window.z(i)));
  }
  if (!(peak_raw > 0.0)) throw DomainError("closed-form modulus underflows on the packet window");
  amplitude_ = peak_exact / peak_raw;
}

ModulusThetas ClosedFormModulus::thetas(double z) const {
  const double m = params_.mass;
  const double s2 = spec_.sigma * spec_.sigma;
  const double y = z + params_.gravity * t_ * t_ / 2.0;
  const double z0 = spec_.z0;
  const double t2 = t_ * t_;
  ModulusThetas th;
  th.theta1 = -m * m * s2 * (y * y + z0 * z0) / t2;
  th.theta2 = m * z0 * y / t_;
  th.theta3 = 2.0 * m * m * s2 * z0 * y / t2;
  if (form_ == ModulusForm::printed) {
    th.theta1 /= 4.0;
    th.theta3 /= 4.0;
  }
  return th;
}

double ClosedFormModulus::raw(double z) const {
  const auto th = thetas(z);
  const double s = std::sin(th.theta2);
  const double sh = std::sinh(th.theta3);
  return std::exp(th.theta1) * std::sqrt(s * s + sh * sh);
}

double ClosedFormModulus::value(double z) const { return amplitude_ * raw(z); }

double ClosedFormModulus::fringe_spacing() const {
  return kPi * t_ / (params_.mass * std::abs(spec_.z0));
}

double modulus_closed_form(const PacketSpec& spec, const PhysicalParams& params, double z, double t,
                           ModulusForm form) {
  return ClosedFormModulus(spec, params, t, form).value(z);
}

VisibilityBound visibility_bound(const PacketSpec& spec, const PhysicalParams& params) {
  if (!(params.gravity > 0.0)) throw DomainError("visibility bound needs gravity > 0");
  VisibilityBound b;
  const double m = params.mass;
  b.max_theta3 = m * m * spec.sigma * spec.sigma * std::abs(spec.z0) * params.gravity / 2.0;
  b.visible = b.max_theta3 < 1.0;
  return b;
}

double schrodinger_residual(const std::function<Complex(double, double)>& psi, double z, double t,
                            double h, const PhysicalParams& params) {
  const Complex c = psi(z, t);
  const Complex dt = (psi(z, t + h) - psi(z, t - h)) / (2.0 * h);
  const Complex dzz = (psi(z + h, t) - 2.0 * c + psi(z - h, t)) / (h * h);
  const double m = params.mass;
  return std::abs(kI * dt + dzz / (2.0 * m) - m * params.gravity * z * c);
}

}  // namespace mirrorfall
