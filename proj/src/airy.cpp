#include "mirrorfall/airy.hpp"

#include <array>
#include <cmath>
#include <string>

#include "mirrorfall/core.hpp"
#include "mirrorfall/errors.hpp"

namespace mirrorfall {
namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;   // Ai(0)
constexpr long double kMinusAiPrime0 = 0.258819403792806798405183560189203963L;  // -Ai'(0)
constexpr long double kSqrt3 = 1.73205080756887729352744634150587237L;
constexpr double kSqrtPi = 1.77245385090551602729816748334114518;
constexpr long double kQuarterPiL = 0.785398163397448309615660845819875721L;

constexpr int kAsymptoticTerms = 40;

// u_k and v_k of the Poincare expansions.
struct AsymptoticCoefficients {
  std::array<double, kAsymptoticTerms> u{};
  std::array<double, kAsymptoticTerms> v{};
};

constexpr AsymptoticCoefficients make_coefficients() {
  AsymptoticCoefficients c;
  c.u[0] = 1.0;
  c.v[0] = 1.0;
  for (int k = 1; k < kAsymptoticTerms; ++k) {
    const double kk = k;
    c.u[k] = c.u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / (216.0 * kk * (2 * kk - 1));
    c.v[k] = -(6 * kk + 1) / (6 * kk - 1) * c.u[k];
  }
  return c;
}

constexpr AsymptoticCoefficients kCoef = make_coefficients();

AiryPair series(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  long double f = 1.0L, g = x, fp = 0.0L, gp = 1.0L;
  long double tf = 1.0L, tg = x, tfp = x * x / 2.0L, tgp = 1.0L;
  fp = tfp;
  constexpr long double kTol = 1e-22L;
  for (int k = 1; k < 200; ++k) {
    const long double k3 = 3.0L * k;
    tf *= x3 / ((k3 - 1.0L) * k3);
    tg *= x3 / (k3 * (k3 + 1.0L));
    tgp *= x3 / ((k3 - 2.0L) * k3);
    f += tf;
    g += tg;
    gp += tgp;
    if (k >= 2) {
      tfp *= x3 / ((k3 - 3.0L) * (k3 - 1.0L));
      fp += tfp;
    }
    const long double scale = std::fabs(f) + std::fabs(g) + std::fabs(fp) + std::fabs(gp);
    if (std::fabs(tf) + std::fabs(tg) + std::fabs(tfp) + std::fabs(tgp) <= kTol * scale) break;
  }
  AiryPair out;
  out.ai = static_cast<double>(kAi0 * f - kMinusAiPrime0 * g);
  out.ai_prime = static_cast<double>(kAi0 * fp - kMinusAiPrime0 * gp);
  out.bi = static_cast<double>(kSqrt3 * (kAi0 * f + kMinusAiPrime0 * g));
  out.bi_prime = static_cast<double>(kSqrt3 * (kAi0 * fp + kMinusAiPrime0 * gp));
  return out;
}

// Sums of c_k (sign)^k zeta^-k truncated at the smallest term.
struct Sums {
  double alt_u = 0, alt_v = 0, pos_u = 0, pos_v = 0;
};

Sums positive_sums(double zeta) {
  Sums s;
  double p = 1.0;
  double last = INFINITY;
  for (int k = 0; k < kAsymptoticTerms; ++k) {
    const double tu = kCoef.u[k] * p;
    const double mag = std::abs(tu);
    if (mag > last) break;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s.alt_u += sign * tu;
    s.pos_u += tu;
    s.alt_v += sign * kCoef.v[k] * p;
    s.pos_v += kCoef.v[k] * p;
    if (mag < 1e-18) break;
    last = mag;
    p /= zeta;
  }
  return s;
}

AiryPair asymptotic_positive(double x) {
  const double root = std::sqrt(x);
  const double zeta = 2.0 / 3.0 * x * root;
  const double q = std::sqrt(root);  // x^(1/4)
  const Sums s = positive_sums(zeta);
  const double decay = std::exp(-zeta);
  const double growth = std::exp(zeta);
  AiryPair out;
  out.ai = decay / (2.0 * kSqrtPi * q) * s.alt_u;
  out.ai_prime = -q * decay / (2.0 * kSqrtPi) * s.alt_v;
  out.bi = growth / (kSqrtPi * q) * s.pos_u;
  out.bi_prime = q * growth / kSqrtPi * s.pos_v;
  return out;
}

AiryPair asymptotic_negative(double x) {
  const double mx = -x;
  const double root = std::sqrt(mx);
  const double zeta = 2.0 / 3.0 * mx * root;
  const double q = std::sqrt(root);
  // Even-index and odd-index alternating sums.
  double pu = 0, qu = 0, pv = 0, qv = 0;
  double p = 1.0;
  double last = INFINITY;
  for (int k = 0; k < kAsymptoticTerms; ++k) {
    const double tu = kCoef.u[k] * p;
    const double mag = std::abs(tu);
    if (mag > last) break;
    const double tv = kCoef.v[k] * p;
    const int m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      pu += sign * tu;
      pv += sign * tv;
    } else {
      qu += sign * tu;
      qv += sign * tv;
    }
    if (mag < 1e-18) break;
    last = mag;
    p /= zeta;
  }
  // Phase in long double: zeta reaches thousands and double rounding of it
  // shows up at the 1e-12 level.
  const long double lmx = mx;
  const long double theta = 2.0L / 3.0L * lmx * std::sqrt(lmx) - kQuarterPiL;
  const double c = static_cast<double>(std::cos(theta));
  const double sn = static_cast<double>(std::sin(theta));
  AiryPair out;
  out.ai = (c * pu + sn * qu) / (kSqrtPi * q);
  out.bi = (-sn * pu + c * qu) / (kSqrtPi * q);
  out.ai_prime = q / kSqrtPi * (sn * pv - c * qv);
  out.bi_prime = q / kSqrtPi * (c * pv + sn * qv);
  return out;
}

}  // namespace

AiryPair airy(double x) {
  if (!std::isfinite(x)) throw RangeError("airy: non-finite argument");
  if (x > kAiryMaxArgument) {
    throw RangeError("airy: argument " + std::to_string(x) + " exceeds " + std::to_string(kAiryMaxArgument));
  }
  if (x > kAirySeriesLimit) return asymptotic_positive(x);
  if (x < -kAirySeriesLimit) return asymptotic_negative(x);
  AiryPair out = series(x);
  if (x > 2.0) {
    // The series for Ai cancels catastrophically here; use K_nu instead.
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    out.ai = std::sqrt(x / 3.0) / kPi * std::cyl_bessel_k(1.0 / 3.0, zeta);
    out.ai_prime = -x / (kPi * std::sqrt(3.0)) * std::cyl_bessel_k(2.0 / 3.0, zeta);
  }
  return out;
}

double airy_solution_check(double x, const AiryPair& pair, double h, AiryKind kind) {
  const AiryPair lo = airy(x - h);
  const AiryPair hi = airy(x + h);
  const auto pick = [kind](const AiryPair& p) { return kind == AiryKind::ai ? p.ai : p.bi; };
  const double second = (pick(hi) - 2.0 * pick(pair) + pick(lo)) / (h * h);
  return std::abs(second - x * pick(pair));
}

}  // namespace mirrorfall
