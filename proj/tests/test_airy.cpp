#include <cmath>
#include <complex>

#include <doctest.h>

#include "mirrorfall/airy.hpp"
#include "mirrorfall/core.hpp"
#include "mirrorfall/errors.hpp"

using namespace mirrorfall;

namespace {

struct AiryRef {
  double x, ai, ai_prime, bi, bi_prime;
};

// 40-digit reference values, rounded to 17 significant digits.
constexpr AiryRef kReference[] = {
    {-400.0, -3.7957048050352375e-2, -2.4062453957621027, 1.2031108333664272e-1, -7.5906576843443497e-1},
    {-120.5, 2.7666958512217352e-2, 1.8444893555472704, -1.6802313192730456e-1, 3.0335852979489791e-1},
    {-50.0, -1.6188142361232092e-1, 9.6898983727674909e-1, -1.3715015212882007e-1, -1.1453617002654776},
    {-20.25, -2.5609535403377042e-1, -3.2608337059670979e-1, 7.1759107222254847e-2, -1.1515649541649173},
    {-7.6, 2.7825023488019752e-1, 5.4671881905734732e-1, -1.949337564738762e-1, 7.6095509188391106e-1},
    {-7.5, 3.2177571638064788e-1, 3.188095066985546e-1, -1.1246348507649081e-1, 8.7780228154576092e-1},
    {-7.4, 3.4132375223233862e-1, 7.027632364326685e-2, -2.159651857188393e-2, 9.2812809007040664e-1},
    {-4.5, 2.9215278105595947e-1, -5.233625323157477e-1, 2.5387265769693264e-1, 6.3474476777366371e-1},
    {-2.338107410459767, 2.743319340666283e-17, 7.0121082272069136e-1, -4.5394320205833579e-1, -4.5982121821858042e-2},
    {-1.0, 5.3556088329235212e-1, -1.0160567116645209e-2, 1.0399738949694461e-1, 5.9237562642279235e-1},
    {-0.25, 4.1872461427545292e-1, -2.4638918992017597e-1, 5.0139987346923339e-1, 4.651514883371537e-1},
    {0.0, 3.5502805388781724e-1, -2.588194037928068e-1, 6.1492662744600074e-1, 4.4828835735382636e-1},
    {0.5, 2.3169360648083349e-1, -2.2491053266468389e-1, 8.5427704310315549e-1, 5.445725641405923e-1},
    {1.0, 1.3529241631288142e-1, -1.5914744129679321e-1, 1.2074235949528713, 9.3243593339277563e-1},
    {2.0, 3.4924130423274379e-2, -5.3090384433653632e-2, 3.2980949999782147, 4.1006820499328899},
    {2.1, 2.9952602115866522e-2, -4.6455994032674594e-2, 3.7431535649561756, 4.8215499257174961},
    {4.5, 3.3025032351430898e-4, -7.1786656755750889e-4, 2.2758808183559972e+2, 4.691350773279664e+2},
    {7.4, 2.52717193926675e-7, -6.9575554020805864e-7, 2.3159994089891575e+5, 6.2193213587641475e+5},
    {7.5, 1.9172560675134308e-7, -5.3127139597205447e-7, 3.032296151125334e+5, 8.1998783535879962e+5},
    {7.6, 1.4519461748012551e-7, -4.0491682045077837e-7, 3.9775777780342371e+5, 1.0830365079310598e+6},
    {10.0, 1.1047532552898686e-10, -3.5206336767389236e-10, 4.5564115354822514e+8, 1.4292361344828658e+9},
    {25.5, 6.5472206184425667e-39, -3.3125723938345989e-38, 4.8139010532477166e+36, 2.4261581835190948e+37},
    {60.0, 2.7831487094969355e-136, -2.1569758112094738e-135, 7.3825841915430988e+133, 5.715444898335451e+134},
    {99.5, 3.8904062332586808e-289, -3.8816449040569907e-288, 4.1012260548962252e+286, 4.0899290325981216e+287},
};

// Envelope of the oscillatory region; relative errors are measured against it
// so that values near a zero are not judged on cancellation.
double scale(double x, double v) {
  if (x >= 0.0) return std::abs(v);
  return std::max(std::abs(v), std::pow(-x, -0.25) / std::sqrt(kPi) * 1e-3);
}
double scale_prime(double x, double v) {
  if (x >= 0.0) return std::abs(v);
  return std::max(std::abs(v), std::pow(-x, 0.25) / std::sqrt(kPi) * 1e-3);
}

// Ai(x) = (1/2pi) integral exp(i((t + ic)^3/3 + x (t + ic))) dt along a line
// shifted into the upper half plane, where the integrand decays like a
// Gaussian. Trapezoid rule, converges geometrically. For x < 0 a small
// shift keeps the integrand (of size exp(c^3/3 + |x| c)) from cancelling.
double ai_contour(double x) {
  const double c = x > 0.0 ? std::sqrt(x) + 1.0 : 0.25;
  const double h = 0.01;
  std::complex<double> sum = 0.0;
  for (int k = -4000; k <= 4000; ++k) {
    const std::complex<double> t(k * h, c);
    sum += std::exp(std::complex<double>(0.0, 1.0) * (t * t * t / 3.0 + x * t));
  }
  return (sum * h).real() / (2.0 * kPi);
}

}  // namespace

TEST_CASE("reference values over the whole range") {
  for (const auto& r : kReference) {
    CAPTURE(r.x);
    const AiryPair p = airy(r.x);
    CHECK(std::abs(p.ai - r.ai) <= 1e-12 * scale(r.x, r.ai));
    CHECK(std::abs(p.bi - r.bi) <= 1e-12 * scale(r.x, r.bi));
    CHECK(std::abs(p.ai_prime - r.ai_prime) <= 1e-12 * scale_prime(r.x, r.ai_prime));
    CHECK(std::abs(p.bi_prime - r.bi_prime) <= 1e-12 * scale_prime(r.x, r.bi_prime));
  }
}

TEST_CASE("Ai agrees with a contour integral") {
  for (double x : {-12.0, -6.3, -3.0, -1.1, 0.0, 0.7, 2.5, 4.2}) {
    CAPTURE(x);
    const double ref = ai_contour(x);
    CHECK(std::abs(airy(x).ai - ref) <= 1e-11 * std::max(std::abs(ref), 1e-3));
  }
}

TEST_CASE("values at zero") {
  const double ai0 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
  const double aip0 = -1.0 / (std::pow(3.0, 1.0 / 3.0) * std::tgamma(1.0 / 3.0));
  const AiryPair p = airy(0.0);
  CHECK(std::abs(p.ai - ai0) <= 1e-10);
  CHECK(std::abs(p.bi - std::sqrt(3.0) * ai0) <= 1e-10);
  CHECK(std::abs(p.ai_prime - aip0) <= 1e-10);
  CHECK(std::abs(p.bi_prime + std::sqrt(3.0) * aip0) <= 1e-10);
}

TEST_CASE("Wronskian is 1/pi at 200 points") {
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x = -200.0 + 299.0 * k / 199.0;
    worst = std::max(worst, std::abs(airy(x).wronskian() * kPi - 1.0));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("continuity across the branch boundary") {
  for (double edge : {kAirySeriesLimit, -kAirySeriesLimit}) {
    const AiryPair lo = airy(std::nextafter(edge, -1e9));
    const AiryPair hi = airy(std::nextafter(edge, 1e9));
    CHECK(std::abs(lo.ai - hi.ai) <= 1e-12 * std::abs(lo.ai) + 1e-16);
    CHECK(std::abs(lo.bi - hi.bi) <= 1e-12 * std::abs(lo.bi));
  }
}

TEST_CASE("Airy equation residual is second order in h") {
  for (double x : {-30.0, -5.0, -0.5, 1.5, 6.0}) {
    for (AiryKind kind : {AiryKind::ai, AiryKind::bi}) {
      CAPTURE(x);
      const AiryPair p = airy(x);
      const double y = kind == AiryKind::ai ? p.ai : p.bi;
      const double r1 = airy_solution_check(x, p, 2e-2, kind);
      const double r2 = airy_solution_check(x, p, 1e-2, kind);
      const double order = std::log2(r1 / r2);
      CHECK(order == doctest::Approx(2.0).epsilon(0.15));
      CHECK(r2 <= 1e-3 * std::max(1.0, std::abs(x * y)));
    }
  }
}

TEST_CASE("range limits") {
  CHECK_NOTHROW(airy(kAiryMaxArgument));
  CHECK_THROWS_AS(airy(100.5), RangeError);
  CHECK_THROWS_AS(airy(std::nan("")), RangeError);
  CHECK_THROWS_AS(airy(INFINITY), RangeError);
  CHECK_NOTHROW(airy(-1e4));
}
