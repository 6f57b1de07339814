#pragma once

namespace mirrorfall {

/// Ai, Bi and their derivatives at one real argument.
struct AiryPair {
  double ai = 0.0;
  double bi = 0.0;
  double ai_prime = 0.0;
  double bi_prime = 0.0;

  double wronskian() const { return ai * bi_prime - ai_prime * bi; }
};

/// Largest positive argument accepted; Bi overflows shortly beyond it.
/// Negative arguments are unrestricted (both functions stay bounded).
inline constexpr double kAiryMaxArgument = 100.0;

/// Boundary between the power-series and asymptotic branches.
inline constexpr double kAirySeriesLimit = 7.5;

/// Airy functions of a real argument. Power series (extended precision) for
/// |x| <= kAirySeriesLimit, with Ai and Ai' taken from the modified Bessel
/// functions K_1/3 and K_2/3 for x > 2; Poincare asymptotic expansions beyond.
/// Throws RangeError for x > kAiryMaxArgument or non-finite x.
AiryPair airy(double x);

enum class AiryKind { ai, bi };

/// |y'' - x y| at x for y = Ai or Bi, with y'' from a central difference of
/// step h. `pair` must be airy(x); the neighbours are evaluated internally.
double airy_solution_check(double x, const AiryPair& pair, double h, AiryKind kind = AiryKind::ai);

}  // namespace mirrorfall
