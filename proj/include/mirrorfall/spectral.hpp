#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mirrorfall/core.hpp"

namespace mirrorfall {

/// Continuum eigenfunction of the hard-wall mirror in the uniform field,
///   chi_a(x) = (Bi(a) Ai(x + a) - Ai(a) Bi(x + a)) / hypot(Ai(a), Bi(a)),
/// with x = (z - barrier_base)/l_g and energy E = m g barrier_base - a m g l_g.
class MirrorEigenfunction {
 public:
  MirrorEigenfunction(double a, const PhysicalParams& params);

  /// Value for x <= 0; throws DomainError for x > 0 and RangeError when
  /// x + a leaves the Airy range.
  double value(double x) const;
  /// Same combination without the x <= 0 precondition.
  double continued_value(double x) const;

  double label() const { return a_; }
  double energy() const { return energy_; }

 private:
  double a_;
  double ai_;  // Ai(a) / hypot
  double bi_;  // Bi(a) / hypot
  double energy_;
};

/// Uniform set of labels a_min + i da.
struct LabelGrid {
  double a_min = 0.0;
  double da = 0.0;
  std::size_t count = 0;

  double a(std::size_t i) const { return a_min + static_cast<double>(i) * da; }
  double a_max() const { return a(count - 1); }
};

/// Labels from -x0 - (6/gamma^2 + 8/gamma + 10) to -x0 + 8/gamma + 4 gamma + 10.
/// The spacing is
/// min(0.05, pi/(4R)) where R bounds the rate at which the synthesis
/// integrand oscillates in a for points down to x_min and times up to t_max.
LabelGrid label_grid(const PacketSpec& spec, const PhysicalParams& params, double t_max, double x_min);

/// Deepest dimensionless coordinate of a grid (relative to the mirror face).
double deepest_point(const Grid& grid, const PhysicalParams& params);

enum class CoefficientSource { numeric, thin_packet };

/// Where the thin-packet formula evaluates the eigenfunction: at x0 + gamma^4
/// (exact Gaussian transform of a packet far from the wall) or at
/// x0 + gamma^2.
enum class ThinPacketArgument { quartic, quadratic };

struct SpectralCoefficients {
  LabelGrid labels;
  std::vector<Complex> values;  // C(a), dimensionless
  CoefficientSource source = CoefficientSource::numeric;
  PhysicalParams params;
  bool validity_warning = false;
  std::string warning;

  /// Simpson estimate of the integral of |C(a)|^2 over the labels.
  double parseval() const;
};

/// C(a) = integral chi_a(x) Psi(x) dx with Psi(x) = sqrt(l_g) Psi(z), by
/// composite Simpson on the nodes below the mirror face. Throws DomainError
/// if more than 1e-6 of the norm sits above the face and ResolutionError
/// if the captured fraction is below 0.99.
SpectralCoefficients coefficients_numeric(const WaveField& packet, const PhysicalParams& params,
                                          const LabelGrid& labels);

/// Closed-form coefficients of the q = 0 Gaussian,
///   (8 pi gamma^2)^(1/4) exp((a + x0) gamma^2 + 2 gamma^6/3) chi_a(x0 + s),
/// s = gamma^4 or gamma^2. Raises the validity warning for gamma > 0.5 and
/// when |C|^2 overflows for some labels.
SpectralCoefficients coefficients_thin_packet(const PacketSpec& spec, const PhysicalParams& params,
                                              const LabelGrid& labels,
                                              ThinPacketArgument argument = ThinPacketArgument::quartic);

/// Psi(z, t) = l_g^(-1/2) integral C(a) chi_a(x) exp(-i E_a t) da on
/// `out_grid`, zero above the mirror face. With check_norm the synthesized
/// norm must match the Parseval sum to 1% (ResolutionError otherwise);
/// leave it off when out_grid covers only part of the packet. Throws
/// DomainError when some |C|^2 is not finite.
WaveField evolve_spectral(const SpectralCoefficients& coeffs, double t, const Grid& out_grid,
                          bool check_norm = true);

/// Mean energy integral |C|^2 E_a da / integral |C|^2 da.
double coefficient_energy(const SpectralCoefficients& coeffs);

/// Relative L2 distance over a; both sets must share the label grid.
double coefficient_distance(const SpectralCoefficients& coeffs, const SpectralCoefficients& reference);

struct OverlapResult {
  double value = 0.0;
  bool cutoff_warning = false;  // x_cutoff shallower than -200
};

/// Truncated overlap of chi_a and chi_b over [x_cutoff, 0] (Simpson, step
/// close to dx).
OverlapResult orthonormality_check(double a, double b, const PhysicalParams& params, double x_cutoff,
                                   double dx);

/// Integral over b in [a - half_width, a + half_width] of the truncated
/// overlap; the continuum normalization makes it tend to 1.
double smoothed_delta_weight(double a, const PhysicalParams& params, double x_cutoff, double dx,
                             double half_width = 5.0, double db = 0.01);

/// Composite Simpson weights for n uniformly spaced samples of unit
/// spacing (3/8 rule on the last four when n is even).
std::vector<double> simpson_weights(std::size_t n);

}  // namespace mirrorfall
