#pragma once

#include <optional>
#include <vector>

#include "mirrorfall/core.hpp"

namespace mirrorfall {

struct EnergyParts {
  double kinetic = 0.0;
  double gravity = 0.0;
  double barrier = 0.0;
  double interaction = 0.0;  // (gp/2) * integral |psi|^4

  double total() const { return kinetic + gravity + barrier + interaction; }
};

struct Functionals {
  double norm = 0.0;
  double energy = 0.0;
  EnergyParts parts;
};

/// Trapezoid norm and energy. The kinetic term uses central differences of
/// psi after removing the mean wavenumber, so a large uniform phase
/// gradient does not cost accuracy.
Functionals conserved_functionals(const WaveField& field, const PhysicalParams& params);

struct Peak {
  double z = 0.0;
  double height = 0.0;      // |psi|^2 at the refined position
  double prominence = 0.0;  // absolute, same units as height
};

/// Local maxima of |psi|^2 whose topographic prominence is at least
/// `min_prominence` times the global maximum, refined by a parabola through
/// the three nearest samples. Sorted by z.
std::vector<Peak> find_peaks(const WaveField& field, double min_prominence = 0.1);

struct ZInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Smallest interval holding every sample with |psi|^2 >= fraction * max.
ZInterval packet_region(const WaveField& field, double fraction = 0.01);

/// Median over adjacent maximum/minimum pairs of (Imax - Imin)/(Imax + Imin)
/// in `region` (default: packet_region). Extrema need a prominence of 1% of
/// the regional maximum. std::nullopt when there are fewer than two maxima
/// or no minimum between them.
std::optional<double> fringe_visibility(const WaveField& field,
                                        std::optional<ZInterval> region = std::nullopt);

/// Median distance between neighbouring peaks; nullopt for fewer than two.
std::optional<double> fringe_spacing(const std::vector<Peak>& peaks);

enum class CompareMode { modulus, full };

struct Comparison {
  double l2_rel = 0.0;
  double linf_rel = 0.0;
};

/// Relative L2 and Linf distance of `field` from `reference` on the nodes of
/// `field` that lie inside the reference grid. The reference is resampled
/// with cubic interpolation when the grids differ. Full mode first removes
/// the best global phase. Throws DomainError when the grids do not overlap.
Comparison compare_fields(const WaveField& field, const WaveField& reference,
                          CompareMode mode = CompareMode::modulus);

struct DiagnosticsReport {
  double time = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  EnergyParts energy_parts;
  std::vector<Peak> peaks;
  std::optional<double> visibility;
  double center_mean = 0.0;
  double center_argmax = 0.0;
  double width_rms = 0.0;
};

DiagnosticsReport diagnose(const WaveField& field, const PhysicalParams& params,
                           double min_prominence = 0.1);

}  // namespace mirrorfall
