#pragma once

// Units: hbar = 1, lengths in micrometres, times in milliseconds. Masses are
// therefore in ms/um^2 and every energy or potential in 1/ms.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mirrorfall {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kStandardGravity = 9.8;  // um/ms^2

/// Sodium mass fixed so that the gravitational length is 0.73 um at g = 9.8.
inline constexpr double kSodiumMass = 0.3617;
/// Sodium-to-hydrogen atomic mass ratio (22.99 u / 1.008 u).
inline constexpr double kSodiumHydrogenMassRatio = 22.99 / 1.008;
inline constexpr double kHydrogenMass = kSodiumMass / kSodiumHydrogenMassRatio;

/// Mirror height in 1/ms (1e6 per second).
inline constexpr double kMirrorHeight = 1.0e3;
/// Van der Waals scale well depth in 1/ms (-1e2 per second).
inline constexpr double kShallowWellDepth = -0.1;

struct PhysicalParams {
  double mass = kSodiumMass;
  double gravity = kStandardGravity;
  double gp_strength = 0.0;  // coefficient of |psi|^2, 1/ms * um
  double barrier_height = 0.0;  // negative for a well
  double barrier_width = 10.0;
  double barrier_base = 0.0;  // lower face of the mirror

  /// Throws ConfigError when mass <= 0, barrier_width <= 0 or gravity < 0.
  void validate() const;

  double barrier_top() const { return barrier_base + barrier_width; }
};

PhysicalParams sodium_params();
PhysicalParams hydrogen_params();

/// Look up "sodium" or "hydrogen"; throws ConfigError listing the names.
PhysicalParams species_params(std::string_view name);
std::vector<std::string> species_names();

/// Uniform one-dimensional mesh, endpoints included.
class Grid {
 public:
  Grid(double z_min, double z_max, std::size_t n_points);

  /// Grid of spacing close to `dz` covering [z_min, z_max]; the spacing is
  /// shrunk so the upper end lands on a node.
  static Grid with_spacing(double z_min, double z_max, double dz);

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return dz_; }
  double z(std::size_t i) const { return z_min_ + static_cast<double>(i) * dz_; }
  std::vector<double> nodes() const;

  /// Index of the node closest to z, clamped to the grid.
  std::size_t nearest_index(double z) const;
  bool contains(double z) const { return z >= z_min_ && z <= z_max_; }

  /// Same nodes (bitwise-close bounds and equal size).
  bool same_nodes(const Grid& other) const;

 private:
  double z_min_;
  double z_max_;
  std::size_t n_;
  double dz_;
};

/// Complex amplitude samples (um^-1/2) on a grid at a fixed time.
class WaveField {
 public:
  WaveField(Grid grid, std::vector<Complex> samples, double time = 0.0);

  const Grid& grid() const { return grid_; }
  std::span<const Complex> samples() const { return samples_; }
  const Complex& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  double time() const { return time_; }

  std::vector<double> intensity() const;
  /// Trapezoid-rule integral of |psi|^2.
  double norm() const;

 private:
  Grid grid_;
  std::vector<Complex> samples_;
  double time_;
};

struct PacketSpec {
  double z0 = -7.0;
  double sigma = 0.3;
  double q = 0.0;
};

/// l_g = (2 m^2 g)^(-1/3); DomainError when gravity <= 0.
double gravitational_length(const PhysicalParams& params);

/// Energy unit of the uniform-field problem, m g l_g.
double gravitational_energy(const PhysicalParams& params);

/// sigma / sqrt(l_g^3 / |z0|). Small values predict visible fringes.
double crossover_ratio(const PacketSpec& spec, const PhysicalParams& params);

/// Packet width parameter for which the crossover ratio equals `epsilon`.
double sigma_for_crossover(double epsilon, double z0, const PhysicalParams& params);

/// Rms width of |psi|^2 for a freely spreading Gaussian at time t.
double spread_width(const PacketSpec& spec, double mass, double t);

/// Minimal-uncertainty packet
///   A exp(i q (z - z0)) exp(-(z - z0)^2 / (4 sigma^2)),  A = (2 pi sigma^2)^(-1/4).
/// Throws ConfigError when an edge carries more than 1e-8 of the peak
/// amplitude (naming the edge) or when the grid is too coarse to hold the
/// unit norm to 1e-6.
WaveField make_gaussian(const PacketSpec& spec, const Grid& grid);

/// How the mirror face sits on the grid: snapped to the nearest node, or
/// smeared over the face cell in proportion to its overlap.
enum class FaceModel { snapped, cell_fraction };

/// Start state for a packet beneath a reflecting mirror: the Gaussian minus
/// its reflection (momentum -q) in a node just above the discrete face,
/// continued into the barrier with the decay of the three-point equation
/// (about exp(-sqrt(2 m U) dz) per node), renormalized. Differs from
/// make_gaussian only by the part of the packet that reaches the mirror;
/// without a repulsive barrier it is make_gaussian.
/// Same tail threshold as make_gaussian at both edges (the upper one only
/// when it lies below the face); ConfigError when dz > sigma/2.
WaveField make_mirror_packet(const PacketSpec& spec, const Grid& grid, const PhysicalParams& params,
                             FaceModel model = FaceModel::snapped);

/// Gaussian energy 1/(8 m sigma^2) + q^2/(2m) + m g z0 (no mirror, no GP).
double gaussian_energy(const PacketSpec& spec, const PhysicalParams& params);

/// Indices [first, last] of the mirror after snapping its faces to the
/// nearest nodes; empty when the mirror lies outside the grid.
struct BarrierSpan {
  std::size_t first = 0;
  std::size_t last = 0;
  bool empty = true;
};
BarrierSpan barrier_span(const PhysicalParams& params, const Grid& grid);

/// m g z + U on the (snapped) mirror, without the mean-field term.
std::vector<double> assemble_potential(const PhysicalParams& params, const Grid& grid);

/// As above plus gp_strength |psi|^2.
std::vector<double> assemble_potential(const PhysicalParams& params, const WaveField& field);

}  // namespace mirrorfall
