#include "mirrorfall/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mirrorfall/errors.hpp"

namespace mirrorfall {

void PhysicalParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ConfigError("mass must be positive");
  }
  if (!(barrier_width > 0.0)) {
    throw ConfigError("barrier_width must be positive");
  }
  if (!(gravity >= 0.0)) {
    throw ConfigError("gravity must be non-negative");
  }
  if (!std::isfinite(gp_strength) || !std::isfinite(barrier_height) || !std::isfinite(barrier_base)) {
    throw ConfigError("physical parameters must be finite");
  }
}

PhysicalParams sodium_params() {
  PhysicalParams p;
  p.mass = kSodiumMass;
  return p;
}

PhysicalParams hydrogen_params() {
  PhysicalParams p;
  p.mass = kHydrogenMass;
  return p;
}

std::vector<std::string> species_names() { return {"hydrogen", "sodium"}; }

PhysicalParams species_params(std::string_view name) {
  if (name == "sodium") return sodium_params();
  if (name == "hydrogen") return hydrogen_params();
  std::ostringstream msg;
  msg << "unknown species '" << name << "'; available:";
  for (const auto& n : species_names()) msg << ' ' << n;
  throw ConfigError(msg.str());
}

Grid::Grid(double z_min, double z_max, std::size_t n_points)
    : z_min_(z_min), z_max_(z_max), n_(n_points), dz_(0.0) {
  if (!(z_min < z_max)) throw ConfigError("grid requires z_min < z_max");
  if (n_points < 2) throw ConfigError("grid requires at least two points");
  dz_ = (z_max - z_min) / static_cast<double>(n_points - 1);
  if (!(dz_ > 0.0)) throw ConfigError("grid spacing underflows");
}

Grid Grid::with_spacing(double z_min, double z_max, double dz) {
  if (!(dz > 0.0)) throw ConfigError("grid spacing must be positive");
  const auto cells = static_cast<std::size_t>(std::ceil((z_max - z_min) / dz - 1e-9));
  return Grid(z_min, z_max, std::max<std::size_t>(cells, 1) + 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = z(i);
  return out;
}

std::size_t Grid::nearest_index(double zv) const {
  const double r = std::round((zv - z_min_) / dz_);
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(r);
}

bool Grid::same_nodes(const Grid& other) const {
  const double tol = 1e-12 * std::max({1.0, std::abs(z_min_), std::abs(z_max_)});
  return n_ == other.n_ && std::abs(z_min_ - other.z_min_) <= tol &&
         std::abs(z_max_ - other.z_max_) <= tol;
}

WaveField::WaveField(Grid grid, std::vector<Complex> samples, double time)
    : grid_(std::move(grid)), samples_(std::move(samples)), time_(time) {
  if (samples_.size() != grid_.size()) {
    throw ConfigError("wavefield sample count does not match grid size");
  }
}

std::vector<double> WaveField::intensity() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](const Complex& c) { return std::norm(c); });
  return out;
}

double WaveField::norm() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double w = (i == 0 || i + 1 == samples_.size()) ? 0.5 : 1.0;
    sum += w * std::norm(samples_[i]);
  }
  return sum * grid_.spacing();
}

double gravitational_length(const PhysicalParams& params) {
  if (!(params.gravity > 0.0)) {
    throw DomainError("no gravitational scale: gravity must be positive");
  }
  return std::cbrt(1.0 / (2.0 * params.mass * params.mass * params.gravity));
}

double gravitational_energy(const PhysicalParams& params) {
  return params.mass * params.gravity * gravitational_length(params);
}

double crossover_ratio(const PacketSpec& spec, const PhysicalParams& params) {
  if (spec.z0 == 0.0) throw DomainError("crossover ratio undefined for z0 = 0");
  const double lg = gravitational_length(params);
  return spec.sigma / std::sqrt(lg * lg * lg / std::abs(spec.z0));
}

double sigma_for_crossover(double epsilon, double z0, const PhysicalParams& params) {
  if (z0 == 0.0) throw DomainError("crossover ratio undefined for z0 = 0");
  const double lg = gravitational_length(params);
  return epsilon * std::sqrt(lg * lg * lg / std::abs(z0));
}

double spread_width(const PacketSpec& spec, double mass, double t) {
  const double s2 = spec.sigma * spec.sigma;
  const double tau = t / (2.0 * mass);
  return std::sqrt(s2 * s2 + tau * tau) / spec.sigma;
}

WaveField make_gaussian(const PacketSpec& spec, const Grid& grid) {
  if (!(spec.sigma > 0.0)) throw ConfigError("packet sigma must be positive");
  const double amp = std::pow(2.0 * kPi * spec.sigma * spec.sigma, -0.25);
  std::vector<Complex> psi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.z(i) - spec.z0;
    psi[i] = std::polar(amp * std::exp(-d * d / (4.0 * spec.sigma * spec.sigma)), spec.q * d);
  }
  constexpr double kEdgeFraction = 1e-8;
  if (std::abs(psi.front()) > kEdgeFraction * amp) {
    throw ConfigError("packet tail exceeds threshold at lower edge z_min = " +
                      std::to_string(grid.z_min()));
  }
  if (std::abs(psi.back()) > kEdgeFraction * amp) {
    throw ConfigError("packet tail exceeds threshold at upper edge z_max = " +
                      std::to_string(grid.z_max()));
  }
  WaveField field(grid, std::move(psi), 0.0);
  if (std::abs(field.norm() - 1.0) > 1e-6) {
    throw ConfigError("grid too coarse to resolve the packet (norm " + std::to_string(field.norm()) + ")");
  }
  return field;
}

WaveField make_mirror_packet(const PacketSpec& spec, const Grid& grid, const PhysicalParams& params,
                             FaceModel model) {
  if (!(spec.sigma > 0.0)) throw ConfigError("packet sigma must be positive");
  if (grid.spacing() > spec.sigma / 2.0) throw ConfigError("grid too coarse to resolve the packet");
  if (!(params.barrier_height > 0.0)) return make_gaussian(spec, grid);
  // Discrete construction: nodes past the face node f decay by r per node,
  // f carries the fraction alpha of the barrier, and the image node is placed
  // so that the three-point equations at f - 1 and f hold near zero energy.
  const double h = grid.spacing();
  const double u = params.barrier_height;
  std::size_t face = grid.size();
  double alpha = 1.0;
  if (u > 0.0 && params.barrier_base <= grid.z_max()) {
    if (model == FaceModel::snapped) {
      face = barrier_span(params, grid).first;
    } else {
      const double x = (params.barrier_base - grid.z_min()) / h + 0.5;
      face = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(grid.size())));
      alpha = 1.0 - (x - std::floor(x));
    }
  }
  const bool soft = u > 0.0 && face > 0 && face < grid.size();
  const double r = soft ? std::exp(-std::acosh(1.0 + params.mass * u * h * h)) : 0.0;
  double node = params.barrier_base;
  if (soft) {
    const double rho = 2.0 + 2.0 * params.mass * h * h * alpha * u - r;
    node = grid.z(face - 1) + h * rho / (rho - 1.0);
  }
  const double amp = std::pow(2.0 * kPi * spec.sigma * spec.sigma, -0.25);
  const double zi = 2.0 * node - spec.z0;
  const auto gaussian = [&](double center, double q, double z) {
    const double d = z - center;
    return std::polar(amp * std::exp(-d * d / (4.0 * spec.sigma * spec.sigma)), q * d);
  };
  std::vector<Complex> psi(grid.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i < face) {
      psi[i] = gaussian(spec.z0, spec.q, grid.z(i)) - gaussian(zi, -spec.q, grid.z(i));
    } else if (i == face && soft) {
      const double rho = 2.0 + 2.0 * params.mass * h * h * alpha * u - r;
      psi[i] = psi[i - 1] / rho;
    } else if (soft && grid.z(i) <= params.barrier_top()) {
      psi[i] = psi[i - 1] * r;
    }
    const double w = (i == 0 || i + 1 == grid.size()) ? 0.5 : 1.0;
    norm += w * std::norm(psi[i]);
  }
  norm *= grid.spacing();
  if (!(norm > 0.0)) throw ConfigError("packet lies entirely inside the mirror");
  constexpr double kEdgeFraction = 1e-8;
  if (std::abs(psi.front()) > kEdgeFraction * amp) {
    throw ConfigError("packet tail exceeds threshold at lower edge z_min = " + std::to_string(grid.z_min()));
  }
  if (face >= grid.size() && std::abs(psi.back()) > kEdgeFraction * amp) {
    throw ConfigError("packet tail exceeds threshold at upper edge z_max = " + std::to_string(grid.z_max()));
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& c : psi) c *= scale;
  return WaveField(grid, std::move(psi), 0.0);
}

double gaussian_energy(const PacketSpec& spec, const PhysicalParams& params) {
  return 1.0 / (8.0 * params.mass * spec.sigma * spec.sigma) +
         spec.q * spec.q / (2.0 * params.mass) + params.mass * params.gravity * spec.z0;
}

BarrierSpan barrier_span(const PhysicalParams& params, const Grid& grid) {
  BarrierSpan span;
  const double lo = params.barrier_base;
  const double hi = params.barrier_top();
  if (hi < grid.z_min() || lo > grid.z_max()) return span;
  span.first = grid.nearest_index(lo);
  span.last = grid.nearest_index(hi);
  span.empty = span.first > span.last;
  return span;
}

std::vector<double> assemble_potential(const PhysicalParams& params, const Grid& grid) {
  std::vector<double> v(grid.size());
  const double slope = params.mass * params.gravity;
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = slope * grid.z(i);
  if (params.barrier_height != 0.0) {
    const auto span = barrier_span(params, grid);
    if (!span.empty) {
      for (std::size_t i = span.first; i <= span.last; ++i) v[i] += params.barrier_height;
    }
  }
  return v;
}

std::vector<double> assemble_potential(const PhysicalParams& params, const WaveField& field) {
  auto v = assemble_potential(params, field.grid());
  if (params.gp_strength != 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += params.gp_strength * std::norm(field[i]);
  }
  return v;
}

}  // namespace mirrorfall
