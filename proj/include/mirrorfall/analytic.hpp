#pragma once

#include <functional>

#include "mirrorfall/core.hpp"

namespace mirrorfall {

/// Plane wave e^{ikz} boosted into the freely falling frame:
///   exp(i(-m g z t + k(z + g t^2/2) - k^2 t/(2m) - m g^2 t^3/6)).
Complex accelerated_plane_wave(double k, double z, double t, const PhysicalParams& params);

/// Exact free-fall evolution of the minimal-uncertainty packet. The
/// mirror is ignored; only mass and gravity are used.
class FreeFallPacket {
 public:
  FreeFallPacket(PacketSpec spec, PhysicalParams params);

  Complex value(double z, double t) const;
  WaveField sample(const Grid& grid, double t) const;

  /// Classical trajectory z0 + q t/m - g t^2/2.
  double center(double t) const;
  /// |sigma^2(t)| / sigma, sigma^2(t) = sigma^2 + i t/(2m).
  double effective_width(double t) const;

  const PacketSpec& spec() const { return spec_; }
  const PhysicalParams& params() const { return params_; }

 private:
  PacketSpec spec_;
  PhysicalParams params_;
};

enum class ImageVariant { plain, corrected };

/// Packet minus its mirror image (centre -z0, momentum -q). The corrected
/// variant scales the image by lambda(t) so that the field vanishes at z = 0
/// for every t; it is no longer a solution.
class ImagePacket {
 public:
  ImagePacket(PacketSpec spec, PhysicalParams params, ImageVariant variant = ImageVariant::plain);

  Complex value(double z, double t) const;
  WaveField sample(const Grid& grid, double t) const;

  /// lambda(t) = direct(0, t) / image(0, t). Throws DomainError if the image
  /// term vanishes at the origin.
  Complex admixture(double t) const;

  ImageVariant variant() const { return variant_; }
  const FreeFallPacket& direct() const { return direct_; }
  const FreeFallPacket& image() const { return image_; }

 private:
  FreeFallPacket direct_;
  FreeFallPacket image_;
  ImageVariant variant_;
};

/// Which exponents to use in the closed-form modulus. `derived` is the
/// long-time expansion of the plain image packet; `printed` divides theta1
/// by 4 and theta3 by 4 as in the commonly quoted form.
enum class ModulusForm { derived, printed };

struct ModulusThetas {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

/// Long-time modulus of the image packet,
///   A exp(theta1) sqrt(sin^2 theta2 + sinh^2 theta3),
/// for q = 0. A is chosen so the peak matches |ImagePacket| at the same t.
class ClosedFormModulus {
 public:
  /// Throws DomainError when t < 10 * 2 m sigma^2 or q != 0.
  ClosedFormModulus(PacketSpec spec, PhysicalParams params, double t,
                    ModulusForm form = ModulusForm::derived);

  double value(double z) const;
  ModulusThetas thetas(double z) const;

  double amplitude() const { return amplitude_; }
  double time() const { return t_; }
  /// pi t / (m |z0|), the distance between successive zeros of sin theta2.
  double fringe_spacing() const;

  /// Earliest time at which the form is accepted.
  static double min_time(const PacketSpec& spec, const PhysicalParams& params);

 private:
  double raw(double z) const;

  PacketSpec spec_;
  PhysicalParams params_;
  double t_;
  ModulusForm form_;
  double amplitude_ = 1.0;
};

double modulus_closed_form(const PacketSpec& spec, const PhysicalParams& params, double z, double t,
                           ModulusForm form = ModulusForm::derived);

struct VisibilityBound {
  double max_theta3 = 0.0;
  bool visible = false;
};

/// m^2 sigma^2 |z0| g / 2 and whether it is below 1.
/// Throws DomainError when gravity <= 0.
VisibilityBound visibility_bound(const PacketSpec& spec, const PhysicalParams& params);

/// |i psi_t + psi_zz/(2m) - m g z psi| at (z, t) using central differences of
/// step h in both z and t. Zero (up to O(h^2)) for exact solutions of the
/// uniform-field equation.
double schrodinger_residual(const std::function<Complex(double, double)>& psi, double z, double t,
                            double h, const PhysicalParams& params);

}  // namespace mirrorfall
