#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

/// Shared value types. Lengths are in units of the laser wavelength,
/// rates and frequencies in units of the single-emitter linewidth.
namespace hpc {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using CVec2 = Eigen::Vector2cd;
using CVec3 = Eigen::Vector3cd;
using CMat2 = Eigen::Matrix2cd;
using CMat3 = Eigen::Matrix3cd;
using CMat4 = Eigen::Matrix4cd;

inline constexpr double kPi = std::numbers::pi;
/// Wavenumber for unit wavelength.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Library error; messages are stable and tested.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Electric field and impedance-scaled magnetic field Z*H at one point.
struct Field3 {
  CVec3 E = CVec3::Zero();
  CVec3 ZH = CVec3::Zero();
};

/// a x b without conjugation (Eigen's cross conjugates complex operands).
inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return CVec3(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

/// Circular basis vectors e_pm = (x +- i y)/sqrt(2).
inline CVec3 circular_unit(int xi) {
  const double s = 1.0 / std::sqrt(2.0);
  return CVec3(cplx(s, 0.0), cplx(0.0, xi > 0 ? s : -s), cplx(0.0, 0.0));
}

}  // namespace hpc
