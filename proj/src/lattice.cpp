#include "hpc/lattice.hpp"

#include <cmath>

namespace hpc {

LatticeSpec LatticeSpec::square(double a) {
  if (!(a > 0.0)) throw Error("lattice spacing must be positive");
  return LatticeSpec{Vec2(a, 0.0), Vec2(0.0, a)};
}

double LatticeSpec::area() const { return std::abs(a1.x() * a2.y() - a1.y() * a2.x()); }

std::pair<Vec2, Vec2> LatticeSpec::reciprocal() const {
  const double det = a1.x() * a2.y() - a1.y() * a2.x();
  // rows of 2 pi * inverse(A)^T
  Vec2 b1 = kTwoPi / det * Vec2(a2.y(), -a2.x());
  Vec2 b2 = kTwoPi / det * Vec2(-a1.y(), a1.x());
  return {b1, b2};
}

void LatticeSpec::validate() const {
  if (!(area() > 0.0) || !std::isfinite(area())) throw Error("degenerate lattice: zero unit-cell area");
}

EmitterArray build_square_array(double a, int n_side, double z_center, double curvature_radius,
                                const CVec3& dipole_axis, double sag_sign) {
  if (n_side < 1) throw Error("n_side must be >= 1");
  if (!(a > 0.0)) throw Error("lattice spacing must be positive");
  if (!(curvature_radius > 0.0)) throw Error("curvature radius must be positive (use infinity for flat)");
  if (std::abs(dipole_axis.norm() - 1.0) > 1e-12) throw Error("dipole axis must be a unit vector");

  EmitterArray arr;
  arr.dipole_axis = dipole_axis;
  arr.z_center = z_center;
  arr.curvature_radius = curvature_radius;
  arr.spacing = a;
  arr.n_side = n_side;
  arr.sag_sign = sag_sign;
  arr.positions.reserve(static_cast<std::size_t>(n_side) * n_side);
  const double c = 0.5 * (n_side - 1);
  const bool flat = std::isinf(curvature_radius);
  for (int iy = 0; iy < n_side; ++iy) {
    for (int ix = 0; ix < n_side; ++ix) {
      const double x = (ix - c) * a;
      const double y = (iy - c) * a;
      const double z = flat ? z_center : z_center + sag_sign * (x * x + y * y) / (2.0 * curvature_radius);
      arr.positions.emplace_back(x, y, z);
    }
  }
  return arr;
}

EmitterArray periodic_layer(double a, double z_center, const CVec3& dipole_axis) {
  if (!(a > 0.0)) throw Error("lattice spacing must be positive");
  if (std::abs(dipole_axis.norm() - 1.0) > 1e-12) throw Error("dipole axis must be a unit vector");
  EmitterArray arr;
  arr.dipole_axis = dipole_axis;
  arr.z_center = z_center;
  arr.spacing = a;
  arr.n_side = 0;
  return arr;
}

bool CavityStack::periodic() const { return !layers.empty() && layers.front().infinite(); }

void CavityStack::validate() const {
  lattice.validate();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].infinite() != layers.front().infinite())
      throw Error("stack mixes infinite and finite layers");
    if (i == 0) continue;
    const double dz = layers[i].z_center - layers[i - 1].z_center;
    if (dz < 0.0) throw Error("layer z positions must be non-decreasing");
    if (dz == 0.0 && std::abs(layers[i].dipole_axis.dot(layers[i - 1].dipole_axis)) > 1e-12)
      throw Error("co-located layers must have orthogonal dipole axes");
  }
}

namespace {
EmitterArray make_layer(double a, int n_side, double z, double rc, const CVec3& axis, double sag) {
  return n_side == 0 ? periodic_layer(a, z, axis) : build_square_array(a, n_side, z, rc, axis, sag);
}
}  // namespace

CavityStack build_hp_cavity(double length, int n_m, double a, int n_side, double curvature_radius) {
  if (n_m < 0) throw Error("n_m must be >= 0");
  const double lm = n_m + 0.25;
  if (!(length > lm)) throw Error("mirrors overlap");
  const CVec3 ex(1.0, 0.0, 0.0), ey(0.0, 1.0, 0.0);
  CavityStack s;
  s.lattice = LatticeSpec::square(a);
  s.length = length;
  s.mirror_spacing = lm;
  s.layers.push_back(make_layer(a, n_side, 0.0, curvature_radius, ex, +1.0));
  s.layers.push_back(make_layer(a, n_side, lm, curvature_radius, ey, +1.0));
  s.layers.push_back(make_layer(a, n_side, length, curvature_radius, ex, -1.0));
  s.layers.push_back(make_layer(a, n_side, length + lm, curvature_radius, ey, -1.0));
  s.validate();
  return s;
}

CavityStack build_bilayer(double length, double a, int n_side, double curvature_radius, const CVec3& dipole_axis) {
  if (!(length > 0.0)) throw Error("mirrors overlap");
  CavityStack s;
  s.lattice = LatticeSpec::square(a);
  s.length = length;
  s.layers.push_back(make_layer(a, n_side, 0.0, curvature_radius, dipole_axis, +1.0));
  s.layers.push_back(make_layer(a, n_side, length, curvature_radius, dipole_axis, -1.0));
  s.validate();
  return s;
}

CavityStack build_single_layer(double a, int n_side, bool isotropic, const CVec3& dipole_axis) {
  CavityStack s;
  s.lattice = LatticeSpec::square(a);
  s.layers.push_back(make_layer(a, n_side, 0.0, kFlat, dipole_axis, 1.0));
  if (isotropic) {
    const CVec3 other = std::abs(dipole_axis.x()) > 0.5 ? CVec3(0.0, 1.0, 0.0) : CVec3(1.0, 0.0, 0.0);
    s.layers.push_back(make_layer(a, n_side, 0.0, kFlat, other, 1.0));
  }
  s.validate();
  return s;
}

}  // namespace hpc
