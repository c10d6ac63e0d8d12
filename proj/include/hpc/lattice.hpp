#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "hpc/core.hpp"

namespace hpc {

/// 2D Bravais lattice in the xy plane.
struct LatticeSpec {
  Vec2 a1{0.8, 0.0};
  Vec2 a2{0.0, 0.8};

  static LatticeSpec square(double a);

  /// Unit-cell area |a1 x a2|.
  double area() const;
  /// Reciprocal vectors with b_i . a_j = 2 pi delta_ij.
  std::pair<Vec2, Vec2> reciprocal() const;
  void validate() const;
};

inline constexpr double kFlat = std::numeric_limits<double>::infinity();

/// One metasurface layer. n_side == 0 marks an infinite layer used by the
/// periodic emulation; positions are then empty.
struct EmitterArray {
  std::vector<Vec3> positions;  ///< row-major, index = iy * n_side + ix
  CVec3 dipole_axis = CVec3(1.0, 0.0, 0.0);
  double z_center = 0.0;
  double curvature_radius = kFlat;
  double spacing = 0.8;
  int n_side = 0;
  /// +1 bends toward +z away from the axis, -1 toward -z.
  double sag_sign = 1.0;

  bool infinite() const { return n_side == 0; }
  std::size_t size() const { return positions.size(); }
};

/// Square patch of n_side^2 emitters centered on the z axis. Even n_side is
/// offset by a/2 so no emitter sits on the axis. Finite curvature applies the
/// paraboloidal sag z = z_center + sag_sign*(x^2+y^2)/(2 R_c).
EmitterArray build_square_array(double a, int n_side, double z_center, double curvature_radius,
                                const CVec3& dipole_axis, double sag_sign = 1.0);

/// Infinite layer marker for the periodic emulation.
EmitterArray periodic_layer(double a, double z_center, const CVec3& dipole_axis);

struct CavityStack {
  std::vector<EmitterArray> layers;
  LatticeSpec lattice = LatticeSpec::square(0.8);
  double length = 0.0;          ///< distance between the first layers of the two mirrors
  double mirror_spacing = 0.0;  ///< l_m, zero for single-polarization stacks

  bool periodic() const;
  bool empty() const { return layers.empty(); }
  /// z must be non-decreasing; co-located layers need orthogonal axes; all
  /// layers periodic or all finite.
  void validate() const;
};

/// Helicity-preserving cavity: axes (x, y, x, y) at (0, l_m, l, l + l_m) with
/// l_m = n_m + 1/4. n_side == 0 gives infinite layers. Left-mirror layers sag
/// toward +z, right-mirror layers toward -z (concave toward the interior).
CavityStack build_hp_cavity(double length, int n_m, double a, int n_side, double curvature_radius);

/// Two parallel layers at 0 and l with a common dipole axis.
CavityStack build_bilayer(double length, double a, int n_side, double curvature_radius,
                          const CVec3& dipole_axis = CVec3(1.0, 0.0, 0.0));

/// Single layer at z = 0. isotropic adds a co-located y-dipole layer, which
/// models a conventional (handedness-reversing) mirror.
CavityStack build_single_layer(double a, int n_side, bool isotropic,
                               const CVec3& dipole_axis = CVec3(1.0, 0.0, 0.0));

}  // namespace hpc
