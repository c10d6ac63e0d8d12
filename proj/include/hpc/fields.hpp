#pragma once

#include <vector>

#include "hpc/dipole_solver.hpp"

namespace hpc {

/// G_pm = (E +- i Z H)/sqrt 2.
struct RSVectors {
  CVec3 plus = CVec3::Zero();
  CVec3 minus = CVec3::Zero();
};

RSVectors riemann_silberstein(const Field3& f);

/// Incident plus scattered (E, Z H). Throws "field point coincides with an emitter".
Field3 field_at(const DipoleSystem& sys, const DipoleState& state, const Vec3& point);

/// y-z rectangle at fixed x, sampled at cell centers with `resolution` points per wavelength.
struct MapPlane {
  double x = 0.0;
  double y_min = -16.0, y_max = 16.0;
  double z_min = -4.0, z_max = 18.0;
  double resolution = 8.0;
};

struct RSFieldMap {
  std::vector<double> y, z;  ///< axis samples
  std::vector<CVec3> G_plus, G_minus;  ///< index iz * y.size() + iy
  /// Normalization: |G_+|^2 of the incident circular plane wave of the same
  /// amplitude, 2 |E_in|^2, so a pure-helicity input maps to 1.
  double I_in = 1.0;

  std::size_t ny() const { return y.size(); }
  std::size_t nz() const { return z.size(); }
  double plus_sq(std::size_t i) const { return G_plus[i].squaredNorm() / I_in; }
  double minus_sq(std::size_t i) const { return G_minus[i].squaredNorm() / I_in; }
  /// (|G_+|^2 - |G_-|^2)/I_in
  double chirality(std::size_t i) const { return plus_sq(i) - minus_sq(i); }
};

RSFieldMap rs_map(const DipoleSystem& sys, const DipoleState& state, const MapPlane& plane, int threads = 1);

}  // namespace hpc
