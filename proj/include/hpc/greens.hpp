#pragma once

#include <vector>

#include "hpc/core.hpp"
#include "hpc/lattice.hpp"

namespace hpc {

/// Free-space electric dyadic Green's tensor without the contact term,
/// normalized so that k^2 G p is the field of dipole p:
///   G = e^{ikR}/(4 pi k^2) [(k^2/R + ik/R^2 - 1/R^3) I + (-k^2/R - 3ik/R^2 + 3/R^3) RR/R^2].
/// Throws "self-interaction requested" for R = 0.
CMat3 electric_greens(const Vec3& R, double k0 = kTwoPi);

/// Magnetic counterpart with the same normalization (k^2 G_M p = Z H):
///   G_M = (kR + i) e^{ikR} / (4 pi k R^3) [R]_x,   [R]_x v = R x v.
CMat3 magnetic_greens(const Vec3& R, double k0 = kTwoPi);

/// sqrt(k0^2 - |q|^2) on the branch Im >= 0.
cplx qz_branch(double k0, const Vec2& q);

struct LatticeFourierResult {
  CMat3 electric = CMat3::Zero();
  CMat3 magnetic = CMat3::Zero();
  bool converged = false;
  int shells = 0;  ///< reciprocal shells summed (max(|n1|,|n2|) <= shells)
};

/// Lattice-summed Green's tensors sum_j G(r - R_j) e^{i q.R_j} at in-plane offset rho and
/// height z, evaluated as a reciprocal-lattice (Poisson) sum
///   (1/A) sum_g i/(2 k^2 q_z) (k^2 I - qq) e^{i(q+g).rho + i q_z |z|},  qq built from (q+g, sgn(z) q_z),
/// and the magnetic analogue (1/A) sum_g i/(2 k q_z) [q]_x e^{...}.
/// g_max = 0 keeps only g = 0. converged is set when the last shell changed the
/// result by less than tol_rel. Throws "Wood-anomaly degenerate point" when
/// |k0^2 - |q+g|^2| < 1e-10 k0^2 for a summed order.
LatticeFourierResult lattice_greens_fourier(const Vec2& q, double z, const LatticeSpec& lattice, int g_max,
                                            double k0 = kTwoPi, double tol_rel = 1e-10,
                                            const Vec2& rho = Vec2::Zero());

struct CollectiveRates {
  double omega = 0.0;  ///< collective shift
  double gamma = 0.0;  ///< collective decay rate
  bool converged = false;
  std::vector<double> window_lengths;  ///< Gaussian window lengths used
  std::vector<cplx> estimates;         ///< extrapolated Omega - i Gamma/2 per window
};

/// Real-space collective shift and decay of a single infinite layer,
///   Omega - i Gamma/2 = -i/2 + sum_{j != 0} (-3 pi/k) d* . G(R_j) . d e^{i q.R_j}.
/// The conditionally convergent sum is regularized with a Gaussian window
/// exp(-(R/L)^2) at L = 4, 8, 16, ... and extrapolated in 1/L^2; it stops once
/// three successive extrapolates agree within tol. Throws with diagnostics if
/// L reaches max_window without converging.
CollectiveRates in_plane_collective_rates(const Vec2& q, const LatticeSpec& lattice,
                                          const CVec3& dipole = CVec3(1.0, 0.0, 0.0), double k0 = kTwoPi,
                                          double tol = 1e-6, double max_window = 512.0);

/// Exact decay rate from the propagating diffraction orders,
///   Gamma(q) = sum_{g: |q+g| < k} 3 pi (k^2 - |d.q_g|^2) / (A k^3 q_z).
/// For a square lattice with a < lambda at q = 0 this is 3/(4 pi A).
double collective_decay_closed_form(const Vec2& q, const LatticeSpec& lattice,
                                    const CVec3& dipole = CVec3(1.0, 0.0, 0.0), double k0 = kTwoPi);

/// Rates used by the cavity models: real-space Omega, closed-form Gamma.
CollectiveRates metasurface_rates(const Vec2& q, const LatticeSpec& lattice,
                                  const CVec3& dipole = CVec3(1.0, 0.0, 0.0), double k0 = kTwoPi);

}  // namespace hpc
