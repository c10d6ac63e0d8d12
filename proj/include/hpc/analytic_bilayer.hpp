#pragma once

#include <vector>

#include "hpc/core.hpp"
#include "hpc/lattice.hpp"

namespace hpc {

/// Fourier-space two-layer solution for layers at z = 0 and z = l driven by a
/// unit plane wave polarized along the common dipole axis.
struct BilayerResponse {
  cplx M_q;     ///< Omega(q) - i Gamma(q)/2
  cplx M_q_LR;  ///< interlayer coupling
  cplx beta_L;
  cplx beta_R;
  cplx t_c;  ///< transmitted amplitude relative to free propagation
  cplx r_c;  ///< reflected amplitude referenced to z = 0
};

/// Lattice rates are taken from metasurface_rates. include_evanescent uses the
/// reciprocal sum with g_max shells for the interlayer coupling.
BilayerResponse bilayer_amplitudes(double delta, double length, const Vec2& q, const LatticeSpec& lattice,
                                   bool include_evanescent, int g_max = 12,
                                   const CVec3& dipole = CVec3(1.0, 0.0, 0.0));

/// Same solution at q = 0 with explicit rates and the far-field coupling only.
BilayerResponse bilayer_amplitudes(double delta, double length, double omega, double gamma);

/// t_c = (D - W)^2 / [(D - W + i G/2)^2 + (G^2/4) e^{2ikl}],  D = delta, W = omega, G = gamma.
/// Throws "degenerate 0/0 point" at delta = omega with l = n/2.
cplx cavity_transmission(double delta, double length, double omega, double gamma);

/// delta = omega - (gamma/2) tan(kl). Throws "resonance at infinite detuning" when cos(kl) = 0.
double resonance_detuning(double length, double omega, double gamma);

/// kappa = gamma |tan(kl)|.
double cavity_linewidth(double length, double gamma);

/// Length closest to near_length whose cavity resonance sits at `delta`,
/// i.e. the root of delta - omega = -(gamma/2) tan(kl) nearest near_length.
double resonance_locked_length(double delta, double near_length, double omega, double gamma);

struct ProfileOptions {
  bool include_evanescent = false;
  int g_max = 40;
  Vec2 rho = Vec2::Zero();  ///< in-plane sampling position
};

/// Total field (incident + both layers) between the layers at the given z values.
std::vector<Field3> intracavity_profile(double delta, double length, const LatticeSpec& lattice,
                                        const std::vector<double>& z_grid, const ProfileOptions& opt = {});

}  // namespace hpc
