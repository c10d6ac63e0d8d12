#include "hpc/analytic_bilayer.hpp"

#include <cmath>

#include "hpc/greens.hpp"

namespace hpc {

namespace {

BilayerResponse solve_pair(double delta, double length, cplx M, cplx M_LR, double rate, cplx kz) {
  BilayerResponse r;
  r.M_q = M;
  r.M_q_LR = M_LR;
  const cplx x = delta - M;
  const cplx det = x * x - M_LR * M_LR;
  if (std::abs(det) <= 1e-14 * (std::norm(x) + std::norm(M_LR))) throw Error("driven at complex resonance");
  const cplx eta_L = 1.0;
  const cplx eta_R = std::exp(kI * kz * length);
  r.beta_L = (x * eta_L + M_LR * eta_R) / det;
  r.beta_R = (x * eta_R + M_LR * eta_L) / det;
  // far-field amplitude per unit dipole amplitude is -i rate/2
  r.t_c = 1.0 - kI * 0.5 * rate * (r.beta_L + r.beta_R * std::exp(-kI * kz * length));
  r.r_c = -kI * 0.5 * rate * (r.beta_L + r.beta_R * std::exp(kI * kz * length));
  return r;
}

}  // namespace

BilayerResponse bilayer_amplitudes(double delta, double length, const Vec2& q, const LatticeSpec& lattice,
                                   bool include_evanescent, int g_max, const CVec3& dipole) {
  const double k = kTwoPi;
  const CollectiveRates rates = metasurface_rates(q, lattice, dipole, k);
  const cplx M(rates.omega, -0.5 * rates.gamma);
  const auto lf = lattice_greens_fourier(q, length, lattice, include_evanescent ? g_max : 0, k);
  const cplx M_LR = -3.0 * kPi / k * dipole.conjugate().dot(lf.electric * dipole);
  const cplx kz = qz_branch(k, q);
  // g = 0 radiation strength, equal to Gamma(q) when only g = 0 propagates
  const auto l0 = lattice_greens_fourier(q, 0.0, lattice, 0, k);
  const cplx rate = 2.0 * kI * (-3.0 * kPi / k) * dipole.conjugate().dot(l0.electric * dipole);
  return solve_pair(delta, length, M, M_LR, rate.real(), kz);
}

BilayerResponse bilayer_amplitudes(double delta, double length, double omega, double gamma) {
  const double k = kTwoPi;
  const cplx M(omega, -0.5 * gamma);
  const cplx M_LR = -kI * 0.5 * gamma * std::exp(kI * k * length);
  return solve_pair(delta, length, M, M_LR, gamma, k);
}

cplx cavity_transmission(double delta, double length, double omega, double gamma) {
  const double k = kTwoPi;
  const double x = delta - omega;
  const cplx e2 = std::exp(2.0 * kI * k * length);
  if (x == 0.0 && std::abs(e2 - 1.0) < 1e-12) throw Error("degenerate 0/0 point");
  // (x + i G/2)^2 + (G^2/4) e^{2ikl} = x^2 + i G x + (i G^2/2) e^{ikl} sin(kl)
  const double th = k * length;
  return (x * x) / (x * x + kI * gamma * x + 0.5 * kI * gamma * gamma * std::exp(kI * th) * std::sin(th));
}

double resonance_detuning(double length, double omega, double gamma) {
  const double th = kTwoPi * length;
  if (std::abs(std::cos(th)) < 1e-12) throw Error("resonance at infinite detuning");
  return omega - 0.5 * gamma * std::tan(th);
}

double cavity_linewidth(double length, double gamma) { return gamma * std::abs(std::tan(kTwoPi * length)); }

double resonance_locked_length(double delta, double near_length, double omega, double gamma) {
  if (!(gamma > 0.0)) throw Error("collective decay rate must be positive");
  const double th0 = -std::atan(2.0 * (delta - omega) / gamma);
  const double n = std::round((kTwoPi * near_length - th0) / kPi);
  return (th0 + n * kPi) / kTwoPi;
}

std::vector<Field3> intracavity_profile(double delta, double length, const LatticeSpec& lattice,
                                        const std::vector<double>& z_grid, const ProfileOptions& opt) {
  const double k = kTwoPi;
  const Vec2 q = Vec2::Zero();
  const CVec3 d(1.0, 0.0, 0.0);
  const BilayerResponse b = bilayer_amplitudes(delta, length, q, lattice, opt.include_evanescent, opt.g_max, d);
  const int shells = opt.include_evanescent ? opt.g_max : 0;
  std::vector<Field3> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) {
    if (!(z > 0.0 && z < length)) throw Error("profile point outside the cavity interior");
    Field3 f;
    const cplx ph = std::exp(kI * k * z);
    f.E = d * ph;
    f.ZH = CVec3(0.0, 1.0, 0.0) * ph;
    const auto gl = lattice_greens_fourier(q, z, lattice, shells, k, 1e-10, opt.rho);
    const auto gr = lattice_greens_fourier(q, z - length, lattice, shells, k, 1e-10, opt.rho);
    const double pref = -3.0 * kPi / k;
    f.E += pref * (gl.electric * d * b.beta_L + gr.electric * d * b.beta_R);
    f.ZH += pref * (gl.magnetic * d * b.beta_L + gr.magnetic * d * b.beta_R);
    out.push_back(f);
  }
  return out;
}

}  // namespace hpc
