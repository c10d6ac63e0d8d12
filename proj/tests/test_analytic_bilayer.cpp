#include <doctest.h>

#include <random>

#include "hpc/analytic_bilayer.hpp"
#include "hpc/greens.hpp"
#include "test_util.hpp"

using namespace hpc;
using testutil::error_text;

namespace {

constexpr double k = kTwoPi;
constexpr double kGamma = 0.373;

// Direct 2x2 solve of (delta - H) beta = eta with far-field couplings.
struct Direct {
  cplx bL, bR, t, r;
};
Direct direct(double delta, double l, double omega, double gamma) {
  const cplx M = omega - kI * gamma / 2.0;
  const cplx MLR = -kI * gamma / 2.0 * std::exp(kI * k * l);
  Eigen::Matrix2cd A;
  A << delta - M, -MLR, -MLR, delta - M;
  const Eigen::Vector2cd eta(1.0, std::exp(kI * k * l));
  const Eigen::Vector2cd b = A.partialPivLu().solve(eta);
  const cplx c = -kI * gamma / 2.0;
  return {b(0), b(1), 1.0 + c * (b(0) + b(1) * std::exp(-kI * k * l)), c * (b(0) + b(1) * std::exp(kI * k * l))};
}

}  // namespace

TEST_CASE("cavity transmission matches a direct two-layer solve") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-1.0, 1.0), ul(1.0, 20.0);
  for (int n = 0; n < 200; ++n) {
    const double d = ud(rng), l = ul(rng);
    const Direct ref = direct(d, l, 0.01, kGamma);
    const BilayerResponse b = bilayer_amplitudes(d, l, 0.01, kGamma);
    CHECK(testutil::rel_err(b.t_c, ref.t) < 1e-12);
    CHECK(testutil::rel_err(cavity_transmission(d, l, 0.01, kGamma), ref.t) < 1e-12);
    CHECK(std::abs(b.r_c - ref.r) < 1e-12);
    CHECK(std::abs(b.beta_L - ref.bL) < 1e-12 * std::abs(ref.bL));
    CHECK(std::abs(b.beta_R - ref.bR) < 1e-12 * std::abs(ref.bR));
  }
}

TEST_CASE("g = 0 couplings follow the far-field form") {
  const auto r = metasurface_rates(Vec2::Zero(), LatticeSpec::square(0.8));
  const BilayerResponse b = bilayer_amplitudes(0.05, 5.05, Vec2::Zero(), LatticeSpec::square(0.8), false);
  CHECK(std::abs(b.M_q - cplx(r.omega, -r.gamma / 2.0)) < 1e-12);
  CHECK(std::abs(b.M_q_LR - (-kI * r.gamma / 2.0 * std::exp(kI * k * 5.05))) < 1e-12);
  CHECK(b.M_q.imag() < 0.0);
  // evanescent shells barely matter five wavelengths apart
  const BilayerResponse e = bilayer_amplitudes(0.05, 5.05, Vec2::Zero(), LatticeSpec::square(0.8), true);
  CHECK(std::abs(e.t_c - b.t_c) < 1e-8);
}

TEST_CASE("transparent far from the metasurface resonance") {
  CHECK(std::abs(cavity_transmission(1e6, 5.05, 0.0, kGamma) - 1.0) < 1e-6);
  CHECK(std::abs(cavity_transmission(-1e6, 5.3, 0.0, kGamma) - 1.0) < 1e-6);
}

TEST_CASE("zero transmission on the metasurface resonance away from half-wave lengths") {
  for (double l : {5.05, 12.505, 3.3}) CHECK(cavity_transmission(0.02, l, 0.02, kGamma) == cplx(0.0));
  CHECK(error_text([] { cavity_transmission(0.0, 5.0, 0.0, kGamma); }) == "degenerate 0/0 point");
}

TEST_CASE("resonance at l = 5.05") {
  const double d = resonance_detuning(5.05, 0.0, kGamma);
  CHECK(std::abs(d - (-kGamma / 2.0 * std::tan(0.1 * kPi))) < 1e-14);
  CHECK(std::abs(d + 0.0606) < 1e-4);
  CHECK(std::abs(std::norm(cavity_transmission(d, 5.05, 0.0, kGamma)) - 1.0) < 1e-10);
  CHECK(std::abs(cavity_linewidth(5.05, kGamma) - 0.1212) < 1e-4);
  const BilayerResponse b = bilayer_amplitudes(d, 5.05, 0.0, kGamma);
  CHECK(std::abs(std::abs(b.beta_L) - std::abs(b.beta_R)) < 1e-12 * std::abs(b.beta_L));
  CHECK(resonance_detuning(5.0, 0.01, kGamma) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(error_text([] { resonance_detuning(5.25, 0.0, kGamma); }) == "resonance at infinite detuning");
}

TEST_CASE("resonance property over random lengths") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ul(1.0, 30.0);
  int tested = 0;
  for (int n = 0; n < 1000; ++n) {
    const double l = ul(rng);
    if (std::abs(std::cos(k * l)) < 1e-3) continue;
    const double d = resonance_detuning(l, 0.004, kGamma);
    if (d == 0.004) continue;
    CHECK(std::abs(std::norm(cavity_transmission(d, l, 0.004, kGamma)) - 1.0) < 1e-10);
    ++tested;
  }
  CHECK(tested > 990);
}

TEST_CASE("energy conservation |t|^2 + |r|^2 = 1") {
  for (double l : {5.05, 5.55, 12.505}) {
    for (int i = -50; i <= 50; ++i) {
      const double d = 0.013 * i + 0.001;
      const BilayerResponse b = bilayer_amplitudes(d, l, 0.0, kGamma);
      CHECK(std::abs(std::norm(b.t_c) + std::norm(b.r_c) - 1.0) < 1e-10);
      CHECK(std::abs(b.t_c) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("narrow transmission window just above a half-wave length") {
  CHECK(cavity_linewidth(12.501, kGamma) < cavity_linewidth(12.505, kGamma));
  CHECK(cavity_linewidth(12.505, kGamma) < cavity_linewidth(12.52, kGamma));
  const double d = resonance_detuning(12.501, 0.0, kGamma);
  CHECK(d < 0.0);
  CHECK(std::abs(d) < 0.002);
}

TEST_CASE("resonance-locked length") {
  const double l = resonance_locked_length(0.01, 12.5, 0.0048, kGamma);
  CHECK(std::abs(l - 12.5) < 0.05);
  CHECK(std::abs(resonance_detuning(l, 0.0048, kGamma) - 0.01) < 1e-12);
}

TEST_CASE("intracavity profile off resonance is the incoming wave") {
  const LatticeSpec lat = LatticeSpec::square(0.8);
  std::vector<double> z{0.3, 1.7, 2.9};
  const auto f = intracavity_profile(1e5, 3.2, lat, z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(std::abs(f[i].E(0) - std::exp(kI * k * z[i])) < 1e-4);
    CHECK(std::abs(f[i].E(1)) < 1e-12);
  }
  CHECK(error_text([&] { intracavity_profile(0.1, 3.2, lat, {3.5}); }) == "profile point outside the cavity interior");
}

TEST_CASE("intracavity profile on resonance: standing wave and evanescent pile-up") {
  const LatticeSpec lat = LatticeSpec::square(0.8);
  const auto rates = metasurface_rates(Vec2::Zero(), lat);
  const double l = 5.05;
  const double d = resonance_detuning(l, rates.omega, rates.gamma);
  const BilayerResponse b = bilayer_amplitudes(d, l, rates.omega, rates.gamma);
  std::vector<double> z;
  for (int i = 1; i < 100; ++i) z.push_back(l * i / 100.0);
  const auto f = intracavity_profile(d, l, lat, z);
  // g = 0 field: incident + left layer right-going + right layer left-going
  const cplx c = -kI * rates.gamma / 2.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const cplx E = std::exp(kI * k * z[i]) + c * b.beta_L * std::exp(kI * k * z[i]) +
                   c * b.beta_R * std::exp(kI * k * (l - z[i]));
    CHECK(std::abs(f[i].E(0) - E) < 1e-10 * std::max(1.0, std::abs(E)));
    peak = std::max(peak, std::norm(E));
  }
  CHECK(peak > 4.0);  // resonant enhancement

  ProfileOptions ev;
  ev.include_evanescent = true;
  const std::vector<double> near{0.02, l - 0.02};
  const auto fe = intracavity_profile(d, l, lat, near, ev);
  const auto f0 = intracavity_profile(d, l, lat, near);
  CHECK(fe[0].E.squaredNorm() > f0[0].E.squaredNorm());
  CHECK(fe[1].E.squaredNorm() > f0[1].E.squaredNorm());
}
