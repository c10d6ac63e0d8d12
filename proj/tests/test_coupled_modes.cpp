#include <doctest.h>

#include "hpc/analytic_bilayer.hpp"
#include "hpc/coupled_modes.hpp"
#include "test_util.hpp"

using namespace hpc;
using testutil::error_text;

namespace {
constexpr double kGamma = 0.373;
}

TEST_CASE("model parameters at l = 5.01") {
  const CoupledModesModel m = build_model(5.01, kGamma);
  const double wc = -kGamma / 2.0 * std::tan(0.02 * kPi);
  CHECK(std::abs(m.omega_c - wc) < 1e-15);
  CHECK(std::abs(m.omega_c + 0.01173) < 1e-5);
  CHECK(std::abs(m.kappa - (kGamma + 4.0 * wc * wc / kGamma)) < 1e-15);
  CHECK(std::abs(m.kappa - 0.3745) < 1e-4);
  CHECK(m.omega(0) == 2.0 * m.omega_c);
  CHECK(m.omega(1) == 0.0);
  CHECK(m.omega(2) == 0.0);
  const Eigen::Matrix3d WW = m.W * m.W.transpose();
  CHECK(std::abs(kPi * WW(0, 0) - m.kappa / 2.0) < 1e-15);
  CHECK(m.W(1, 1) == 0.0);
  CHECK(m.W(2, 0) == 0.0);
}

TEST_CASE("linewidth tends to the metasurface rate near half-wave lengths") {
  CHECK(std::abs(build_model(5.0 + 1e-7, kGamma).kappa - kGamma) < 1e-10);
  CHECK(error_text([] { build_model(5.0, kGamma); }) == "omega_c = 0: model degenerate");
}

TEST_CASE("scattering matrix is unitary with exact zero and unit transmission") {
  for (double l : {5.01, 5.05, 5.1, 12.505}) {
    const CoupledModesModel m = build_model(l, kGamma);
    for (int i = -40; i <= 40; ++i) {
      const double w = 0.02 * i + 0.0007;
      const CMat2 S = scattering_matrix(m, w);
      CHECK((S * S.adjoint() - CMat2::Identity()).norm() < 1e-12);
    }
    CHECK(std::abs(cm_transmission(m, 0.0)) < 1e-10);
    CHECK(std::abs(std::norm(cm_transmission(m, m.omega_c)) - 1.0) < 1e-10);
  }
}

TEST_CASE("comparison with the transfer matrix improves toward half-wave lengths") {
  double prev = 1e9;
  for (double l : {5.1, 5.05, 5.01}) {
    const CoupledModesModel m = build_model(l, kGamma);
    const DeviationReport r = compare_to_transfer_matrix(m, l, kGamma, 201);
    REQUIRE(r.omega.size() == 201);
    CHECK(r.omega.front() == doctest::Approx(m.omega_c - m.kappa));
    CHECK(r.omega.back() == doctest::Approx(m.omega_c + m.kappa));
    // transfer-matrix values are the closed form
    for (std::size_t i = 0; i < r.omega.size(); i += 20)
      CHECK(std::abs(r.t_tm[i] - cavity_transmission(r.omega[i], l, 0.0, kGamma)) < 1e-12);
    CHECK(r.max_deviation <= prev);
    CHECK(r.rms_deviation <= r.max_deviation);
    prev = r.max_deviation;
  }
}

TEST_CASE("close agreement within one transfer-matrix linewidth of the cavity resonance") {
  // half-width Gamma |tan kl|, the zero-to-peak distance of t_c
  auto dev = [](double l) {
    const double h = kGamma * std::abs(std::tan(kTwoPi * l));
    return compare_to_transfer_matrix(build_model(l, kGamma), l, kGamma, 201, h).max_deviation;
  };
  CHECK(dev(5.01) < 0.05);
  CHECK(dev(5.05) < dev(5.1));
  CHECK(dev(5.1) > 0.05);
}
