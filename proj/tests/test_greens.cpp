#include <doctest.h>

#include <random>

#include "hpc/greens.hpp"
#include "test_util.hpp"

using namespace hpc;
using testutil::contains;
using testutil::error_text;

namespace {

constexpr double k = kTwoPi;

CVec3 field(const Vec3& r, const CVec3& p) { return electric_greens(r) * p; }

// d/dx_i of the field by central differences
CVec3 partial(const Vec3& r, const CVec3& p, int i, double h) {
  Vec3 e = Vec3::Zero();
  e(i) = h;
  return (field(r + e, p) - field(r - e, p)) / (2.0 * h);
}

CVec3 curl_fd(const Vec3& r, const CVec3& p, double h) {
  const CVec3 dx = partial(r, p, 0, h), dy = partial(r, p, 1, h), dz = partial(r, p, 2, h);
  return CVec3(dy(2) - dz(1), dz(0) - dx(2), dx(1) - dy(0));
}

// curl curl E - k^2 E by nested differences
CVec3 helmholtz_residual(const Vec3& r, const CVec3& p, double h) {
  auto curl_at = [&](const Vec3& x) { return curl_fd(x, p, h); };
  CVec3 d[3];
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    d[i] = (curl_at(r + e) - curl_at(r - e)) / (2.0 * h);
  }
  const CVec3 cc(d[1](2) - d[2](1), d[2](0) - d[0](2), d[0](1) - d[1](0));
  return cc - k * k * field(r, p);
}

}  // namespace

TEST_CASE("electric Green's tensor: far field along z is transverse") {
  const double z = 200.0;
  const CMat3 G = electric_greens(Vec3(0, 0, z));
  const cplx ref = std::exp(kI * k * z) / (4.0 * kPi * z);
  CHECK(std::abs(G(0, 0) - ref) < 2.0 / (k * z) * std::abs(ref));
  CHECK(std::abs(G(1, 1) - ref) < 2.0 / (k * z) * std::abs(ref));
  // the longitudinal part keeps only the 1/(kz) and 1/(kz)^2 terms
  const double kz = k * z;
  CHECK(std::abs(G(2, 2) - ref * (-2.0 * kI / kz + 2.0 / (kz * kz))) < 1e-12 * std::abs(ref));
  CHECK(std::abs(G(0, 1)) < 1e-15);
}

TEST_CASE("electric Green's tensor: reciprocity on random separations") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 0; n < 100; ++n) {
    const Vec3 R(u(rng), u(rng), u(rng));
    const CMat3 a = electric_greens(R), b = electric_greens(-R).transpose();
    CHECK((a - b).norm() <= 1e-12 * a.norm());
  }
}

TEST_CASE("electric Green's tensor: Im part at short range gives the single-emitter rate") {
  const double r = 1e-3 / k;
  for (const Vec3& dir : {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(1, 1, 1).normalized()}) {
    const double im = electric_greens(r * dir)(0, 0).imag();
    CHECK(std::abs(im - k / (6.0 * kPi)) < 1e-5 * k / (6.0 * kPi));
  }
}

TEST_CASE("electric Green's tensor solves the vector Helmholtz equation away from the source") {
  const CVec3 p(0.3, cplx(0.2, -0.5), 0.7);
  const Vec3 r(0.41, -0.27, 0.63);
  const CVec3 res = helmholtz_residual(r, p, 1e-3);
  CHECK(res.norm() < 1e-4 * k * k * field(r, p).norm());
}

TEST_CASE("magnetic Green's tensor equals curl of the electric one over ik") {
  const CVec3 p(cplx(0.1, 0.4), -0.6, 0.2);
  for (const Vec3& r : {Vec3(0.3, 0.2, -0.5), Vec3(-1.2, 0.7, 2.1)}) {
    const CVec3 fd = curl_fd(r, p, 1e-5) / (kI * k);
    const CVec3 gm = magnetic_greens(r) * p;
    CHECK((fd - gm).norm() < 1e-6 * gm.norm());
  }
}

TEST_CASE("magnetic Green's tensor structure") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 20; ++n) {
    const Vec3 R(u(rng), u(rng), u(rng));
    const CMat3 M = magnetic_greens(R);
    CHECK((M + M.transpose()).norm() < 1e-14 * M.norm());
    // dipole along R: no magnetic field on its axis
    CHECK((M * R.normalized().cast<cplx>()).norm() < 1e-14 * M.norm());
  }
  // far field: Z H = sgn(z) z x E
  for (double z : {150.0, -150.0}) {
    const CVec3 E = electric_greens(Vec3(0, 0, z)) * CVec3(1, 0, 0);
    const CVec3 ZH = magnetic_greens(Vec3(0, 0, z)) * CVec3(1, 0, 0);
    const CVec3 expect = (z > 0 ? 1.0 : -1.0) * CVec3(-E(1), E(0), 0);
    CHECK((ZH - expect).norm() < 1e-2 * E.norm());
  }
}

TEST_CASE("Green's tensors reject zero separation") {
  CHECK(error_text([] { electric_greens(Vec3::Zero()); }) == "self-interaction requested");
  CHECK(error_text([] { magnetic_greens(Vec3::Zero()); }) == "self-interaction requested");
}

TEST_CASE("q_z branch: evanescent orders decay") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0 * k, 3.0 * k);
  for (int n = 0; n < 200; ++n) {
    const Vec2 q(u(rng), u(rng));
    const cplx qz = qz_branch(k, q);
    if (q.norm() > k) {
      CHECK(qz.imag() > 0.0);
      CHECK(qz.real() == 0.0);
    } else {
      CHECK(qz.imag() == 0.0);
      CHECK(qz.real() >= 0.0);
    }
  }
}

TEST_CASE("lattice Fourier sum: g = 0 term for a subwavelength square lattice") {
  const LatticeSpec lat = LatticeSpec::square(0.8);
  const double z = 10.0;
  const auto r = lattice_greens_fourier(Vec2::Zero(), z, lat, 0);
  const cplx expect = kI * std::exp(kI * k * z) / (2.0 * lat.area() * k);
  CHECK(std::abs(r.electric(0, 0) - expect) < 1e-14);
  CHECK(std::abs(r.electric(1, 1) - expect) < 1e-14);
  CHECK(std::abs(r.electric(2, 2)) < 1e-14);
  // far from the plane the evanescent shells are negligible
  const auto full = lattice_greens_fourier(Vec2::Zero(), z, lat, 8);
  CHECK(std::abs(full.electric(0, 0) - expect) < 1e-14);
}

TEST_CASE("lattice Fourier sum: evanescent orders fade with distance and the cutoff is stable") {
  const LatticeSpec lat = LatticeSpec::square(0.8);
  double prev = 1e300;
  for (double z : {0.05, 0.1, 0.2, 0.4}) {
    const auto g0 = lattice_greens_fourier(Vec2::Zero(), z, lat, 0);
    const auto gf = lattice_greens_fourier(Vec2::Zero(), z, lat, 60);
    const double d = std::abs(gf.electric(0, 0) - g0.electric(0, 0));
    CHECK(d < prev);
    prev = d;
  }
  const auto a = lattice_greens_fourier(Vec2::Zero(), 0.3, lat, 20);
  REQUIRE(a.converged);
  const auto b = lattice_greens_fourier(Vec2::Zero(), 0.3, lat, 40);
  CHECK(std::abs(b.electric(0, 0) - a.electric(0, 0)) < 1e-10 * std::abs(a.electric(0, 0)));
}

TEST_CASE("lattice Fourier sum: Wood anomaly is reported") {
  const LatticeSpec lat = LatticeSpec::square(1.0);
  CHECK(error_text([&] { lattice_greens_fourier(Vec2::Zero(), 1.0, lat, 2); }) == "Wood-anomaly degenerate point");
  CHECK(error_text([&] { collective_decay_closed_form(Vec2::Zero(), lat); }) == "Wood-anomaly degenerate point");
}

TEST_CASE("collective rates: real-space sum agrees with the closed-form decay") {
  for (double a : {0.6, 0.7, 0.8, 0.9}) {
    const LatticeSpec lat = LatticeSpec::square(a);
    const CollectiveRates r = in_plane_collective_rates(Vec2::Zero(), lat);
    const double closed = 3.0 / (4.0 * kPi * a * a);
    CHECK(r.converged);
    CHECK(std::abs(collective_decay_closed_form(Vec2::Zero(), lat) - closed) < 1e-12);
    CHECK(std::abs(r.gamma - closed) < 0.01 * closed);
  }
  const CollectiveRates r = metasurface_rates(Vec2::Zero(), LatticeSpec::square(0.8));
  CHECK(std::abs(r.gamma - 0.3730) < 1e-4);
  CHECK(std::abs(r.omega) < 0.01);  // collective shift close to zero at a = 0.8
}

TEST_CASE("collective decay approaches the single-emitter rate for sparse lattices") {
  const double g = collective_decay_closed_form(Vec2::Zero(), LatticeSpec::square(60.3));
  CHECK(std::abs(g - 1.0) < 0.05);
}
