#include <doctest.h>

#include "hpc/lattice.hpp"
#include "test_util.hpp"

using namespace hpc;
using testutil::error_text;

TEST_CASE("reciprocal vectors are dual to the direct ones") {
  LatticeSpec lat;
  lat.a1 = Vec2(0.8, 0.1);
  lat.a2 = Vec2(-0.2, 0.7);
  const auto [b1, b2] = lat.reciprocal();
  CHECK(std::abs(b1.dot(lat.a1) - kTwoPi) < 1e-12);
  CHECK(std::abs(b2.dot(lat.a2) - kTwoPi) < 1e-12);
  CHECK(std::abs(b1.dot(lat.a2)) < 1e-12);
  CHECK(std::abs(b2.dot(lat.a1)) < 1e-12);
  CHECK(std::abs(lat.area() - (0.8 * 0.7 + 0.1 * 0.2)) < 1e-15);
  CHECK(std::abs(LatticeSpec::square(0.8).area() - 0.64) < 1e-15);
}

TEST_CASE("degenerate lattices are rejected") {
  LatticeSpec lat;
  lat.a2 = Vec2(1.6, 0.0);
  CHECK(error_text([&] { lat.validate(); }) == "degenerate lattice: zero unit-cell area");
  CHECK(error_text([] { LatticeSpec::square(0.0); }) == "lattice spacing must be positive");
}

TEST_CASE("single-emitter patch sits on the axis") {
  const EmitterArray a = build_square_array(0.8, 1, 2.5, kFlat, CVec3(1, 0, 0));
  REQUIRE(a.size() == 1);
  CHECK(a.positions[0].isApprox(Vec3(0, 0, 2.5)));
}

TEST_CASE("even patches avoid the axis and have n^2 emitters") {
  const EmitterArray a = build_square_array(0.8, 40, 0.0, kFlat, CVec3(1, 0, 0));
  CHECK(a.size() == 1600);
  double rmin = 1e9;
  Vec3 c = Vec3::Zero();
  for (const auto& p : a.positions) {
    rmin = std::min(rmin, p.head<2>().norm());
    c += p;
  }
  CHECK(std::abs(rmin - 0.4 * std::sqrt(2.0)) < 1e-12);
  CHECK((c / 1600.0).norm() < 1e-12);
}

TEST_CASE("curved patch follows the paraboloidal sag") {
  const double Rc = 3.5e8;
  const EmitterArray a = build_square_array(0.8, 30, 1.0, Rc, CVec3(0, 1, 0));
  double max_sag = 0.0;
  for (const auto& p : a.positions) {
    const double sag = p.z() - 1.0;
    CHECK(std::abs(sag - p.head<2>().squaredNorm() / (2.0 * Rc)) < 1e-15);
    max_sag = std::max(max_sag, sag);
  }
  // corner emitter at (14.5 a, 14.5 a)
  const double corner = 2.0 * std::pow(14.5 * 0.8, 2) / (2.0 * Rc);
  CHECK(std::abs(max_sag - corner) < 1e-15);
  CHECK(max_sag > 0.0);
  const EmitterArray down = build_square_array(0.8, 30, 1.0, Rc, CVec3(0, 1, 0), -1.0);
  CHECK(down.positions[0].z() < 1.0);
}

TEST_CASE("flat limit reproduces planar positions exactly") {
  const EmitterArray a = build_square_array(0.7, 6, 3.0, kFlat, CVec3(1, 0, 0));
  for (const auto& p : a.positions) CHECK(p.z() == 3.0);
}

TEST_CASE("helicity-preserving cavity layout") {
  const CavityStack s = build_hp_cavity(12.505, 1, 0.8, 0, kFlat);
  REQUIRE(s.layers.size() == 4);
  const double z[4] = {0.0, 1.25, 12.505, 13.755};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(s.layers[i].z_center - z[i]) < 1e-12);
    CHECK(s.layers[i].infinite());
  }
  CHECK(s.layers[0].dipole_axis.isApprox(CVec3(1, 0, 0)));
  CHECK(s.layers[1].dipole_axis.isApprox(CVec3(0, 1, 0)));
  CHECK(s.layers[2].dipole_axis.isApprox(CVec3(1, 0, 0)));
  CHECK(s.layers[3].dipole_axis.isApprox(CVec3(0, 1, 0)));
  CHECK(s.mirror_spacing == 1.25);
  CHECK(s.periodic());
  CHECK(build_hp_cavity(3.0, 0, 0.8, 0, kFlat).mirror_spacing == 0.25);
}

TEST_CASE("finite curved cavity mirrors are concave toward the interior") {
  const CavityStack s = build_hp_cavity(5.0, 0, 0.8, 4, 100.0);
  CHECK(s.layers[0].positions[0].z() > 0.0);
  CHECK(s.layers[3].positions[0].z() < 5.25);
  CHECK(s.layers[0].size() == 16);
}

TEST_CASE("stack validation") {
  CHECK(error_text([] { build_hp_cavity(1.0, 1, 0.8, 0, kFlat); }) == "mirrors overlap");
  CHECK(error_text([] { build_hp_cavity(1.25, 1, 0.8, 0, kFlat); }) == "mirrors overlap");
  CHECK(error_text([] { build_square_array(0.8, 0, 0.0, kFlat, CVec3(1, 0, 0)); }) == "n_side must be >= 1");
  CHECK(error_text([] { build_square_array(0.8, 2, 0.0, kFlat, CVec3(1, 1, 0)); }) == "dipole axis must be a unit vector");
  CavityStack s = build_bilayer(2.0, 0.8, 0, kFlat);
  s.layers[1].z_center = -1.0;
  CHECK(error_text([&] { s.validate(); }) == "layer z positions must be non-decreasing");
  CavityStack t = build_bilayer(2.0, 0.8, 0, kFlat);
  t.layers[1].z_center = 0.0;
  CHECK(error_text([&] { t.validate(); }) == "co-located layers must have orthogonal dipole axes");
  CavityStack iso = build_single_layer(0.8, 0, true);
  CHECK(iso.layers.size() == 2);
  CHECK_NOTHROW(iso.validate());
}
