#include <doctest.h>

#include "hpc/analytic_bilayer.hpp"
#include "hpc/fields.hpp"
#include "hpc/greens.hpp"
#include "test_util.hpp"

using namespace hpc;
using testutil::error_text;

namespace {

const CollectiveRates& rates08() {
  static const CollectiveRates r = metasurface_rates(Vec2::Zero(), LatticeSpec::square(0.8));
  return r;
}

// (E, ZH) minus the incident field
Field3 scattered(const DipoleSystem& sys, const DipoleState& st, const Vec3& p) {
  Field3 f = field_at(sys, st, p);
  const Field3 in = sys.drive().at(p);
  f.E -= in.E;
  f.ZH -= in.ZH;
  return f;
}

}  // namespace

TEST_CASE("empty plane under RCP: pure positive helicity of unit normalized intensity") {
  CavityStack empty;
  PeriodicSystem sys(empty, DriveField::plane_wave(rcp(), cplx(0.3, 0.4)));
  MapPlane plane;
  plane.y_min = -1.0;
  plane.y_max = 1.0;
  plane.z_min = 0.0;
  plane.z_max = 2.0;
  const RSFieldMap m = rs_map(sys, sys.steady_state(0.0), plane);
  CHECK(m.ny() == 16);
  CHECK(m.nz() == 16);
  CHECK(m.y.front() == doctest::Approx(-1.0 + 1.0 / 16.0));
  for (std::size_t i = 0; i < m.G_plus.size(); ++i) {
    CHECK(std::abs(m.plus_sq(i) - 1.0) < 1e-14);
    CHECK(m.minus_sq(i) < 1e-30);
    CHECK(std::abs(m.chirality(i) - 1.0) < 1e-14);
  }
}

TEST_CASE("free plane waves obey the impedance relation") {
  for (const CVec2& p : {rcp(), lcp(), CVec2(1, 0), CVec2(0.6, cplx(0, 0.8))}) {
    const DriveField d = DriveField::plane_wave(p, cplx(1.2, -0.3));
    for (const Vec3& r : {Vec3(0.1, 0.2, 0.3), Vec3(-2.0, 1.0, 7.7)}) {
      const Field3 f = d.at(r);
      const CVec3 zxE(-f.E(1), f.E(0), 0.0);
      CHECK((f.ZH - zxE).norm() < 1e-15);
    }
  }
}

TEST_CASE("dipole fields reconstruct through the Green's tensors") {
  const CavityStack s = build_bilayer(1.3, 0.8, 2, kFlat);
  FiniteSystem sys(s, DriveField::plane_wave(CVec2(1, 0)));
  const DipoleState st = sys.steady_state(0.2);
  const Vec3 p(0.3, -0.2, 0.7);
  CVec3 E = CVec3::Zero(), ZH = CVec3::Zero();
  const double pref = -3.0 * kPi / kTwoPi;
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < s.layers[l].size(); ++i) {
      const Vec3 R = p - s.layers[l].positions[i];
      const cplx b = st.beta(sys.index(l, static_cast<int>(i)));
      E += pref * electric_greens(R) * s.layers[l].dipole_axis * b;
      ZH += pref * magnetic_greens(R) * s.layers[l].dipole_axis * b;
    }
  const Field3 f = scattered(sys, st, p);
  CHECK((f.E - E).norm() < 1e-13 * E.norm());
  CHECK((f.ZH - ZH).norm() < 1e-13 * ZH.norm());
  CHECK(error_text([&] { field_at(sys, st, s.layers[1].positions[2]); }) == "field point coincides with an emitter");
}

TEST_CASE("resonant single layer blocks the field behind it") {
  PeriodicSystem sys(build_single_layer(0.8, 0, false), DriveField::plane_wave(CVec2(1, 0)));
  const DipoleState st = sys.steady_state(rates08().omega);
  CHECK(field_at(sys, st, Vec3(0.2, 0.1, 5.0)).E.norm() < 1e-12);
}

TEST_CASE("reflection off a conventional mirror reverses the handedness") {
  const double d = rates08().omega;
  const Vec3 front(0.0, 0.0, -3.0);
  // isotropic layer: reflected RCP becomes pure negative helicity
  PeriodicSystem iso(build_single_layer(0.8, 0, true), DriveField::plane_wave(rcp()));
  const RSVectors ri = riemann_silberstein(scattered(iso, iso.steady_state(d), front));
  CHECK(ri.minus.squaredNorm() > 0.9);
  CHECK(ri.plus.squaredNorm() < 1e-20);
  // x-dipole layer: reflected field is linear, both helicities equally present
  PeriodicSystem lin(build_single_layer(0.8, 0, false), DriveField::plane_wave(rcp()));
  const RSVectors rl = riemann_silberstein(scattered(lin, lin.steady_state(d), front));
  CHECK(rl.minus.squaredNorm() > 0.1);
  CHECK(std::abs(rl.plus.squaredNorm() - rl.minus.squaredNorm()) < 1e-12);
}

TEST_CASE("HP cavity: positive-helicity enhancement without helicity conversion") {
  const auto& r = rates08();
  const double l = 12.505;
  PeriodicSystem sys(build_hp_cavity(l, 1, 0.8, 0, kFlat), DriveField::plane_wave(rcp()));
  const DipoleState st = sys.steady_state(resonance_detuning(l, r.omega, r.gamma));
  MapPlane plane;
  plane.y_min = -0.5;
  plane.y_max = 0.5;
  plane.z_min = 1.4;
  plane.z_max = 12.3;
  const RSFieldMap m = rs_map(sys, st, plane, 3);
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < m.G_plus.size(); ++i) {
    peak = std::max(peak, m.plus_sq(i));
    worst = std::max(worst, m.minus_sq(i) / m.plus_sq(i));
  }
  CHECK(peak > 100.0);
  CHECK(worst < 1e-4);
  // thread count does not change the result
  const RSFieldMap m1 = rs_map(sys, st, plane, 1);
  for (std::size_t i = 0; i < m.G_plus.size(); ++i) CHECK(m1.G_plus[i] == m.G_plus[i]);
}

TEST_CASE("LCP drive swaps the roles of the two RS vectors") {
  const double l = 12.505, d = resonance_detuning(l, rates08().omega, rates08().gamma);
  const CavityStack s = build_hp_cavity(l, 1, 0.8, 0, kFlat);
  PeriodicSystem a(s, DriveField::plane_wave(rcp()));
  PeriodicSystem b(s, DriveField::plane_wave(lcp()));
  const DipoleState sa = a.steady_state(d), sb = b.steady_state(d);
  for (double z : {-2.0, 0.6, 4.0, 9.3, 14.5}) {
    const RSVectors ga = riemann_silberstein(field_at(a, sa, Vec3(0, 0, z)));
    const RSVectors gb = riemann_silberstein(field_at(b, sb, Vec3(0, 0, z)));
    CHECK(std::abs(ga.plus.squaredNorm() - gb.minus.squaredNorm()) < 1e-9 * ga.plus.squaredNorm());
    CHECK(std::abs(ga.minus.squaredNorm() - gb.plus.squaredNorm()) < 1e-9 * ga.plus.squaredNorm() + 1e-20);
  }
}

TEST_CASE("Gaussian drive: paraxial profile and finite-array map") {
  const DriveField g = DriveField::gaussian(rcp(), 8.0, 5.0);
  const Field3 focus = g.at(Vec3(0, 0, 5.0));
  CHECK((focus.E.head<2>() - rcp() * std::exp(kI * kTwoPi * 5.0)).norm() < 1e-14);
  const Field3 off = g.at(Vec3(8.0, 0, 5.0));
  CHECK(std::abs(off.E.norm() - std::exp(-1.0)) < 1e-12);
  // one Rayleigh range from focus the on-axis amplitude drops to 1/sqrt 2
  const double zR = kTwoPi * 64.0 / 2.0;
  CHECK(std::abs(g.at(Vec3(0, 0, 5.0 + zR)).E.norm() - 1.0 / std::sqrt(2.0)) < 1e-12);

  const CavityStack s = build_hp_cavity(3.255, 0, 0.8, 8, 200.0);
  FiniteSystem sys(s, DriveField::gaussian(rcp(), 2.0, 1.6));
  const DipoleState st = sys.steady_state(0.0);
  MapPlane plane;
  plane.y_min = -1.0;
  plane.y_max = 1.0;
  plane.z_min = 0.5;
  plane.z_max = 3.0;
  plane.resolution = 4.0;
  const RSFieldMap m = rs_map(sys, st, plane, 2);
  for (std::size_t i = 0; i < m.G_plus.size(); ++i) {
    CHECK(std::isfinite(m.plus_sq(i)));
    CHECK(m.minus_sq(i) >= 0.0);
  }
  CHECK(error_text([&] {
          MapPlane bad = plane;
          bad.resolution = 0.0;
          rs_map(sys, st, bad);
        }) == "map resolution must be positive");
}
