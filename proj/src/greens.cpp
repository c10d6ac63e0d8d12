#include "hpc/greens.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

namespace hpc {

namespace {

CMat3 cross_matrix(const CVec3& v) {
  CMat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

CMat3 electric_greens(const Vec3& R, double k0) {
  const double r = R.norm();
  if (r == 0.0) throw Error("self-interaction requested");
  const double k = k0;
  const cplx pref = std::exp(kI * (k * r)) / (4.0 * kPi * k * k);
  const cplx a = k * k / r + kI * k / (r * r) - 1.0 / (r * r * r);
  const cplx b = -k * k / r - 3.0 * kI * k / (r * r) + 3.0 / (r * r * r);
  const Vec3 n = R / r;
  CMat3 g = a * CMat3::Identity();
  g += b * (n * n.transpose()).cast<cplx>();
  return pref * g;
}

CMat3 magnetic_greens(const Vec3& R, double k0) {
  const double r = R.norm();
  if (r == 0.0) throw Error("self-interaction requested");
  const cplx pref = (k0 * r + kI) * std::exp(kI * (k0 * r)) / (4.0 * kPi * k0 * r * r * r);
  return pref * cross_matrix(R.cast<cplx>());
}

cplx qz_branch(double k0, const Vec2& q) {
  const double s = k0 * k0 - q.squaredNorm();
  if (s >= 0.0) return {std::sqrt(s), 0.0};
  return {0.0, std::sqrt(-s)};
}

LatticeFourierResult lattice_greens_fourier(const Vec2& q, double z, const LatticeSpec& lattice, int g_max,
                                            double k0, double tol_rel, const Vec2& rho) {
  lattice.validate();
  if (g_max < 0) throw Error("g_max must be >= 0");
  const auto [b1, b2] = lattice.reciprocal();
  const double A = lattice.area();
  const double sgn = z < 0.0 ? -1.0 : 1.0;
  const double az = std::abs(z);

  LatticeFourierResult res;
  for (int n = 0; n <= g_max; ++n) {
    CMat3 shell_e = CMat3::Zero();
    CMat3 shell_m = CMat3::Zero();
    for (int n1 = -n; n1 <= n; ++n1) {
      for (int n2 = -n; n2 <= n; ++n2) {
        if (std::max(std::abs(n1), std::abs(n2)) != n) continue;
        const Vec2 p = q + n1 * b1 + n2 * b2;
        if (std::abs(k0 * k0 - p.squaredNorm()) < 1e-10 * k0 * k0) throw Error("Wood-anomaly degenerate point");
        const cplx kz = qz_branch(k0, p);
        const CVec3 qv(p.x(), p.y(), sgn * kz);
        const cplx phase = std::exp(kI * (p.dot(rho)) + kI * kz * az);
        shell_e += (kI / (2.0 * A * k0 * k0 * kz)) * phase * (k0 * k0 * CMat3::Identity() - qv * qv.transpose());
        shell_m += (kI / (2.0 * A * k0 * kz)) * phase * cross_matrix(qv);
      }
    }
    res.electric += shell_e;
    res.magnetic += shell_m;
    res.shells = n;
    const double scale = res.electric.norm() + res.magnetic.norm();
    res.converged = n > 0 && (shell_e.norm() + shell_m.norm()) <= tol_rel * scale;
  }
  return res;
}

namespace {

// Gaussian-windowed real-space sum sum_{j != 0} c_j exp(-(R_j/L)^2), truncated at R = 6L.
cplx windowed_sum(const Vec2& q, const LatticeSpec& lat, const CVec3& d, double k0, double L) {
  const double rmax = 6.0 * L;
  const auto [b1, b2] = lat.reciprocal();
  const int n1max = static_cast<int>(std::ceil(rmax * b1.norm() / kTwoPi)) + 1;
  const int n2max = static_cast<int>(std::ceil(rmax * b2.norm() / kTwoPi)) + 1;
  const double pref = -3.0 * kPi / k0;
  const CVec3 dc = d.conjugate();
  cplx total = 0.0;
  // fixed loop order keeps the reduction reproducible
  for (int n1 = -n1max; n1 <= n1max; ++n1) {
    cplx row = 0.0;
    for (int n2 = -n2max; n2 <= n2max; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const Vec2 r2 = n1 * lat.a1 + n2 * lat.a2;
      const double r = r2.norm();
      if (r > rmax) continue;
      const Vec3 R(r2.x(), r2.y(), 0.0);
      const cplx c = pref * dc.dot(electric_greens(R, k0) * d);
      row += c * std::exp(kI * q.dot(r2)) * std::exp(-(r / L) * (r / L));
    }
    total += row;
  }
  return total;
}

}  // namespace

CollectiveRates in_plane_collective_rates(const Vec2& q, const LatticeSpec& lattice, const CVec3& dipole,
                                          double k0, double tol, double max_window) {
  lattice.validate();
  CollectiveRates out;
  std::vector<cplx> raw;
  const cplx self = cplx(0.0, -0.5);
  for (double L = 4.0; L <= max_window; L *= 2.0) {
    raw.push_back(self + windowed_sum(q, lattice, dipole, k0, L));
    out.window_lengths.push_back(L);
    const std::size_t n = raw.size();
    if (n < 2) continue;
    out.estimates.push_back((4.0 * raw[n - 1] - raw[n - 2]) / 3.0);
    const std::size_t m = out.estimates.size();
    if (m >= 3) {
      const cplx d1 = out.estimates[m - 1] - out.estimates[m - 2];
      const cplx d2 = out.estimates[m - 2] - out.estimates[m - 3];
      const bool ok1 = std::abs(d1.real()) < tol && 2.0 * std::abs(d1.imag()) < tol;
      const bool ok2 = std::abs(d2.real()) < tol && 2.0 * std::abs(d2.imag()) < tol;
      if (ok1 && ok2) {
        out.omega = out.estimates.back().real();
        out.gamma = -2.0 * out.estimates.back().imag();
        out.converged = true;
        return out;
      }
    }
  }
  std::ostringstream msg;
  msg << "collective lattice sum did not converge (a1=(" << lattice.a1.x() << "," << lattice.a1.y() << "), a2=("
      << lattice.a2.x() << "," << lattice.a2.y() << "), windows up to L=" << max_window << "; last estimates:";
  for (const auto& e : out.estimates) msg << " " << e.real() << "/" << -2.0 * e.imag();
  msg << ")";
  throw Error(msg.str());
}

double collective_decay_closed_form(const Vec2& q, const LatticeSpec& lattice, const CVec3& dipole, double k0) {
  lattice.validate();
  const auto [b1, b2] = lattice.reciprocal();
  const double A = lattice.area();
  const int n1max = static_cast<int>(std::ceil((k0 + q.norm()) / b1.norm() * 2.0)) + 1;
  const int n2max = static_cast<int>(std::ceil((k0 + q.norm()) / b2.norm() * 2.0)) + 1;
  double gamma = 0.0;
  for (int n1 = -n1max; n1 <= n1max; ++n1) {
    for (int n2 = -n2max; n2 <= n2max; ++n2) {
      const Vec2 p = q + n1 * b1 + n2 * b2;
      const double s = k0 * k0 - p.squaredNorm();
      if (std::abs(s) < 1e-10 * k0 * k0) throw Error("Wood-anomaly degenerate point");
      if (s <= 0.0) continue;
      const double kz = std::sqrt(s);
      // |d x k|^2 = k^2 |d|^2 - |d.k|^2 for the propagating direction (p, kz)
      const CVec3 kv(p.x(), p.y(), kz);
      const double dk2 = std::norm(dipole.dot(kv));  // conj(d).k vs d.k: equal modulus for real k
      gamma += 3.0 * kPi * (k0 * k0 * dipole.squaredNorm() - dk2) / (A * k0 * k0 * k0 * kz);
    }
  }
  return gamma;
}

CollectiveRates metasurface_rates(const Vec2& q, const LatticeSpec& lattice, const CVec3& dipole, double k0) {
  static std::mutex mu;
  static std::map<std::string, CollectiveRates> cache;
  std::ostringstream ks;
  ks << std::hexfloat << q.x() << ' ' << q.y() << ' ' << lattice.a1.x() << ' ' << lattice.a1.y() << ' '
     << lattice.a2.x() << ' ' << lattice.a2.y() << ' ' << k0;
  for (int i = 0; i < 3; ++i) ks << ' ' << dipole(i).real() << ' ' << dipole(i).imag();
  const std::string key = ks.str();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  CollectiveRates r = in_plane_collective_rates(q, lattice, dipole, k0);
  r.gamma = collective_decay_closed_form(q, lattice, dipole, k0);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, r);
  return r;
}

}  // namespace hpc
