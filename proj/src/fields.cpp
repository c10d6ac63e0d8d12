#include "hpc/fields.hpp"

#include <cmath>

#include "hpc/parallel.hpp"

namespace hpc {

RSVectors riemann_silberstein(const Field3& f) {
  const double s = 1.0 / std::sqrt(2.0);
  return {s * (f.E + kI * f.ZH), s * (f.E - kI * f.ZH)};
}

Field3 field_at(const DipoleSystem& sys, const DipoleState& state, const Vec3& point) {
  return sys.field_at(state, point);
}

namespace {
std::vector<double> cell_centers(double lo, double hi, double res) {
  if (!(hi > lo)) throw Error("map range must have max > min");
  if (!(res > 0.0)) throw Error("map resolution must be positive");
  const int n = std::max(1, static_cast<int>(std::lround((hi - lo) * res)));
  std::vector<double> v(n);
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) v[i] = lo + (i + 0.5) * h;
  return v;
}
}  // namespace

RSFieldMap rs_map(const DipoleSystem& sys, const DipoleState& state, const MapPlane& plane, int threads) {
  RSFieldMap m;
  m.y = cell_centers(plane.y_min, plane.y_max, plane.resolution);
  m.z = cell_centers(plane.z_min, plane.z_max, plane.resolution);
  m.I_in = 2.0 * std::norm(sys.drive().amplitude);
  if (!(m.I_in > 0.0)) throw Error("map normalization needs a nonzero drive amplitude");
  const std::size_t n = m.y.size() * m.z.size();
  m.G_plus.resize(n);
  m.G_minus.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const std::size_t iy = i % m.y.size(), iz = i / m.y.size();
    const RSVectors g = riemann_silberstein(sys.field_at(state, Vec3(plane.x, m.y[iy], m.z[iz])));
    m.G_plus[i] = g.plus;
    m.G_minus[i] = g.minus;
  });
  return m;
}

}  // namespace hpc
