#include "hpc/dipole_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>

#include "hpc/greens.hpp"

namespace hpc {

namespace {

constexpr double kCoincide = 1e-12;

CVec3 ez() { return CVec3(0.0, 0.0, 1.0); }

}  // namespace

// ---------------------------------------------------------------- drive

DriveField DriveField::plane_wave(const CVec2& pol, cplx amplitude) {
  DriveField d;
  d.polarization = pol;
  d.amplitude = amplitude;
  d.validate();
  return d;
}

DriveField DriveField::gaussian(const CVec2& pol, double waist, double focus_z, cplx amplitude) {
  DriveField d;
  d.kind = Kind::Gaussian;
  d.polarization = pol;
  d.waist = waist;
  d.focus_z = focus_z;
  d.amplitude = amplitude;
  d.validate();
  return d;
}

void DriveField::validate() const {
  if (std::abs(polarization.norm() - 1.0) > 1e-12) throw Error("drive polarization must be normalized");
  if (!std::isfinite(std::abs(amplitude))) throw Error("drive amplitude must be finite");
  if (kind == Kind::PlaneWave) {
    if (!(k_parallel.norm() < kTwoPi)) throw Error("plane-wave k_parallel must satisfy |k_parallel| < k");
  } else {
    if (!(waist > 0.0)) throw Error("Gaussian waist must be positive");
    if (k_parallel.norm() != 0.0) throw Error("Gaussian drive must be at normal incidence");
  }
}

CVec3 DriveField::polarization3() const {
  CVec3 p(polarization(0), polarization(1), 0.0);
  if (kind == Kind::PlaneWave && k_parallel.norm() > 0.0) {
    const double kz = std::sqrt(kTwoPi * kTwoPi - k_parallel.squaredNorm());
    p(2) = -(k_parallel.x() * p(0) + k_parallel.y() * p(1)) / kz;
    p /= p.norm();
  }
  return p;
}

Field3 DriveField::at(const Vec3& r) const {
  const double k = kTwoPi;
  Field3 f;
  if (kind == Kind::PlaneWave) {
    const double kz = std::sqrt(k * k - k_parallel.squaredNorm());
    const Vec3 kv(k_parallel.x(), k_parallel.y(), kz);
    CVec3 e(polarization(0), polarization(1), 0.0);
    e(2) = -(kv.x() * e(0) + kv.y() * e(1)) / kz;
    f.E = amplitude * std::exp(kI * kv.dot(r)) * e;
    f.ZH = cross((kv / k).cast<cplx>(), f.E);
    return f;
  }
  const double zr = 0.5 * k * waist * waist;
  const double zp = r.z() - focus_z;
  const double rho2 = r.x() * r.x() + r.y() * r.y();
  const cplx den = 1.0 + kI * zp / zr;
  const cplx u = std::exp(-rho2 / (waist * waist * den) + kI * k * r.z()) / den;
  f.E = amplitude * u * CVec3(polarization(0), polarization(1), 0.0);
  f.ZH = cross(ez(), f.E);
  return f;
}

CVec2 rcp() { return CVec2(1.0, kI) / std::sqrt(2.0); }
CVec2 lcp() { return CVec2(1.0, -kI) / std::sqrt(2.0); }

Eigen::MatrixXcd LinearModel::system_matrix() const {
  Eigen::MatrixXcd A = -H;
  A.diagonal() += detuning.cast<cplx>();
  return A;
}

// ---------------------------------------------------------------- base

DipoleSystem::DipoleSystem(const CavityStack& stack, const DriveField& drive) : stack_(stack), drive_(drive) {
  stack_.validate();
  drive_.validate();
}

namespace {

std::string rcond_message(double rc) {
  std::ostringstream os;
  os << "singular or ill-conditioned system matrix (reciprocal condition estimate " << rc << ")";
  return os.str();
}

Eigen::VectorXcd lu_solve_checked(Eigen::MatrixXcd A, const Eigen::VectorXcd& b) {
  const int n = static_cast<int>(A.rows());
  // amplitudes of an absent scatterer are fully decoupled; pin them to zero
  for (int i = 0; i < n; ++i)
    if (A.row(i).isZero(0.0) && A.col(i).isZero(0.0) && b(i) == cplx(0.0)) A(i, i) = 1.0;
  if (n == 0) return Eigen::VectorXcd();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) throw Error(rcond_message(rc));
  Eigen::VectorXcd x = lu.solve(b);
  const double bn = std::max(b.norm(), 1e-300);
  double res = (A * x - b).norm() / bn;
  if (res > 1e-10) {
    x += lu.solve(b - A * x);
    res = (A * x - b).norm() / bn;
  }
  if (b.norm() > 0.0 && res > 1e-10) {
    std::ostringstream os;
    os << "steady-state residual " << res << " exceeds 1e-10 (reciprocal condition estimate " << rc << ")";
    throw Error(os.str());
  }
  return x;
}

}  // namespace

DipoleState DipoleSystem::steady_state(double delta, bool scatterer_present) const {
  const LinearModel m = model(delta, scatterer_present);
  DipoleState s;
  s.beta = lu_solve_checked(m.system_matrix(), m.eta);
  return s;
}

std::vector<DipoleState> DipoleSystem::sweep(const std::vector<double>& deltas) const {
  std::vector<DipoleState> out;
  out.reserve(deltas.size());
  for (double d : deltas) out.push_back(steady_state(d));
  return out;
}

DipoleState steady_state(const DipoleSystem& sys, double delta) { return sys.steady_state(delta); }

// ---------------------------------------------------------------- periodic

namespace {

// direction index: forward (+1) / backward (-1) / co-located (0, averaged)
int direction(double dz) { return dz > kCoincide ? 1 : (dz < -kCoincide ? -1 : 0); }

cplx channel_in(const ChannelElement& e, int s, const CVec3& field) {
  if (s > 0) return e.w_fwd.dot(field);
  if (s < 0) return e.w_bwd.dot(field);
  return 0.5 * (e.w_fwd.dot(field) + e.w_bwd.dot(field));
}

CVec3 channel_out(const ChannelElement& e, int s) {
  if (s > 0) return e.v_fwd;
  if (s < 0) return e.v_bwd;
  return 0.5 * (e.v_fwd + e.v_bwd);
}

}  // namespace

PeriodicSystem::PeriodicSystem(const CavityStack& stack, const DriveField& drive, const PeriodicOptions& opt,
                               const std::vector<ChannelElement>& scatterer)
    : DipoleSystem(stack, drive), opt_(opt), elements_(scatterer) {
  if (!stack_.empty() && !stack_.periodic()) throw Error("periodic emulation needs infinite layers");
  if (drive_.kind != DriveField::Kind::PlaneWave) throw Error("periodic emulation requires plane-wave drive");
  if (opt_.g_max < 0) throw Error("g_max must be >= 0");
  q_ = drive_.k_parallel;
  if (!elements_.empty() && q_.norm() != 0.0) throw Error("scatterer coupling requires normal incidence");
  const double k = kTwoPi;
  const double pref = -3.0 * kPi / k;
  n_layers_ = static_cast<int>(stack_.layers.size());
  const int n = size();
  H_ = Eigen::MatrixXcd::Zero(n, n);
  eta_ = Eigen::VectorXcd::Zero(n);
  const auto& lat = stack_.lattice;
  if (n_layers_ > 0) gamma0_ = collective_decay_closed_form(q_, lat, stack_.layers.front().dipole_axis, k);

  for (int l = 0; l < n_layers_; ++l) {
    const auto& L = stack_.layers[l];
    const CollectiveRates r = metasurface_rates(q_, lat, L.dipole_axis, k);
    self_.push_back(cplx(r.omega, -0.5 * r.gamma));
    H_(l, l) = self_.back();
    eta_(l) = L.dipole_axis.dot(drive_.at(Vec3(0.0, 0.0, L.z_center)).E);
    for (int m = 0; m < n_layers_; ++m) {
      if (m == l) continue;
      const auto& M = stack_.layers[m];
      const double dz = L.z_center - M.z_center;
      const int shells = (opt_.include_evanescent && std::abs(dz) > kCoincide) ? opt_.g_max : 0;
      const auto g = lattice_greens_fourier(q_, dz, lat, shells, k);
      H_(l, m) = pref * L.dipole_axis.dot(g.electric * M.dipole_axis);
    }
  }
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const auto& e = elements_[a];
    const int ia = n_layers_ + static_cast<int>(a);
    H_(ia, ia) = e.self;
    eta_(ia) = channel_in(e, 1, drive_.at(Vec3(0.0, 0.0, e.z)).E);
    for (int l = 0; l < n_layers_; ++l) {
      const auto& L = stack_.layers[l];
      // layer field at the scatterer, far-field channel only
      const double dz = e.z - L.z_center;
      const auto g = lattice_greens_fourier(q_, dz, lat, 0, k);
      H_(ia, l) = channel_in(e, direction(dz), pref * (g.electric * L.dipole_axis));
      const int s = direction(-dz);
      H_(l, ia) = L.dipole_axis.dot(-0.5 * kI * channel_out(e, s)) * std::exp(kI * k * std::abs(dz));
    }
    for (std::size_t b = 0; b < elements_.size(); ++b) {
      if (a == b) continue;
      const auto& f = elements_[b];
      const double dz = e.z - f.z;
      const int s = direction(dz);
      cplx c;
      if (s != 0) {
        c = channel_in(e, s, -0.5 * kI * channel_out(f, s));
      } else {
        c = 0.5 * (channel_in(e, 1, -0.5 * kI * f.v_fwd) + channel_in(e, -1, -0.5 * kI * f.v_bwd));
      }
      H_(ia, n_layers_ + static_cast<int>(b)) = c * std::exp(kI * k * std::abs(dz));
    }
  }
}

LinearModel PeriodicSystem::model(double delta, bool scatterer_present) const {
  LinearModel m;
  const int n = size();
  m.H = H_;
  m.eta = eta_;
  m.detuning = Eigen::VectorXd::Constant(n, delta);
  m.weights = Eigen::VectorXd::Constant(n, gamma0_);
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const int ia = n_layers_ + static_cast<int>(a);
    m.detuning(ia) = elements_[a].detuning;
    m.weights(ia) = 1.0;
    if (!scatterer_present) {
      m.H.row(ia).setZero();
      m.H.col(ia).setZero();
      m.detuning(ia) = 0.0;
      m.eta(ia) = 0.0;
    }
  }
  return m;
}

Field3 PeriodicSystem::field_at(const DipoleState& state, const Vec3& point) const {
  if (state.beta.size() != size()) throw Error("state size does not match the system");
  const double k = kTwoPi;
  const double pref = -3.0 * kPi / k;
  Field3 f = drive_.at(point);
  const Vec2 rho(point.x(), point.y());
  const auto& lat = stack_.lattice;
  for (int l = 0; l < n_layers_; ++l) {
    const auto& L = stack_.layers[l];
    const double dz = point.z() - L.z_center;
    int shells = opt_.include_evanescent ? opt_.g_max : 0;
    if (std::abs(dz) <= kCoincide) {
      // in the layer plane: reject lattice sites, otherwise keep the far field only
      const auto [b1, b2] = lat.reciprocal();
      const double c1 = b1.dot(rho) / kTwoPi, c2 = b2.dot(rho) / kTwoPi;
      if (std::abs(c1 - std::round(c1)) < 1e-9 && std::abs(c2 - std::round(c2)) < 1e-9)
        throw Error("field point coincides with an emitter");
      if (shells > 0) throw Error("field point lies in a metasurface plane (evanescent sum diverges)");
    }
    const auto g = lattice_greens_fourier(q_, dz, lat, shells, k, 1e-10, rho);
    f.E += pref * g.electric * L.dipole_axis * state.beta(l);
    f.ZH += pref * g.magnetic * L.dipole_axis * state.beta(l);
  }
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const auto& e = elements_[a];
    const cplx b = state.beta(n_layers_ + static_cast<int>(a));
    const double dz = point.z() - e.z;
    const int s = direction(dz);
    const CVec3 E = -0.5 * kI * channel_out(e, s) * b * std::exp(kI * k * std::abs(dz));
    f.E += E;
    f.ZH += static_cast<double>(s) * cross(ez(), E);
  }
  return f;
}

// ---------------------------------------------------------------- finite

struct FiniteSystem::Sector {
  std::vector<int> rep;                   // flat index of each representative
  std::vector<std::array<int, 4>> image;  // flat indices of its reflections P = (+,+),(-,+),(+,-),(-,-)
  std::vector<std::array<double, 4>> chi;
  Eigen::MatrixXcd H;
  Eigen::VectorXcd eta;
  std::once_flag hess_once;
  Eigen::MatrixXcd Q, T;
  Eigen::VectorXcd Qeta;
};

FiniteSystem::~FiniteSystem() = default;

namespace {

// d_a . G(R) . d_b for axis indices a, b in {0 (x), 1 (y)}
cplx greens_component(const Vec3& R, int a, int b) {
  const double k = kTwoPi;
  const double r = R.norm();
  const double inv = 1.0 / r;
  const cplx e = std::exp(kI * k * r) / (4.0 * kPi * k * k);
  const cplx A = k * k * inv + kI * k * inv * inv - inv * inv * inv;
  const cplx B = -k * k * inv - 3.0 * kI * k * inv * inv + 3.0 * inv * inv * inv;
  return e * ((a == b ? A : cplx(0.0)) + B * R(a) * R(b) * inv * inv);
}

int axis_index(const CVec3& d) {
  if ((d - CVec3(1.0, 0.0, 0.0)).norm() < 1e-14) return 0;
  if ((d - CVec3(0.0, 1.0, 0.0)).norm() < 1e-14) return 1;
  return -1;
}

}  // namespace

FiniteSystem::FiniteSystem(const CavityStack& stack, const DriveField& drive, bool use_symmetry)
    : DipoleSystem(stack, drive) {
  if (stack_.periodic()) throw Error("finite solver needs finite arrays");
  for (std::size_t l = 0; l < stack_.layers.size(); ++l) {
    const auto& L = stack_.layers[l];
    offsets_.push_back(n_total_);
    for (const auto& p : L.positions) {
      pos_.push_back(p);
      axis_.push_back(L.dipole_axis);
      layer_of_.push_back(static_cast<int>(l));
    }
    n_total_ += static_cast<int>(L.positions.size());
  }
  eta_.resize(n_total_);
  for (int i = 0; i < n_total_; ++i) eta_(i) = axis_[i].dot(drive_.at(pos_[i]).E);

  bool ok = use_symmetry && n_total_ > 0 && drive_.k_parallel.norm() == 0.0;
  for (const auto& L : stack_.layers) {
    ok = ok && L.n_side > 0 && L.n_side % 2 == 0 && axis_index(L.dipole_axis) >= 0;
    ok = ok && L.n_side == stack_.layers.front().n_side;
  }
  if (ok) {
    build_sectors();
    // the drive must lie entirely in the two sectors
    std::vector<Eigen::VectorXcd> sol;
    for (const auto& s : sectors_) sol.push_back(s->eta);
    DipoleState back = expand(sol);
    if ((back.beta - eta_).norm() > 1e-12 * std::max(1.0, eta_.norm())) {
      sectors_.clear();
      ok = false;
    }
  }
  symmetric_ = ok;
}

cplx FiniteSystem::coupling(int a, int b) const {
  if (a == b) return -0.5 * kI;
  const Vec3 R = pos_[a] - pos_[b];
  if (R.norm() < kCoincide) return 0.0;  // co-located orthogonal dipoles
  return -3.0 * kPi / kTwoPi * axis_[a].dot(electric_greens(R) * axis_[b]);
}

void FiniteSystem::build_sectors() {
  const int n = stack_.layers.front().n_side;
  const int h = n / 2;
  // sector 0: x-layers even/even, y-layers odd/odd; sector 1 the reverse
  for (int sec = 0; sec < 2; ++sec) {
    auto S = std::make_unique<Sector>();
    for (std::size_t l = 0; l < stack_.layers.size(); ++l) {
      const int ax = axis_index(stack_.layers[l].dipole_axis);
      const double parity = (ax == sec) ? 1.0 : -1.0;
      for (int iy = h; iy < n; ++iy) {
        for (int ix = h; ix < n; ++ix) {
          const int base = offsets_[l];
          const int mx = n - 1 - ix, my = n - 1 - iy;
          S->rep.push_back(base + iy * n + ix);
          S->image.push_back({base + iy * n + ix, base + iy * n + mx, base + my * n + ix, base + my * n + mx});
          S->chi.push_back({1.0, parity, parity, 1.0});
        }
      }
    }
    const int m = static_cast<int>(S->rep.size());
    S->H.resize(m, m);
    S->eta.resize(m);
    const double pref = -3.0 * kPi / kTwoPi;
    for (int r = 0; r < m; ++r) {
      const int a = S->rep[r];
      const int ia = axis_index(axis_[a]);
      cplx e = 0.0;
      for (int p = 0; p < 4; ++p) e += S->chi[r][p] * eta_(S->image[r][p]);
      S->eta(r) = 0.25 * e;
      for (int c = 0; c < m; ++c) {
        const int ib = axis_index(axis_[S->rep[c]]);
        cplx sum = 0.0;
        for (int p = 0; p < 4; ++p) {
          const int b = S->image[c][p];
          cplx h_ab;
          if (a == b) {
            h_ab = -0.5 * kI;
          } else {
            const Vec3 R = pos_[a] - pos_[b];
            h_ab = R.norm() < kCoincide ? cplx(0.0) : pref * greens_component(R, ia, ib);
          }
          sum += S->chi[c][p] * h_ab;
        }
        S->H(r, c) = sum;
      }
    }
    sectors_.push_back(std::move(S));
  }
}

DipoleState FiniteSystem::expand(const std::vector<Eigen::VectorXcd>& sol) const {
  DipoleState st;
  st.beta = Eigen::VectorXcd::Zero(n_total_);
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& S = *sectors_[s];
    for (std::size_t r = 0; r < S.rep.size(); ++r)
      for (int p = 0; p < 4; ++p) st.beta(S.image[r][p]) += S.chi[r][p] * sol[s](static_cast<int>(r));
  }
  return st;
}

LinearModel FiniteSystem::model(double delta, bool) const {
  if (n_total_ > 8000) throw Error("dense finite model limited to 8000 emitters");
  LinearModel m;
  m.H.resize(n_total_, n_total_);
  for (int a = 0; a < n_total_; ++a)
    for (int b = 0; b < n_total_; ++b) m.H(a, b) = coupling(a, b);
  m.detuning = Eigen::VectorXd::Constant(n_total_, delta);
  m.eta = eta_;
  m.weights = Eigen::VectorXd::Ones(n_total_);
  return m;
}

DipoleState FiniteSystem::steady_state(double delta, bool scatterer_present) const {
  if (!symmetric_) return DipoleSystem::steady_state(delta, scatterer_present);
  std::vector<Eigen::VectorXcd> sol;
  for (const auto& S : sectors_) {
    Eigen::MatrixXcd A = -S->H;
    A.diagonal().array() += delta;
    sol.push_back(lu_solve_checked(A, S->eta));
  }
  return expand(sol);
}

namespace {

// (delta I - T) y = b for upper Hessenberg T, Gaussian elimination with adjacent-row pivoting.
Eigen::VectorXcd hessenberg_solve(const Eigen::MatrixXcd& T, double delta, Eigen::VectorXcd b) {
  const int n = static_cast<int>(T.rows());
  Eigen::MatrixXcd A = -T;
  A.diagonal().array() += delta;
  for (int k = 0; k + 1 < n; ++k) {
    if (std::abs(A(k + 1, k)) > std::abs(A(k, k))) {
      A.row(k).tail(n - k).swap(A.row(k + 1).tail(n - k));
      std::swap(b(k), b(k + 1));
    }
    if (A(k, k) == cplx(0.0)) throw Error(rcond_message(0.0));
    const cplx l = A(k + 1, k) / A(k, k);
    if (l != cplx(0.0)) {
      A.row(k + 1).tail(n - k) -= l * A.row(k).tail(n - k);
      b(k + 1) -= l * b(k);
    }
  }
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    dmax = std::max(dmax, std::abs(A(i, i)));
    dmin = std::min(dmin, std::abs(A(i, i)));
  }
  if (!(dmin > 1e-14 * dmax)) throw Error(rcond_message(dmax > 0.0 ? dmin / dmax : 0.0));
  for (int i = n - 1; i >= 0; --i) {
    cplx s = b(i);
    if (i + 1 < n) s -= (A.row(i).tail(n - 1 - i).transpose().cwiseProduct(b.tail(n - 1 - i))).sum();
    b(i) = s / A(i, i);
  }
  return b;
}

}  // namespace

std::vector<DipoleState> FiniteSystem::sweep(const std::vector<double>& deltas) const {
  if (!symmetric_ || deltas.size() < 4) return DipoleSystem::sweep(deltas);
  for (const auto& S : sectors_) {
    std::call_once(S->hess_once, [&S] {
      Eigen::HessenbergDecomposition<Eigen::MatrixXcd> hd(S->H);
      S->Q = hd.matrixQ();
      S->T = hd.matrixH();
      S->Qeta = S->Q.adjoint() * S->eta;
    });
  }
  std::vector<DipoleState> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    std::vector<Eigen::VectorXcd> sol;
    for (const auto& S : sectors_) {
      Eigen::VectorXcd x = S->Q * hessenberg_solve(S->T, d, S->Qeta);
      Eigen::MatrixXcd A = -S->H;
      A.diagonal().array() += d;
      const double res = (A * x - S->eta).norm() / std::max(S->eta.norm(), 1e-300);
      if (S->eta.norm() > 0.0 && res > 1e-10) {
        // accuracy lost in the reduction; fall back to a pivoted LU
        x = lu_solve_checked(A, S->eta);
      }
      sol.push_back(std::move(x));
    }
    out.push_back(expand(sol));
  }
  return out;
}

Field3 FiniteSystem::field_at(const DipoleState& state, const Vec3& point) const {
  if (state.beta.size() != n_total_) throw Error("state size does not match the system");
  const double pref = -3.0 * kPi / kTwoPi;
  Field3 f = drive_.at(point);
  for (int j = 0; j < n_total_; ++j) {
    const Vec3 R = point - pos_[j];
    if (R.norm() < 1e-9) throw Error("field point coincides with an emitter");
    const CVec3 p = axis_[j] * state.beta(j);
    f.E += pref * electric_greens(R) * p;
    f.ZH += pref * magnetic_greens(R) * p;
  }
  return f;
}

cplx FiniteSystem::projected_transmission(const DipoleState& state) const {
  if (drive_.kind != DriveField::Kind::PlaneWave || drive_.k_parallel.norm() != 0.0)
    throw Error("projected transmission needs a normal plane-wave drive");
  const CVec3 p = drive_.polarization3();
  CVec3 E = drive_.amplitude * p;
  for (std::size_t l = 0; l < stack_.layers.size(); ++l) {
    const auto& L = stack_.layers[l];
    const double gamma = 3.0 / (4.0 * kPi * L.spacing * L.spacing);
    cplx mean = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) {
      const int j = offsets_[l] + static_cast<int>(i);
      mean += state.beta(j) * std::exp(-kI * kTwoPi * pos_[j].z());
    }
    mean /= static_cast<double>(L.size());
    E += -0.5 * kI * gamma * L.dipole_axis * mean;
  }
  return p.dot(E) / drive_.amplitude;
}

std::unique_ptr<DipoleSystem> make_system(const CavityStack& stack, const DriveField& drive,
                                          const PeriodicOptions& opt, const std::vector<ChannelElement>& scatterer) {
  if (stack.empty() || stack.periodic()) return std::make_unique<PeriodicSystem>(stack, drive, opt, scatterer);
  if (!scatterer.empty()) throw Error("scatterer requires the periodic emulation");
  return std::make_unique<FiniteSystem>(stack, drive);
}

// ---------------------------------------------------------------- dynamics

void EventSchedule::validate() const {
  if (std::isnan(entry) || std::isnan(exit)) throw Error("schedule times must not be NaN");
  if (!(entry <= exit)) throw Error("scatterer exit precedes entry");
}

namespace {

struct Affine {
  Eigen::MatrixXcd P;
  Eigen::VectorXcd q;
};

// f after g
Affine after(const Affine& f, const Affine& g) { return {f.P * g.P, f.P * g.q + f.q}; }

Affine rk4_power(const Eigen::MatrixXcd& K, const Eigen::VectorXcd& c, double h, long n) {
  const int d = static_cast<int>(K.rows());
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd hK = h * K;
  const Eigen::MatrixXcd hK2 = hK * hK;
  const Eigen::MatrixXcd hK3 = hK2 * hK;
  Affine base{I + hK + hK2 / 2.0 + hK3 / 6.0 + hK3 * hK / 24.0,
              h * (I + hK / 2.0 + hK2 / 6.0 + hK3 / 24.0) * c};
  Affine acc{I, Eigen::VectorXcd::Zero(d)};
  while (n > 0) {
    if (n & 1) acc = after(base, acc);
    n >>= 1;
    if (n) base = after(base, base);
  }
  return acc;
}

}  // namespace

Trajectory time_evolve(const DipoleSystem& sys, double delta, const std::vector<double>& t_grid,
                       const EventSchedule& schedule, const EvolveOptions& opt) {
  schedule.validate();
  if (t_grid.empty()) throw Error("empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw Error("time grid must be strictly increasing");
  const int n = sys.size();
  const bool scat = sys.has_scatterer();
  std::array<LinearModel, 2> models{sys.model(delta, false), scat ? sys.model(delta, true) : sys.model(delta, false)};
  if (!opt.drive_on)
    for (auto& m : models) m.eta.setZero();
  std::array<Eigen::MatrixXcd, 2> K;
  std::array<Eigen::VectorXcd, 2> c;
  for (int p = 0; p < 2; ++p) {
    K[p] = kI * models[p].system_matrix();
    c[p] = -kI * models[p].eta;
  }
  const double rate = models[1].system_matrix().cwiseAbs().rowwise().sum().maxCoeff();
  const double hmax = opt.max_step > 0.0 ? opt.max_step : (rate > 0.0 ? 0.05 / rate : 1.0);

  // amplitudes that only exist while the scatterer is inside
  std::vector<int> scat_idx;
  if (scat) {
    const auto& m0 = models[0];
    for (int i = 0; i < n; ++i)
      if (m0.H.row(i).isZero(0.0) && m0.H.col(i).isZero(0.0) && m0.detuning(i) == 0.0) scat_idx.push_back(i);
  }
  const Eigen::VectorXd& w = models[1].weights;
  auto wnorm = [&w](const Eigen::VectorXcd& v) { return std::sqrt((w.array() * v.cwiseAbs2().array()).sum()); };

  Eigen::VectorXcd beta = opt.initial.size() ? opt.initial : Eigen::VectorXcd::Zero(n);
  if (beta.size() != n) throw Error("initial state size does not match the system");
  auto clear_absent = [&](double t) {
    if (!schedule.present_at(t))
      for (int i : scat_idx) beta(i) = 0.0;
  };
  clear_absent(t_grid.front());
  const double norm0 = wnorm(beta);
  const double drive_norm = std::max(wnorm(c[0]), wnorm(c[1]));

  std::map<std::pair<int, std::uint64_t>, Affine> cache;
  auto propagator = [&](int present, double dt) -> const Affine& {
    std::uint64_t bits;
    std::memcpy(&bits, &dt, sizeof bits);
    auto key = std::make_pair(present, bits);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const long nsub = std::max(1L, static_cast<long>(std::ceil(dt / hmax - 1e-9)));
    return cache.emplace(key, rk4_power(K[present], c[present], dt / nsub, nsub)).first->second;
  };

  Trajectory tr;
  tr.step = hmax;
  tr.t.push_back(t_grid.front());
  tr.states.push_back({beta});
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double ta = t_grid[i - 1], tb = t_grid[i];
    std::vector<double> cuts{ta};
    for (double ev : {schedule.entry, schedule.exit})
      if (ev > ta && ev < tb) cuts.push_back(ev);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(tb);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const int present = (scat && schedule.present_at(cuts[s])) ? 1 : 0;
      const Affine& A = propagator(present, cuts[s + 1] - cuts[s]);
      beta = A.P * beta + A.q;
      clear_absent(cuts[s + 1]);
    }
    const double bound = 1.5 * (norm0 + drive_norm * (tb - t_grid.front())) + 1e-9;
    if (!beta.allFinite() || wnorm(beta) > bound) {
      std::ostringstream os;
      os << "instability detected at t = " << tb << ": norm " << wnorm(beta) << " exceeds passive bound " << bound;
      throw Error(os.str());
    }
    tr.t.push_back(tb);
    tr.states.push_back({beta});
  }
  return tr;
}

CVec2 transmitted_amplitude(const DipoleSystem& sys, const DipoleState& state, double z) {
  const Field3 f = sys.field_at(state, Vec3(0.0, 0.0, z));
  return f.E.head<2>();
}

cplx transmission_coefficient(const DipoleSystem& sys, const DipoleState& state, double z, const CVec3& analyser) {
  const Vec3 r(0.0, 0.0, z);
  const cplx ref = analyser.dot(sys.drive().at(r).E);
  if (std::abs(ref) < 1e-300) throw Error("analyser orthogonal to the incident field");
  return analyser.dot(sys.field_at(state, r).E) / ref;
}

Eigen::Matrix3d haar_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::Quaterniond q;
  double norm = 0.0;
  do {
    q = Eigen::Quaterniond(n01(rng), n01(rng), n01(rng), n01(rng));
    norm = q.norm();
  } while (norm < 1e-12);
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace hpc
