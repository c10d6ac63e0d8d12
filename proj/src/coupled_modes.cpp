#include "hpc/coupled_modes.hpp"

#include <cmath>

#include "hpc/transfer_matrix.hpp"

namespace hpc {

CoupledModesModel build_model(double length, double gamma) {
  if (!(gamma > 0.0)) throw Error("collective decay rate must be positive");
  const double tau = std::tan(kTwoPi * length);
  if (std::abs(tau) < 1e-12) throw Error("omega_c = 0: model degenerate");
  CoupledModesModel m;
  m.gamma = gamma;
  m.omega_c = -0.5 * gamma * tau;
  // delta = omega_c in omega_1 = omega_c + delta and kappa = (gamma/omega_c + 4 omega_c/gamma) delta
  m.omega = Eigen::Vector3d(2.0 * m.omega_c, 0.0, 0.0);
  m.kappa = gamma + 4.0 * m.omega_c * m.omega_c / gamma;
  const double a = std::sqrt(m.kappa / (4.0 * kPi));
  const double b = std::sqrt(gamma / (2.0 * kPi));
  m.W << a, a, b, 0.0, 0.0, b;
  return m;
}

CMat2 scattering_matrix(const CoupledModesModel& model, double omega) {
  const Eigen::Matrix3cd WW = (model.W * model.W.transpose()).cast<cplx>();
  Eigen::Matrix3cd D = kI * kPi * WW;
  for (int i = 0; i < 3; ++i) D(i, i) += omega - model.omega(i);
  Eigen::PartialPivLU<Eigen::Matrix3cd> lu(D);
  if (std::abs(lu.determinant()) < 1e-300) throw Error("singular coupled-modes matrix");
  const Eigen::Matrix<cplx, 3, 2> Wc = model.W.cast<cplx>();
  return CMat2::Identity() - 2.0 * kPi * kI * Wc.transpose() * lu.solve(Wc);
}

cplx cm_transmission(const CoupledModesModel& model, double omega) { return scattering_matrix(model, omega)(0, 1); }

DeviationReport compare_to_transfer_matrix(const CoupledModesModel& model, double length, double gamma,
                                           int n_points, double half_width) {
  if (n_points < 2) throw Error("n_points must be >= 2");
  DeviationReport rep;
  const double h = half_width > 0.0 ? half_width : model.kappa;
  const double lo = model.omega_c - h;
  const double hi = model.omega_c + h;
  double sum2 = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double w = lo + (hi - lo) * i / (n_points - 1);
    const cplx tcm = -cm_transmission(model, w);
    const cplx ttm = w == 0.0 ? cplx(0.0) : cavity_transmission_tm(w, length, 0.0, gamma);
    const double dev = std::abs(tcm - ttm);
    rep.omega.push_back(w);
    rep.t_cm.push_back(tcm);
    rep.t_tm.push_back(ttm);
    rep.max_deviation = std::max(rep.max_deviation, dev);
    sum2 += dev * dev;
  }
  rep.rms_deviation = std::sqrt(sum2 / n_points);
  return rep;
}

}  // namespace hpc
