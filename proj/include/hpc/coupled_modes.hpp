#pragma once

#include <vector>

#include "hpc/core.hpp"

namespace hpc {

/// Three oscillators (cavity mode, two surface modes) coupled to two ports.
/// Frequencies are measured from the collective metasurface resonance.
struct CoupledModesModel {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  double kappa = 0.0;
  double omega_c = 0.0;
  double gamma = 0.0;
  Eigen::Matrix<double, 3, 2> W = Eigen::Matrix<double, 3, 2>::Zero();
};

/// omega_c = -(gamma/2) tan(kl), omega_1 = 2 omega_c, kappa = gamma + 4 omega_c^2/gamma,
/// W = [[sqrt(kappa/4pi), sqrt(kappa/4pi)], [sqrt(gamma/2pi), 0], [0, sqrt(gamma/2pi)]].
/// Throws "omega_c = 0: model degenerate" at l = n/2.
CoupledModesModel build_model(double length, double gamma);

/// S = 1 - 2 pi i W^T D^{-1} W,  D = diag(w - w_l) + i pi W W^T.
CMat2 scattering_matrix(const CoupledModesModel& model, double omega);

/// S_12.
cplx cm_transmission(const CoupledModesModel& model, double omega);

struct DeviationReport {
  std::vector<double> omega;
  std::vector<cplx> t_cm;  ///< in the transfer-matrix phase convention (-S_12)
  std::vector<cplx> t_tm;
  double max_deviation = 0.0;
  double rms_deviation = 0.0;
};

/// Compares -S_12 with the transfer-matrix t_c (omega measured from the
/// metasurface resonance) on n_points over [omega_c - h, omega_c + h] with
/// h = kappa unless half_width > 0.
/// The port convention of S puts a pi phase between S_12 and t_c; the two
/// agree exactly at omega_c.
DeviationReport compare_to_transfer_matrix(const CoupledModesModel& model, double length, double gamma,
                                           int n_points, double half_width = 0.0);

}  // namespace hpc
