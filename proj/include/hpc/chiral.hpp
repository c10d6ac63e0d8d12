#pragma once

#include <string>
#include <vector>

#include "hpc/core.hpp"

namespace hpc {

/// Point scatterer with electric and magnetic transition moments of one
/// transition. The phase of mu_hat is fixed so that Im(d* . mu) > 0 couples to
/// the positive-helicity field.
struct ChiralScatterer {
  double detuning = 10.0;  ///< Delta_s = omega_l - omega_s
  double gamma_e = 0.5;
  double gamma_m = 0.5;
  CVec3 d_hat = CVec3(1.0, 0.0, 0.0);
  CVec3 mu_hat = CVec3(cplx(0.0, 1.0), 0.0, 0.0);
  double position = 0.0;  ///< z inside the cavity
  std::string handedness = "RHS";

  /// "RHS": mu = i d, "LHS": mu = -i d, "achiral": mu = d; gamma_e = gamma_m = gamma_s/2.
  static ChiralScatterer ideal(const std::string& handedness, double delta_s, double gamma_s, double position);

  double gamma() const { return gamma_e + gamma_m; }
  /// sqrt(gamma_e gamma_m) Im(d* . mu)
  double rotary_strength() const;
  void validate() const;
};

/// Closed-form rotational average of the helicity-xi coupling bracket,
///   gamma_s + 2 xi sqrt(gamma_m gamma_e) Im(d* . mu).
/// Ideal matched handedness gives 2 gamma_s, the opposite one 0.
double rotational_average_renormalization(const ChiralScatterer& s, int xi);

/// Amplitude that couples only to the normal-incidence plane-wave channel.
/// A wave travelling in direction s (+1 toward +z) with field E drives it as
/// w_s^dag E; its amplitude b radiates -(i/2) v_s b e^{ik|z - z0|} into that direction.
struct ChannelElement {
  double z = 0.0;
  CVec3 w_fwd = CVec3::Zero(), w_bwd = CVec3::Zero();
  CVec3 v_fwd = CVec3::Zero(), v_bwd = CVec3::Zero();
  double detuning = 0.0;
  cplx self = 0.0;  ///< diagonal entry of the coupling matrix, -i (linewidth)/2
};

enum class ScattererModel {
  /// Orientation-averaged response: per helicity xi, one forward and one
  /// backward mode of rate kappa_xi = rotational_average_renormalization/4,
  /// each radiating only into its own channel (no reflection, no loss).
  HelicityChannel,
  /// Single amplitude of a fixed orientation with u_s = sqrt(ge) d_perp + s sqrt(gm) z x mu.
  Oriented,
};

/// Channel elements of the scatterer; `rotation` is applied to (d_hat, mu_hat)
/// in the Oriented model.
std::vector<ChannelElement> scatterer_elements(const ChiralScatterer& s, ScattererModel model,
                                               const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity());

}  // namespace hpc
