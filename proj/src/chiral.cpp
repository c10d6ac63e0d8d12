#include "hpc/chiral.hpp"

#include <cmath>

namespace hpc {

ChiralScatterer ChiralScatterer::ideal(const std::string& handedness, double delta_s, double gamma_s,
                                       double position) {
  ChiralScatterer s;
  s.detuning = delta_s;
  s.gamma_e = 0.5 * gamma_s;
  s.gamma_m = 0.5 * gamma_s;
  s.position = position;
  s.handedness = handedness;
  s.d_hat = CVec3(1.0, 0.0, 0.0);
  if (handedness == "RHS") {
    s.mu_hat = CVec3(kI, 0.0, 0.0);
  } else if (handedness == "LHS") {
    s.mu_hat = CVec3(-kI, 0.0, 0.0);
  } else if (handedness == "achiral") {
    s.mu_hat = CVec3(1.0, 0.0, 0.0);
  } else {
    throw Error("unknown handedness '" + handedness + "' (expected RHS, LHS or achiral)");
  }
  s.validate();
  return s;
}

double ChiralScatterer::rotary_strength() const {
  return std::sqrt(gamma_e * gamma_m) * d_hat.dot(mu_hat).imag();
}

void ChiralScatterer::validate() const {
  if (!(gamma_e >= 0.0) || !(gamma_m >= 0.0) || !(gamma() > 0.0))
    throw Error("scatterer linewidths must be non-negative with positive total");
  if (std::abs(d_hat.norm() - 1.0) > 1e-12 || std::abs(mu_hat.norm() - 1.0) > 1e-12)
    throw Error("scatterer moment directions must be unit vectors");
  if (!std::isfinite(detuning) || !std::isfinite(position)) throw Error("scatterer detuning/position must be finite");
}

double rotational_average_renormalization(const ChiralScatterer& s, int xi) {
  if (xi != 1 && xi != -1) throw Error("helicity index must be +1 or -1");
  return s.gamma() + 2.0 * xi * s.rotary_strength();
}

std::vector<ChannelElement> scatterer_elements(const ChiralScatterer& s, ScattererModel model,
                                               const Eigen::Matrix3d& rotation) {
  s.validate();
  std::vector<ChannelElement> out;
  if (model == ScattererModel::HelicityChannel) {
    for (int xi : {+1, -1}) {
      const double kappa = 0.25 * rotational_average_renormalization(s, xi);
      if (kappa <= 0.0) continue;
      const double amp = std::sqrt(2.0 * kappa);
      ChannelElement f;
      f.z = s.position;
      f.detuning = s.detuning;
      f.self = -kI * 0.5 * kappa;
      f.w_fwd = f.v_fwd = amp * circular_unit(xi);
      ChannelElement b = f;
      b.w_fwd = b.v_fwd = CVec3::Zero();
      // a backward wave of helicity xi carries the opposite circular vector
      b.w_bwd = b.v_bwd = amp * circular_unit(-xi);
      out.push_back(f);
      out.push_back(b);
    }
    return out;
  }
  const CVec3 d = rotation.cast<cplx>() * s.d_hat;
  const CVec3 mu = rotation.cast<cplx>() * s.mu_hat;
  const CVec3 ez(0.0, 0.0, 1.0);
  CVec3 dperp = d;
  dperp.z() = 0.0;
  const CVec3 zxmu = cross(ez, mu);
  ChannelElement e;
  e.z = s.position;
  e.detuning = s.detuning;
  e.self = -kI * 0.5 * s.gamma();
  e.w_fwd = e.v_fwd = std::sqrt(s.gamma_e) * dperp + std::sqrt(s.gamma_m) * zxmu;
  e.w_bwd = e.v_bwd = std::sqrt(s.gamma_e) * dperp - std::sqrt(s.gamma_m) * zxmu;
  out.push_back(e);
  return out;
}

}  // namespace hpc
