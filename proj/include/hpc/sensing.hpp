#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpc/chiral.hpp"
#include "hpc/dipole_solver.hpp"

namespace hpc {

struct HomodyneConfig {
  double F = 1.0;       ///< signal photon flux
  double F_LO = 100.0;  ///< local oscillator flux
  double T = 2000.0;    ///< integration window
  double eta_q = 1.0;   ///< detector quantum efficiency
  double theta = 0.0;
  double theta_lo = 0.0;
  void validate() const;
};

/// <m_-> = 2 eta sqrt(F F_LO) int Im(t_c(t') e^{i(theta - theta_LO)}) dt'
/// over a window whose samples t (uniform or not) are integrated by the
/// trapezoid rule. With constant |t_c| this is 2 eta sqrt(F F_LO)|t_c| int sin(theta - theta_LO + phi).
double homodyne_expectation(const HomodyneConfig& cfg, const std::vector<double>& t, const std::vector<cplx>& t_c);

/// Constant transmission over the whole window T.
double homodyne_expectation(const HomodyneConfig& cfg, cplx t_c);

/// eta T [eta |t|^2 (F + F_LO) + (1 - eta)(|t|^2 F + F_LO)].
double homodyne_variance(const HomodyneConfig& cfg, double abs_tc_sq = 1.0);

/// Resonance-matched phase resolution
///   sqrt(F + F_LO) / (2 sqrt(eta T) sqrt(F F_LO) |<cos dphi>|),
/// where <.> is the window average of the uniformly sampled series. With
/// large_lo the F_LO >> F form 1/(2 sqrt(eta T F) |<cos dphi>|) is returned.
/// Throws "insensitive quadrature" when <cos dphi> vanishes.
double phase_uncertainty(const HomodyneConfig& cfg, const std::vector<double>& dphi, bool large_lo = false);

struct MonteCarloMoments {
  double mean = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  int trials = 0;
};

/// Balanced homodyne photocounts: N_pm ~ Poisson(eta T |t alpha +- i beta|^2 / 2)
/// with |alpha|^2 = F, |beta|^2 = F_LO; returns moments of N_+ - N_-.
MonteCarloMoments homodyne_monte_carlo(const HomodyneConfig& cfg, cplx t_c, int trials, std::uint64_t seed);

/// |e_xi^dag u_+|^2 of a scatterer rotated by R, u_+ = sqrt(ge) d_perp + sqrt(gm) z x mu.
/// Its orientation average is rotational_average_renormalization / 3.
double orientation_bracket(const ChiralScatterer& s, const Eigen::Matrix3d& R, int xi);

struct SensingOptions {
  ScattererModel model = ScattererModel::HelicityChannel;
  int n_rot = 64;  ///< orientation samples for the Oriented model
  std::uint64_t seed = 1;
  int samples_per_window = 200;
  int threads = 1;
  /// Detector plane; NaN means one wavelength beyond the last layer.
  double z_probe = std::numeric_limits<double>::quiet_NaN();
};

struct SensingRun {
  std::vector<double> t;          ///< window start times
  std::vector<double> signal;     ///< <m_-> per window
  std::vector<double> noise_std;  ///< sqrt of the window variance
  std::vector<double> phase;      ///< arg of the window-mean t_c relative to the baseline
  std::vector<int> present;       ///< scatterer inside for any part of the window
  double entry = 0.0, exit = 0.0;
  double window = 0.0;
  cplx baseline_tc = 1.0;
  std::string handedness;
};

/// Starts from the steady state without scatterer, evolves through the
/// schedule and reduces the transmitted amplitude (analysed in the drive
/// polarization) window by window. The LO phase is matched to the baseline
/// transmission. Oriented-model runs average t_c(t) over n_rot Haar rotations.
SensingRun simulate_sensing_run(const CavityStack& cavity, const ChiralScatterer& scatterer,
                                const EventSchedule& schedule, const DriveField& drive, const HomodyneConfig& cfg,
                                double delta, int n_windows, const SensingOptions& opt = {});

}  // namespace hpc
