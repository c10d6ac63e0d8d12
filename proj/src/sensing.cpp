#include "hpc/sensing.hpp"

#include <cmath>
#include <random>

#include "hpc/parallel.hpp"

namespace hpc {

void HomodyneConfig::validate() const {
  if (!(F >= 0.0)) throw Error("signal flux F must be >= 0");
  if (!(F_LO >= F)) throw Error("local-oscillator flux must satisfy F_LO >= F");
  if (!(eta_q >= 0.0 && eta_q <= 1.0)) throw Error("quantum efficiency must lie in [0, 1]");
  if (!(T > 0.0)) throw Error("integration time T must be positive");
}

double homodyne_expectation(const HomodyneConfig& cfg, const std::vector<double>& t, const std::vector<cplx>& t_c) {
  cfg.validate();
  if (t.size() != t_c.size()) throw Error("time and transmission series differ in length");
  const cplx rot = std::exp(kI * (cfg.theta - cfg.theta_lo));
  double integral = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    integral += 0.5 * (t[i] - t[i - 1]) * ((t_c[i] * rot).imag() + (t_c[i - 1] * rot).imag());
  return 2.0 * cfg.eta_q * std::sqrt(cfg.F * cfg.F_LO) * integral;
}

double homodyne_expectation(const HomodyneConfig& cfg, cplx t_c) {
  cfg.validate();
  const cplx rot = std::exp(kI * (cfg.theta - cfg.theta_lo));
  return 2.0 * cfg.eta_q * std::sqrt(cfg.F * cfg.F_LO) * cfg.T * (t_c * rot).imag();
}

double homodyne_variance(const HomodyneConfig& cfg, double t2) {
  cfg.validate();
  const double e = cfg.eta_q;
  return e * cfg.T * (e * t2 * (cfg.F + cfg.F_LO) + (1.0 - e) * (t2 * cfg.F + cfg.F_LO));
}

double phase_uncertainty(const HomodyneConfig& cfg, const std::vector<double>& dphi, bool large_lo) {
  cfg.validate();
  if (dphi.empty()) throw Error("empty phase series");
  double avg = std::cos(dphi.front());
  if (dphi.size() > 1) {
    double s = 0.5 * (std::cos(dphi.front()) + std::cos(dphi.back()));
    for (std::size_t i = 1; i + 1 < dphi.size(); ++i) s += std::cos(dphi[i]);
    avg = s / static_cast<double>(dphi.size() - 1);
  }
  if (std::abs(avg) < 1e-15) throw Error("insensitive quadrature");
  if (!(cfg.eta_q > 0.0 && cfg.F > 0.0)) throw Error("phase uncertainty needs eta_q > 0 and F > 0");
  if (large_lo) return 1.0 / (2.0 * std::sqrt(cfg.eta_q * cfg.T * cfg.F) * std::abs(avg));
  return std::sqrt(cfg.F + cfg.F_LO) / (2.0 * std::sqrt(cfg.eta_q * cfg.T) * std::sqrt(cfg.F * cfg.F_LO) * std::abs(avg));
}

MonteCarloMoments homodyne_monte_carlo(const HomodyneConfig& cfg, cplx t_c, int trials, std::uint64_t seed) {
  cfg.validate();
  if (trials < 2) throw Error("Monte-Carlo needs at least 2 trials");
  const cplx alpha = std::sqrt(cfg.F) * std::exp(kI * cfg.theta);
  const cplx beta = std::sqrt(cfg.F_LO) * std::exp(kI * cfg.theta_lo);
  const double scale = cfg.eta_q * cfg.T * 0.5;
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long long> plus(scale * std::norm(t_c * alpha + kI * beta));
  std::poisson_distribution<long long> minus(scale * std::norm(t_c * alpha - kI * beta));
  // Welford accumulation of the first four central moments
  double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (int n = 1; n <= trials; ++n) {
    const double x = static_cast<double>(plus(rng) - minus(rng));
    const double nd = n;
    const double d = x - mean, dn = d / nd, dn2 = dn * dn, t1 = d * dn * (nd - 1.0);
    mean += dn;
    m4 += t1 * dn2 * (nd * nd - 3.0 * nd + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
    m3 += t1 * dn * (nd - 2.0) - 3.0 * dn * m2;
    m2 += t1;
  }
  MonteCarloMoments out;
  out.trials = trials;
  out.mean = mean;
  out.variance = m2 / (trials - 1);
  const double mu4 = m4 / trials, var = m2 / trials;
  out.variance_stderr = std::sqrt(std::max(0.0, (mu4 - var * var * (trials - 3.0) / (trials - 1.0)) / trials));
  return out;
}

double orientation_bracket(const ChiralScatterer& s, const Eigen::Matrix3d& R, int xi) {
  const auto el = scatterer_elements(s, ScattererModel::Oriented, R);
  return std::norm(circular_unit(xi).dot(el.front().w_fwd));
}

SensingRun simulate_sensing_run(const CavityStack& cavity, const ChiralScatterer& scatterer,
                                const EventSchedule& schedule, const DriveField& drive, const HomodyneConfig& cfg,
                                double delta, int n_windows, const SensingOptions& opt) {
  cfg.validate();
  schedule.validate();
  scatterer.validate();
  if (n_windows < 1) throw Error("n_windows must be >= 1");
  if (opt.samples_per_window < 2) throw Error("samples_per_window must be >= 2");
  const cplx p0 = drive.polarization(0), p1 = drive.polarization(1);
  if (std::abs(p1 - kI * p0) > 1e-12 && std::abs(p1 + kI * p0) > 1e-12)
    throw Error("sensing drive must be circularly polarized");
  const CVec3 analyser = drive.polarization3();
  double z_probe = opt.z_probe;
  if (std::isnan(z_probe)) z_probe = (cavity.empty() ? 0.0 : cavity.layers.back().z_center) + 1.0;

  const int spw = opt.samples_per_window;
  std::vector<double> grid(static_cast<std::size_t>(n_windows) * spw + 1);
  for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = cfg.T * static_cast<double>(j) / spw;

  const PeriodicSystem bare(cavity, drive);
  const DipoleState base = bare.steady_state(delta);
  const cplx tc0 = transmission_coefficient(bare, base, z_probe, analyser);

  auto run_one = [&](const std::vector<ChannelElement>& el) {
    const PeriodicSystem sys(cavity, drive, {}, el);
    EvolveOptions eo;
    eo.initial = Eigen::VectorXcd::Zero(sys.size());
    eo.initial.head(bare.size()) = base.beta;
    const Trajectory tr = time_evolve(sys, delta, grid, schedule, eo);
    std::vector<cplx> tc(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) tc[j] = transmission_coefficient(sys, tr.states[j], z_probe, analyser);
    return tc;
  };

  std::vector<cplx> tc(grid.size(), 0.0);
  if (opt.model == ScattererModel::HelicityChannel) {
    tc = run_one(scatterer_elements(scatterer, opt.model));
  } else {
    if (opt.n_rot < 1) throw Error("n_rot must be >= 1");
    std::vector<std::vector<cplx>> runs(opt.n_rot);
    parallel_for(static_cast<std::size_t>(opt.n_rot), opt.threads, [&](std::size_t i) {
      std::mt19937_64 rng(opt.seed + 0x9E3779B97F4A7C15ULL * (i + 1));
      runs[i] = run_one(scatterer_elements(scatterer, opt.model, haar_rotation(rng)));
    });
    for (const auto& r : runs)
      for (std::size_t j = 0; j < grid.size(); ++j) tc[j] += r[j] / static_cast<double>(opt.n_rot);
  }

  HomodyneConfig matched = cfg;
  matched.theta_lo = cfg.theta + std::arg(tc0);  // theta - theta_LO + phi_0 = 0
  SensingRun out;
  out.entry = schedule.entry;
  out.exit = schedule.exit;
  out.window = cfg.T;
  out.baseline_tc = tc0;
  out.handedness = scatterer.handedness;
  for (int w = 0; w < n_windows; ++w) {
    const std::size_t a = static_cast<std::size_t>(w) * spw;
    const std::vector<double> tw(grid.begin() + a, grid.begin() + a + spw + 1);
    const std::vector<cplx> cw(tc.begin() + a, tc.begin() + a + spw + 1);
    double t2 = 0.0;
    cplx mean = 0.0;
    for (std::size_t j = 1; j < tw.size(); ++j) {
      const double h = tw[j] - tw[j - 1];
      t2 += 0.5 * h * (std::norm(cw[j]) + std::norm(cw[j - 1]));
      mean += 0.5 * h * (cw[j] + cw[j - 1]);
    }
    t2 /= cfg.T;
    mean /= cfg.T;
    out.t.push_back(tw.front());
    out.signal.push_back(homodyne_expectation(matched, tw, cw));
    out.noise_std.push_back(std::sqrt(homodyne_variance(cfg, t2)));
    out.phase.push_back(std::arg(mean / tc0));
    out.present.push_back(schedule.entry < tw.back() && schedule.exit > tw.front() ? 1 : 0);
  }
  return out;
}

}  // namespace hpc
