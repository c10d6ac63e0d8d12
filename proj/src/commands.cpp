#include "hpc/commands.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "hpc/analytic_bilayer.hpp"
#include "hpc/coupled_modes.hpp"
#include "hpc/csv.hpp"
#include "hpc/dipole_solver.hpp"
#include "hpc/fields.hpp"
#include "hpc/greens.hpp"
#include "hpc/parallel.hpp"
#include "hpc/sensing.hpp"
#include "hpc/transfer_matrix.hpp"

namespace hpc {

namespace {

CVec3 axis_vector(const std::string& a) { return a == "y" ? CVec3(0.0, 1.0, 0.0) : CVec3(1.0, 0.0, 0.0); }

CVec2 polarization(const std::string& p) {
  if (p == "rcp") return rcp();
  if (p == "lcp") return lcp();
  if (p == "y") return CVec2(0.0, 1.0);
  return CVec2(1.0, 0.0);
}

int helicity_of(const std::string& p) {
  if (p == "rcp") return 1;
  if (p == "lcp") return -1;
  throw Error("four-layer cavity routes need drive.polarization rcp or lcp");
}

DriveField make_drive(const DriveConfig& d, const ResolvedGeometry& geo) {
  DriveField f;
  f.kind = d.kind == "gaussian" ? DriveField::Kind::Gaussian : DriveField::Kind::PlaneWave;
  f.polarization = polarization(d.polarization);
  f.waist = d.waist;
  f.amplitude = d.amplitude;
  f.k_parallel = Vec2(d.k_parallel[0], d.k_parallel[1]);
  if (d.focus_z) {
    f.focus_z = *d.focus_z;
  } else if (!geo.stack.empty()) {
    f.focus_z = 0.5 * (geo.stack.layers.front().z_center + geo.stack.layers.back().z_center);
  }
  f.validate();
  return f;
}

double resolve_detuning(const DetuningSpec& d, const ResolvedGeometry& geo, const std::string& type) {
  switch (d.mode) {
    case DetuningSpec::Mode::Absolute:
      return d.value;
    case DetuningSpec::Mode::OffsetFromOmega:
      return geo.omega + d.value;
    default:
      if (type == "bilayer" || type == "hp_cavity") return resonance_detuning(geo.length, geo.omega, geo.gamma);
      return geo.omega;
  }
}

}  // namespace

ResolvedGeometry resolve_geometry(const GeometryConfig& g) {
  ResolvedGeometry r;
  const LatticeSpec lat = LatticeSpec::square(g.lattice_constant);
  const CollectiveRates rates = metasurface_rates(Vec2::Zero(), lat, axis_vector(g.axis));
  r.omega = rates.omega;
  r.gamma = rates.gamma;
  r.length = g.length;
  if (g.lock_detuning) r.length = resonance_locked_length(*g.lock_detuning, g.length, r.omega, r.gamma);
  const double rc = g.curvature_radius > 0.0 ? g.curvature_radius : kFlat;
  if (g.type == "hp_cavity") {
    r.stack = build_hp_cavity(r.length, g.mirror_n, g.lattice_constant, g.n_side, rc);
    r.mirror_spacing = r.stack.mirror_spacing;
  } else if (g.type == "bilayer") {
    r.stack = build_bilayer(r.length, g.lattice_constant, g.n_side, rc, axis_vector(g.axis));
  } else if (g.type == "single_layer") {
    r.stack = build_single_layer(g.lattice_constant, g.n_side, g.isotropic, axis_vector(g.axis));
  } else {
    r.stack.lattice = lat;
  }
  return r;
}

std::vector<double> sweep_detunings(const Scenario& s, const ResolvedGeometry& geo) {
  const auto& w = s.sweep;
  double lo = w.min, hi = w.max;
  if (w.coupled_modes_window) {
    const CoupledModesModel m = build_model(geo.length, geo.gamma);
    lo = m.omega_c - m.kappa;
    hi = m.omega_c + m.kappa;
  }
  std::vector<double> d(w.points);
  for (int i = 0; i < w.points; ++i) {
    const double x = w.points == 1 ? lo : lo + (hi - lo) * i / (w.points - 1);
    d[i] = (w.offset_from_omega || w.coupled_modes_window) ? geo.omega + x : x;
  }
  return d;
}

std::vector<cplx> route_transmission(const Scenario& s, const ResolvedGeometry& geo, const std::string& route,
                                     const std::vector<double>& deltas, int threads) {
  const std::string& type = s.geometry.type;
  std::vector<cplx> t(deltas.size());
  if (route == "dipole") {
    const DriveField drive = make_drive(s.drive, geo);
    if (type == "empty" || geo.stack.periodic()) {
      const PeriodicSystem sys(geo.stack, drive);
      const double z = (geo.stack.empty() ? 0.0 : geo.stack.layers.back().z_center) + 1.0;
      const CVec3 analyser = drive.polarization3();
      parallel_for(deltas.size(), threads, [&](std::size_t i) {
        t[i] = transmission_coefficient(sys, sys.steady_state(deltas[i]), z, analyser);
      });
    } else {
      const FiniteSystem sys(geo.stack, drive);
      const auto states = sys.sweep(deltas);
      for (std::size_t i = 0; i < deltas.size(); ++i) t[i] = sys.projected_transmission(states[i]);
    }
    return t;
  }
  std::function<cplx(double)> f;
  if (type == "empty") {
    f = [](double) { return cplx(1.0); };
  } else if (type == "single_layer") {
    if (route == "analytic") {
      f = [&](double d) { return (d - geo.omega) / (d - geo.omega + 0.5 * kI * geo.gamma); };
    } else if (route == "transfer_matrix") {
      f = [&](double d) { return transmission(metasurface_block(d, geo.omega, geo.gamma)); };
    } else {
      throw Error("route '" + route + "' needs a two-mirror geometry");
    }
  } else if (route == "analytic") {
    f = [&](double d) { return cavity_transmission(d, geo.length, geo.omega, geo.gamma); };
  } else if (route == "transfer_matrix") {
    if (type == "hp_cavity") {
      const int h = helicity_of(s.drive.polarization);
      f = [&, h](double d) {
        return hp_cavity_transmission_tm(d, geo.length, geo.mirror_spacing, geo.omega, geo.gamma, h);
      };
    } else {
      f = [&](double d) { return cavity_transmission_tm(d, geo.length, geo.omega, geo.gamma); };
    }
  } else if (route == "coupled_modes") {
    const CoupledModesModel m = build_model(geo.length, geo.gamma);
    f = [&geo, m](double d) { return -cm_transmission(m, d - geo.omega); };
  } else {
    throw Error("unknown route '" + route + "'");
  }
  if (type == "bilayer" || type == "single_layer") {
    // the layers only act on the dipole-axis component; project onto the drive polarization
    const CVec2 q = polarization(s.drive.polarization);
    const CVec3 p(q(0), q(1), 0.0);
    const double along = std::norm(axis_vector(s.geometry.axis).dot(p));
    f = [f, along](double d) { return along * f(d) + (1.0 - along); };
  }
  parallel_for(deltas.size(), threads, [&](std::size_t i) { t[i] = f(deltas[i]); });
  return t;
}

void cmd_transmission_sweep(const Scenario& s, std::ostream& out, const CommandOptions& opt) {
  const ResolvedGeometry geo = resolve_geometry(s.geometry);
  if (s.sweep.variable == "length_shift") {
    if (s.route != "analytic" && s.route != "transfer_matrix")
      throw Error("length_shift sweeps use the analytic or transfer_matrix route");
    const double delta = resonance_detuning(geo.length, geo.omega, geo.gamma);
    CsvWriter csv(out, {"length_shift", "abs_t_c_sq", "re_t_c", "im_t_c", "phase"});
    for (int i = 0; i < s.sweep.points; ++i) {
      const double dl = s.sweep.points == 1 ? s.sweep.min
                                            : s.sweep.min + (s.sweep.max - s.sweep.min) * i / (s.sweep.points - 1);
      const PhaseShift ps = chiral_phase_shift(geo.length, dl, geo.omega, geo.gamma);
      const double mag = std::abs(cavity_transmission(delta, geo.length + dl, geo.omega, geo.gamma));
      const cplx t = std::polar(mag, ps.phase);
      csv.row({dl, mag * mag, t.real(), t.imag(), ps.phase});
    }
    return;
  }
  const auto deltas = sweep_detunings(s, geo);
  const auto t = route_transmission(s, geo, s.route, deltas, opt.threads);
  CsvWriter csv(out, {"Delta_over_Gamma0", "abs_t_c_sq", "re_t_c", "im_t_c", "phase"});
  for (std::size_t i = 0; i < deltas.size(); ++i) csv.row({deltas[i], std::norm(t[i]), t[i].real(), t[i].imag(), std::arg(t[i])});
}

void cmd_field_map(const Scenario& s, std::ostream& out, const CommandOptions& opt) {
  const ResolvedGeometry geo = resolve_geometry(s.geometry);
  const auto& fm = s.field_map;
  const double delta = resolve_detuning(fm.detuning, geo, s.geometry.type);
  if (fm.mode == "profile") {
    if (s.geometry.type != "bilayer" || s.geometry.n_side != 0)
      throw Error("profile mode needs an infinite bilayer geometry");
    ProfileOptions po;
    po.include_evanescent = fm.include_evanescent;
    po.g_max = fm.g_max;
    std::vector<double> z(fm.profile_points);
    for (int i = 0; i < fm.profile_points; ++i) z[i] = geo.length * (i + 0.5) / fm.profile_points;
    const auto f = intracavity_profile(delta, geo.length, geo.stack.lattice, z, po);
    CsvWriter csv(out, {"z", "abs_E_sq", "re_E_x", "im_E_x"});
    for (std::size_t i = 0; i < z.size(); ++i) csv.row({z[i], f[i].E.squaredNorm(), f[i].E.x().real(), f[i].E.x().imag()});
    return;
  }
  const DriveField drive = make_drive(s.drive, geo);
  PeriodicOptions po;
  po.include_evanescent = fm.include_evanescent;
  po.g_max = fm.g_max;
  const auto sys = make_system(geo.stack, drive, po);
  const DipoleState st = sys->steady_state(delta);
  MapPlane plane;
  plane.x = fm.x;
  plane.y_min = fm.y_min;
  plane.y_max = fm.y_max;
  plane.z_min = fm.z_min;
  plane.z_max = fm.z_max;
  plane.resolution = fm.resolution;
  const RSFieldMap m = rs_map(*sys, st, plane, opt.threads);
  CsvWriter csv(out, {"y", "z", "abs_G_plus_sq", "abs_G_minus_sq", "chirality"});
  for (std::size_t iz = 0; iz < m.nz(); ++iz)
    for (std::size_t iy = 0; iy < m.ny(); ++iy) {
      const std::size_t i = iz * m.ny() + iy;
      csv.row({m.y[iy], m.z[iz], m.plus_sq(i), m.minus_sq(i), m.chirality(i)});
    }
}

std::string cmd_sense(const Scenario& s, std::ostream& out, const CommandOptions& opt) {
  GeometryConfig g = s.geometry;
  if (g.n_side != 0) throw Error("sensing runs use the periodic emulation (geometry.n_side = 0)");
  const auto& q = s.sensing;
  if (!g.lock_detuning) g.lock_detuning = q.detuning;
  const ResolvedGeometry geo = resolve_geometry(g);
  const DriveField drive = make_drive(s.drive, geo);
  double pos = 0.5 * (geo.mirror_spacing + geo.length);
  if (q.position) pos = *q.position;
  const ChiralScatterer sc = ChiralScatterer::ideal(q.handedness, q.delta_s, q.gamma_s, pos);
  HomodyneConfig cfg;
  cfg.F = q.F;
  cfg.F_LO = q.F_LO;
  cfg.T = q.T;
  cfg.eta_q = q.eta_q;
  EventSchedule sched;
  sched.entry = q.entry_window * q.T;
  sched.exit = q.exit_window * q.T;
  SensingOptions so;
  so.model = q.model == "oriented" ? ScattererModel::Oriented : ScattererModel::HelicityChannel;
  so.n_rot = q.n_rot;
  so.seed = opt.seed.value_or(s.seed);
  so.samples_per_window = q.samples_per_window;
  so.threads = opt.threads;
  const SensingRun run = simulate_sensing_run(geo.stack, sc, sched, drive, cfg, q.detuning, q.windows, so);
  CsvWriter csv(out, {"t", "mean_m_minus", "noise_std", "scatterer_present", "handedness"});
  for (std::size_t i = 0; i < run.t.size(); ++i)
    csv.row({run.t[i], run.signal[i], run.noise_std[i], static_cast<long long>(run.present[i]), run.handedness});
  std::ostringstream os;
  os << "length " << format_double(geo.length) << ", windows " << run.t.size();
  for (std::size_t i = run.t.size(); i-- > 0;)
    if (run.present[i]) {
      os << ", phase in the last window with the scatterer present " << format_double(run.phase[i]);
      break;
    }
  return os.str();
}

std::string CompareSummary::text() const {
  std::ostringstream os;
  for (std::size_t i = 1; i < routes.size(); ++i)
    os << routes[i] << " vs " << routes[0] << ": max_deviation " << format_double(max_deviation[i])
       << ", rms_deviation " << format_double(rms_deviation[i]) << "\n";
  return os.str();
}

CompareSummary cmd_compare(const Scenario& s, std::ostream& out, const CommandOptions& opt) {
  if (s.compare.routes.size() < 2) throw Error("compare needs at least two routes");
  const ResolvedGeometry geo = resolve_geometry(s.geometry);
  const auto deltas = sweep_detunings(s, geo);
  std::vector<std::vector<cplx>> t;
  for (const auto& r : s.compare.routes) t.push_back(route_transmission(s, geo, r, deltas, opt.threads));
  std::vector<std::string> header{"Delta_over_Gamma0"};
  for (const auto& r : s.compare.routes) {
    header.push_back("abs_t_c_sq_" + r);
    header.push_back("re_t_c_" + r);
    header.push_back("im_t_c_" + r);
  }
  for (std::size_t k = 1; k < s.compare.routes.size(); ++k) header.push_back("deviation_" + s.compare.routes[k]);
  CompareSummary sum;
  sum.routes = s.compare.routes;
  sum.max_deviation.assign(t.size(), 0.0);
  sum.rms_deviation.assign(t.size(), 0.0);
  CsvWriter csv(out, header);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::vector<CsvWriter::Cell> row{deltas[i]};
    for (const auto& tr : t) {
      row.push_back(std::norm(tr[i]));
      row.push_back(tr[i].real());
      row.push_back(tr[i].imag());
    }
    for (std::size_t k = 1; k < t.size(); ++k) {
      const double dev = std::abs(t[k][i] - t[0][i]);
      row.push_back(dev);
      sum.max_deviation[k] = std::max(sum.max_deviation[k], dev);
      sum.rms_deviation[k] += dev * dev;
    }
    csv.row(row);
  }
  for (auto& r : sum.rms_deviation) r = std::sqrt(r / static_cast<double>(deltas.size()));
  return sum;
}

}  // namespace hpc
