#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hpc/lattice.hpp"
#include "hpc/scenario.hpp"

namespace hpc {

struct CommandOptions {
  std::optional<std::uint64_t> seed;  ///< overrides the scenario seed
  int threads = 1;
};

/// Geometry helpers shared by the commands.
struct ResolvedGeometry {
  CavityStack stack;
  double length = 0.0;  ///< after resonance locking
  double mirror_spacing = 0.0;
  double omega = 0.0;  ///< collective shift of one layer
  double gamma = 0.0;  ///< collective decay rate of one layer
};
ResolvedGeometry resolve_geometry(const GeometryConfig& g);

/// Transmission of one route on a detuning grid (absolute detunings).
std::vector<cplx> route_transmission(const Scenario& s, const ResolvedGeometry& geo, const std::string& route,
                                     const std::vector<double>& deltas, int threads);

/// Absolute detunings of the sweep section.
std::vector<double> sweep_detunings(const Scenario& s, const ResolvedGeometry& geo);

/// CSV (Delta_over_Gamma0, abs_t_c_sq, re_t_c, im_t_c, phase); a length_shift
/// sweep writes length_shift in the first column instead.
void cmd_transmission_sweep(const Scenario& s, std::ostream& out, const CommandOptions& opt = {});
/// rs_map: CSV (y, z, abs_G_plus_sq, abs_G_minus_sq, chirality), normalized to the input.
/// profile: CSV (z, abs_E_sq, re_E_x, im_E_x) between the layers of a bilayer.
void cmd_field_map(const Scenario& s, std::ostream& out, const CommandOptions& opt = {});
/// CSV (t, mean_m_minus, noise_std, scatterer_present, handedness); returns a one-line summary.
std::string cmd_sense(const Scenario& s, std::ostream& out, const CommandOptions& opt = {});

struct CompareSummary {
  std::vector<std::string> routes;
  std::vector<double> max_deviation;  ///< per route against routes[0]
  std::vector<double> rms_deviation;
  std::string text() const;
};
/// Per-point values of every route and |t_r - t_0| deviations.
CompareSummary cmd_compare(const Scenario& s, std::ostream& out, const CommandOptions& opt = {});

}  // namespace hpc
