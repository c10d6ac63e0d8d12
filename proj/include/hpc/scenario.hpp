#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpc/core.hpp"

namespace hpc {

inline constexpr int kSchemaVersion = 1;

/// Laser detuning: absolute value, offset from the collective shift, or the
/// cavity resonance of the configured length.
struct DetuningSpec {
  enum class Mode { Absolute, OffsetFromOmega, Resonance };
  Mode mode = Mode::Absolute;
  double value = 0.0;
  bool operator==(const DetuningSpec&) const = default;
};

struct GeometryConfig {
  std::string type = "hp_cavity";  ///< hp_cavity | bilayer | single_layer | empty
  double length = 12.505;
  int mirror_n = 1;  ///< l_m = mirror_n + 1/4
  double lattice_constant = 0.8;
  int n_side = 0;  ///< 0: infinite layers (periodic emulation)
  double curvature_radius = 0.0;  ///< 0 or absent: flat
  bool isotropic = false;         ///< single_layer: add a co-located y layer
  std::string axis = "x";         ///< bilayer / single_layer dipole axis
  /// When set, the length is moved to the nearest value whose resonance sits at this detuning.
  std::optional<double> lock_detuning;
  bool operator==(const GeometryConfig&) const = default;
};

struct DriveConfig {
  std::string kind = "plane_wave";  ///< plane_wave | gaussian
  std::string polarization = "rcp";  ///< rcp | lcp | x | y
  double waist = 8.0;
  std::optional<double> focus_z;  ///< default: cavity center
  double amplitude = 1.0;
  std::vector<double> k_parallel{0.0, 0.0};
  bool operator==(const DriveConfig&) const = default;
};

struct SweepConfig {
  std::string variable = "detuning";  ///< detuning | length_shift
  double min = -0.5;
  double max = 0.5;
  int points = 201;
  bool offset_from_omega = true;  ///< detuning grid measured from the collective shift
  /// Coupled-modes comparison window [omega_c - kappa, omega_c + kappa] instead of min/max.
  bool coupled_modes_window = false;
  bool operator==(const SweepConfig&) const = default;
};

struct FieldMapConfig {
  std::string mode = "rs_map";  ///< rs_map | profile
  DetuningSpec detuning{DetuningSpec::Mode::Resonance, 0.0};
  double x = 0.0;
  double y_min = -16.0, y_max = 16.0, z_min = -4.0, z_max = 18.0;
  double resolution = 8.0;
  bool include_evanescent = false;
  int g_max = 40;
  int profile_points = 400;
  bool operator==(const FieldMapConfig&) const = default;
};

struct SensingConfig {
  std::string handedness = "RHS";
  double delta_s = 10.0;
  double gamma_s = 1.0;
  std::optional<double> position;  ///< default: middle of the cavity
  double F = 1.0;
  double F_LO = 100.0;
  double T = 2000.0;
  double eta_q = 1.0;
  double detuning = 0.01;
  int windows = 18;
  double entry_window = 3.0;  ///< entry time in units of T
  double exit_window = 13.0;
  std::string model = "helicity_channel";  ///< helicity_channel | oriented
  int n_rot = 64;
  int samples_per_window = 200;
  bool operator==(const SensingConfig&) const = default;
};

struct CompareConfig {
  std::vector<std::string> routes{"analytic", "transfer_matrix"};
  bool operator==(const CompareConfig&) const = default;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string route = "analytic";  ///< dipole | analytic | transfer_matrix | coupled_modes
  GeometryConfig geometry;
  DriveConfig drive;
  SweepConfig sweep;
  FieldMapConfig field_map;
  SensingConfig sensing;
  CompareConfig compare;
  std::string output;
  std::uint64_t seed = 1;
  bool operator==(const Scenario&) const = default;
};

/// Parses JSON text. Syntax errors report "line L, column C"; schema errors
/// name the offending field path, e.g. "field 'drive.waist': expected number".
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
/// Canonical JSON with every field written out.
std::string serialize_scenario(const Scenario& s);

}  // namespace hpc
