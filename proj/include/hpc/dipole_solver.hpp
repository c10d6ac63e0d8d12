#pragma once

#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "hpc/chiral.hpp"
#include "hpc/core.hpp"
#include "hpc/lattice.hpp"

namespace hpc {

/// Incident laser field. Polarization is the transverse (x, y) Jones vector.
struct DriveField {
  enum class Kind { PlaneWave, Gaussian };
  Kind kind = Kind::PlaneWave;
  CVec2 polarization = CVec2(1.0, 0.0);
  Vec2 k_parallel = Vec2::Zero();
  double waist = 8.0;    ///< w0, Gaussian only
  double focus_z = 0.0;  ///< Gaussian only
  cplx amplitude = 1.0;

  static DriveField plane_wave(const CVec2& pol, cplx amplitude = 1.0);
  static DriveField gaussian(const CVec2& pol, double waist, double focus_z, cplx amplitude = 1.0);

  void validate() const;
  /// Paraxial for the Gaussian beam; transverse plane wave otherwise. Z H = k_hat x E.
  Field3 at(const Vec3& r) const;
  /// Unit 3-vector of the incident polarization (plane wave, k_parallel = 0 gives (p, 0)).
  CVec3 polarization3() const;
};

CVec2 rcp();  ///< (1, i)/sqrt 2, positive helicity for propagation along +z
CVec2 lcp();  ///< (1, -i)/sqrt 2

/// Amplitudes in the order given by the system (layers or emitters first,
/// then scatterer modes).
struct DipoleState {
  Eigen::VectorXcd beta;
};

/// d beta/dt = i (diag(detuning) - H) beta - i eta.
/// `weights` make the homogeneous part a contraction in sum_i w_i |beta_i|^2.
struct LinearModel {
  Eigen::MatrixXcd H;
  Eigen::VectorXd detuning;
  Eigen::VectorXcd eta;
  Eigen::VectorXd weights;
  Eigen::MatrixXcd system_matrix() const;  ///< diag(detuning) - H
};

class DipoleSystem {
 public:
  virtual ~DipoleSystem() = default;
  virtual int size() const = 0;
  /// Laser detuning delta; scatterer rows are zeroed when it is absent.
  virtual LinearModel model(double delta, bool scatterer_present = true) const = 0;
  virtual Field3 field_at(const DipoleState& state, const Vec3& point) const = 0;
  /// Dense LU solve. Throws with the reciprocal condition estimate when the
  /// matrix is singular or ill-conditioned, or if the relative residual exceeds 1e-10.
  virtual DipoleState steady_state(double delta, bool scatterer_present = true) const;
  virtual std::vector<DipoleState> sweep(const std::vector<double>& deltas) const;
  virtual bool has_scatterer() const { return false; }
  const DriveField& drive() const { return drive_; }
  const CavityStack& stack() const { return stack_; }

 protected:
  DipoleSystem(const CavityStack& stack, const DriveField& drive);
  CavityStack stack_;
  DriveField drive_;
};

struct PeriodicOptions {
  bool include_evanescent = false;  ///< interlayer couplings and fields from the full reciprocal sum
  int g_max = 12;
};

/// Infinite layers in mode space at q = k_parallel: one amplitude per layer
/// with M = Omega - i Gamma/2 on the diagonal and lattice-summed interlayer
/// couplings. Optional scatterer channel elements follow the layers.
class PeriodicSystem : public DipoleSystem {
 public:
  PeriodicSystem(const CavityStack& stack, const DriveField& drive, const PeriodicOptions& opt = {},
                 const std::vector<ChannelElement>& scatterer = {});
  int size() const override { return n_layers_ + static_cast<int>(elements_.size()); }
  int n_layers() const { return n_layers_; }
  LinearModel model(double delta, bool scatterer_present = true) const override;
  Field3 field_at(const DipoleState& state, const Vec3& point) const override;
  bool has_scatterer() const override { return !elements_.empty(); }
  /// Collective rates of each layer.
  cplx layer_self(int l) const { return self_[l]; }

 private:
  PeriodicOptions opt_;
  std::vector<ChannelElement> elements_;
  int n_layers_ = 0;
  Vec2 q_ = Vec2::Zero();
  std::vector<cplx> self_;
  double gamma0_ = 1.0;  ///< g = 0 channel rate, used as passivity weight
  Eigen::MatrixXcd H_;   ///< full coupling with scatterer
  Eigen::VectorXcd eta_;
};

/// Finite emitter arrays in real space. When every layer is an even-sided
/// square patch with x or y dipoles, the drive is normal and centered, the
/// problem splits into two reflection-symmetry sectors of a quarter of the
/// emitters each; otherwise the full dense matrix is used.
class FiniteSystem : public DipoleSystem {
 public:
  FiniteSystem(const CavityStack& stack, const DriveField& drive, bool use_symmetry = true);
  ~FiniteSystem() override;
  int size() const override { return n_total_; }
  LinearModel model(double delta, bool scatterer_present = true) const override;
  Field3 field_at(const DipoleState& state, const Vec3& point) const override;
  DipoleState steady_state(double delta, bool scatterer_present = true) const override;
  /// Hessenberg reduction once per sector, O(n^2) per detuning.
  std::vector<DipoleState> sweep(const std::vector<double>& deltas) const override;
  bool symmetric() const { return symmetric_; }
  /// Normal-incidence transmission from the k_parallel = 0 projection of the
  /// layer polarizations: t = p^dag [p + sum_L (-i Gamma/2) d_L <beta_L e^{-ikz}>] / amplitude,
  /// Gamma = 3/(4 pi a^2). Plane-wave drive only.
  cplx projected_transmission(const DipoleState& state) const;
  /// Flat index of emitter `i` of layer `l`.
  int index(int layer, int i) const { return offsets_[layer] + i; }

 private:
  struct Sector;
  cplx coupling(int a, int b) const;
  void build_sectors();
  DipoleState expand(const std::vector<Eigen::VectorXcd>& sector_solutions) const;

  int n_total_ = 0;
  std::vector<int> offsets_;
  std::vector<int> layer_of_;
  std::vector<Vec3> pos_;
  std::vector<CVec3> axis_;
  Eigen::VectorXcd eta_;
  bool symmetric_ = false;
  std::vector<std::unique_ptr<Sector>> sectors_;
};

/// Layers, emitters and the optional scatterer of `stack`; periodic stacks
/// get a PeriodicSystem.
std::unique_ptr<DipoleSystem> make_system(const CavityStack& stack, const DriveField& drive,
                                          const PeriodicOptions& opt = {},
                                          const std::vector<ChannelElement>& scatterer = {});

/// Free functions mirroring the member solves.
DipoleState steady_state(const DipoleSystem& sys, double delta);

/// Scatterer presence window [entry, exit).
struct EventSchedule {
  double entry = -std::numeric_limits<double>::infinity();
  double exit = std::numeric_limits<double>::infinity();
  bool present_at(double t) const { return t >= entry && t < exit; }
  void validate() const;
};

struct EvolveOptions {
  bool drive_on = true;
  /// Initial state; empty means all amplitudes zero.
  Eigen::VectorXcd initial;
  /// Upper bound on the RK4 step; 0 means 0.05 / ||diag(detuning) - H||_inf.
  double max_step = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<DipoleState> states;
  double step = 0.0;  ///< RK4 step actually used on the finest segment
};

/// Fixed-step RK4 on the linear equations, sampled on t_grid (increasing).
/// Each constant-coefficient segment is advanced by the RK4 propagator
/// raised to the number of sub-steps. The scatterer couples while
/// schedule.present_at(t) and its amplitudes are reset when absent. Throws
/// "instability detected" if the weighted norm outgrows the passive bound.
Trajectory time_evolve(const DipoleSystem& sys, double delta, const std::vector<double>& t_grid,
                       const EventSchedule& schedule = {}, const EvolveOptions& opt = {});

/// Transverse field (E_x, E_y) on the axis at height z (incident + scattered).
CVec2 transmitted_amplitude(const DipoleSystem& sys, const DipoleState& state, double z);

/// p^dag E(0,0,z) / p^dag E_in(0,0,z) for the analysing polarization p.
cplx transmission_coefficient(const DipoleSystem& sys, const DipoleState& state, double z, const CVec3& analyser);

/// Uniformly distributed rotation (normalized Gaussian quaternion).
Eigen::Matrix3d haar_rotation(std::mt19937_64& rng);

}  // namespace hpc
