#pragma once

#include <vector>

#include "hpc/core.hpp"

namespace hpc {

enum class Basis { Linear, Circular };

/// 2x2 or 4x4 transfer matrix acting on (E_left-going, E_right-going) pairs.
/// The 4x4 ordering is (E<-_x, E->_x, E<-_y, E->_y) in the linear basis and
/// (+ helicity pair, - helicity pair) in the circular basis.
struct TransferBlock {
  Eigen::MatrixXcd m;
  Basis basis = Basis::Linear;
  /// Set for the perfect-mirror limit: m then holds the finite direction of a
  /// matrix whose scale diverged, so t = 0 and r is the ratio of entries.
  bool singular_limit = false;
  /// False for 4x4 mirror blocks whose spacing is not a quarter wave plus whole wavelengths.
  bool helicity_preserving = true;

  int dim() const { return static_cast<int>(m.rows()); }
  static TransferBlock identity(int dim, Basis basis = Basis::Linear);
};

/// T_m = [[1 + i z, i z], [-i z, 1 - i z]] with z = gamma / (2 (omega - delta)).
/// At delta = omega returns the flagged limit block.
TransferBlock metasurface_block(double delta, double omega, double gamma);

/// diag(e^{ikl}, e^{-ikl}) (dim 2) or the same on both polarizations (dim 4).
TransferBlock free_propagation_block(double length, int dim = 2, Basis basis = Basis::Linear);

/// Ordered product; throws "basis mismatch" or "dimension mismatch".
TransferBlock compose(const std::vector<TransferBlock>& blocks);

/// 1/T22 (2x2), or 1/T22 of the pair belonging to `pair` (0 or 1) for 4x4.
cplx transmission(const TransferBlock& block, int pair = 0);
/// -T21/T22 (2x2) or per pair for 4x4.
cplx reflection(const TransferBlock& block, int pair = 0);

/// Composite mirror: x-dipole layer, free propagation l_m, y-dipole layer.
TransferBlock hp_mirror_block(double delta, double omega, double gamma, double mirror_spacing);

/// U = (1/sqrt 2)[[1,0,1,0],[0,1,0,1],[-i,0,i,0],[0,i,0,-i]].
CMat4 circular_basis_matrix();

/// Linear -> circular: U^dag T U. Circular -> linear: U T U^dag.
/// Throws "non-unitary basis matrix" unless U U^dag = 1 within 1e-12.
TransferBlock change_basis(const TransferBlock& block, const CMat4& U);

/// Max |entry| of the two off-diagonal 2x2 blocks of a 4x4 matrix.
double off_diagonal_block_norm(const TransferBlock& block);

struct ScattererBlock {
  cplx zeta;
  double length_shift;         ///< -atan(gamma/(2 delta))/k, NaN when not requested
  TransferBlock exact;         ///< [[1 + i z, i z], [-i z, 1 - i z]]
  TransferBlock length_block;  ///< free propagation over length_shift
};

/// zeta_s = -(gamma/2)/(i gamma/2 + delta_s). With dispersive_limit the
/// length-shift form is filled in; delta_s = 0 then throws
/// "resonant scatterer has no length-shift interpretation".
ScattererBlock scatterer_block(double delta_s, double gamma_s, bool dispersive_limit = true);

/// t_c of T_m T_f T_m referenced to free propagation (the e^{ikl} of T_f removed).
cplx cavity_transmission_tm(double delta, double length, double omega, double gamma);

struct PhaseShift {
  double phase = 0.0;
  bool limit_used = false;  ///< l sits exactly on a half wavelength
  bool undefined = false;   ///< length shift exactly zero; phase is the one-sided limit
  int side = 0;             ///< sign of the one-sided limit
};

/// arg[t_c(l + dl) / t_c(l)] with the laser on the resonance of length l.
/// Evaluated in a cancellation-free form; at l = n/2 the resonance-locked limit
/// sgn(dl) pi/2 - k dl is returned.
PhaseShift chiral_phase_shift(double length, double length_shift, double omega, double gamma);

}  // namespace hpc

namespace hpc {

/// Helicity-resolved transmission of the four-layer cavity (x at 0, y at l_m,
/// x at l, y at l + l_m) from the full 4x4 product in the circular basis,
/// referenced to free propagation over l + l_m. helicity = +1 or -1.
/// Throws "mirror mixes helicities" unless the off-diagonal blocks vanish.
cplx hp_cavity_transmission_tm(double delta, double length, double mirror_spacing, double omega, double gamma,
                               int helicity);

}  // namespace hpc
