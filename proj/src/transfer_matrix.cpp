#include "hpc/transfer_matrix.hpp"

#include <cmath>
#include <limits>

#include "hpc/analytic_bilayer.hpp"

namespace hpc {

TransferBlock TransferBlock::identity(int dim, Basis basis) {
  TransferBlock b;
  b.m = Eigen::MatrixXcd::Identity(dim, dim);
  b.basis = basis;
  return b;
}

namespace {

CMat2 polarizability_matrix(cplx zeta) {
  CMat2 t;
  t << 1.0 + kI * zeta, kI * zeta, -kI * zeta, 1.0 - kI * zeta;
  return t;
}

// direction of the divergent part of T_m as zeta -> infinity
CMat2 limit_direction() {
  CMat2 n;
  n << kI, kI, -kI, -kI;
  return n;
}

CMat2 propagation2(double length) {
  const cplx e = std::exp(kI * kTwoPi * length);
  CMat2 t = CMat2::Zero();
  t(0, 0) = e;
  t(1, 1) = 1.0 / e;
  return t;
}

}  // namespace

TransferBlock metasurface_block(double delta, double omega, double gamma) {
  TransferBlock b;
  if (delta == omega) {
    b.m = limit_direction();
    b.singular_limit = true;
    return b;
  }
  b.m = polarizability_matrix(gamma / (2.0 * (omega - delta)));
  return b;
}

TransferBlock free_propagation_block(double length, int dim, Basis basis) {
  if (dim != 2 && dim != 4) throw Error("dimension mismatch");
  TransferBlock b;
  b.basis = basis;
  b.m = Eigen::MatrixXcd::Zero(dim, dim);
  const CMat2 p = propagation2(length);
  b.m.topLeftCorner(2, 2) = p;
  if (dim == 4) b.m.bottomRightCorner(2, 2) = p;  // diagonal, identical in either basis
  return b;
}

TransferBlock compose(const std::vector<TransferBlock>& blocks) {
  if (blocks.empty()) throw Error("compose needs at least one block");
  TransferBlock out = blocks.front();
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.dim() != out.dim()) throw Error("dimension mismatch");
    if (b.basis != out.basis) throw Error("basis mismatch");
    out.m = out.m * b.m;
    out.singular_limit = out.singular_limit || b.singular_limit;
    out.helicity_preserving = out.helicity_preserving && b.helicity_preserving;
  }
  return out;
}

namespace {
int t22_index(const TransferBlock& block, int pair) {
  if (block.dim() == 2) {
    if (pair != 0) throw Error("2x2 block has a single pair");
    return 1;
  }
  if (pair != 0 && pair != 1) throw Error("pair index must be 0 or 1");
  return 2 * pair + 1;
}
}  // namespace

cplx transmission(const TransferBlock& block, int pair) {
  const int i = t22_index(block, pair);
  const cplx t22 = block.m(i, i);
  if (block.singular_limit) {
    if (std::abs(t22) < 1e-14 * block.m.norm()) throw Error("degenerate 0/0 point");
    return 0.0;
  }
  return 1.0 / t22;
}

cplx reflection(const TransferBlock& block, int pair) {
  const int i = t22_index(block, pair);
  return -block.m(i, i - 1) / block.m(i, i);
}

TransferBlock hp_mirror_block(double delta, double omega, double gamma, double mirror_spacing) {
  const TransferBlock tm = metasurface_block(delta, omega, gamma);
  const CMat2 tf = propagation2(mirror_spacing);
  TransferBlock b;
  b.m = Eigen::MatrixXcd::Zero(4, 4);
  if (tm.singular_limit) {
    // (1 + z N+)(P)(1 + z N-) = P + z (N+ P + P N-): the z^2 term vanishes
    b.m.topLeftCorner(2, 2) = tm.m * tf;
    b.m.bottomRightCorner(2, 2) = tf * tm.m;
    b.singular_limit = true;
  } else {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(4, 4), P = Eigen::MatrixXcd::Zero(4, 4),
                     B = Eigen::MatrixXcd::Identity(4, 4);
    A.topLeftCorner(2, 2) = tm.m;
    P.topLeftCorner(2, 2) = tf;
    P.bottomRightCorner(2, 2) = tf;
    B.bottomRightCorner(2, 2) = tm.m;
    b.m = A * P * B;
  }
  const double frac = mirror_spacing - std::floor(mirror_spacing);
  b.helicity_preserving = std::abs(frac - 0.25) < 1e-12;
  return b;
}

CMat4 circular_basis_matrix() {
  const double s = 1.0 / std::sqrt(2.0);
  CMat4 U;
  U << 1.0, 0.0, 1.0, 0.0,
       0.0, 1.0, 0.0, 1.0,
       -kI, 0.0, kI, 0.0,
       0.0, kI, 0.0, -kI;
  return s * U;
}

TransferBlock change_basis(const TransferBlock& block, const CMat4& U) {
  if (block.dim() != 4) throw Error("dimension mismatch");
  if ((U * U.adjoint() - CMat4::Identity()).cwiseAbs().maxCoeff() > 1e-12) throw Error("non-unitary basis matrix");
  TransferBlock out = block;
  if (block.basis == Basis::Linear) {
    out.m = U.adjoint() * block.m * U;
    out.basis = Basis::Circular;
  } else {
    out.m = U * block.m * U.adjoint();
    out.basis = Basis::Linear;
  }
  return out;
}

double off_diagonal_block_norm(const TransferBlock& block) {
  if (block.dim() != 4) throw Error("dimension mismatch");
  return std::max(block.m.topRightCorner(2, 2).cwiseAbs().maxCoeff(),
                  block.m.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff());
}

ScattererBlock scatterer_block(double delta_s, double gamma_s, bool dispersive_limit) {
  ScattererBlock s;
  s.zeta = -(0.5 * gamma_s) / (kI * 0.5 * gamma_s + delta_s);
  s.exact.m = polarizability_matrix(s.zeta);
  s.length_shift = std::numeric_limits<double>::quiet_NaN();
  s.length_block = TransferBlock::identity(2);
  if (dispersive_limit) {
    if (delta_s == 0.0) throw Error("resonant scatterer has no length-shift interpretation");
    s.length_shift = -std::atan(gamma_s / (2.0 * delta_s)) / kTwoPi;
    s.length_block = free_propagation_block(s.length_shift);
  }
  return s;
}

cplx cavity_transmission_tm(double delta, double length, double omega, double gamma) {
  const TransferBlock tm = metasurface_block(delta, omega, gamma);
  const TransferBlock t = compose({tm, free_propagation_block(length), tm});
  return transmission(t) * std::exp(-kI * kTwoPi * length);
}

PhaseShift chiral_phase_shift(double length, double length_shift, double omega, double gamma) {
  (void)resonance_detuning(length, omega, gamma);  // throws at infinite detuning
  PhaseShift out;
  const double eps = kTwoPi * length_shift;
  if (length_shift == 0.0) {
    out.undefined = true;
    out.side = std::signbit(length_shift) ? -1 : 1;
    out.phase = out.side * 0.5 * kPi;
    return out;
  }
  const double th = kTwoPi * length;
  const double tau = std::tan(th);
  const cplx e2th = std::exp(2.0 * kI * th);
  // e^{2i eps} - 1 without cancellation
  const cplx step = 2.0 * kI * std::exp(kI * eps) * std::sin(eps);
  if (std::abs(tau) < 1e-12) {
    out.limit_used = true;
    out.phase = std::arg(-1.0 / step);
    out.side = eps > 0.0 ? 1 : -1;
    return out;
  }
  const cplx one_it = 1.0 + kI * tau;
  const cplx D = -tau * tau * one_it * one_it / (1.0 + tau * tau) + e2th * step;
  out.phase = std::arg(-tau * tau * e2th / D);
  out.side = eps > 0.0 ? 1 : -1;
  return out;
}

}  // namespace hpc

namespace hpc {

cplx hp_cavity_transmission_tm(double delta, double length, double mirror_spacing, double omega, double gamma,
                               int helicity) {
  if (helicity != 1 && helicity != -1) throw Error("helicity must be +1 or -1");
  if (!(length > mirror_spacing)) throw Error("mirrors overlap");
  if (delta == omega) {
    // every layer is a perfect mirror for its polarization
    if (std::abs(std::sin(kTwoPi * length)) < 1e-12) throw Error("degenerate 0/0 point");
    return 0.0;
  }
  const TransferBlock tm = metasurface_block(delta, omega, gamma);
  TransferBlock x = TransferBlock::identity(4), y = TransferBlock::identity(4);
  x.m.topLeftCorner(2, 2) = tm.m;
  y.m.bottomRightCorner(2, 2) = tm.m;
  const TransferBlock pm = free_propagation_block(mirror_spacing, 4);
  const TransferBlock pc = free_propagation_block(length - mirror_spacing, 4);
  const TransferBlock circ = change_basis(compose({x, pm, y, pc, x, pm, y}), circular_basis_matrix());
  if (off_diagonal_block_norm(circ) > 1e-9 * circ.m.cwiseAbs().maxCoeff()) throw Error("mirror mixes helicities");
  return transmission(circ, helicity > 0 ? 0 : 1) * std::exp(-kI * kTwoPi * (length + mirror_spacing));
}

}  // namespace hpc
