#pragma once

#include "nslab/vorticity_field.hpp"

namespace nslab {

// Nonlinearity conventions
// ------------------------
// The Fourier-space drift of the vorticity equation is implemented exactly as
//
//   drift_k(w) = -(1/4pi) sum_{j+l=k} <j_perp, l> (1/|l|^2 - 1/|j|^2) w_j w_l
//
// over retained j, l, k (Galerkin projection). In physical space this equals
// +(u . grad) w with u = K w in our coefficient normalization; the sign is
// pinned to the Fourier formula above and every conservation identity used in
// tests (energy/enstrophy neutrality, antisymmetry of the advection pairing)
// is independent of that sign choice. See tests/test_spectral.cpp for the
// physical-space finite-difference verification of the 1/(4pi) constant.

/// Biot-Savart: (Kw)_k = -i w_k k_perp / |k|^2. Divergence-free, curl
/// recovers w, and ||Kw||_alpha = ||w||_{alpha-1} mode by mode.
VelocityField biot_savart(const VorticityField& w);

/// Raw advection in coefficient space: ((Ka) . grad b)_k =
/// (1/2pi) sum_{j+l=k} <j_perp,l> (1/|j|^2) a_j b_l, exact double sum.
VorticityField advect_direct(const VorticityField& a, const VorticityField& b);

/// Exact double-sum evaluation of the quadratic drift (the slow oracle).
VorticityField nonlinearity_direct(const VorticityField& w);

/// Symmetrized nonlinearity Btilde(w,v) = B(Kw,v) + B(Kv,w); bilinear,
/// symmetric, with Btilde(w,w) = 2 * nonlinearity(w). Exact double sum.
VorticityField symmetrized_direct(const VorticityField& w, const VorticityField& v);

/// Adjoint of the linear map xi -> symmetrized_direct(w, xi) with respect to
/// the L2 pairing, as an exact double sum.
VorticityField symmetrized_adjoint_direct(const VorticityField& w, const VorticityField& eta);

/// Sobolev norm ||w||_alpha = sqrt( sum_k |k|^{2 alpha} |w_k|^2 ) over the
/// full lattice; alpha = 0 is the L2 norm, alpha = 1 is ||grad w||.
double sobolev_norm(const VorticityField& w, double alpha);

/// Norm of a velocity-like pair in the same scale of spaces.
double sobolev_norm(const VelocityField& u, double alpha);

/// Kinetic energy ||Kw||^2 = sum |w_k|^2 / |k|^2 (exact, per mode).
double kinetic_energy(const VorticityField& w);

/// Enstrophy ||w||^2.
double enstrophy(const VorticityField& w);

}  // namespace nslab
