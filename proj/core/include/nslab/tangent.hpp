#pragma once

#include <span>

#include "nslab/integrator.hpp"

namespace nslab {

/// Linearized flow along a stored trajectory. Every operator here is the
/// exact derivative (or exact adjoint) of the discrete ExpEulerMaruyama step
/// map, so cocycle, duality and telescoping identities hold to roundoff;
/// time-discretization error lives in the trajectory only.
///
/// Steps are indexed on the trajectory grid; step_index(t) converts times.
/// Not thread safe (owns one FFT workspace); one instance per thread.
class LinearizedFlow {
public:
    LinearizedFlow(const Integrator& integrator, const TrajectoryRecord& traj);

    const TrajectoryRecord& traj() const { return *traj_; }
    const GridPtr& grid() const { return grid_; }
    double dt() const { return traj_->cfg.dt; }

    /// Grid-aligned step index of time t; throws if t is off the grid.
    std::size_t step_index(double t) const;

    /// One tangent step xi' = E(xi + dt Btilde(w_i, xi)).
    VorticityField tangent_step(std::size_t i, const VorticityField& xi);
    /// Batched variant sharing the cached transforms of w_i.
    void tangent_step_many(std::size_t i, std::span<VorticityField> xis);

    /// One adjoint step (tangent_step transposed in the L2 pairing).
    VorticityField adjoint_step(std::size_t i, const VorticityField& eta);

    /// J_{s,t} xi over step indices [s, t].
    VorticityField jacobian_apply(std::size_t s, std::size_t t, VorticityField xi);

    /// J*_{s,t} eta; <J xi, eta> = <xi, J* eta> to roundoff.
    VorticityField jacobian_adjoint_apply(std::size_t s, std::size_t t, VorticityField eta);

    /// Second variation K_{s,t}(xi, xi'): left-endpoint accumulation
    /// psi <- T_i psi + dt E Btilde(J_{s,i} xi', J_{s,i} xi), the exact
    /// second derivative of the discrete flow.
    VorticityField second_variation(std::size_t s, std::size_t t, const VorticityField& xi,
                                    const VorticityField& xi_prime);

    /// Malliavin derivative D_r^i J_{s,t} xi: exact derivative of the
    /// discrete flow with respect to the increment of noise component i at
    /// step r (two-case structure of the continuous formula emerges from
    /// where the kick starts relative to s).
    VorticityField malliavin_deriv_jacobian(std::size_t r, std::size_t noise_component, std::size_t s,
                                            std::size_t t, const VorticityField& xi);

    /// E Q e_n: one noise kick as mapped through the step exponential.
    VorticityField noise_column(std::size_t n) const;

    /// Applies the per-mode exponential decay factor of one step.
    void apply_decay(VorticityField& f) const;

private:
    void ensure_base(std::size_t i);

    const Integrator* integ_;
    const TrajectoryRecord* traj_;
    GridPtr grid_;
    SpectralWorkspace ws_;
    std::ptrdiff_t cached_base_ = -1;
};

/// Orthogonal projector onto modes with max-norm <= cut (in place).
void project_low(VorticityField& f, int cut);
void project_high(VorticityField& f, int cut);

}  // namespace nslab
