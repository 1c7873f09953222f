#include "nslab/tangent.hpp"

#include <cmath>

namespace nslab {

LinearizedFlow::LinearizedFlow(const Integrator& integrator, const TrajectoryRecord& traj)
    : integ_(&integrator), traj_(&traj), grid_(traj.grid), ws_(traj.grid) {
    if (traj.cfg.scheme != Scheme::ExpEulerMaruyama)
        throw std::invalid_argument("LinearizedFlow: tangent algebra is defined for ExpEulerMaruyama only");
    if (!traj.has_states)
        throw std::invalid_argument("LinearizedFlow: trajectory must carry states (materialize_states)");
}

std::size_t LinearizedFlow::step_index(double t) const {
    const double x = t / traj_->cfg.dt;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)) + 1e-12)
        throw std::invalid_argument("LinearizedFlow: time not aligned with the step grid");
    if (r < 0 || static_cast<std::size_t>(r) > traj_->n_steps)
        throw std::out_of_range("LinearizedFlow: time outside the trajectory span");
    return static_cast<std::size_t>(r);
}

void LinearizedFlow::ensure_base(std::size_t i) {
    if (cached_base_ == static_cast<std::ptrdiff_t>(i)) return;
    ws_.set_base(traj_->state(i));
    cached_base_ = static_cast<std::ptrdiff_t>(i);
}

void LinearizedFlow::apply_decay(VorticityField& f) const {
    const auto& decay = integ_->decay();
    for (std::size_t j = 0; j < f.half_count(); ++j) f[j] *= decay[j];
}

VorticityField LinearizedFlow::tangent_step(std::size_t i, const VorticityField& xi) {
    if (!traj_->cfg.nonlinear) {
        VorticityField out = xi;
        apply_decay(out);
        return out;
    }
    ensure_base(i);
    VorticityField out = ws_.apply_bilinear(xi);
    out *= traj_->cfg.dt;
    out += xi;
    apply_decay(out);
    return out;
}

void LinearizedFlow::tangent_step_many(std::size_t i, std::span<VorticityField> xis) {
    if (!traj_->cfg.nonlinear) {
        for (auto& xi : xis) apply_decay(xi);
        return;
    }
    ensure_base(i);
    for (auto& xi : xis) {
        VorticityField out = ws_.apply_bilinear(xi);
        out *= traj_->cfg.dt;
        out += xi;
        apply_decay(out);
        xi = std::move(out);
    }
}

VorticityField LinearizedFlow::adjoint_step(std::size_t i, const VorticityField& eta) {
    VorticityField z = eta;
    apply_decay(z);
    if (!traj_->cfg.nonlinear) return z;
    ensure_base(i);
    VorticityField out = ws_.apply_bilinear_adjoint(z);
    out *= traj_->cfg.dt;
    out += z;
    return out;
}

VorticityField LinearizedFlow::jacobian_apply(std::size_t s, std::size_t t, VorticityField xi) {
    if (s > t || t > traj_->n_steps) throw std::out_of_range("jacobian_apply: bad interval");
    for (std::size_t i = s; i < t; ++i) xi = tangent_step(i, xi);
    return xi;
}

VorticityField LinearizedFlow::jacobian_adjoint_apply(std::size_t s, std::size_t t, VorticityField eta) {
    if (s > t || t > traj_->n_steps) throw std::out_of_range("jacobian_adjoint_apply: bad interval");
    for (std::size_t i = t; i > s; --i) eta = adjoint_step(i - 1, eta);
    return eta;
}

VorticityField LinearizedFlow::second_variation(std::size_t s, std::size_t t, const VorticityField& xi,
                                                const VorticityField& xi_prime) {
    if (s > t || t > traj_->n_steps) throw std::out_of_range("second_variation: bad interval");
    VorticityField phi = xi, chi = xi_prime, psi(grid_);
    const double dt = traj_->cfg.dt;
    for (std::size_t i = s; i < t; ++i) {
        ensure_base(i);
        VorticityField coupling(grid_);
        if (traj_->cfg.nonlinear) coupling = ws_.symmetrized(chi, phi);
        // psi <- T_i psi + dt E Btilde(chi_i, phi_i)
        VorticityField psi_next = tangent_step(i, psi);
        coupling *= dt;
        apply_decay(coupling);
        psi_next += coupling;
        psi = std::move(psi_next);
        VorticityField pair[2] = {std::move(phi), std::move(chi)};
        tangent_step_many(i, pair);
        phi = std::move(pair[0]);
        chi = std::move(pair[1]);
    }
    return psi;
}

VorticityField LinearizedFlow::noise_column(std::size_t n) const {
    std::vector<double> e(integ_->noise().m(), 0.0);
    e.at(n) = 1.0;
    VorticityField col = integ_->noise().apply(grid_, e);
    apply_decay(col);
    return col;
}

VorticityField LinearizedFlow::malliavin_deriv_jacobian(std::size_t r, std::size_t noise_component,
                                                        std::size_t s, std::size_t t,
                                                        const VorticityField& xi) {
    if (s > t || t > traj_->n_steps || r >= traj_->n_steps)
        throw std::out_of_range("malliavin_deriv_jacobian: indices out of range");
    // zeta_n = J_{r+1,n} E Q e_i for n > r (trajectory response to the kick),
    // phi_n = J_{s,n} xi, and the exact derivative psi accumulates
    //   psi_{n+1} = T_n psi_n + dt E Btilde(zeta_n, phi_n).
    VorticityField psi(grid_);
    if (t == s || r + 1 >= t) return psi;  // kick after the window: zero
    VorticityField phi = xi;
    VorticityField zeta(grid_);
    const double dt = traj_->cfg.dt;
    bool zeta_live = false;
    for (std::size_t n = std::min(s, r + 1); n < t; ++n) {
        if (n == r + 1) {
            zeta = noise_column(noise_component);
            zeta_live = true;
        }
        const bool in_window = n >= s;
        if (!in_window) {
            // before the window only the trajectory perturbation evolves
            if (zeta_live) zeta = tangent_step(n, zeta);
            continue;
        }
        if (zeta_live && traj_->cfg.nonlinear) {
            ensure_base(n);
            VorticityField coupling = ws_.symmetrized(zeta, phi);
            coupling *= dt;
            apply_decay(coupling);
            VorticityField psi_next = tangent_step(n, psi);
            psi_next += coupling;
            psi = std::move(psi_next);
        } else {
            psi = tangent_step(n, psi);
        }
        if (zeta_live) {
            VorticityField pair[2] = {std::move(phi), std::move(zeta)};
            tangent_step_many(n, pair);
            phi = std::move(pair[0]);
            zeta = std::move(pair[1]);
        } else {
            phi = tangent_step(n, phi);
        }
    }
    return psi;
}

void project_low(VorticityField& f, int cut) {
    const auto& grid = *f.grid();
    for (std::size_t i = 0; i < f.half_count(); ++i)
        if (grid.mode(i).maxnorm() > cut) f[i] = Complex{0.0, 0.0};
}

void project_high(VorticityField& f, int cut) {
    const auto& grid = *f.grid();
    for (std::size_t i = 0; i < f.half_count(); ++i)
        if (grid.mode(i).maxnorm() <= cut) f[i] = Complex{0.0, 0.0};
}

}  // namespace nslab
