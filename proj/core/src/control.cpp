#include "nslab/control.hpp"

#include <algorithm>
#include <cmath>

#include "nslab/parallel.hpp"
#include "nslab/spectral_ops.hpp"

namespace nslab {

std::vector<VorticityField> residual_ode(LinearizedFlow& flow, const VorticityField& xi,
                                         const ControlPath& v) {
    std::vector<VorticityField> rho;
    rho.reserve(v.n_steps() + 1);
    rho.push_back(xi);
    const double dt = flow.dt();
    const auto& noise = flow.traj().noise;
    VorticityField r = xi;
    for (std::size_t i = v.s; i < v.t; ++i) {
        r = flow.tangent_step(i, r);
        VorticityField kick(flow.grid());
        noise.add_apply(kick, std::span<const double>(v.at(i), v.m));
        flow.apply_decay(kick);
        for (std::size_t j = 0; j < r.half_count(); ++j) r[j] -= dt * kick[j];
        rho.push_back(r);
    }
    return rho;
}

// ---------------------------------------------------------------------------
// elliptic control
// ---------------------------------------------------------------------------

namespace {

void require_low_modes_forced(const NoiseModel& noise, const SpectralGrid& grid, int cut) {
    ModeSet forced = noise.mode_set();
    for (std::size_t i = 0; i < grid.half_count(); ++i) {
        const Mode& k = grid.mode(i);
        if (k.maxnorm() > cut) continue;
        for (const Mode& want : {k, -k})
            if (!forced.contains(want))
                throw std::invalid_argument("elliptic_control_run: unforced low mode (" +
                                            std::to_string(want.k1) + "," + std::to_string(want.k2) + ")");
    }
}

}  // namespace

EllipticRunResult elliptic_control_run(LinearizedFlow& flow, const VorticityField& xi, int cut) {
    const auto& traj = flow.traj();
    const auto& noise = traj.noise;
    const GridPtr& grid = flow.grid();
    require_low_modes_forced(noise, *grid, cut);

    const double dt = flow.dt();
    const std::size_t n = traj.n_steps;
    const std::size_t m = noise.m();

    EllipticRunResult res;
    res.v.s = 0;
    res.v.t = n;
    res.v.m = m;
    res.v.values.assign(n * m, 0.0);

    VorticityField low0 = xi;
    project_low(low0, cut);
    const double low0_norm = norm(low0);
    VorticityField low_unit = low0;
    if (low0_norm > 0.0) low_unit *= 1.0 / low0_norm;

    // low part shrinks at unit speed along its initial direction (exactly
    // solvable); high part follows the free tangent flow; v cancels the rest
    VorticityField zeta = xi;
    res.zeta.reserve(n + 1);
    res.zeta.push_back(zeta);
    res.zeta_low_norm.push_back(low0_norm);
    {
        VorticityField h0 = xi;
        project_high(h0, cut);
        res.zeta_high_norm.push_back(norm(h0));
    }

    // inverse one-step decay on the low modes, for solving the kick equation
    std::vector<double> inv_decay(grid->half_count());
    for (std::size_t j = 0; j < inv_decay.size(); ++j)
        inv_decay[j] = std::exp(traj.cfg.nu * static_cast<double>(grid->mode(j).norm2()) * dt);

    for (std::size_t i = 0; i < n; ++i) {
        VorticityField free = flow.tangent_step(i, zeta);

        const double t_next = static_cast<double>(i + 1) * dt;
        const double scale_next = std::max(0.0, low0_norm - 0.5 * t_next);
        VorticityField zeta_low_next = scale_next * low_unit;

        // zeta_{i+1} = free - dt E Q v_i with Q v_i supported on the low modes
        VorticityField g = free;
        project_low(g, cut);
        g -= zeta_low_next;
        for (std::size_t j = 0; j < g.half_count(); ++j) g[j] *= inv_decay[j] / dt;

        // v = Q_l^{-1} g, zero on entries forcing high modes
        for (std::size_t nn = 0; nn < m; ++nn) {
            if (noise.entries()[nn].k.maxnorm() > cut) continue;
            auto [slot, sign] = noise.real_slot(*grid, nn);
            const std::size_t h = slot / 2;
            const double coord = (slot % 2 == 0) ? std::sqrt(2.0) * g[h].real() : std::sqrt(2.0) * g[h].imag();
            res.v.at(i)[nn] = sign * coord / noise.entries()[nn].q;
        }

        VorticityField zeta_next = free;
        project_high(zeta_next, cut);
        zeta_next += zeta_low_next;
        zeta = std::move(zeta_next);

        res.zeta.push_back(zeta);
        res.zeta_low_norm.push_back(scale_next);
        VorticityField h = zeta;
        project_high(h, cut);
        res.zeta_high_norm.push_back(norm(h));

        double vsq = 0.0;
        for (std::size_t nn = 0; nn < m; ++nn) {
            res.ito_sum += res.v.at(i)[nn] * traj.increment(i)[nn];
            vsq += res.v.at(i)[nn] * res.v.at(i)[nn];
        }
        res.control_l2_sq += vsq * dt;
    }

    // two-route agreement: the residual ODE driven by v reproduces zeta
    std::vector<VorticityField> rho = residual_ode(flow, xi, res.v);
    for (std::size_t i = 0; i <= n; ++i)
        res.max_residual_deviation = std::max(res.max_residual_deviation, norm(rho[i] - res.zeta[i]));
    return res;
}

// ---------------------------------------------------------------------------
// hypoelliptic control
// ---------------------------------------------------------------------------

Eigen::VectorXd gram_eigenvalues(const IntervalOperators& ops) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

HypoIntervalResult hypo_interval(LinearizedFlow& flow, const IntervalOperators& ops,
                                 std::size_t interval_end, const VorticityField& rho, double beta,
                                 const Eigen::VectorXd* gram_eigs) {
    if (beta <= 0.0) throw std::invalid_argument("hypo_interval: beta must be positive");
    const std::size_t s = ops.s, h = ops.t;
    if (interval_end < h) throw std::out_of_range("hypo_interval: interval end before control half");

    HypoIntervalResult res;
    MalliavinMatrix M = malliavin_matrix(ops, beta);
    Eigen::VectorXd local_eigs;
    if (!gram_eigs) {
        local_eigs = gram_eigenvalues(ops);
        gram_eigs = &local_eigs;
    }
    res.min_eigenvalue = (*gram_eigs)(0);
    res.max_eigenvalue = (*gram_eigs)((*gram_eigs).size() - 1);
    const double lmin = std::max(res.min_eigenvalue, 0.0);
    const double lmax = std::max(res.max_eigenvalue, 0.0);
    res.beta_resolvent_norm = beta / (beta + lmin);
    res.whitened_adjoint_norm = std::sqrt(lmax / (beta + lmax));

    VorticityField jhat_rho = flow.jacobian_apply(s, h, rho);
    VorticityField x = M.solve(jhat_rho);
    res.v = a_adjoint_apply(ops, x);
    VorticityField av = a_apply(ops, res.v);

    // exact residual; equals beta x up to the solver residual
    VorticityField d = jhat_rho - av;
    res.beta_x = beta * x;
    res.recursion_residual = norm(d - res.beta_x);
    res.rho_next = flow.jacobian_apply(h, interval_end, d);

    // interval identity J_{s,e} rho = J_check A v + rho_next
    VorticityField lhs = flow.jacobian_apply(s, interval_end, rho);
    VorticityField rhs = flow.jacobian_apply(h, interval_end, av) + res.rho_next;
    res.interval_identity_residual = norm(lhs - rhs);
    return res;
}

HypoIntervalResult hypo_interval(LinearizedFlow& flow, std::size_t n_start, std::size_t n_half,
                                 std::size_t n_end, const VorticityField& rho, double beta) {
    IntervalOperators ops = build_interval_operators(flow, n_start, n_half);
    return hypo_interval(flow, ops, n_end, rho, beta);
}

namespace {

struct ReplicaSeries {
    // per beta
    std::vector<std::vector<double>> rho_norms;  // [beta][interval 0..N]
    std::vector<double> telescope;
    std::vector<double> recursion;
    std::vector<double> beta_norm;
    std::vector<double> whitened_norm;
    std::vector<double> ito;
    double min_eig = 0.0;
    bool monotone = true;
};

}  // namespace

HypoScanReport hypo_run(const Integrator& integrator, const VorticityField& w0, const VorticityField& xi,
                        const std::vector<double>& betas, std::size_t n_intervals, std::size_t n_replicas) {
    const double dt = integrator.config().dt;
    const double half_steps_f = 0.5 / dt;
    const std::size_t half_steps = static_cast<std::size_t>(std::round(half_steps_f));
    if (std::abs(half_steps_f - static_cast<double>(half_steps)) > 1e-9)
        throw std::invalid_argument("hypo_run: dt must divide the half interval");
    const std::size_t nb = betas.size();
    if (nb == 0) throw std::invalid_argument("hypo_run: empty beta grid");

    std::vector<double> betas_sorted = betas;
    std::sort(betas_sorted.begin(), betas_sorted.end());

    std::vector<ReplicaSeries> out(n_replicas);
    parallel_for(n_replicas, [&](std::size_t r) {
        Integrator local(integrator.grid(), integrator.config(), integrator.noise());
        TrajectoryRecord traj = local.simulate(w0, static_cast<double>(n_intervals), r, true);
        LinearizedFlow flow(local, traj);

        ReplicaSeries& series = out[r];
        series.rho_norms.assign(nb, std::vector<double>{norm(xi)});
        series.telescope.assign(nb, 0.0);
        series.recursion.assign(nb, 0.0);
        series.beta_norm.assign(nb, 0.0);
        series.whitened_norm.assign(nb, 0.0);
        series.ito.assign(nb, 0.0);
        series.min_eig = 1e300;

        std::vector<VorticityField> rho(nb, xi);
        std::vector<VorticityField> acc(nb, VorticityField(flow.grid()));  // A_{0,n} v
        VorticityField jxi = xi;                                           // J_{0,n} xi

        for (std::size_t n = 0; n < n_intervals; ++n) {
            const std::size_t s = 2 * n * half_steps;
            const std::size_t h = s + half_steps;
            const std::size_t e = s + 2 * half_steps;
            IntervalOperators ops = build_interval_operators(flow, s, h);
            const Eigen::VectorXd eigs = gram_eigenvalues(ops);
            series.min_eig = std::min(series.min_eig, eigs(0));

            // spectral monotonicity of beta -> ||beta (beta+M)^{-1} y|| on a
            // fixed input (the first beta's current state)
            {
                VorticityField y = flow.jacobian_apply(s, h, rho[0]);
                double prev = -1.0;
                for (double b : betas_sorted) {
                    MalliavinMatrix Mb = malliavin_matrix(ops, b);
                    const double val = norm(b * Mb.solve(y));
                    if (prev >= 0.0 && val < prev * (1.0 - 1e-10)) series.monotone = false;
                    prev = val;
                }
            }

            for (std::size_t bi = 0; bi < nb; ++bi) {
                HypoIntervalResult ir = hypo_interval(flow, ops, e, rho[bi], betas[bi], &eigs);
                series.recursion[bi] = std::max(series.recursion[bi], ir.recursion_residual);
                series.beta_norm[bi] = std::max(series.beta_norm[bi], ir.beta_resolvent_norm);
                series.whitened_norm[bi] = std::max(series.whitened_norm[bi], ir.whitened_adjoint_norm);
                for (std::size_t i = s; i < h; ++i)
                    for (std::size_t nn = 0; nn < ops.m; ++nn)
                        series.ito[bi] += ir.v.at(i)[nn] * traj.increment(i)[nn];

                // accumulate A_{0,n+1} v = J_{n,n+1} acc + J_check A_n v_n
                VorticityField av = a_apply(ops, ir.v);
                acc[bi] = flow.jacobian_apply(s, e, acc[bi]) + flow.jacobian_apply(h, e, av);
                rho[bi] = ir.rho_next;
                series.rho_norms[bi].push_back(norm(rho[bi]));
            }
            jxi = flow.jacobian_apply(s, e, jxi);
            for (std::size_t bi = 0; bi < nb; ++bi)
                series.telescope[bi] = std::max(series.telescope[bi], norm(jxi - acc[bi] - rho[bi]));
        }
    });

    HypoScanReport rep;
    rep.n_intervals = n_intervals;
    rep.n_replicas = n_replicas;
    for (std::size_t bi = 0; bi < nb; ++bi) {
        HypoRunSeries run;
        run.beta = betas[bi];
        run.mean_rho.assign(n_intervals + 1, 0.0);
        run.mean_rho_sq.assign(n_intervals + 1, 0.0);
        std::vector<std::vector<double>> per_n(n_intervals + 1);
        for (std::size_t r = 0; r < n_replicas; ++r) {
            for (std::size_t n = 0; n <= n_intervals; ++n) {
                const double v = out[r].rho_norms[bi][n];
                run.mean_rho[n] += v;
                run.mean_rho_sq[n] += v * v;
                per_n[n].push_back(v);
            }
            run.max_telescope_residual = std::max(run.max_telescope_residual, out[r].telescope[bi]);
            run.max_recursion_residual = std::max(run.max_recursion_residual, out[r].recursion[bi]);
            run.max_beta_resolvent_norm = std::max(run.max_beta_resolvent_norm, out[r].beta_norm[bi]);
            run.max_whitened_adjoint_norm = std::max(run.max_whitened_adjoint_norm, out[r].whitened_norm[bi]);
            run.mean_ito_sq += out[r].ito[bi] * out[r].ito[bi];
            run.mean_ito_abs += std::abs(out[r].ito[bi]);
        }
        run.mean_ito_sq /= static_cast<double>(n_replicas);
        run.mean_ito_abs /= static_cast<double>(n_replicas);
        for (std::size_t n = 0; n <= n_intervals; ++n) {
            run.mean_rho[n] /= static_cast<double>(n_replicas);
            run.mean_rho_sq[n] /= static_cast<double>(n_replicas);
            double var = 0.0;
            for (double v : per_n[n]) var += (v - run.mean_rho[n]) * (v - run.mean_rho[n]);
            run.se_rho.push_back(n_replicas > 1
                                     ? std::sqrt(var / static_cast<double>(n_replicas - 1) /
                                                 static_cast<double>(n_replicas))
                                     : 0.0);
            std::sort(per_n[n].begin(), per_n[n].end());
            run.p95_rho.push_back(per_n[n][static_cast<std::size_t>(0.95 * (per_n[n].size() - 1))]);
        }
        // geometric fit of the ensemble mean over n >= 1
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t cnt = 0;
        for (std::size_t n = 1; n <= n_intervals; ++n) {
            if (run.mean_rho[n] <= 0.0 || !std::isfinite(run.mean_rho[n])) { run.diverged = true; continue; }
            const double x = static_cast<double>(n), y = std::log(run.mean_rho[n]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2) {
            const double c = static_cast<double>(cnt);
            run.decay_factor = std::exp((c * sxy - sx * sy) / (c * sxx - sx * sx));
        }
        if (!std::isfinite(run.mean_rho.back()) || run.mean_rho.back() > 10.0 * run.mean_rho.front())
            run.diverged = true;
        run.min_eigenvalue = 1e300;
        for (std::size_t r = 0; r < n_replicas; ++r) run.min_eigenvalue = std::min(run.min_eigenvalue, out[r].min_eig);
        rep.runs.push_back(std::move(run));
    }
    for (std::size_t r = 0; r < n_replicas; ++r)
        if (!out[r].monotone) throw std::runtime_error("hypo_run: beta-monotonicity violated");

    rep.best_decay_factor = 2.0;
    for (const auto& run : rep.runs)
        if (!run.diverged && run.decay_factor < rep.best_decay_factor) {
            rep.best_decay_factor = run.decay_factor;
            rep.best_beta = run.beta;
        }
    return rep;
}

// ---------------------------------------------------------------------------
// cost of the control: Skorokhod correction and the almost-sure bound
// ---------------------------------------------------------------------------

namespace {

// derivative of the trajectory within the interval: zeta_i = J_{r+1,i} E Q e_c
std::vector<VorticityField> zeta_path(LinearizedFlow& flow, std::size_t s, std::size_t h, std::size_t r,
                                      std::size_t comp) {
    std::vector<VorticityField> zeta(h - s + 1, VorticityField(flow.grid()));
    if (r + 1 <= h) {
        VorticityField z = flow.noise_column(comp);
        for (std::size_t i = r + 1; i <= h; ++i) {
            zeta[i - s] = z;
            if (i < h) z = flow.tangent_step(i, z);
        }
    }
    return zeta;
}

// D of a forward tangent sweep: given the base path q_i (= J_{s,i} q_s or an
// A-accumulation), its derivative satisfies
//   Dq_{i+1} = T_i Dq_i + dt E Btilde(zeta_i, q_i).
VorticityField d_forward_sweep(LinearizedFlow& flow, std::size_t s, std::size_t h,
                               const std::vector<VorticityField>& base_path,
                               const std::vector<VorticityField>& zeta) {
    VorticityField d(flow.grid());
    const double dt = flow.dt();
    for (std::size_t i = s; i < h; ++i) {
        VorticityField next = flow.tangent_step(i, d);
        if (norm(zeta[i - s]) > 0.0) {
            VorticityField coupling = symmetrized_direct(zeta[i - s], base_path[i - s]);
            coupling *= dt;
            flow.apply_decay(coupling);
            next += coupling;
        }
        d = std::move(next);
    }
    return d;
}

// adjoint path eta_i = J*_{i,h} xi for i = s..h (backward)
std::vector<VorticityField> adjoint_path(LinearizedFlow& flow, std::size_t s, std::size_t h,
                                         const VorticityField& xi) {
    std::vector<VorticityField> eta(h - s + 1, VorticityField(flow.grid()));
    eta[h - s] = xi;
    for (std::size_t i = h; i > s; --i) eta[i - 1 - s] = flow.adjoint_step(i - 1, eta[i - s]);
    return eta;
}

// (D_r^c A*) xi as a path: differentiate the backward adjoint sweep
ControlPath d_adjoint_path(LinearizedFlow& flow, const IntervalOperators& ops,
                           const std::vector<VorticityField>& eta,
                           const std::vector<VorticityField>& zeta) {
    const std::size_t s = ops.s, h = ops.t;
    ControlPath out;
    out.s = s;
    out.t = h;
    out.m = ops.m;
    out.values.assign((h - s) * ops.m, 0.0);
    const double dt = flow.dt();
    const auto& noise = flow.traj().noise;
    VorticityField deta(flow.grid());  // D eta_{i+1}, going backward
    for (std::size_t i = h; i > s; --i) {
        // record D val_{i-1} = Q* E D eta_i
        VorticityField z = deta;
        flow.apply_decay(z);
        std::vector<double> row = noise.adjoint_apply(z);
        for (std::size_t nn = 0; nn < ops.m; ++nn) out.at(i - 1)[nn] = row[nn];
        // D eta_{i-1} = T*_{i-1} D eta_i + dt Lstar(zeta_{i-1}, E eta_i)
        deta = flow.adjoint_step(i - 1, deta);
        if (norm(zeta[i - 1 - s]) > 0.0) {
            VorticityField ee = eta[i - s];
            flow.apply_decay(ee);
            VorticityField corr = symmetrized_adjoint_direct(zeta[i - 1 - s], ee);
            corr *= dt;
            deta += corr;
        }
    }
    return out;
}

// forward state path of the A-accumulation z_{i+1} = T_i z_i + E Q p_i dt
std::vector<VorticityField> a_accumulation_path(LinearizedFlow& flow, const ControlPath& p) {
    std::vector<VorticityField> z(p.n_steps() + 1, VorticityField(flow.grid()));
    const double dt = flow.dt();
    const auto& noise = flow.traj().noise;
    for (std::size_t i = p.s; i < p.t; ++i) {
        z[i + 1 - p.s] = flow.tangent_step(i, z[i - p.s]);
        VorticityField kick(flow.grid());
        noise.add_apply(kick, std::span<const double>(p.at(i), p.m));
        flow.apply_decay(kick);
        kick *= dt;
        z[i + 1 - p.s] += kick;
    }
    return z;
}

double probe_operator_norm_field(LinearizedFlow& flow, std::size_t s, std::size_t h,
                                 const std::vector<VorticityField>& zeta, int n_probes) {
    // empirical norm of xi -> D (J_{s,h} xi): max over random probes
    double best = 0.0;
    for (int p = 0; p < n_probes; ++p) {
        VorticityField xi = random_field(flow.grid(), 0xd00d0000ull + p);
        std::vector<VorticityField> path(h - s + 1, VorticityField(flow.grid()));
        path[0] = xi;
        for (std::size_t i = s; i < h; ++i) path[i + 1 - s] = flow.tangent_step(i, path[i - s]);
        best = std::max(best, norm(d_forward_sweep(flow, s, h, path, zeta)));
    }
    return best;
}

double probe_operator_norm_path(LinearizedFlow& flow, const IntervalOperators& ops,
                                const std::vector<VorticityField>& zeta, int n_probes) {
    // empirical norm of p -> D (A p): max over random probe paths
    double best = 0.0;
    const double dt = flow.dt();
    for (int p = 0; p < n_probes; ++p) {
        ControlPath q;
        q.s = ops.s;
        q.t = ops.t;
        q.m = ops.m;
        q.values.resize((ops.t - ops.s) * ops.m);
        GaussianStream stream(0xcafe + p, 17);
        stream.draw(0, q.values);
        const double qn = l2_norm(q, dt);
        std::vector<VorticityField> z = a_accumulation_path(flow, q);
        best = std::max(best, norm(d_forward_sweep(flow, ops.s, ops.t, z, zeta)) / qn);
    }
    return best;
}

}  // namespace

CostBoundReport control_cost_bound(LinearizedFlow& flow, const IntervalOperators& ops,
                                   const VorticityField& rho, double beta, std::size_t max_work) {
    const std::size_t s = ops.s, h = ops.t;
    const std::size_t steps = h - s, m = ops.m;
    const std::size_t dim = flow.grid()->dim();
    if (dim * steps * steps * m > max_work)
        throw std::invalid_argument("control_cost_bound: dim*steps*steps*m exceeds the work budget");

    const double dt = flow.dt();
    MalliavinMatrix M = malliavin_matrix(ops, beta);
    VorticityField jhat_rho = flow.jacobian_apply(s, h, rho);
    VorticityField x = M.solve(jhat_rho);
    ControlPath v = a_adjoint_apply(ops, x);

    CostBoundReport rep;
    for (std::size_t i = s; i < h; ++i)
        for (std::size_t nn = 0; nn < m; ++nn) rep.ito_sum += v.at(i)[nn] * flow.traj().increment(i)[nn];

    // interval-shared paths
    std::vector<VorticityField> phi(steps + 1, VorticityField(flow.grid()));  // J_{s,i} rho
    phi[0] = rho;
    for (std::size_t i = s; i < h; ++i) phi[i + 1 - s] = flow.tangent_step(i, phi[i - s]);
    std::vector<VorticityField> eta = adjoint_path(flow, s, h, x);            // J*_{i,h} x
    std::vector<VorticityField> zacc = a_accumulation_path(flow, v);          // A-accumulation of v

    // ||J_hat|| estimate for the almost-sure bound
    double jhat_norm = 0.0;
    for (int p = 0; p < 6; ++p) {
        VorticityField probe = random_field(flow.grid(), 0xbeef00ull + p);
        jhat_norm = std::max(jhat_norm, norm(flow.jacobian_apply(s, h, probe)));
    }
    const double rho_norm = norm(rho);

    for (std::size_t r = s; r < h; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            std::vector<VorticityField> zeta = zeta_path(flow, s, h, r, c);

            // psi = D (J_hat rho)
            VorticityField psi = d_forward_sweep(flow, s, h, phi, zeta);
            // (D A)(A* x)
            VorticityField da_p = d_forward_sweep(flow, s, h, zacc, zeta);
            // (D A*) x as a path, and A applied to it
            ControlPath dval = d_adjoint_path(flow, ops, eta, zeta);
            VorticityField a_dval = a_apply(ops, dval);

            VorticityField bracket = psi - da_p - a_dval;
            VorticityField u = M.solve(bracket);
            ControlPath term2 = a_adjoint_apply(ops, u);

            CostBoundSample sample;
            sample.step = r;
            sample.component = c;
            double l2 = 0.0;
            for (std::size_t i = s; i < h; ++i)
                for (std::size_t nn = 0; nn < m; ++nn) {
                    const double val = dval.at(i)[nn] + term2.at(i)[nn];
                    l2 += val * val;
                    if (i == r && nn == c) sample.dv_diag = val;
                }
            sample.dv_l2 = std::sqrt(l2 * dt);
            rep.trace_correction += sample.dv_diag * dt;

            const double da_norm = probe_operator_norm_path(flow, ops, zeta, 4);
            const double dj_norm = probe_operator_norm_field(flow, s, h, zeta, 4);
            sample.bound = 3.0 / beta * da_norm * jhat_norm * rho_norm +
                           dj_norm * rho_norm / std::sqrt(beta);
            if (sample.dv_l2 > sample.bound) rep.bound_satisfied = false;
            rep.samples.push_back(sample);
        }
    }
    rep.skorokhod_sum = rep.ito_sum - rep.trace_correction;
    return rep;
}

}  // namespace nslab
