#include "nslab/energy_balance.hpp"

#include <algorithm>
#include <cmath>

#include "nslab/parallel.hpp"

namespace nslab {

EnergyBalanceReport energy_balance_report(const Integrator& integrator, const TrajectoryRecord& traj,
                                          double burn_in) {
    if (traj.cfg.scheme != Scheme::ExpEulerMaruyama)
        throw std::invalid_argument("energy_balance_report: stochastic scheme required");
    const double dt = traj.dt();
    const double nu = traj.cfg.nu;
    const double e0 = traj.noise.e0();
    const std::size_t burn_steps = static_cast<std::size_t>(burn_in / dt);

    EnergyBalanceReport rep;
    rep.steps = traj.n_steps;
    const double w0_en = enstrophy(traj.w0);

    double visc_sum = 0.0;    // 2 nu sum ||w_i||_1^2 dt
    double mart_sum = 0.0;    // sum <w_i, Q dW_i>
    double mean_en = 0.0, mean_h1 = 0.0;
    std::size_t n_avg = 0;

    // batch means for the standard error of mean_h1sq
    const std::size_t n_batches = 50;
    std::vector<double> batch_sum(n_batches, 0.0);
    std::vector<std::size_t> batch_cnt(n_batches, 0);
    const std::size_t avg_steps = traj.n_steps > burn_steps ? traj.n_steps - burn_steps : 1;

    integrator.scan(traj, [&](std::size_t i, const VorticityField& w, std::span<const double> dW) {
        const double en = enstrophy(w);
        const double h1 = sobolev_norm(w, 1.0);
        const double h1sq = h1 * h1;
        const double residual = en - w0_en + visc_sum - mart_sum - e0 * (static_cast<double>(i) * dt);
        rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(residual));
        rep.final_residual = residual;
        if (i >= burn_steps && i < traj.n_steps) {
            mean_en += en;
            mean_h1 += h1sq;
            const std::size_t b = ((i - burn_steps) * n_batches) / avg_steps;
            batch_sum[std::min(b, n_batches - 1)] += h1sq;
            batch_cnt[std::min(b, n_batches - 1)] += 1;
            ++n_avg;
        }
        if (i == traj.n_steps) return;  // final callback carries no step
        if (!dW.empty()) {
            VorticityField qdw = traj.noise.apply(traj.grid, dW);
            mart_sum += inner(w, qdw);
        }
        visc_sum += 2.0 * nu * h1sq * dt;
    });

    if (n_avg > 0) {
        rep.mean_energy = mean_en / static_cast<double>(n_avg);
        rep.mean_h1sq = mean_h1 / static_cast<double>(n_avg);
        if (e0 > 0.0) rep.stationary_ratio = 2.0 * nu * rep.mean_h1sq / e0;
        double var = 0.0;
        std::size_t used = 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            if (batch_cnt[b] == 0) continue;
            const double mb = batch_sum[b] / static_cast<double>(batch_cnt[b]);
            var += (mb - rep.mean_h1sq) * (mb - rep.mean_h1sq);
            ++used;
        }
        if (used > 1) rep.se_h1sq = std::sqrt(var / static_cast<double>(used - 1) / static_cast<double>(used));
    }
    return rep;
}

MomentProbeReport apriori_moment_probe(const Integrator& integrator, const VorticityField& w0, double T,
                                       std::size_t n_replicas, const std::vector<double>& etas,
                                       std::size_t sample_stride) {
    if (n_replicas < 2) throw std::invalid_argument("apriori_moment_probe: ensemble too small");
    const double dt = integrator.config().dt;
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
    const std::size_t n_samples = n_steps / sample_stride + 1;
    const double e0 = integrator.noise().e0();
    const double nu = integrator.config().nu;

    // per replica: ||w||^2 at sampled times, and the running sup of
    // ||w_t||^2 + nu int ||w||_1^2 - E0 t
    std::vector<std::vector<double>> en_samples(n_replicas);
    std::vector<double> sup_exponent(n_replicas);
    parallel_for(n_replicas, [&](std::size_t r) {
        Integrator local(integrator.grid(), integrator.config(), integrator.noise());
        TrajectoryRecord traj = local.simulate(w0, T, r, false);
        std::vector<double> samples;
        samples.reserve(n_samples);
        double visc = 0.0, sup = -1e300;
        local.scan(traj, [&](std::size_t i, const VorticityField& w, std::span<const double>) {
            const double en = enstrophy(w);
            if (i % sample_stride == 0 || i == traj.n_steps) samples.push_back(en);
            const double h1 = sobolev_norm(w, 1.0);
            sup = std::max(sup, en + visc - e0 * static_cast<double>(i) * dt);
            visc += nu * h1 * h1 * dt;
        });
        en_samples[r] = std::move(samples);
        sup_exponent[r] = sup;
    });

    MomentProbeReport rep;
    rep.ensemble_size = n_replicas;
    const std::size_t n_pts = en_samples[0].size();
    for (double eta : etas) {
        MomentProbePoint pt;
        pt.eta = eta;
        // log-sum-exp over replicas per sample time
        std::vector<double> logm(n_pts);
        bool dominated = false;
        for (std::size_t s = 0; s < n_pts; ++s) {
            double mx = -1e300;
            for (std::size_t r = 0; r < n_replicas; ++r) mx = std::max(mx, eta * en_samples[r][s]);
            double acc = 0.0;
            for (std::size_t r = 0; r < n_replicas; ++r) acc += std::exp(eta * en_samples[r][s] - mx);
            logm[s] = mx + std::log(acc / static_cast<double>(n_replicas));
            // a single replica carrying more than half the sum means the
            // estimator is out of its depth for this eta
            if (1.0 / acc > 0.5) dominated = true;
        }
        pt.threshold_exceeded = dominated;
        pt.final_log_moment = logm.back();
        {
            double mx = -1e300;
            for (std::size_t r = 0; r < n_replicas; ++r) mx = std::max(mx, eta * sup_exponent[r]);
            double acc = 0.0;
            for (std::size_t r = 0; r < n_replicas; ++r) acc += std::exp(eta * sup_exponent[r] - mx);
            pt.sup_log_moment = mx + std::log(acc / static_cast<double>(n_replicas));
        }
        // least squares slope of logm against time
        const double n = static_cast<double>(n_pts);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t s = 0; s < n_pts; ++s) {
            const double t = static_cast<double>(s * sample_stride) * dt;
            sx += t; sy += logm[s]; sxx += t * t; sxy += t * logm[s];
        }
        const double denom = n * sxx - sx * sx;
        if (denom > 0) {
            pt.slope = (n * sxy - sx * sy) / denom;
            double rss = 0.0;
            for (std::size_t s = 0; s < n_pts; ++s) {
                const double t = static_cast<double>(s * sample_stride) * dt;
                const double fit = pt.slope * t + (sy - pt.slope * sx) / n;
                rss += (logm[s] - fit) * (logm[s] - fit);
            }
            if (n_pts > 2) pt.slope_se = std::sqrt(rss / (n - 2.0) / (sxx - sx * sx / n));
        }
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace nslab
