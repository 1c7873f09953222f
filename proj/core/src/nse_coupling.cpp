#include "nslab/nse_coupling.hpp"

#include <algorithm>
#include <cmath>

#include "nslab/parallel.hpp"

namespace nslab {

NseCouplingReport nse_coupling_distance(const Integrator& integrator, const VorticityField& w0a,
                                        const VorticityField& w0b, const std::vector<double>& horizons,
                                        const std::vector<double>& epsilons, std::size_t ensemble,
                                        std::size_t support_cap) {
    check_same_grid(w0a, w0b, "nse_coupling_distance");
    NseCouplingReport rep;
    rep.horizons = horizons;
    rep.epsilons = epsilons;
    rep.n_samples = std::min(ensemble, support_cap);

    const double t_max = *std::max_element(horizons.begin(), horizons.end());
    std::vector<std::size_t> snap_steps;
    const double dt = integrator.config().dt;
    for (double t : horizons) snap_steps.push_back(static_cast<std::size_t>(std::round(t / dt)));

    // per replica, both sides on the same noise stream
    std::vector<std::vector<std::vector<double>>> cloud_a(horizons.size()), cloud_b(horizons.size());
    for (auto& c : cloud_a) c.resize(rep.n_samples);
    for (auto& c : cloud_b) c.resize(rep.n_samples);

    parallel_for(rep.n_samples, [&](std::size_t r) {
        Integrator local(integrator.grid(), integrator.config(), integrator.noise());
        TrajectoryRecord traj = local.simulate(w0a, t_max, r, false);
        VorticityField wa = w0a, wb = w0b;
        std::size_t next = 0;
        for (std::size_t i = 0; i <= traj.n_steps; ++i) {
            while (next < snap_steps.size() && snap_steps[next] == i) {
                cloud_a[next][r] = wa.real_coords();
                cloud_b[next][r] = wb.real_coords();
                ++next;
            }
            if (i == traj.n_steps) break;
            wa = local.step(wa, traj.increment(i));
            wb = local.step(wb, traj.increment(i));
        }
    });

    for (std::size_t h = 0; h < horizons.size(); ++h) {
        EmpiricalMeasure mu1, mu2;
        const double w = 1.0 / static_cast<double>(rep.n_samples);
        for (std::size_t r = 0; r < rep.n_samples; ++r) {
            mu1.add(cloud_a[h][r], w);
            mu2.add(cloud_b[h][r], w);
        }
        std::vector<double> row;
        CouplingOptions opts;
        opts.support_cap = support_cap;
        for (double eps : epsilons)
            row.push_back(coupling_distance(mu1, mu2, PseudoMetric::scaled(eps), opts).distance);
        rep.distance.push_back(row);
    }
    return rep;
}

}  // namespace nslab
