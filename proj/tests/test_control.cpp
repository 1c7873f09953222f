#include "doctest.h"
#include "nslab/control.hpp"

#include <cmath>

using namespace nslab;

namespace {

NoiseModel example1_noise(double q = 1.0) {
    return NoiseModel({{Mode(1, 0), q}, {Mode(-1, 0), q}, {Mode(1, 1), q}, {Mode(-1, -1), q}});
}

// every mode with max-norm <= 1 forced (elliptic setting with cut 1)
NoiseModel full_low_noise(int cut, const GridPtr& grid, double q = 1.0) {
    std::vector<NoiseEntry> entries;
    for (std::size_t i = 0; i < grid->half_count(); ++i) {
        const Mode& k = grid->mode(i);
        if (k.maxnorm() > cut) continue;
        entries.push_back({k, q});
        entries.push_back({-k, q});
    }
    return NoiseModel(entries);
}

}  // namespace

TEST_CASE("residual ode with zero control reproduces the jacobian") {
    auto grid = make_grid(4);
    Integrator integ(grid, IntegratorConfig{.nu = 0.4, .dt = 0.02, .seed = 3}, example1_noise());
    TrajectoryRecord traj = integ.simulate(random_field(grid, 1), 0.5, 0, true);
    LinearizedFlow flow(integ, traj);
    VorticityField xi = random_field(grid, 2);
    ControlPath zero;
    zero.s = 0;
    zero.t = 25;
    zero.m = traj.m();
    zero.values.assign(25 * traj.m(), 0.0);
    auto rho = residual_ode(flow, xi, zero);
    CHECK(norm(rho.back() - flow.jacobian_apply(0, 25, xi)) < 1e-13);
}

TEST_CASE("elliptic control: unit-speed low-mode shrinkage, exact zero after 2|pi_l xi|") {
    auto grid = make_grid(3);
    const int cut = 1;
    NoiseModel noise = full_low_noise(cut, grid, 0.7);
    Integrator integ(grid, IntegratorConfig{.nu = 0.5, .dt = 0.01, .seed = 9}, noise);
    TrajectoryRecord traj = integ.simulate(random_field(grid, 5), 2.5, 0, true);
    LinearizedFlow flow(integ, traj);

    VorticityField xi = random_field(grid, 6);
    EllipticRunResult res = elliptic_control_run(flow, xi, cut);

    VorticityField low = xi;
    project_low(low, cut);
    const double l0 = norm(low);
    for (std::size_t i = 0; i < res.zeta_low_norm.size(); ++i) {
        const double t = 0.01 * static_cast<double>(i);
        CHECK(res.zeta_low_norm[i] == doctest::Approx(std::max(0.0, l0 - 0.5 * t)).epsilon(1e-12));
    }
    // hits zero at t = 2 l0 <= 2 and stays there
    const std::size_t zero_step = static_cast<std::size_t>(std::ceil(2.0 * l0 / 0.01));
    for (std::size_t i = zero_step; i < res.zeta_low_norm.size(); ++i) CHECK(res.zeta_low_norm[i] == 0.0);

    // two-route agreement with the residual ODE
    CHECK(res.max_residual_deviation < 1e-10);
}

TEST_CASE("elliptic control: high-mode initial data keeps zeta_low at zero") {
    auto grid = make_grid(3);
    const int cut = 1;
    NoiseModel noise = full_low_noise(cut, grid, 0.7);
    Integrator integ(grid, IntegratorConfig{.nu = 0.5, .dt = 0.01, .seed = 10}, noise);
    TrajectoryRecord traj = integ.simulate(random_field(grid, 7), 1.0, 0, true);
    LinearizedFlow flow(integ, traj);

    VorticityField xi = random_field(grid, 8);
    project_high(xi, cut);
    xi *= 1.0 / norm(xi);
    EllipticRunResult res = elliptic_control_run(flow, xi, cut);
    for (double v : res.zeta_low_norm) CHECK(v == 0.0);
    CHECK(res.max_residual_deviation < 1e-10);
    // v is pure Btilde coupling: nonzero in general
    double vmax = 0.0;
    for (double v : res.v.values) vmax = std::max(vmax, std::abs(v));
    CHECK(vmax > 0.0);

    // B off: zeta_high decays exactly like the heat factor
    Integrator lin(grid, IntegratorConfig{.nu = 0.5, .dt = 0.01, .seed = 10, .nonlinear = false}, noise);
    TrajectoryRecord ltraj = lin.simulate(random_field(grid, 7), 1.0, 0, true);
    LinearizedFlow lflow(lin, ltraj);
    EllipticRunResult lres = elliptic_control_run(lflow, xi, cut);
    VorticityField expect = xi;
    for (std::size_t j = 0; j < expect.half_count(); ++j)
        expect[j] *= std::exp(-0.5 * static_cast<double>(grid->mode(j).norm2()) * 1.0);
    CHECK(norm(lres.zeta.back() - expect) < 1e-12);

    // unforced low mode detected by name
    NoiseModel partial = example1_noise();  // (0,1) missing
    Integrator bad(grid, IntegratorConfig{.nu = 0.5, .dt = 0.01, .seed = 2}, partial);
    TrajectoryRecord btraj = bad.simulate(random_field(grid, 3), 0.1, 0, true);
    LinearizedFlow bflow(bad, btraj);
    CHECK_THROWS_WITH_AS(elliptic_control_run(bflow, xi, 1), doctest::Contains("unforced low mode ("),
                         std::invalid_argument);
}

TEST_CASE("hypo interval: identities, large-beta degeneration, linear closed form") {
    auto grid = make_grid(4);
    Integrator integ(grid, IntegratorConfig{.nu = 0.4, .dt = 0.025, .seed = 21}, example1_noise(0.9));
    TrajectoryRecord traj = integ.simulate(random_field(grid, 50), 1.0, 0, true);
    LinearizedFlow flow(integ, traj);
    VorticityField rho0 = random_field(grid, 51);
    const std::size_t s = 0, h = 20, e = 40;

    for (double beta : {1e-2, 1e-5}) {
        HypoIntervalResult r = hypo_interval(flow, s, h, e, rho0, beta);
        CHECK(r.recursion_residual < 1e-10);
        CHECK(r.interval_identity_residual < 1e-10);
        CHECK(r.beta_resolvent_norm <= 1.0 + 1e-12);
        CHECK(r.whitened_adjoint_norm <= 1.0 + 1e-12);
        CHECK(r.min_eigenvalue > -1e-10 * std::max(r.max_eigenvalue, 1e-30));
    }

    // beta -> infinity: v -> 0 and rho_next -> J rho
    HypoIntervalResult big = hypo_interval(flow, s, h, e, rho0, 1e12);
    VorticityField jrho = flow.jacobian_apply(s, e, rho0);
    CHECK(norm(big.rho_next - jrho) < 1e-6 * norm(jrho));
    CHECK(l2_norm(big.v, 0.025) < 1e-6);

    // linear case: component on a forced slot follows e^{-nu|k|^2} beta/(beta+d_k)
    Integrator lin(grid, IntegratorConfig{.nu = 0.4, .dt = 0.025, .seed = 22, .nonlinear = false},
                   example1_noise(0.9));
    TrajectoryRecord ltraj = lin.simulate(VorticityField(grid), 1.0, 0, true);
    LinearizedFlow lflow(lin, ltraj);
    const auto& entries = ltraj.noise.entries();
    VorticityField xi(grid);
    auto [slot0, sign0] = ltraj.noise.real_slot(*grid, 0);
    (void)sign0;
    {
        std::vector<double> coords(xi.dim(), 0.0);
        coords[slot0] = 1.0;
        xi.from_real(coords);
    }
    const double beta = 1e-3;
    HypoIntervalResult lr = hypo_interval(lflow, s, h, e, xi, beta);
    const double lam = 0.4 * static_cast<double>(entries[0].k.norm2());
    double dk = 0.0;  // discrete diagonal of M over the half interval
    for (std::size_t i = 0; i < h; ++i) {
        const double col = entries[0].q * std::exp(-lam * 0.025 * static_cast<double>(h - i));
        dk += col * col * 0.025;
    }
    // J_hat contracts by e^{-lam/2}, the resolvent leaves beta/(beta+dk),
    // J_check contracts by e^{-lam/2}: total e^{-lam} beta/(beta+dk)
    std::vector<double> out = lr.rho_next.real_coords();
    CHECK(out[slot0] == doctest::Approx(std::exp(-lam) * beta / (beta + dk)).epsilon(1e-9));
}

TEST_CASE("hypo run: telescoping, decay with control vs heat-only baseline") {
    auto grid = make_grid(3);
    NoiseModel noise = example1_noise(1.0);
    IntegratorConfig cfg{.nu = 0.3, .dt = 0.05, .seed = 77};
    Integrator integ(grid, cfg, noise);
    VorticityField w0 = random_field(grid, 60);
    VorticityField xi = random_field(grid, 61);

    HypoScanReport rep = hypo_run(integ, w0, xi, {1e-3, 1e-5, 1e12}, 4, 12);
    for (const auto& run : rep.runs) {
        CHECK(run.max_telescope_residual < 1e-8);
        CHECK(run.max_recursion_residual < 1e-8);
        CHECK(run.max_beta_resolvent_norm <= 1.0 + 1e-12);
        CHECK(run.max_whitened_adjoint_norm <= 1.0 + 1e-12);
        CHECK(run.mean_rho.front() == doctest::Approx(1.0));
    }
    // the huge-beta run is the control-free Jacobian baseline; small beta
    // should do at least as well on the ensemble mean at the final time
    const auto& controlled = rep.runs[1];
    const auto& baseline = rep.runs[2];
    CHECK(controlled.mean_rho.back() <= baseline.mean_rho.back() * 1.5);
    CHECK(rep.best_decay_factor <= baseline.decay_factor + 0.05);
}

TEST_CASE("hypo run in the OU regime decays by viscosity alone") {
    auto grid = make_grid(3);
    NoiseModel noise({{Mode(1, 0), 1.0}, {Mode(-1, 0), 1.0}, {Mode(0, 1), 1.0}, {Mode(0, -1), 1.0}});
    IntegratorConfig cfg{.nu = 0.5, .dt = 0.05, .seed = 31, .nonlinear = false};
    Integrator integ(grid, cfg, noise);
    VorticityField xi(grid);
    xi.set_coeff(Mode(2, 2), Complex{0.0, -1.0 / std::sqrt(2.0)});  // unforced high mode
    HypoScanReport rep = hypo_run(integ, VorticityField(grid), xi, {1e12}, 3, 4);
    // pure heat contraction at rate e^{-nu |k|^2} = e^{-4}
    const double factor = std::exp(-0.5 * 8.0);
    CHECK(rep.runs[0].decay_factor == doctest::Approx(factor).epsilon(1e-6));
    CHECK(rep.runs[0].max_telescope_residual < 1e-10);
}

TEST_CASE("skorokhod cost: adapted and linear cases collapse, bound holds") {
    auto grid = make_grid(3);
    NoiseModel noise = example1_noise(0.9);
    // B off: D of everything vanishes, Skorokhod = Ito
    {
        Integrator lin(grid, IntegratorConfig{.nu = 0.5, .dt = 0.05, .seed = 41, .nonlinear = false}, noise);
        TrajectoryRecord traj = lin.simulate(VorticityField(grid), 0.5, 0, true);
        LinearizedFlow flow(lin, traj);
        IntervalOperators ops = build_interval_operators(flow, 0, 10);
        CostBoundReport rep = control_cost_bound(flow, ops, random_field(grid, 42), 1e-4);
        CHECK(rep.trace_correction == 0.0);
        CHECK(rep.skorokhod_sum == rep.ito_sum);
        CHECK(rep.bound_satisfied);
    }
    // full model: trace correction is nonzero and the almost-sure bound holds
    {
        Integrator integ(grid, IntegratorConfig{.nu = 0.5, .dt = 0.05, .seed = 43}, noise);
        TrajectoryRecord traj = integ.simulate(random_field(grid, 44), 0.5, 0, true);
        LinearizedFlow flow(integ, traj);
        IntervalOperators ops = build_interval_operators(flow, 0, 10);
        CostBoundReport rep = control_cost_bound(flow, ops, random_field(grid, 45), 1e-3);
        CHECK(rep.trace_correction != 0.0);
        CHECK(rep.bound_satisfied);
        CHECK(rep.samples.size() == 10 * noise.m());
        // work guard
        CHECK_THROWS_AS(control_cost_bound(flow, ops, random_field(grid, 45), 1e-3, 100),
                        std::invalid_argument);
    }
}

TEST_CASE("adapted elliptic control has zero malliavin diagonal and ito isometry") {
    auto grid = make_grid(2);
    const int cut = 1;
    NoiseModel noise = full_low_noise(cut, grid, 0.8);
    IntegratorConfig cfg{.nu = 0.6, .dt = 0.05, .seed = 51};

    // D_{t_r} v(t_r) = 0 for adapted controls: bump the increment at step r
    // and check v(t_r) is unchanged
    Integrator integ(grid, cfg, noise);
    TrajectoryRecord traj = integ.simulate(random_field(grid, 52), 0.5, 0, true);
    LinearizedFlow flow(integ, traj);
    VorticityField xi = random_field(grid, 53);
    EllipticRunResult base = elliptic_control_run(flow, xi, cut);
    for (std::size_t r : {2u, 5u, 8u}) {
        TrajectoryRecord bumped = traj;
        bumped.increments[r * traj.m() + 1] += 1e-4;
        materialize_states(integ, bumped);
        LinearizedFlow bflow(integ, bumped);
        EllipticRunResult pert = elliptic_control_run(bflow, xi, cut);
        for (std::size_t n = 0; n < traj.m(); ++n)
            CHECK(pert.v.at(r)[n] == doctest::Approx(base.v.at(r)[n]).epsilon(1e-12));
    }

    // Ito isometry: E (sum <v, dW>)^2 matches E sum ||v||^2 dt
    const std::size_t reps = 300;
    double mean_sq = 0.0, mean_l2 = 0.0;
    for (std::size_t rr = 0; rr < reps; ++rr) {
        TrajectoryRecord tr = integ.simulate(random_field(grid, 52), 0.5, rr, true);
        LinearizedFlow fl(integ, tr);
        EllipticRunResult res = elliptic_control_run(fl, xi, cut);
        mean_sq += res.ito_sum * res.ito_sum;
        mean_l2 += res.control_l2_sq;
    }
    mean_sq /= static_cast<double>(reps);
    mean_l2 /= static_cast<double>(reps);
    CHECK(mean_sq == doctest::Approx(mean_l2).epsilon(0.35));  // MC accuracy
}
