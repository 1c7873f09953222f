#include "doctest.h"
#include "nslab/gradient_bound.hpp"

#include <cmath>

using namespace nslab;

namespace {
NoiseModel example1_noise(double q = 1.0) {
    return NoiseModel({{Mode(1, 0), q}, {Mode(-1, 0), q}, {Mode(1, 1), q}, {Mode(-1, -1), q}});
}
}  // namespace

TEST_CASE("low-mode observable has the advertised norms and gradient") {
    auto grid = make_grid(4);
    LowModeObservable phi(grid);
    CHECK(phi.sup_norm() == 1.0);
    CHECK(phi.grad_sup_norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi.slots().size() == 8);  // 4 modes, two real coordinates each

    // finite-difference check of the gradient
    VorticityField w = random_field(grid, 3);
    VorticityField g = phi.gradient(w);
    VorticityField dir = random_field(grid, 4);
    const double eps = 1e-6;
    VorticityField wp = w;
    for (std::size_t i = 0; i < w.half_count(); ++i) wp[i] += eps * dir[i];
    const double fd = (phi.value(wp) - phi.value(w)) / eps;
    CHECK(fd == doctest::Approx(inner(g, dir)).epsilon(1e-5));

    // |phi| < 1 everywhere, gradient vanishes off the low modes
    CHECK(std::abs(phi.value(10.0 * w)) <= 1.0);
    VorticityField gh = g;
    project_high(gh, 2);
    CHECK(norm(gh) == 0.0);
}

TEST_CASE("linear regime: fitted delta matches the viscous rate") {
    // B off: rho_n decays exactly like the slowest heat mode under large beta
    auto grid = make_grid(2);
    NoiseModel noise = example1_noise(0.6);
    IntegratorConfig cfg{.nu = 0.7, .dt = 0.05, .seed = 5, .nonlinear = false};
    Integrator integ(grid, cfg, noise);
    LowModeObservable phi(grid);
    VorticityField xi(grid);
    xi.set_coeff(Mode(2, 2), Complex{0.0, -1.0 / std::sqrt(2.0)});  // unforced mode, |k|^2 = 8

    GradientBoundReport rep = gradient_bound_estimate(integ, VorticityField(grid), phi, xi, 1e12, 3, 8);
    CHECK(rep.delta == doctest::Approx(0.7 * 8.0).epsilon(1e-3));
    CHECK(rep.delta_ci95_low > 0.0);
    // phi is constant in that direction: the FD gradient vanishes
    for (double v : rep.fd_gradient) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("constant observable gives zero gradient and valid bound") {
    auto grid = make_grid(2);
    NoiseModel noise = example1_noise(0.6);
    IntegratorConfig cfg{.nu = 0.5, .dt = 0.05, .seed = 9};
    Integrator integ(grid, cfg, noise);
    LowModeObservable phi(grid);
    VorticityField xi = random_field(grid, 21);

    GradientBoundReport rep = gradient_bound_estimate(integ, VorticityField(grid), phi, xi, 1e-3, 3, 16);
    REQUIRE(rep.fd_gradient.size() == rep.mean_rho.size());
    // decomposition bound dominates the measured finite-difference gradient
    for (std::size_t n = 1; n < rep.fd_gradient.size(); ++n)
        CHECK(rep.fd_gradient[n] <= rep.rhs_bound[n] + 2.0 * rep.fd_se[n] + 1e-9);
}
