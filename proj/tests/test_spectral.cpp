#include "doctest.h"
#include "nslab/fft_workspace.hpp"
#include "nslab/spectral_ops.hpp"

#include <cmath>
#include <complex>

using namespace nslab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel_diff(const VorticityField& a, const VorticityField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.half_count(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double inner_alpha(const VorticityField& a, const VorticityField& b, double alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.half_count(); ++i) {
        const double n2 = static_cast<double>(a.grid()->mode(i).norm2());
        s += std::pow(n2, alpha) * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    }
    return 2.0 * s;
}

// Fourier series evaluated pointwise on an M x M grid; independent of the
// FFT machinery on purpose.
std::vector<double> eval_series(const std::vector<std::pair<Mode, Complex>>& coeffs, int M) {
    std::vector<double> vals(static_cast<std::size_t>(M) * M, 0.0);
    for (int p = 0; p < M; ++p)
        for (int q = 0; q < M; ++q) {
            const double x1 = 2.0 * kPi * p / M, x2 = 2.0 * kPi * q / M;
            Complex s{0.0, 0.0};
            for (const auto& [k, c] : coeffs) {
                const double ph = k.k1 * x1 + k.k2 * x2;
                s += c * Complex{std::cos(ph), std::sin(ph)};
            }
            vals[static_cast<std::size_t>(p) * M + q] = s.real() / (2.0 * kPi);
        }
    return vals;
}

std::vector<std::pair<Mode, Complex>> full_coeffs(const VorticityField& w) {
    std::vector<std::pair<Mode, Complex>> out;
    for (std::size_t i = 0; i < w.half_count(); ++i) {
        const Mode& k = w.grid()->mode(i);
        out.push_back({k, w[i]});
        out.push_back({-k, std::conj(w[i])});
    }
    return out;
}

}  // namespace

TEST_CASE("biot_savart per-mode formula") {
    auto grid = make_grid(3);
    VorticityField w(grid);
    w.set_coeff(Mode(1, 0), Complex{1.0, 0.0});
    VelocityField u = biot_savart(w);
    const std::size_t i = grid->index(Mode(1, 0));
    CHECK(u.u1[i] == Complex{0.0, 0.0});
    CHECK(u.u2[i] == Complex{0.0, 1.0});  // -i * 1 * (0,-1)/1 = (0, i)

    // divergence i(k1 u1 + k2 u2) vanishes mode by mode
    VorticityField r = random_field(grid, 5);
    VelocityField v = biot_savart(r);
    for (std::size_t j = 0; j < r.half_count(); ++j) {
        const Mode& k = grid->mode(j);
        CHECK(std::abs(static_cast<double>(k.k1) * v.u1[j] + static_cast<double>(k.k2) * v.u2[j]) < 1e-15);
    }
}

TEST_CASE("biot_savart shifts the Sobolev scale by one") {
    auto grid = make_grid(6);
    for (std::uint64_t s = 0; s < 5; ++s) {
        VorticityField w = random_field(grid, 100 + s);
        VelocityField u = biot_savart(w);
        for (double alpha : {0.0, 0.5, 1.0, 2.0})
            CHECK(sobolev_norm(u, alpha) == doctest::Approx(sobolev_norm(w, alpha - 1.0)).epsilon(1e-12));
    }
    VorticityField z(grid);
    VelocityField uz = biot_savart(z);
    CHECK(sobolev_norm(uz, 0.0) == 0.0);
}

TEST_CASE("single symmetric pair has vanishing nonlinearity") {
    auto grid = make_grid(4);
    VorticityField w(grid);
    w.set_coeff(Mode(2, 1), Complex{0.7, -0.3});
    VorticityField out = nonlinearity_direct(w);
    for (std::size_t i = 0; i < out.half_count(); ++i) CHECK(std::abs(out[i]) < 1e-15);
}

TEST_CASE("two-mode interaction: support and hand-expanded values") {
    auto grid = make_grid(3);
    VorticityField w(grid);
    w.set_coeff(Mode(1, 0), Complex{1.0, 0.0});
    w.set_coeff(Mode(1, 1), Complex{1.0, 0.0});
    VorticityField out = nonlinearity_direct(w);

    // hand expansion: contributing unordered pairs are {(1,0),(1,1)} -> (2,1)
    // and {(1,0),(-1,-1)} -> (0,-1), with kernel sums 1 and -1:
    //   out_(2,1) = -(1/4pi),  out_(0,1) = conj(out_(0,-1)) = +(1/4pi)
    const double inv4pi = 1.0 / (4.0 * kPi);
    for (std::size_t i = 0; i < out.half_count(); ++i) {
        const Mode& k = grid->mode(i);
        if (k == Mode(2, 1)) {
            CHECK(out[i].real() == doctest::Approx(-inv4pi).epsilon(1e-13));
            CHECK(std::abs(out[i].imag()) < 1e-15);
        } else if (k == Mode(0, 1)) {
            CHECK(out[i].real() == doctest::Approx(inv4pi).epsilon(1e-13));
            CHECK(std::abs(out[i].imag()) < 1e-15);
        } else {
            CHECK(std::abs(out[i]) < 1e-15);
        }
    }
}

TEST_CASE("physical-space finite differences confirm the 1/(4pi) constant and sign") {
    auto grid = make_grid(2);
    VorticityField w(grid);
    w.set_coeff(Mode(1, 0), Complex{0.9, 0.2});
    w.set_coeff(Mode(1, 1), Complex{-0.4, 0.6});
    w.set_coeff(Mode(0, 1), Complex{0.3, -0.1});

    const int M = 128;
    const double h = 2.0 * kPi / M;
    VelocityField u = biot_savart(w);
    std::vector<std::pair<Mode, Complex>> cu1, cu2;
    for (std::size_t i = 0; i < w.half_count(); ++i) {
        const Mode& k = grid->mode(i);
        cu1.push_back({k, u.u1[i]});
        cu1.push_back({-k, std::conj(u.u1[i])});
        cu2.push_back({k, u.u2[i]});
        cu2.push_back({-k, std::conj(u.u2[i])});
    }
    auto W = eval_series(full_coeffs(w), M);
    auto U1 = eval_series(cu1, M);
    auto U2 = eval_series(cu2, M);

    // fourth-order central differences of w, then the pointwise product
    auto at = [&](const std::vector<double>& f, int p, int q) {
        return f[static_cast<std::size_t>((p % M + M) % M) * M + ((q % M + M) % M)];
    };
    std::vector<double> adv(static_cast<std::size_t>(M) * M);
    for (int p = 0; p < M; ++p)
        for (int q = 0; q < M; ++q) {
            const double wx = (8.0 * (at(W, p + 1, q) - at(W, p - 1, q)) - (at(W, p + 2, q) - at(W, p - 2, q))) / (12.0 * h);
            const double wy = (8.0 * (at(W, p, q + 1) - at(W, p, q - 1)) - (at(W, p, q + 2) - at(W, p, q - 2))) / (12.0 * h);
            adv[static_cast<std::size_t>(p) * M + q] = at(U1, p, q) * wx + at(U2, p, q) * wy;
        }

    // project (u . grad w) back onto the w_k convention:
    // coeff_k = (2 pi)^{-1} * (2 pi / M)^2 * sum adv(x) e^{-i k x}
    VorticityField target(grid);
    for (std::size_t i = 0; i < target.half_count(); ++i) {
        const Mode& k = grid->mode(i);
        Complex s{0.0, 0.0};
        for (int p = 0; p < M; ++p)
            for (int q = 0; q < M; ++q) {
                const double ph = -(k.k1 * (2.0 * kPi * p / M) + k.k2 * (2.0 * kPi * q / M));
                s += adv[static_cast<std::size_t>(p) * M + q] * Complex{std::cos(ph), std::sin(ph)};
            }
        target[i] = s * (h * h) / (2.0 * kPi);
    }

    VorticityField got = nonlinearity_direct(w);
    // the drift equals +(u . grad) w in this normalization; anything off by a
    // sign or a 2-pi factor fails by orders of magnitude
    CHECK(rel_diff(got, target) < 1e-3);
}

TEST_CASE("fft path matches the direct oracle") {
    auto grid = make_grid(8);
    SpectralWorkspace ws(grid);
    for (std::uint64_t s = 0; s < 20; ++s) {
        VorticityField w = random_field(grid, 200 + s);
        CHECK(rel_diff(ws.nonlinearity(w), nonlinearity_direct(w)) < 1e-11);
    }
    VorticityField z(grid);
    VorticityField nz = ws.nonlinearity(z);
    for (std::size_t i = 0; i < nz.half_count(); ++i) CHECK(std::abs(nz[i]) == 0.0);

    VorticityField shell(grid);
    shell.set_coeff(Mode(3, 1), Complex{1.0, 0.5});
    VorticityField ns = ws.nonlinearity(shell);
    for (std::size_t i = 0; i < ns.half_count(); ++i) CHECK(std::abs(ns[i]) < 1e-12);
}

TEST_CASE("symmetrized nonlinearity: polarization, symmetry, bilinearity") {
    auto grid = make_grid(6);
    SpectralWorkspace ws(grid);
    VorticityField w = random_field(grid, 301);
    VorticityField v1 = random_field(grid, 302);
    VorticityField v2 = random_field(grid, 303);

    VorticityField btww = symmetrized_direct(w, w);
    VorticityField two_nl = 2.0 * nonlinearity_direct(w);
    CHECK(rel_diff(btww, two_nl) < 1e-12);

    VorticityField ab = symmetrized_direct(w, v1);
    VorticityField ba = symmetrized_direct(v1, w);
    CHECK(rel_diff(ab, ba) < 1e-14);

    const double a = 0.37, b = -1.21;
    VorticityField lhs = symmetrized_direct(w, a * v1 + b * v2);
    VorticityField rhs = a * symmetrized_direct(w, v1) + b * symmetrized_direct(w, v2);
    CHECK(rel_diff(lhs, rhs) < 1e-12);

    CHECK(rel_diff(ws.symmetrized(w, v1), ab) < 1e-11);
    ws.set_base(w);
    CHECK(rel_diff(ws.apply_bilinear(v1), ab) < 1e-11);

    VorticityField mismatch(make_grid(5));
    CHECK_THROWS_AS(symmetrized_direct(w, mismatch), std::invalid_argument);
}

TEST_CASE("bilinear adjoint pairs exactly") {
    auto grid = make_grid(6);
    SpectralWorkspace ws(grid);
    VorticityField w = random_field(grid, 401);
    ws.set_base(w);
    for (std::uint64_t s = 0; s < 10; ++s) {
        VorticityField xi = random_field(grid, 500 + s);
        VorticityField eta = random_field(grid, 600 + s);
        const double lhs = inner(symmetrized_direct(w, xi), eta);
        const double rhs = inner(xi, symmetrized_adjoint_direct(w, eta));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        const double rhs_fft = inner(xi, ws.apply_bilinear_adjoint(eta));
        CHECK(lhs == doctest::Approx(rhs_fft).epsilon(1e-11));
    }
}

TEST_CASE("energy and enstrophy neutrality of the Galerkin drift") {
    auto grid = make_grid(8);
    SpectralWorkspace ws(grid);
    for (std::uint64_t s = 0; s < 10; ++s) {
        VorticityField w = random_field(grid, 700 + s);
        VorticityField nl = ws.nonlinearity(w);
        CHECK(std::abs(inner_alpha(nl, w, 0.0)) < 1e-12);    // enstrophy pairing
        CHECK(std::abs(inner_alpha(nl, w, -1.0)) < 1e-12);   // energy pairing
    }
}

TEST_CASE("advection antisymmetry for divergence-free velocity") {
    auto grid = make_grid(5);
    for (std::uint64_t s = 0; s < 10; ++s) {
        VorticityField xi = random_field(grid, 800 + s);
        VorticityField v = random_field(grid, 900 + s);
        VorticityField w = random_field(grid, 1000 + s);
        const double lhs = inner(advect_direct(xi, v), w);
        const double rhs = -inner(advect_direct(xi, w), v);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("advection trilinear bound with a frozen constant") {
    auto grid = make_grid(6);
    // C was fitted as 1.2x the max ratio over an independent seeded batch
    const double C = 0.12;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        VorticityField a = random_field(grid, 2000 + s);
        VorticityField v = random_field(grid, 4000 + s);
        VorticityField w = random_field(grid, 6000 + s);
        VelocityField u = biot_savart(a);
        const double lhs = std::abs(inner(advect_direct(a, v), w));
        const double bound = sobolev_norm(u, 1.0) * sobolev_norm(v, 1.0) * sobolev_norm(w, 0.5);
        CHECK(lhs <= C * bound);
    }
}

TEST_CASE("sobolev norms from the definition") {
    auto grid = make_grid(4);
    VorticityField w(grid);
    w.set_coeff(Mode(2, 1), Complex{0.6, -0.8});  // |w_k| = 1
    for (double alpha : {-1.0, 0.0, 0.5, 1.0, 2.0})
        CHECK(sobolev_norm(w, alpha) == doctest::Approx(std::sqrt(2.0 * std::pow(5.0, alpha))).epsilon(1e-14));
    CHECK(sobolev_norm(VorticityField(grid), 1.0) == 0.0);
    CHECK(norm(w) == doctest::Approx(sobolev_norm(w, 0.0)).epsilon(1e-14));
}

TEST_CASE("interpolation inequality") {
    auto grid = make_grid(8);
    for (std::uint64_t s = 0; s < 50; ++s) {
        VorticityField w = random_field(grid, 3000 + s, false);
        const double n0 = sobolev_norm(w, 0.0), n1 = sobolev_norm(w, 1.0), n2 = sobolev_norm(w, 2.0);
        // printed form, exponent -2(gamma-beta)/(beta-alpha); valid for
        // moderate epsilon (see the sharp form below for large epsilon)
        for (double eps : {0.1, 1.0})
            CHECK(n1 * n1 <= eps * n0 * n0 + std::pow(eps, -2.0) * n2 * n2 + 1e-12);
        // sharp Young form, exponent -(gamma-beta)/(beta-alpha); all epsilon
        for (double eps : {0.1, 1.0, 10.0})
            CHECK(n1 * n1 <= eps * n0 * n0 + std::pow(eps, -1.0) * n2 * n2 + 1e-12);
    }
}

TEST_CASE("physical values of a real field are real") {
    auto grid = make_grid(8);
    SpectralWorkspace ws(grid);
    VorticityField w = random_field(grid, 3100);
    auto vals = ws.physical_values(w);
    double max_imag = 0.0, max_abs = 0.0;
    for (const Complex& v : vals) {
        max_imag = std::max(max_imag, std::abs(v.imag()));
        max_abs = std::max(max_abs, std::abs(v.real()));
    }
    CHECK(max_imag < 1e-13 * norm(w));
    CHECK(max_abs > 0.0);
}

TEST_CASE("field json round trip") {
    auto grid = make_grid(3);
    VorticityField w = random_field(grid, 3200);
    VorticityField back = VorticityField::from_json(w.to_json());
    CHECK(rel_diff(back, w) == 0.0);
}
