#include "nslab/spectral_ops.hpp"

#include <cmath>

namespace nslab {

namespace {

constexpr double kInv2Pi = 0.15915494309189533577;   // 1/(2 pi)
constexpr double kInv4Pi = 0.079577471545947667884;  // 1/(4 pi)

// <j_perp, l> with j_perp = (j2, -j1)
inline double perp_dot(const Mode& j, const Mode& l) {
    return static_cast<double>(j.k2) * l.k1 - static_cast<double>(j.k1) * l.k2;
}

struct FullMode {
    Mode k;
    Complex c;
    double inv_n2;
};

std::vector<FullMode> full_lattice(const VorticityField& w) {
    std::vector<FullMode> out;
    out.reserve(2 * w.half_count());
    const auto& grid = *w.grid();
    for (std::size_t i = 0; i < w.half_count(); ++i) {
        const Mode& k = grid.mode(i);
        const double inv = 1.0 / static_cast<double>(k.norm2());
        out.push_back({k, w[i], inv});
        out.push_back({-k, std::conj(w[i]), inv});
    }
    return out;
}

}  // namespace

VelocityField biot_savart(const VorticityField& w) {
    VelocityField u;
    u.grid = w.grid();
    u.u1.resize(w.half_count());
    u.u2.resize(w.half_count());
    const auto& grid = *w.grid();
    const Complex mi{0.0, -1.0};
    for (std::size_t i = 0; i < w.half_count(); ++i) {
        const Mode& k = grid.mode(i);
        const double inv = 1.0 / static_cast<double>(k.norm2());
        u.u1[i] = mi * w[i] * (static_cast<double>(k.k2) * inv);
        u.u2[i] = mi * w[i] * (static_cast<double>(-k.k1) * inv);
    }
    return u;
}

VorticityField advect_direct(const VorticityField& a, const VorticityField& b) {
    check_same_grid(a, b, "advect_direct");
    const auto& grid = *a.grid();
    VorticityField out(a.grid());
    const auto fa = full_lattice(a);
    const auto fb = full_lattice(b);
    for (const auto& j : fa)
        for (const auto& l : fb) {
            const int k1 = j.k.k1 + l.k.k1, k2 = j.k.k2 + l.k.k2;
            if (k1 == 0 && k2 == 0) continue;
            Mode k(k1, k2);
            if (!grid.retained(k) || !SpectralGrid::in_upper_half(k)) continue;
            const double kern = kInv2Pi * perp_dot(j.k, l.k) * j.inv_n2;
            out[grid.index(k)] += kern * j.c * l.c;
        }
    return out;
}

namespace {

// shared kernel for the symmetrized double sums
VorticityField bilinear_sum(const VorticityField& a, const VorticityField& b, double prefactor) {
    const auto& grid = *a.grid();
    VorticityField out(a.grid());
    const auto fa = full_lattice(a);
    const auto fb = full_lattice(b);
    for (const auto& j : fa)
        for (const auto& l : fb) {
            const int k1 = j.k.k1 + l.k.k1, k2 = j.k.k2 + l.k.k2;
            if (k1 == 0 && k2 == 0) continue;
            Mode k(k1, k2);
            if (!grid.retained(k) || !SpectralGrid::in_upper_half(k)) continue;
            const double kern = prefactor * perp_dot(j.k, l.k) * (l.inv_n2 - j.inv_n2);
            out[grid.index(k)] += kern * j.c * l.c;
        }
    return out;
}

}  // namespace

VorticityField nonlinearity_direct(const VorticityField& w) {
    return bilinear_sum(w, w, -kInv4Pi);
}

VorticityField symmetrized_direct(const VorticityField& w, const VorticityField& v) {
    check_same_grid(w, v, "symmetrized_direct");
    return bilinear_sum(w, v, -kInv2Pi);
}

VorticityField symmetrized_adjoint_direct(const VorticityField& w, const VorticityField& eta) {
    check_same_grid(w, eta, "symmetrized_adjoint_direct");
    const auto& grid = *w.grid();
    VorticityField out(w.grid());
    const auto fw = full_lattice(w);
    const auto fe = full_lattice(eta);
    // (L* eta)_m = (1/2pi) sum_j <j_perp, m> (1/|m|^2 - 1/|j|^2) w_j eta_{m-j}
    for (const auto& j : fw)
        for (const auto& e : fe) {
            const int m1 = j.k.k1 + e.k.k1, m2 = j.k.k2 + e.k.k2;  // m = j + (m - j)
            if (m1 == 0 && m2 == 0) continue;
            Mode m(m1, m2);
            if (!grid.retained(m) || !SpectralGrid::in_upper_half(m)) continue;
            const double inv_m2 = 1.0 / static_cast<double>(m.norm2());
            const double kern = kInv2Pi * perp_dot(j.k, m) * (inv_m2 - j.inv_n2);
            out[grid.index(m)] += kern * j.c * e.c;
        }
    return out;
}

double sobolev_norm(const VorticityField& w, double alpha) {
    const auto& grid = *w.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < w.half_count(); ++i) {
        const double n2 = static_cast<double>(grid.mode(i).norm2());
        s += std::pow(n2, alpha) * std::norm(w[i]);
    }
    return std::sqrt(2.0 * s);
}

double sobolev_norm(const VelocityField& u, double alpha) {
    const auto& grid = *u.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < u.u1.size(); ++i) {
        const double n2 = static_cast<double>(grid.mode(i).norm2());
        s += std::pow(n2, alpha) * (std::norm(u.u1[i]) + std::norm(u.u2[i]));
    }
    return std::sqrt(2.0 * s);
}

double kinetic_energy(const VorticityField& w) {
    const auto& grid = *w.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < w.half_count(); ++i)
        s += std::norm(w[i]) / static_cast<double>(grid.mode(i).norm2());
    return 2.0 * s;
}

double enstrophy(const VorticityField& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.half_count(); ++i) s += std::norm(w[i]);
    return 2.0 * s;
}

}  // namespace nslab
