#include "nslab/forcing_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace nslab {

bool ModeSet::is_symmetric() const {
    return std::all_of(begin(), end(), [this](const Mode& m) { return contains(-m); });
}

Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    long g = std::gcd(std::abs(num), std::abs(den));
    if (g == 0) return {0, 1};
    num /= g;
    den /= g;
    if (den < 0) { num = -num; den = -den; }
    return {num, den};
}

std::string to_string(ForcingClass c) {
    switch (c) {
        case ForcingClass::FullSpace: return "FullSpace";
        case ForcingClass::FiniteOU: return "FiniteOU";
        case ForcingClass::ProperSublattice: return "ProperSublattice";
    }
    return "?";
}

ModeSet symmetrize(const ModeSet& z0) {
    if (z0.empty()) throw std::invalid_argument("symmetrize: empty mode set");
    ModeSet out = z0;
    for (const Mode& m : z0) out.insert(-m);
    return out;
}

namespace {

bool all_collinear(const ModeSet& s) {
    const Mode& first = *s.begin();
    return std::all_of(s.begin(), s.end(), [&](const Mode& m) { return cross(first, m) == 0; });
}

bool all_equal_norm(const ModeSet& s) {
    const long n0 = s.begin()->norm2();
    return std::all_of(s.begin(), s.end(), [&](const Mode& m) { return m.norm2() == n0; });
}

}  // namespace

std::pair<LatticeBasis, long> generated_lattice(const ModeSet& z0) {
    if (z0.empty()) throw std::invalid_argument("generated_lattice: empty mode set");

    long gcd_det = 0;
    for (auto it = z0.begin(); it != z0.end(); ++it)
        for (auto jt = std::next(it); jt != z0.end(); ++jt)
            gcd_det = std::gcd(gcd_det, std::labs(cross(*it, *jt)));

    std::vector<std::array<long, 2>> v;
    for (const Mode& m : z0) v.push_back({m.k1, m.k2});

    if (all_collinear(z0)) {
        // Rank 1: primitive direction times the gcd of multiples.
        const Mode d0 = *z0.begin();
        long c = std::gcd(std::labs(d0.k1), std::labs(d0.k2));
        std::array<long, 2> dir = {d0.k1 / c, d0.k2 / c};
        long mult = 0;
        for (auto& w : v) {
            long mi = (dir[0] != 0) ? w[0] / dir[0] : w[1] / dir[1];
            mult = std::gcd(mult, std::labs(mi));
        }
        std::array<long, 2> g = {dir[0] * mult, dir[1] * mult};
        if (g[1] < 0 || (g[1] == 0 && g[0] < 0)) { g[0] = -g[0]; g[1] = -g[1]; }
        LatticeBasis basis;
        basis.g1 = Mode(static_cast<int>(g[0]), static_cast<int>(g[1]));
        basis.g2 = std::nullopt;
        return {basis, gcd_det};
    }

    // Column Hermite reduction of the 2 x m matrix. First bring one vector to
    // second component c = gcd of all second components via extended gcd
    // accumulation, then reduce the rest to the horizontal axis.
    std::array<long, 2> w = v.front();
    for (std::size_t i = 1; i < v.size(); ++i) {
        long a = w[1], b = v[i][1];
        if (b == 0) continue;
        if (a == 0) { w = v[i]; continue; }
        // extended gcd: x*a + y*b = g
        long x0 = 1, y0 = 0, x1 = 0, y1 = 1, r0 = a, r1 = b;
        while (r1 != 0) {
            long q = r0 / r1;
            std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
            std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
            std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
        }
        w = {x0 * w[0] + y0 * v[i][0], x0 * w[1] + y0 * v[i][1]};
    }
    long c = std::labs(w[1]);
    if (w[1] < 0) { w[0] = -w[0]; w[1] = -w[1]; }

    long a = 0;
    for (auto& u : v) {
        // u - (u2/c) * w lands on the horizontal axis
        long t = u[1] / c;
        a = std::gcd(a, std::labs(u[0] - t * w[0]));
    }
    // not collinear, so the horizontal sublattice is nontrivial
    long b = ((w[0] % a) + a) % a;

    LatticeBasis basis;
    basis.g1 = Mode(static_cast<int>(a), 0);
    basis.g2 = Mode(static_cast<int>(b), static_cast<int>(c));
    return {basis, gcd_det};
}

bool lattice_contains(const LatticeBasis& basis, const Mode& m) {
    if (!basis.g2) {
        long c = cross(basis.g1, m);
        if (c != 0) return false;
        long d = (basis.g1.k1 != 0) ? basis.g1.k1 : basis.g1.k2;
        long n = (basis.g1.k1 != 0) ? m.k1 : m.k2;
        return n % d == 0;
    }
    const Mode& u = basis.g1;
    const Mode& v = *basis.g2;
    long det = cross(u, v);
    long n1 = static_cast<long>(m.k1) * v.k2 - static_cast<long>(m.k2) * v.k1;  // Cramer
    long n2 = static_cast<long>(u.k1) * m.k2 - static_cast<long>(u.k2) * m.k1;
    return n1 % det == 0 && n2 % det == 0;
}

std::pair<bool, bool> check_conditions(const ModeSet& z0) {
    if (!z0.is_symmetric()) throw std::invalid_argument("check_conditions: mode set must be symmetric");
    bool a1 = !all_equal_norm(z0);
    auto [basis, gcd_det] = generated_lattice(z0);
    (void)basis;
    return {a1, gcd_det == 1};
}

ModeSet zn_step(const ModeSet& prev, const ModeSet& z0) {
    ModeSet out;
    for (const Mode& l : prev)
        for (const Mode& j : z0) {
            if (dot(l.perp(), j) == 0) continue;      // collinear step
            if (l.norm2() == j.norm2()) continue;     // equal-norm step
            if (l.k1 + j.k1 == 0 && l.k2 + j.k2 == 0) continue;
            out.insert(Mode(l.k1 + j.k1, l.k2 + j.k2));
        }
    return out;
}

ModeSet zinfty_ball(const ModeSet& z0, double radius) {
    if (z0.empty()) throw std::invalid_argument("zinfty_ball: empty mode set");
    if (!z0.is_symmetric()) throw std::invalid_argument("zinfty_ball: mode set must be symmetric");

    double max_norm = 0.0;
    for (const Mode& m : z0) max_norm = std::max(max_norm, std::sqrt(static_cast<double>(m.norm2())));
    const double safety = radius + 2.0 * max_norm;
    const double safety2 = safety * safety;

    // BFS closure; the first step from the origin is unconstrained, so the
    // seed is Z0 itself.
    std::set<Mode> visited(z0.begin(), z0.end());
    std::vector<Mode> frontier(z0.begin(), z0.end());
    while (!frontier.empty()) {
        std::vector<Mode> next;
        for (const Mode& l : frontier)
            for (const Mode& j : z0) {
                if (dot(l.perp(), j) == 0) continue;
                if (l.norm2() == j.norm2()) continue;
                int m1 = l.k1 + j.k1, m2 = l.k2 + j.k2;
                if (m1 == 0 && m2 == 0) continue;
                Mode m(m1, m2);
                if (static_cast<double>(m.norm2()) > safety2) continue;
                if (visited.insert(m).second) next.push_back(m);
            }
        frontier = std::move(next);
    }

    ModeSet out;
    const double r2 = radius * radius;
    for (const Mode& m : visited)
        if (static_cast<double>(m.norm2()) <= r2) out.insert(m);
    return out;
}

GeometryReport classify(const ModeSet& z0) {
    if (z0.empty()) throw std::invalid_argument("classify: empty mode set");
    if (!z0.is_symmetric()) throw std::invalid_argument("classify: mode set must be symmetric");

    GeometryReport rep;
    rep.is_symmetric = true;
    auto [basis, gcd_det] = generated_lattice(z0);
    rep.lattice_basis = basis;
    rep.gcd_det = gcd_det;
    rep.a1 = !all_equal_norm(z0);
    rep.a2 = (gcd_det == 1);

    if (all_collinear(z0) || all_equal_norm(z0)) {
        rep.classification = ForcingClass::FiniteOU;
    } else if (rep.a1 && rep.a2) {
        rep.classification = ForcingClass::FullSpace;
    } else {
        rep.classification = ForcingClass::ProperSublattice;
        auto period_of = [](const Mode& k) {
            long n2 = k.norm2();
            return std::array<Rational, 2>{make_rational(2L * k.k1, n2), make_rational(2L * k.k2, n2)};
        };
        rep.periods = std::make_pair(period_of(basis.g1), period_of(*basis.g2));
    }
    return rep;
}

}  // namespace nslab
