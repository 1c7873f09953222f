#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nslab {

/// Integer wave vector. The origin is excluded everywhere; constructing a
/// zero mode throws.
struct Mode {
    int k1 = 0;
    int k2 = 0;

    Mode() = default;
    Mode(int a, int b) : k1(a), k2(b) {
        if (k1 == 0 && k2 == 0) throw std::invalid_argument("Mode: (0,0) is not a valid wave vector");
    }

    Mode perp() const { return Mode(k2, -k1); }
    Mode operator-() const { return Mode(-k1, -k2); }
    long norm2() const { return static_cast<long>(k1) * k1 + static_cast<long>(k2) * k2; }
    int maxnorm() const { return std::max(std::abs(k1), std::abs(k2)); }

    friend bool operator==(const Mode& a, const Mode& b) { return a.k1 == b.k1 && a.k2 == b.k2; }
    friend auto operator<=>(const Mode& a, const Mode& b) {
        if (auto c = a.k1 <=> b.k1; c != 0) return c;
        return a.k2 <=> b.k2;
    }
};

inline long dot(const Mode& a, const Mode& b) {
    return static_cast<long>(a.k1) * b.k1 + static_cast<long>(a.k2) * b.k2;
}

/// det(k,l) of the 2x2 matrix with columns k and l; zero iff collinear.
inline long cross(const Mode& a, const Mode& b) {
    return static_cast<long>(a.k1) * b.k2 - static_cast<long>(a.k2) * b.k1;
}

/// Finite set of integer wave vectors; the forcing geometry Z0 lives here.
class ModeSet {
public:
    ModeSet() = default;
    explicit ModeSet(std::initializer_list<Mode> ms) : modes_(ms) {}
    explicit ModeSet(const std::vector<Mode>& ms) : modes_(ms.begin(), ms.end()) {}

    void insert(const Mode& m) { modes_.insert(m); }
    bool contains(const Mode& m) const { return modes_.count(m) != 0; }
    bool empty() const { return modes_.empty(); }
    std::size_t size() const { return modes_.size(); }
    auto begin() const { return modes_.begin(); }
    auto end() const { return modes_.end(); }

    bool is_symmetric() const;

    friend bool operator==(const ModeSet& a, const ModeSet& b) { return a.modes_ == b.modes_; }

private:
    std::set<Mode> modes_;
};

/// Exact rational number; used for the sublattice periods 2*pi*k/|k|^2,
/// stored as the coefficient of pi.
struct Rational {
    long num = 0;
    long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational make_rational(long num, long den);

enum class ForcingClass {
    FullSpace,        ///< A1 and A2 hold: unique ergodicity on all of H
    FiniteOU,         ///< all modes collinear or of one Euclidean norm: OU process on span(Z0)
    ProperSublattice  ///< <Z0> is a proper sublattice: dynamics lives on a periodic subspace
};

/// Generators of the sublattice <Z0>. Rank-1 sets (all collinear) have no
/// second generator.
struct LatticeBasis {
    Mode g1{1, 0};
    std::optional<Mode> g2;
};

struct GeometryReport {
    bool is_symmetric = false;
    bool a1 = false;           ///< two elements of different Euclidean norm exist
    bool a2 = false;           ///< integer combinations of Z0 generate Z^2
    long gcd_det = 0;          ///< gcd of |det(k,l)| over pairs; 0 iff all collinear
    LatticeBasis lattice_basis;
    ForcingClass classification = ForcingClass::FiniteOU;
    /// Translation periods v_i = 2*pi*k_i/|k_i|^2 of the invariant subspace,
    /// present only for ProperSublattice; components are multiples of pi.
    std::optional<std::pair<std::array<Rational, 2>, std::array<Rational, 2>>> periods;
};

std::string to_string(ForcingClass c);

/// Closure of z0 under k -> -k. Throws on empty input.
ModeSet symmetrize(const ModeSet& z0);

/// Basis of the sublattice generated by integer combinations of z0 (Hermite
/// style column reduction, canonical upper-triangular positive-diagonal
/// output) together with gcd over all pairs of |det(k,l)| (0 if collinear).
std::pair<LatticeBasis, long> generated_lattice(const ModeSet& z0);

/// Conditions A1 (two distinct Euclidean norms) and A2 (gcd of pair
/// determinants equals 1). Expects a symmetric set.
std::pair<bool, bool> check_conditions(const ModeSet& z0);

/// One step of the mode recursion: { l+j : j in z0, l in prev,
/// <l_perp, j> != 0, |j| != |l| } with the origin removed.
ModeSet zn_step(const ModeSet& prev, const ModeSet& z0);

/// Z_infinity intersected with the Euclidean ball of the given radius,
/// computed by breadth-first search seeded with z0 (the first step from the
/// origin is unconstrained). Walks are explored out to
/// radius + 2*max|k in z0| before intersecting with the ball so that modes
/// reachable only through excursions are found.
ModeSet zinfty_ball(const ModeSet& z0, double radius);

/// Membership test for the sublattice spanned by the basis.
bool lattice_contains(const LatticeBasis& basis, const Mode& m);

/// Full geometric classification of a symmetric forcing set.
GeometryReport classify(const ModeSet& z0);

}  // namespace nslab
