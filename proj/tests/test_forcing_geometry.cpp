#include "doctest.h"
#include "nslab/forcing_geometry.hpp"

#include <random>

using namespace nslab;

namespace {

const ModeSet kExample1{Mode(1, 0), Mode(-1, 0), Mode(1, 1), Mode(-1, -1)};
const ModeSet kExample2{Mode(1, 0), Mode(-1, 0), Mode(0, 1), Mode(0, -1)};
const ModeSet kExample3{Mode(2, 0), Mode(-2, 0), Mode(2, 2), Mode(-2, -2)};

ModeSet random_symmetric_set(std::mt19937_64& rng, int max_entry, int pairs) {
    std::uniform_int_distribution<int> d(-max_entry, max_entry);
    ModeSet s;
    while (s.size() < static_cast<std::size_t>(2 * pairs)) {
        int a = d(rng), b = d(rng);
        if (a == 0 && b == 0) continue;
        s.insert(Mode(a, b));
        s.insert(Mode(-a, -b));
    }
    return s;
}

// independent membership oracle: BFS closure of sums of +-generators inside a
// box, which reaches every lattice point of the box for small generators
bool lattice_generates_z2_bfs(const ModeSet& z0, int box) {
    std::vector<std::vector<char>> seen(2 * box + 1, std::vector<char>(2 * box + 1, 0));
    std::vector<std::pair<int, int>> frontier{{0, 0}};
    seen[box][box] = 1;
    while (!frontier.empty()) {
        auto [x, y] = frontier.back();
        frontier.pop_back();
        for (const Mode& g : z0) {
            int nx = x + g.k1, ny = y + g.k2;
            if (std::abs(nx) > box || std::abs(ny) > box) continue;
            if (!seen[nx + box][ny + box]) {
                seen[nx + box][ny + box] = 1;
                frontier.push_back({nx, ny});
            }
        }
    }
    return seen[box + 1][box] && seen[box][box + 1];
}

}  // namespace

TEST_CASE("symmetrize closes under negation") {
    ModeSet in{Mode(1, 0), Mode(1, 1)};
    ModeSet expect{Mode(1, 0), Mode(-1, 0), Mode(1, 1), Mode(-1, -1)};
    CHECK(symmetrize(in) == expect);

    CHECK(symmetrize(kExample2) == kExample2);

    ModeSet single{Mode(2, 3)};
    ModeSet single_sym{Mode(2, 3), Mode(-2, -3)};
    CHECK(symmetrize(single) == single_sym);

    CHECK_THROWS_AS(symmetrize(ModeSet{}), std::invalid_argument);
    CHECK_THROWS_AS(Mode(0, 0), std::invalid_argument);
}

TEST_CASE("generated_lattice on the worked examples") {
    {
        auto [basis, gcd_det] = generated_lattice(kExample1);
        CHECK(gcd_det == 1);
        REQUIRE(basis.g2.has_value());
        CHECK(std::labs(cross(basis.g1, *basis.g2)) == 1);  // generates Z^2
    }
    {
        auto [basis, gcd_det] = generated_lattice(kExample3);
        CHECK(gcd_det == 4);
        REQUIRE(basis.g2.has_value());
        CHECK(basis.g1 == Mode(2, 0));
        CHECK(*basis.g2 == Mode(0, 2));
    }
    {
        auto [basis, gcd_det] = generated_lattice(ModeSet{Mode(1, 0), Mode(-1, 0)});
        CHECK(gcd_det == 0);
        CHECK_FALSE(basis.g2.has_value());
        CHECK(basis.g1 == Mode(1, 0));
    }
}

TEST_CASE("check_conditions on the worked examples") {
    CHECK(check_conditions(kExample1) == std::pair{true, true});
    CHECK(check_conditions(kExample2) == std::pair{false, true});
    CHECK(check_conditions(kExample3) == std::pair{true, false});
}

TEST_CASE("zn_step enumerates admissible sums") {
    ModeSet expect{Mode(2, 1), Mode(0, 1), Mode(0, -1), Mode(-2, -1)};
    CHECK(zn_step(kExample1, kExample1) == expect);
    CHECK(zn_step(kExample2, kExample2).empty());
    CHECK(zn_step(ModeSet{}, kExample1).empty());
}

TEST_CASE("zn_step preserves symmetry") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        ModeSet z0 = random_symmetric_set(rng, 4, 1 + trial % 3);
        ModeSet out = zn_step(z0, z0);
        CHECK(out.is_symmetric());
    }
}

TEST_CASE("zinfty_ball on the worked examples") {
    {
        ModeSet got = zinfty_ball(kExample1, 2.0);
        ModeSet expect;
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b) {
                if (a == 0 && b == 0) continue;
                if (a * a + b * b <= 4) expect.insert(Mode(a, b));
            }
        CHECK(got == expect);
    }
    CHECK(zinfty_ball(kExample2, 5.0) == kExample2);  // all equal norms: Z_inf = Z0
    {
        ModeSet got = zinfty_ball(kExample3, 3.0);
        ModeSet expect{Mode(2, 0), Mode(-2, 0), Mode(0, 2), Mode(0, -2),
                       Mode(2, 2), Mode(-2, -2), Mode(2, -2), Mode(-2, 2)};
        CHECK(got == expect);
    }
    CHECK(zinfty_ball(kExample1, 0.5).empty());  // radius below min |k|
}

TEST_CASE("zinfty equals generated lattice intersected with the ball") {
    std::mt19937_64 rng(11);
    int admissible = 0;
    while (admissible < 60) {
        ModeSet z0 = random_symmetric_set(rng, 5, 1 + static_cast<int>(rng() % 3));
        auto [a1, a2] = check_conditions(z0);
        // needs a non-collinear pair of distinct norms for Prop-gen equality
        bool has_pair = false;
        for (const Mode& a : z0)
            for (const Mode& b : z0)
                if (cross(a, b) != 0 && a.norm2() != b.norm2()) has_pair = true;
        if (!has_pair) continue;
        (void)a1; (void)a2;
        ++admissible;
        const double radius = 8.0;
        ModeSet bfs = zinfty_ball(z0, radius);
        auto [basis, gd] = generated_lattice(z0);
        (void)gd;
        ModeSet oracle;
        const int r = static_cast<int>(radius);
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b) {
                if (a == 0 && b == 0) continue;
                Mode m(a, b);
                if (static_cast<double>(m.norm2()) <= radius * radius && lattice_contains(basis, m))
                    oracle.insert(m);
            }
        CHECK(bfs == oracle);
    }
}

TEST_CASE("gcd criterion matches lattice index and BFS oracle") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 2000; ++trial) {
        ModeSet z0 = random_symmetric_set(rng, 5, 1 + static_cast<int>(rng() % 3));
        auto [basis, gcd_det] = generated_lattice(z0);
        const bool a2 = gcd_det == 1;
        bool index_one = basis.g2.has_value() && std::labs(cross(basis.g1, *basis.g2)) == 1;
        CHECK(a2 == index_one);
        CHECK(a2 == lattice_generates_z2_bfs(z0, 24));
    }
}

TEST_CASE("classify reproduces the three worked examples") {
    CHECK(classify(kExample1).classification == ForcingClass::FullSpace);
    CHECK(classify(kExample2).classification == ForcingClass::FiniteOU);

    GeometryReport r3 = classify(kExample3);
    CHECK(r3.classification == ForcingClass::ProperSublattice);
    CHECK(r3.lattice_basis.g1 == Mode(2, 0));
    REQUIRE(r3.lattice_basis.g2.has_value());
    CHECK(*r3.lattice_basis.g2 == Mode(0, 2));
    REQUIRE(r3.periods.has_value());
    // v1 = 2 pi (2,0)/4 = (pi, 0): stored as multiples of pi
    CHECK(r3.periods->first[0].num == 1);
    CHECK(r3.periods->first[0].den == 1);
    CHECK(r3.periods->first[1].num == 0);
    CHECK(r3.periods->second[1].num == 1);
}

TEST_CASE("classify is invariant under global negation") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        ModeSet z0 = random_symmetric_set(rng, 5, 1 + static_cast<int>(rng() % 3));
        ModeSet negated;
        for (const Mode& m : z0) negated.insert(-m);
        CHECK(classify(z0).classification == classify(negated).classification);
    }
}

TEST_CASE("classification invariants") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 500; ++trial) {
        ModeSet z0 = random_symmetric_set(rng, 5, 1 + static_cast<int>(rng() % 3));
        GeometryReport rep = classify(z0);
        CHECK(rep.a2 == (rep.gcd_det == 1));
        if (rep.classification == ForcingClass::FullSpace) CHECK((rep.a1 && rep.a2));
        if (rep.a1 && rep.a2) CHECK(rep.classification == ForcingClass::FullSpace);
    }
}
