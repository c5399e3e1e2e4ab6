#include <doctest.h>

#include <random>

#include "eqdiff/diffcoh.hpp"
#include "eqdiff/errors.hpp"

using namespace eqdiff;
using namespace eqdiff::diffcoh;
using linalg::Integer;
using simplicial::FiniteGroup;

namespace {

Rational Q(long a, long b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

MixedQuotient circle(std::size_t k) {
    MixedQuotient q;
    q.circle_rank = k;
    return q;
}
MixedQuotient free_group(std::size_t k) {
    MixedQuotient q;
    q.free_rank = k;
    return q;
}
MixedQuotient cyclic(long p) {
    MixedQuotient q;
    q.torsion = {Integer(p)};
    return q;
}

// H^{n-1}(C_p; ℂ/ℤ) from the periodic resolution: ℂ/ℤ, then ℤ/p in odd degrees.
MixedQuotient cyclic_point_oracle(long p, int n) {
    if (n == 0) return free_group(1);
    int k = n - 1;
    if (k == 0) return circle(1);
    if (p == 1) return MixedQuotient{};
    return k % 2 == 1 ? cyclic(p) : MixedQuotient{};
}

const ExactnessCheck* find_check(const HexagonReport& r, const std::string& seq, const std::string& pos) {
    for (const auto& c : r.checks)
        if (c.sequence == seq && c.position == pos) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("Deligne cone squares to zero") {
    for (std::size_t p : {1, 2, 3, 4}) {
        auto act = simplicial::point(FiniteGroup::cyclic(p));
        for (int n = 0; n <= 3; ++n) CHECK(deligne_complex(act, n).square_zero());
    }
    for (const auto& act : simplicial::all_point_actions(FiniteGroup::symmetric(3), 3))
        for (int n = 0; n <= 2; ++n) CHECK(deligne_complex(act, n).square_zero());
    auto d = deligne_complex(simplicial::point(FiniteGroup()), 0);
    CHECK(d.has_truncated_forms());
    CHECK(d.dim(0) == 2);  // z and ω
    CHECK(d.integral_mask(0) == std::vector<bool>{true, false});
}

TEST_CASE("differential cohomology of a point") {
    auto pt = simplicial::point(FiniteGroup());
    CHECK(differential_cohomology_zero_dim(pt, 0).group == free_group(1));
    CHECK(differential_cohomology_zero_dim(pt, 0).to_string() == "ℤ");
    CHECK(differential_cohomology_zero_dim(pt, 1).group == circle(1));
    CHECK(differential_cohomology_zero_dim(pt, 1).to_string() == "ℂ/ℤ");
    CHECK(differential_cohomology_zero_dim(pt, 2).group == MixedQuotient{});
    CHECK(differential_cohomology_zero_dim(pt, 3).group == MixedQuotient{});

    auto r = differential_cohomology_zero_dim(pt, 1);
    CHECK(r.split);
    CHECK(r.forms_part == circle(1));
    CHECK(r.integral_part.is_trivial());
}

TEST_CASE("cyclic groups on a point against the periodic resolution") {
    for (long p : {1, 2, 3, 5}) {
        auto act = simplicial::point(FiniteGroup::cyclic(static_cast<std::size_t>(p)));
        for (int n = 0; n <= 4; ++n) {
            CAPTURE(p);
            CAPTURE(n);
            CHECK(differential_cohomology_zero_dim(act, n).group == cyclic_point_oracle(p, n));
        }
    }
    CHECK(differential_cohomology_zero_dim(simplicial::point(FiniteGroup::cyclic(3)), 2).to_string() == "ℤ/3");
}

TEST_CASE("orbits: trivial group on k points and induced actions") {
    auto three = simplicial::point_action(FiniteGroup(), {{0, 1, 2}});
    CHECK(differential_cohomology_zero_dim(three, 0).group == free_group(3));
    CHECK(differential_cohomology_zero_dim(three, 1).group == circle(3));

    // C_2 swapping two points is induced from the trivial subgroup.
    auto swap = simplicial::two_points_swap();
    CHECK(differential_cohomology_zero_dim(swap, 0).group == free_group(1));
    CHECK(differential_cohomology_zero_dim(swap, 1).group == circle(1));
    CHECK(differential_cohomology_zero_dim(swap, 2).group == MixedQuotient{});
    CHECK(differential_cohomology_zero_dim(swap, 3).group == MixedQuotient{});

    // C_6 on C_6/C_2 is induced from C_2 on a point.
    auto induced = simplicial::coset_action(FiniteGroup::cyclic(6), {0, 3});
    for (int n = 0; n <= 4; ++n) {
        CAPTURE(n);
        CHECK(differential_cohomology_zero_dim(induced, n).group == cyclic_point_oracle(2, n));
    }
}

TEST_CASE("positive dimensional input is rejected") {
    CHECK_THROWS_AS(differential_cohomology_zero_dim(simplicial::free_circle(3), 1), PositiveDimensionalInput);
    CHECK_THROWS_AS(hexagon(simplicial::free_circle(2), 1), PositiveDimensionalInput);
    CHECK_THROWS_AS(differential_cohomology_zero_dim(simplicial::point(FiniteGroup()), -1), SchemaError);
}

TEST_CASE("hexagon for C_2 swapping two points") {
    auto h = hexagon(simplicial::two_points_swap(), 1);
    CHECK(h.top_row == true);
    CHECK(h.bottom_row == true);
    CHECK(h.flat_diagonal == true);
    CHECK(h.topological_diagonal == true);
    CHECK(h.all_exact());
    CHECK(h.all_commute());
    CHECK(h.commutativity.size() == 4);
    CHECK(h.maps.size() == 10);
    CHECK(h.corner("A").structure.vector_rank == 1);  // H^0(ℂ)
    CHECK(h.corner("B").structure == circle(1));      // H^0(ℂ/ℤ)
    CHECK(h.corner("C").structure == MixedQuotient{});
    CHECK(h.corner("E").structure == circle(1));      // H^0(ℂ)/H^0(ℤ)
    CHECK(h.corner("Hhat").structure == circle(1));
    // ker I is the image of a, which is H^0(ℂ) modulo the integral classes.
    auto* k = find_check(h, "topological diagonal", "Hhat");
    REQUIRE(k);
    CHECK(k->exact);
    CHECK(k->kernel == circle(1));
    CHECK(k->image == k->kernel);
    CHECK(h.to_text().find("Ĥ^1 = ℂ/ℤ") != std::string::npos);
}

TEST_CASE("hexagon for C_p on a point: the Bockstein hits Z/p") {
    for (long p : {2, 3, 5}) {
        auto act = simplicial::point(FiniteGroup::cyclic(static_cast<std::size_t>(p)));
        for (int n = 0; n <= 4; ++n) {
            CAPTURE(p);
            CAPTURE(n);
            auto h = hexagon(act, n);
            CHECK(h.all_exact());
            CHECK(h.all_commute());
            CHECK(h.beta_image_is_torsion == true);
            auto* c = find_check(h, "top", "C");
            REQUIRE(c);
            bool even = n >= 2 && n % 2 == 0;
            CHECK(c->image == (even ? cyclic(p) : MixedQuotient{}));
            CHECK(h.corner("C").structure == (n == 0 ? free_group(1) : even ? cyclic(p) : MixedQuotient{}));
        }
    }
}

TEST_CASE("every verdict is backed by stored checks") {
    auto h = hexagon(simplicial::coset_action(FiniteGroup::symmetric(3), {0}), 2);
    std::size_t top = 0, bottom = 0, flat = 0, topo = 0;
    for (const auto& c : h.checks) {
        top += c.sequence == "top";
        bottom += c.sequence == "bottom";
        flat += c.sequence == "flat diagonal";
        topo += c.sequence == "topological diagonal";
    }
    CHECK(top == 2);
    CHECK(bottom == 2);
    CHECK(flat == 3);
    CHECK(topo == 3);
    CHECK(h.all_exact());
}

TEST_CASE("reduction does not change the hexagon") {
    for (const auto& act : simplicial::all_point_actions(FiniteGroup::cyclic(4), 3)) {
        for (int n = 0; n <= 3; ++n) {
            auto raw = simplicial::cellular_double_complex(simplicial::bar_levels(act, n + 1)).column(0);
            auto a = hexagon_of_complex(raw, n), b = hexagon(act, n);
            REQUIRE(a.corners.size() == b.corners.size());
            for (std::size_t i = 0; i < a.corners.size(); ++i) CHECK(a.corners[i].structure == b.corners[i].structure);
            CHECK(a.all_exact());
        }
    }
}

TEST_CASE("sweep over small groups") {
    auto entries = hexagon_sweep({FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)}, 3, 3, 2);
    CHECK(entries.size() > 10);
    for (const auto& e : entries) {
        CAPTURE(e.group);
        CAPTURE(e.action);
        CAPTURE(e.n);
        CHECK(e.exact);
        CHECK(e.commutes);
        CHECK(e.bockstein_is_torsion);
        CHECK(e.i_onto);
        CHECK(e.ker_i_matches);
    }
    CHECK(small_groups().size() == 7);
}

TEST_CASE("S^3 conjugation corners from the supplied double complex") {
    auto dc = simplicial::s3_conjugation_double_complex(7);
    const std::vector<bool> nonzero = {true, false, false, true, true};
    for (int k = 0; k <= 4; ++k) {
        CAPTURE(k);
        auto h = hexagon_supplied(dc, k, std::nullopt);
        CHECK(h.corner("C").structure == (nonzero[k] ? free_group(1) : MixedQuotient{}));
        MixedQuotient vec;
        vec.vector_rank = nonzero[k] ? 1 : 0;
        CHECK(h.corner("D").structure == vec);
        auto h1 = hexagon_supplied(dc, k + 1, std::nullopt);
        CHECK(h1.corner("B").structure == (nonzero[k] ? circle(1) : MixedQuotient{}));
        CHECK(h.top_row == true);
        CHECK(!h.bottom_row.has_value());
        CHECK(!h.flat_diagonal.has_value());
    }
}

TEST_CASE("supplied form corners are checked") {
    auto dc = simplicial::s3_conjugation_double_complex(5);
    SuppliedForms vol;
    vol.closed = RatMatrix::from_rows({{1}});
    vol.d = RatMatrix(0, 1);
    vol.face0 = RatMatrix::from_rows({{1}});
    vol.face1 = RatMatrix::from_rows({{1}});
    vol.periods = RatMatrix::from_rows({{1}});
    auto h = hexagon_supplied(dc, 3, vol);
    CHECK(h.corner("F").structure == free_group(1));

    SuppliedForms not_invariant = vol;
    not_invariant.face1 = RatMatrix::from_rows({{2}});
    CHECK_THROWS_AS(hexagon_supplied(dc, 3, not_invariant), InconsistentCorners);

    SuppliedForms not_closed;
    not_closed.closed = RatMatrix::from_rows({{1}, {0}});
    not_closed.d = RatMatrix::from_rows({{1, 0}});
    not_closed.face0 = RatMatrix::identity(2);
    not_closed.face1 = RatMatrix::identity(2);
    CHECK_THROWS_AS(hexagon_supplied(dc, 3, not_closed), InconsistentCorners);

    SuppliedForms bad_periods = vol;
    bad_periods.closed = RatMatrix::from_rows({{1}, {0}});
    bad_periods.d = RatMatrix(0, 2);
    bad_periods.face0 = RatMatrix::identity(2);
    bad_periods.face1 = RatMatrix::identity(2);
    bad_periods.periods = RatMatrix::from_rows({{0}, {1}});
    CHECK_THROWS_AS(hexagon_supplied(dc, 3, bad_periods), InconsistentCorners);
}

TEST_CASE("lens bundle classes") {
    CHECK(flat_equivariant_chern_class(2, 1) == Rational(1, 2));
    CHECK(flat_equivariant_chern_class(3, 1) == Rational(1, 3));
    CHECK(flat_equivariant_chern_class(5, 2) == Rational(2, 5));
    CHECK(flat_equivariant_chern_class(7, 3) == Rational(3, 7));
    for (std::size_t p = 2; p <= 7; ++p) {
        CHECK(flat_equivariant_chern_class(p, 0) == 0);
        CHECK(flat_equivariant_chern_class(p, 1) == Rational(1, static_cast<long>(p)));
        for (std::size_t q = 1; q < p; ++q) {
            Rational s = flat_equivariant_chern_class(p, q) + flat_equivariant_chern_class(p, p - q);
            CHECK(s.get_den() == 1);
        }
    }
    auto l = FlatEquivariantLineBundle::lens(5, 2);
    CHECK(l.total_holonomy() == 0);
    CHECK_THROWS_AS(FlatEquivariantLineBundle::lens(3, 3), SchemaError);
}

TEST_CASE("lens class only depends on the cohomology class") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t p = 2 + rng() % 5, q = rng() % p;
        auto base = FlatEquivariantLineBundle::lens(p, q);
        std::vector<Rational> f(p);
        for (auto& x : f) x = Q(static_cast<long>(rng() % 17) - 8, 1 + static_cast<long>(rng() % 6));
        int accepted = 0;
        for (int s : {1, -1}) {
            // gauge change by a vertex function f; only one sign is a cocycle
            auto l = base;
            for (std::size_t e = 0; e < p; ++e) l.transport[e] += f[(e + 1) % p] - f[e];
            for (std::size_t g = 0; g < p; ++g)
                for (std::size_t v = 0; v < p; ++v) l.fiber[g][v] += Rational(s) * (f[(v + g) % p] - f[v]);
            Rational v;
            try {
                v = evaluate_on_fundamental_domain(l);
            } catch (const NotACocycle&) {
                continue;
            }
            CHECK(v == flat_equivariant_chern_class(p, q));
            ++accepted;
        }
        CHECK(accepted >= 1);
    }
}

TEST_CASE("homotopy formula on the interval") {
    auto pt = simplicial::point(FiniteGroup());
    IntervalCocycle pulled;
    pulled.breaks = {0, 1};
    pulled.phi = {{{Rational(2, 7)}}};
    auto r0 = homotopy_formula_check(pt, pulled);
    CHECK(r0.holds);
    CHECK(r0.lhs == std::vector<Rational>{0});
    CHECK(r0.rhs == std::vector<Rational>{0});

    IntervalCocycle aw;  // a(ω) with ω = t/3 + t^2
    aw.breaks = {0, 1};
    aw.phi = {{{0, Rational(1, 3), 1}}};
    auto r1 = homotopy_formula_check(pt, aw);
    CHECK(r1.holds);
    CHECK(r1.lhs == std::vector<Rational>{Rational(1, 3)});
    CHECK(r1.rhs == r1.lhs);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        IntervalCocycle x;
        std::size_t pieces = 1 + rng() % 4;
        x.breaks = {0};
        for (std::size_t j = 1; j < pieces; ++j) x.breaks.push_back(Q(static_cast<long>(j), static_cast<long>(pieces)));
        x.breaks.push_back(1);
        std::vector<std::vector<Rational>> polys;
        for (std::size_t j = 0; j < pieces; ++j) {
            std::vector<Rational> c(1 + rng() % 4);
            for (auto& v : c) v = Q(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 4));
            if (j > 0) {
                // match the previous piece up to an integer jump
                Rational t = x.breaks[j], prev = 0, cur = 0, pw = 1;
                for (const auto& v : polys.back()) prev += v * pw, pw *= t;
                pw = 1;
                for (const auto& v : c) cur += v * pw, pw *= t;
                c[0] += prev - cur + Rational(static_cast<long>(rng() % 5) - 2);
            }
            polys.push_back(c);
        }
        x.phi = {polys};
        CHECK(homotopy_formula_check(pt, x).holds);
    }

    IntervalCocycle broken;
    broken.breaks = {0, Rational(1, 2), 1};
    broken.phi = {{{0}, {Rational(1, 2)}}};
    CHECK_THROWS_AS(homotopy_formula_check(pt, broken), NotACocycle);

    auto swap = simplicial::two_points_swap();
    IntervalCocycle inv;
    inv.breaks = {0, 1};
    inv.phi = {{{0, Rational(3, 4)}}, {{0, Rational(3, 4)}}};
    CHECK(homotopy_formula_check(swap, inv).holds);
    inv.phi[1] = {{0, Rational(1, 4)}};
    CHECK_THROWS_AS(homotopy_formula_check(swap, inv), NotACocycle);
}
