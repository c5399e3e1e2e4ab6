#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "eqdiff/cartan.hpp"
#include "form_helpers.hpp"

using namespace eqdiff;
using namespace eqdiff::cartan;
using testutil::random_form;
using testutil::random_homogeneous;

namespace {

EquivariantForm P(const std::string& s, std::size_t k, std::size_t m) { return EquivariantForm::parse(s, k, m); }

bool degree_raised_by_one(const EquivariantForm& in, const EquivariantForm& out) {
    // Termwise: every output term comes from some input term of degree one less.
    if (out.is_zero()) return true;
    unsigned deg = in.terms().begin()->first.cartan_degree();
    return in.is_homogeneous(deg) && out.is_homogeneous(deg + 1);
}

// Invariants for the rotation of the plane and for su(2) on R^3, built from
// generators by hand.
std::vector<EquivariantForm> rotation_invariants() {
    return {P("x1^2 + x2^2", 1, 2), P("x1*dx2 - x2*dx1", 1, 2), P("dx1^dx2", 1, 2), P("u1", 1, 2),
            P("x1*dx1 + x2*dx2", 1, 2)};
}

std::vector<EquivariantForm> su2_invariants() {
    return {P("x1^2 + x2^2 + x3^2", 3, 3),
            P("u1*x1 + u2*x2 + u3*x3", 3, 3),
            P("u1^2 + u2^2 + u3^2", 3, 3),
            P("u1*dx1 + u2*dx2 + u3*dx3", 3, 3),
            P("x1*dx1 + x2*dx2 + x3*dx3", 3, 3),
            P("x1*dx2^dx3 + x2*dx3^dx1 + x3*dx1^dx2", 3, 3),
            P("dx1^dx2^dx3", 3, 3)};
}

std::size_t binomial(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

int parity_by_cycles(const std::vector<std::size_t>& perm) {
    std::vector<bool> seen(perm.size(), false);
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = perm[j] - 1) {
            seen[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

}  // namespace

TEST_CASE("form grammar parses, prints and round-trips") {
    auto w = P("x1*dx2 - x2*dx1", 1, 2);
    CHECK(w.terms().size() == 2);
    CHECK(P("(x1 + x2)^2", 0, 2) == P("x1^2 + 2*x1*x2 + x2^2", 0, 2));
    CHECK(P("dx2^dx1", 0, 2) == -P("dx1^dx2", 0, 2));
    CHECK(P("dx1^dx1", 0, 2).is_zero());
    CHECK(P("3/6*u1", 1, 1) == P("1/2*u1", 1, 1));
    CHECK(P("0", 1, 1).to_string() == "0");
    CHECK(P("-x1 + 2", 0, 1).to_string() == "2 - x1");
    CHECK_THROWS_AS(P("x3", 0, 2), SchemaError);
    CHECK_THROWS_AS(P("u1", 0, 2), SchemaError);
    CHECK_THROWS_AS(P("x1 +", 0, 2), SchemaError);
    CHECK_THROWS_AS(P("x1 ) ", 0, 2), SchemaError);
    CHECK_THROWS_AS(P("1/0", 0, 2), SchemaError);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        auto f = random_form(rng, 2, 3);
        CHECK(P(f.to_string(), 2, 3) == f);
    }
}

TEST_CASE("graded commutativity of the product") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 60; ++i) {
        unsigned a = static_cast<unsigned>(rng() % 5), b = static_cast<unsigned>(rng() % 5);
        auto f = random_homogeneous(rng, 2, 3, a), g = random_homogeneous(rng, 2, 3, b);
        Rational sign = (a * b) % 2 ? -1 : 1;
        CHECK(f * g == g * f * sign);
    }
}

TEST_CASE("fundamental vector fields and brackets") {
    auto rot = LinearAction::rotation_plane();
    rot.validate();
    auto v = fundamental_vector_field(rot, 0);
    CHECK(v[0] == P("-x2", 1, 2));
    CHECK(v[1] == P("x1", 1, 2));
    auto zero = fundamental_vector_field(rot, std::vector<Rational>{0});
    CHECK(std::all_of(zero.begin(), zero.end(), [](const EquivariantForm& f) { return f.is_zero(); }));

    auto su = LinearAction::su2_vector();
    su.validate();
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            std::vector<Rational> ab(3);
            for (std::size_t e = 0; e < 3; ++e) ab[e] = -su.algebra.c[a][b][e];
            CHECK(bracket(fundamental_vector_field(su, a), fundamental_vector_field(su, b)) ==
                  fundamental_vector_field(su, ab));
        }
}

TEST_CASE("Lie algebra and representation validation") {
    CHECK_NOTHROW(LieAlgebra::su2().validate());
    auto bad = LieAlgebra::su2();
    bad.c[0][1][2] = 2;
    CHECK_THROWS_AS(bad.validate(), AxiomViolation);
    auto act = LinearAction::su2_vector();
    act.rho[2] = act.rho[2].scaled(2);
    CHECK_THROWS_AS(act.validate(), AxiomViolation);
}

TEST_CASE("Cartan differential examples") {
    auto rot = LinearAction::rotation_plane();
    CHECK(cartan_d(rot, P("1", 1, 2)).is_zero());
    auto w = P("x1*dx2 - x2*dx1", 1, 2);
    auto dw = cartan_d(rot, w);
    CHECK(dw == P("2*dx1^dx2 + (x1^2 + x2^2)*u1", 1, 2));
    CHECK(cartan_d(rot, dw).is_zero());
}

TEST_CASE("invariance") {
    auto rot = LinearAction::rotation_plane();
    CHECK(is_invariant(rot, P("x1^2 + x2^2", 1, 2)));
    CHECK_FALSE(is_invariant(rot, P("x1", 1, 2)));
    CHECK(is_invariant(rot, P("u1*(x1^2 + x2^2)", 1, 2)));
    for (const auto& f : rotation_invariants()) CHECK(is_invariant(rot, f));
    auto su = LinearAction::su2_vector();
    for (const auto& f : su2_invariants()) CHECK(is_invariant(su, f));
    CHECK_FALSE(is_invariant(su, P("u1", 3, 3)));
    CHECK_FALSE(is_invariant(su, P("u1*x2", 3, 3)));

    // A reflection reverses the rotation, so it acts on u by -1.
    auto refl = rot;
    refl.finite.push_back({RatMatrix::from_rows({{1, 0}, {0, -1}}), RatMatrix::from_rows({{-1}})});
    refl.validate();
    CHECK(is_invariant(refl, P("x1^2 + x2^2", 1, 2)));
    CHECK_FALSE(is_invariant(refl, P("u1", 1, 2)));
    CHECK(is_invariant(refl, P("u1^2", 1, 2)));
    CHECK(is_invariant(refl, P("u1*dx1^dx2", 1, 2)));
    CHECK(is_invariant(refl, P("u1*(x1*dx2 - x2*dx1)", 1, 2)));
    CHECK(is_invariant(refl, cartan_d(refl, P("u1*(x1*dx2 - x2*dx1)", 1, 2))));
}

TEST_CASE("d_C on invariants: degree +1, square zero, invariance preserved") {
    std::mt19937_64 rng(13);
    struct Case {
        LinearAction act;
        std::vector<EquivariantForm> gens;
    };
    std::vector<Case> cases{{LinearAction::rotation_plane(), rotation_invariants()},
                            {LinearAction::su2_vector(), su2_invariants()}};
    for (const auto& c : cases)
        for (int i = 0; i < 40; ++i) {
            // product of up to three generators, homogeneous by construction
            EquivariantForm w = EquivariantForm::constant(c.act.k(), c.act.m, 1 + static_cast<int>(rng() % 3));
            std::size_t len = 1 + rng() % 3;
            for (std::size_t j = 0; j < len; ++j) w = w * c.gens[rng() % c.gens.size()];
            if (w.is_zero()) continue;
            REQUIRE(is_invariant(c.act, w));
            auto dw = cartan_d(c.act, w);
            CHECK(degree_raised_by_one(w, dw));
            CHECK(cartan_d(c.act, dw).is_zero());
            CHECK(is_invariant(c.act, dw));
        }
}

TEST_CASE("d_C squared equals the u-contracted Lie derivative on random forms") {
    std::mt19937_64 rng(14);
    std::vector<LinearAction> acts{LinearAction::rotation_plane(), LinearAction::su2_vector()};
    int nonzero = 0;
    for (const auto& act : acts)
        for (int i = 0; i < 100; ++i) {
            unsigned deg = static_cast<unsigned>(rng() % 6);
            auto w = random_homogeneous(rng, act.k(), act.m, deg);
            auto dw = cartan_d(act, w);
            CHECK(degree_raised_by_one(w, dw));
            auto lhs = cartan_d(act, dw);
            CHECK(lhs == lie_operator(act, w));
            if (!lhs.is_zero()) ++nonzero;
        }
    CHECK(nonzero > 100);
}

TEST_CASE("Cartan derivative agrees with Cartan's formula for Lie derivatives") {
    std::mt19937_64 rng(15);
    auto su = LinearAction::su2_vector();
    for (int i = 0; i < 50; ++i) {
        auto w = random_form(rng, 3, 3);
        auto v = fundamental_vector_field(su, rng() % 3);
        CHECK(lie_derivative(v, w) == exterior_d(interior(v, w)) + interior(v, exterior_d(w)));
        CHECK(exterior_d(exterior_d(w)).is_zero());
    }
}

TEST_CASE("truncated Cartan cohomology") {
    auto rot = LinearAction::rotation_plane();
    for (int n = 0; n <= 5; ++n) {
        auto r = cartan_cohomology_truncated(rot, n, 6);
        CHECK(r.dimension == (n % 2 == 0 ? 1u : 0u));
        CHECK_FALSE(r.saturated);
        CHECK(cartan_cohomology_dimension(rot, n, 8) == r.dimension);
    }
    CHECK(cartan_cohomology_truncated(LinearAction::trivial(1, 1), 0, 4).dimension == 1);
    CHECK(cartan_cohomology_truncated(LinearAction::trivial(1, 1), 2, 4).dimension == 1);
    CHECK(cartan_cohomology_truncated(LinearAction::trivial(0, 2), 1, 4).dimension == 0);

    // Invariant polynomials on su(2) are generated by the quadratic Casimir.
    auto su = LinearAction::su2_vector();
    CHECK(cartan_cohomology_truncated(su, 0, 3).dimension == 1);
    CHECK(cartan_cohomology_truncated(su, 2, 3).dimension == 0);
    CHECK(cartan_cohomology_truncated(su, 3, 3).dimension == 0);
    CHECK(cartan_cohomology_truncated(su, 4, 3).dimension == 1);
}

TEST_CASE("positive weights carry no Cartan cohomology for linear actions") {
    // ι of the Euler field is an invariant contracting homotopy in positive
    // weight, so the weight truncation never changes the answer and
    // TruncationUnstable cannot fire for a linear action.
    LinearAction nil;
    nil.algebra = LieAlgebra::abelian(1);
    nil.m = 2;
    nil.rho = {RatMatrix::from_rows({{0, 1}, {0, 0}})};
    nil.validate();
    for (const auto& act : {nil, LinearAction::rotation_plane(), LinearAction::trivial(1, 2)})
        for (int n = 0; n <= 4; ++n) {
            std::size_t base = cartan_cohomology_dimension(act, n, 0);
            for (unsigned D = 1; D <= 4; ++D) CHECK(cartan_cohomology_dimension(act, n, D) == base);
        }

    std::mt19937_64 rng(17);
    auto rot = LinearAction::rotation_plane();
    VectorField euler{P("x1", 1, 2), P("x2", 1, 2)};
    for (int i = 0; i < 30; ++i) {
        auto w = random_form(rng, 1, 2);
        auto homotopy = cartan_d(rot, interior(euler, w)) + interior(euler, cartan_d(rot, w));
        EquivariantForm weighted(1, 2);
        for (const auto& [mono, c] : w.terms())
            weighted.add_term(mono, c * static_cast<int>(mono.x_degree() + mono.form_degree()));
        CHECK(homotopy == weighted);
    }
}

TEST_CASE("interval fiber integration") {
    CHECK(fiber_integrate_interval(P("x1*dx2 + x3^2", 0, 3)).is_zero());
    // coordinates x1, x2 on R^2 and t = x3
    CHECK(fiber_integrate_interval(P("dx3^(x1*dx2)", 0, 3)) == P("x1*dx2", 0, 2));
    CHECK(fiber_integrate_interval(P("x3*dx3^dx1 + x3^2*dx2", 0, 3)) == P("1/2*dx1", 0, 2));

    auto rot = LinearAction::rotation_plane();
    auto ext = extend_by_interval(rot);
    ext.validate();
    std::mt19937_64 rng(16);
    testutil::FormShape shape;
    shape.max_form = 3;
    for (int i = 0; i < 100; ++i) {
        auto w = random_homogeneous(rng, 1, 3, static_cast<unsigned>(rng() % 5), shape);
        auto lhs = cartan_d(rot, fiber_integrate_interval(w)) + fiber_integrate_interval(cartan_d(ext, w));
        CHECK(lhs == restrict_interval(w, 1) - restrict_interval(w, 0));
    }
}

TEST_CASE("shuffles") {
    auto id = shuffle_set(0, 4);
    REQUIRE(id.size() == 1);
    CHECK(id[0].perm == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(id[0].sign == 1);

    for (std::size_t p = 0; p <= 6; ++p)
        for (std::size_t l = 0; l <= p; ++l) {
            auto s = shuffle_set(l, p);
            CHECK(s.size() == binomial(p, l));
            for (const auto& sh : s) {
                CHECK(std::is_sorted(sh.perm.begin(), sh.perm.begin() + static_cast<std::ptrdiff_t>(l)));
                CHECK(std::is_sorted(sh.perm.begin() + static_cast<std::ptrdiff_t>(l), sh.perm.end()));
                CHECK(sh.sign == parity_by_cycles(sh.perm));
            }
        }

    // Independent enumeration over all of S_4.
    std::vector<std::size_t> perm{1, 2, 3, 4};
    int count = 0, signed_sum = 0;
    do {
        if (perm[0] < perm[1] && perm[2] < perm[3]) {
            ++count;
            signed_sum += parity_by_cycles(perm);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto s24 = shuffle_set(2, 4);
    int sum = std::accumulate(s24.begin(), s24.end(), 0, [](int a, const ShuffleIndex& s) { return a + s.sign; });
    CHECK(count == 6);
    CHECK(s24.size() == 6);
    CHECK(sum == signed_sum);
    CHECK(sum == 2);
}

TEST_CASE("finite comparison map commutes with the boundaries") {
    auto bl = simplicial::bar_levels(simplicial::two_points_swap(), 4);
    CHECK(getzler_chain_map_failures(bl) == 0);
    CHECK(getzler_chain_map_failures(simplicial::bar_levels(simplicial::free_circle(3), 3)) == 0);
    CHECK(getzler_chain_map_failures(
              simplicial::bar_levels(simplicial::point(simplicial::FiniteGroup::symmetric(3)), 3)) == 0);

    // Level 1 to level 2 on a single basis cochain, written out.
    std::vector<Rational> omega(bl.cells(1, 0), 0);
    omega[bl.encode({1}) * 2 + 0] = 1;  // (g, point 0) with g the swap
    auto f = getzler_map_finite(bl, 1, 0, omega);
    auto df = getzler_dbar(bl.action, f);
    // (d̄f)(g1, g2)(c) = f(g2)(c) - f(g1 g2)(c) + f(g1)(g2 c)
    CHECK(df.values[bl.encode({1, 0})][0] == 0 - 1 + 1);
    CHECK(df.values[bl.encode({0, 1})][0] == 1 - 1 + 0);
    CHECK(df.values[bl.encode({1, 1})][0] == 1 - 0 + 0);
    CHECK(df.values[bl.encode({1, 1})][1] == 0 - 0 + 1);
}
