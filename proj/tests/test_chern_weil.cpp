#include "doctest.h"
#include "cw_helpers.hpp"
#include "form_helpers.hpp"
#include "eqdiff/chern_weil.hpp"
#include "helpers.hpp"

using namespace eqdiff;
using namespace eqdiff::chern_weil;
using cartan::cartan_d;
using testutil::random_connection;
using testutil::random_family;

namespace {

EquivariantForm P(const std::string& s, std::size_t k, std::size_t m) { return EquivariantForm::parse(s, k, m); }

FormMatrix M(std::vector<std::vector<std::string>> e, std::size_t k, std::size_t m) {
    return FormMatrix::parse(e, k, m);
}

// Characteristic polynomial by Faddeev-LeVerrier; returns e_0..e_n.
std::vector<Rational> leverrier_elementary(const RatMatrix& a) {
    std::size_t n = a.rows();
    std::vector<Rational> c(n + 1, 0);  // det(λ - a) = sum c_i λ^i
    c[n] = 1;
    RatMatrix mk(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = a * mk + RatMatrix::identity(n).scaled(c[n - k + 1]);
        RatMatrix am = a * mk;
        Rational tr = 0;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[n - k] = -tr / Rational(static_cast<long>(k));
    }
    std::vector<Rational> e(n + 1);
    for (std::size_t k = 0; k <= n; ++k) e[k] = (k % 2 ? -1 : 1) * c[n - k];
    return e;
}

RatMatrix random_rat(std::mt19937_64& rng, std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rational q(testutil::small_int(rng, -5, 5), testutil::small_int(rng, 1, 3));
            q.canonicalize();
            m(i, j) = q;
        }
    return m;
}

RatMatrix random_invertible(std::mt19937_64& rng, std::size_t n) {
    for (;;) {
        RatMatrix g = random_rat(rng, n);
        if (linalg::rank(g) == n) return g;
    }
}

RatMatrix inverse(const RatMatrix& g) {
    RatMatrix x;
    REQUIRE(linalg::solve(g, RatMatrix::identity(g.rows()), x));
    return x;
}

// Value of a polynomial in u alone at a rational point.
Rational evaluate_u(const EquivariantForm& f, const std::vector<Rational>& u) {
    Rational s = 0;
    for (const auto& [mono, c] : f.terms()) {
        REQUIRE(mono.form_degree() == 0);
        REQUIRE(mono.x_degree() == 0);
        Rational t = c;
        for (std::size_t a = 0; a < u.size(); ++a)
            for (unsigned e = 0; e < mono.u[a]; ++e) t *= u[a];
        s += t;
    }
    return s;
}

std::vector<InvariantPolynomial> polys_for_rank(std::size_t r) {
    std::vector<InvariantPolynomial> ps{InvariantPolynomial::total_chern()};
    for (unsigned k = 0; k <= r + 1; ++k) ps.push_back(InvariantPolynomial::chern(k));
    for (unsigned k = 1; k <= 3; ++k) ps.push_back(InvariantPolynomial::trace_power(k));
    for (unsigned k = 1; k <= 2; ++k) ps.push_back(InvariantPolynomial::pontryagin(k));
    return ps;
}

}  // namespace

TEST_CASE("curvature examples and Bianchi") {
    ConnectionMatrix zero{FormMatrix(2, 0, 2)};
    CHECK(curvature(zero).R.is_zero());

    ConnectionMatrix line{M({{"x1*dx2"}}, 0, 2)};
    CHECK(curvature(line).R == M({{"dx1^dx2"}}, 0, 2));

    // (A∧A)_{01} = dx1∧dx2, (A∧A)_{10} = dx2∧dx1, diagonal squares vanish.
    ConnectionMatrix nc{M({{"dx1", "dx2"}, {"dx2", "0"}}, 0, 2)};
    CHECK(curvature(nc).R == M({{"0", "dx1^dx2"}, {"-dx1^dx2", "0"}}, 0, 2));

    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
        auto fam = random_family(rng);
        auto c = random_connection(rng, fam);
        CHECK(bianchi_holds(c, curvature(c)));
    }
    CHECK_THROWS_AS(curvature(ConnectionMatrix{M({{"x1"}}, 0, 2)}), DimensionMismatch);
}

TEST_CASE("moment maps") {
    auto rot = LinearAction::rotation_plane();
    auto su = LinearAction::su2_vector();

    // A = 0: mu = drho
    BundleAction vec{su.rho, {}};
    ConnectionMatrix flat{FormMatrix(3, 3, 3)};
    auto mu = moment_map(flat, vec, su);
    for (std::size_t a = 0; a < 3; ++a) CHECK(mu.mu[a] == FormMatrix::constant(su.rho[a], 3, 3));

    // drho = 0 and A invariant: mu = A(X^#)
    ConnectionMatrix theta{M({{"x1*dx2 - x2*dx1"}}, 1, 2)};
    auto mt = moment_map(theta, BundleAction::trivial(1, 1), rot);
    CHECK(mt.mu[0] == M({{"x1^2 + x2^2"}}, 1, 2));

    // weight q line bundle, A = 0
    for (int q = -2; q <= 3; ++q) {
        auto ml = moment_map(ConnectionMatrix{FormMatrix(1, 1, 2)}, BundleAction::line({q}), rot);
        CHECK(ml.mu[0](0, 0) == EquivariantForm::constant(1, 2, q));
    }

    CHECK_THROWS_AS(moment_map(ConnectionMatrix{M({{"x1*dx1"}}, 1, 2)}, BundleAction::trivial(1, 1), rot),
                    ConnectionNotInvariant);
    CHECK_THROWS_AS(moment_map(ConnectionMatrix{M({{"dx1"}}, 1, 2)}, BundleAction::line({1}), rot),
                    ConnectionNotInvariant);

    std::mt19937_64 rng(22);
    for (int i = 0; i < 20; ++i) {
        auto fam = random_family(rng);
        auto c = random_connection(rng, fam);
        REQUIRE(connection_is_invariant(fam.act, fam.bundle, c));
        auto m = moment_map(c, fam.bundle, fam.act);
        CHECK(moment_map_defining_identity(c, fam.bundle, fam.act, m));
        // a wrong moment map is caught
        auto bad = m;
        bad.mu[0](0, 0) = bad.mu[0](0, 0) + EquivariantForm::constant(fam.act.k(), fam.act.m, 1);
        CHECK_FALSE(moment_map_defining_identity(c, fam.bundle, fam.act, bad));
    }
}

TEST_CASE("finite symmetry in the connection invariance test") {
    auto rot = LinearAction::rotation_plane();
    rot.finite.push_back({RatMatrix::from_rows({{1, 0}, {0, -1}}), RatMatrix::from_rows({{-1}})});
    ConnectionMatrix theta{M({{"x1*dx2 - x2*dx1"}}, 1, 2)};
    ConnectionMatrix radial{M({{"x1*dx1 + x2*dx2"}}, 1, 2)};
    BundleAction b = BundleAction::trivial(1, 1);
    b.finite = {RatMatrix::from_rows({{1}})};
    CHECK(connection_is_invariant(rot, b, radial));
    CHECK_FALSE(connection_is_invariant(rot, b, theta));
}

TEST_CASE("invariant polynomials are conjugation invariant and match Faddeev-LeVerrier") {
    std::mt19937_64 rng(23);
    for (std::size_t n = 1; n <= 4; ++n)
        for (int i = 0; i < 50; ++i) {
            RatMatrix a = random_rat(rng, n), g = random_invertible(rng, n);
            RatMatrix conj = g * a * inverse(g);
            for (const auto& p : polys_for_rank(n)) CHECK(p.evaluate(conj) == p.evaluate(a));
            CHECK(elementary_symmetric(a) == leverrier_elementary(a));
        }
    RatMatrix d = RatMatrix::from_rows({{2, 0, 0}, {0, 3, 0}, {0, 0, 5}});
    CHECK(InvariantPolynomial::chern(2).evaluate(d) == 2 * 3 + 2 * 5 + 3 * 5);
    CHECK(InvariantPolynomial::total_chern().evaluate(d) == 3 * 4 * 6);
    CHECK(InvariantPolynomial::trace_power(2).evaluate(d) == 4 + 9 + 25);
    CHECK(InvariantPolynomial::pontryagin(1).evaluate(d) == -(2 * 3 + 2 * 5 + 3 * 5));
    CHECK(InvariantPolynomial::parse("chern:2").name() == "chern:2");
    CHECK(InvariantPolynomial::parse("total_chern").kind == PolyKind::TotalChern);
    CHECK_THROWS_AS(InvariantPolynomial::parse("chern"), SchemaError);
    CHECK_THROWS_AS(InvariantPolynomial::parse("euler:2"), SchemaError);
}

TEST_CASE("equivariant characteristic forms are d_C-closed") {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 30; ++i) {
        auto fam = random_family(rng);
        auto c = random_connection(rng, fam);
        auto r = curvature(c);
        auto mu = moment_map(c, fam.bundle, fam.act);
        // equivariant Bianchi: d_C F = F A − A F
        FormMatrix f = equivariant_curvature(r, mu);
        CHECK(f.map([&](const EquivariantForm& e) { return cartan_d(fam.act, e); }) == f * c.A - c.A * f);
        for (auto p : {InvariantPolynomial::total_chern(), InvariantPolynomial::chern(1),
                       InvariantPolynomial::trace_power(2)}) {
            auto w = equivariant_characteristic_form(p, r, mu);
            CHECK(cartan_d(fam.act, w).is_zero());
            CHECK(cartan::is_invariant(fam.act, w));
        }
    }
    // flat trivial connection with trivial action: only the constant term
    auto rot = LinearAction::rotation_plane();
    auto w = characteristic_form(InvariantPolynomial::total_chern(), ConnectionMatrix{FormMatrix(2, 1, 2)},
                                 BundleAction::trivial(1, 2), rot);
    CHECK(w == EquivariantForm::constant(1, 2, 1));
}

TEST_CASE("flat representations give P(drho)") {
    auto su = LinearAction::su2_vector();
    BundleAction vec{su.rho, {}};
    ConnectionMatrix flat{FormMatrix(3, 3, 3)};
    CHECK(characteristic_form(InvariantPolynomial::total_chern(), flat, vec, su) == P("1 + u1^2 + u2^2 + u3^2", 3, 3));
    CHECK(characteristic_form(InvariantPolynomial::trace_power(2), flat, vec, su) ==
          P("-2*u1^2 - 2*u2^2 - 2*u3^2", 3, 3));
    auto rot = LinearAction::rotation_plane();
    for (int q = 0; q <= 3; ++q)
        CHECK(characteristic_form(InvariantPolynomial::chern(1), ConnectionMatrix{FormMatrix(1, 1, 2)},
                                  BundleAction::line({q}), rot) == P(std::to_string(q) + "*u1", 1, 2));
}

TEST_CASE("flat representation forms match pointwise evaluation") {
    std::mt19937_64 rng(28);
    for (int i = 0; i < 30; ++i) {
        std::size_t r = static_cast<std::size_t>(testutil::small_int(rng, 1, 3));
        std::vector<RatMatrix> reps;
        int kind = testutil::small_int(rng, 0, 2);
        if (kind == 0) {
            reps = {random_rat(rng, r)};
        } else if (kind == 1) {
            RatMatrix a = random_rat(rng, r);
            reps = {a, a * a + RatMatrix::identity(r).scaled(testutil::small_int(rng, -2, 2))};
        } else {
            reps = LinearAction::su2_vector().rho;
            r = 3;
        }
        LinearAction base = LinearAction::trivial(reps.size(), 1);
        if (kind == 2) base.algebra = cartan::LieAlgebra::su2();
        BundleAction bundle{reps, {}};
        ConnectionMatrix flat{FormMatrix(r, reps.size(), 1)};
        for (auto p : {InvariantPolynomial::total_chern(), InvariantPolynomial::trace_power(1),
                       InvariantPolynomial::trace_power(2), InvariantPolynomial::trace_power(3)}) {
            auto w = characteristic_form(p, flat, bundle, base);
            CHECK(w.max_form_degree() == 0);
            for (int s = 0; s < 8; ++s) {
                std::vector<Rational> u(reps.size());
                RatMatrix at(r, r);
                for (std::size_t a = 0; a < reps.size(); ++a) {
                    u[a] = testutil::small_int(rng, -3, 3);
                    at = at + reps[a].scaled(u[a]);
                }
                Rational expect = 0;
                if (p.kind == PolyKind::TotalChern) {
                    for (const auto& e : leverrier_elementary(at)) expect += e;
                } else {
                    RatMatrix pw = RatMatrix::identity(r);
                    for (unsigned j = 0; j < p.k; ++j) pw = pw * at;
                    for (std::size_t j = 0; j < r; ++j) expect += pw(j, j);
                }
                CHECK(evaluate_u(w, u) == expect);
            }
        }
    }
}

TEST_CASE("transgression") {
    auto rot = LinearAction::rotation_plane();
    ConnectionMatrix zero{FormMatrix(1, 1, 2)};
    ConnectionMatrix alpha{M({{"(1 + x1^2 + x2^2)*(x1*dx2 - x2*dx1)"}}, 1, 2)};
    auto line = BundleAction::line({2});
    CHECK(transgression(alpha, alpha, InvariantPolynomial::chern(1), line, rot).is_zero());
    auto tw = transgression(zero, alpha, InvariantPolynomial::chern(1), line, rot);
    CHECK(tw == alpha.A(0, 0));

    std::mt19937_64 rng(25);
    for (int i = 0; i < 20; ++i) {
        auto fam = random_family(rng, 2);
        auto c0 = random_connection(rng, fam), c1 = random_connection(rng, fam);
        for (auto p : {InvariantPolynomial::chern(1), InvariantPolynomial::total_chern()}) {
            auto t = transgression(c0, c1, p, fam.bundle, fam.act);
            auto diff = characteristic_form(p, c1, fam.bundle, fam.act) - characteristic_form(p, c0, fam.bundle, fam.act);
            CHECK(cartan_d(fam.act, t) == diff);
            // reparametrized path t -> 3t^2 - 2t^3
            CHECK(transgression(c0, c1, p, fam.bundle, fam.act, {0, 0, 3, -2}) == t);
        }
    }
    CHECK_THROWS_AS(transgression(zero, alpha, InvariantPolynomial::chern(1), line, rot, {0, 2}), SchemaError);
}

TEST_CASE("Whitney sum") {
    auto rot = LinearAction::rotation_plane();
    auto flat = [](std::size_t r) { return ConnectionMatrix{FormMatrix(r, 1, 2)}; };
    BundleAction d1{{RatMatrix::from_rows({{1, 0}, {0, 2}})}, {}}, d2{{RatMatrix::from_rows({{3}})}, {}};
    auto rep = whitney_check(flat(2), d1, flat(1), d2, rot);
    CHECK(rep.holds);
    CHECK(rep.lhs[3] == P("6*u1^3", 1, 2));

    ConnectionMatrix a{M({{"x1*dx2"}}, 0, 2)}, b{M({{"x2*dx1"}}, 0, 2)};
    auto triv = LinearAction::trivial(0, 2);
    auto rep2 = whitney_check(a, BundleAction{}, b, BundleAction{}, triv);
    CHECK(rep2.holds);
    CHECK(rep2.lhs[1] == P("0", 0, 2));  // dx1∧dx2 + dx2∧dx1

    std::mt19937_64 rng(26);
    for (int i = 0; i < 15; ++i) {
        auto fam = random_family(rng);
        auto fam2 = fam;
        fam2.rank = fam.kind == 3 ? 3 : fam.rank;
        auto c0 = random_connection(rng, fam), c1 = random_connection(rng, fam2);
        CHECK(whitney_check(c0, fam.bundle, c1, fam2.bundle, fam.act).holds);
    }
}

TEST_CASE("product compatibility of d_C") {
    std::mt19937_64 rng(27);
    auto su = LinearAction::su2_vector();
    for (int i = 0; i < 30; ++i) {
        unsigned da = static_cast<unsigned>(rng() % 4);
        auto a = testutil::random_homogeneous(rng, 3, 3, da);
        auto b = testutil::random_form(rng, 3, 3);
        Rational sign = da % 2 ? -1 : 1;
        CHECK(cartan_d(su, a * b) == cartan_d(su, a) * b + a * cartan_d(su, b) * sign);
    }
    // a(α) ∪ x = a(α ∧ R(x)) at the form level: for closed ω, d_C(α∧ω) = d_Cα∧ω
    auto fam = random_family(rng);
    auto c = random_connection(rng, fam);
    auto w = characteristic_form(InvariantPolynomial::total_chern(), c, fam.bundle, fam.act);
    for (int i = 0; i < 10; ++i) {
        auto alpha = testutil::random_form(rng, fam.act.k(), fam.act.m);
        CHECK(cartan_d(fam.act, alpha * w) == cartan_d(fam.act, alpha) * w);
    }
}
