// Acceptance run: one PASS/FAIL line per criterion, with the time limits
// taken as given. Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cw_helpers.hpp"
#include "eqdiff/cartan.hpp"
#include "eqdiff/chern_weil.hpp"
#include "eqdiff/diffcoh.hpp"
#include "eqdiff/simplicial.hpp"
#include "form_helpers.hpp"

using namespace eqdiff;
using cartan::EquivariantForm;
using cartan::LinearAction;
using chern_weil::BundleAction;
using chern_weil::ConnectionMatrix;
using chern_weil::FormMatrix;
using chern_weil::InvariantPolynomial;
using complexes::Coefficients;
using linalg::FgAbGroup;
using linalg::Integer;
using linalg::Rational;
using linalg::RatMatrix;
using linalg::StructuredCoefGroup;

namespace {

struct Outcome {
    bool ok = true;
    std::string note;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            note = what;
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<void(Outcome&)>& body) {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.ok = false;
        out.note = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_seconds > 0 && secs >= limit_seconds) {
        std::ostringstream os;
        os << "took " << secs << " s, limit " << limit_seconds << " s";
        out.require(false, os.str());
    }
    if (!out.ok) ++failures;
    std::printf("%s %2d  %s  (%.2f s)%s%s\n", out.ok ? "PASS" : "FAIL", id, title.c_str(), secs,
                out.note.empty() ? "" : "  -- ", out.note.c_str());
    std::fflush(stdout);
}

FgAbGroup Z(std::size_t r = 1) { return FgAbGroup(r, {}); }
FgAbGroup Zmod(long p) { return FgAbGroup(0, {Integer(p)}); }

// Value of a form without x or dx at the point u.
Rational evaluate_u(const EquivariantForm& w, const std::vector<Rational>& u) {
    Rational s = 0;
    for (const auto& [mono, c] : w.terms()) {
        Rational t = c;
        for (std::size_t a = 0; a < u.size(); ++a)
            for (unsigned e = 0; e < mono.u[a]; ++e) t *= u[a];
        s += t;
    }
    return s;
}

bool only_u(const EquivariantForm& w) {
    for (const auto& [mono, c] : w.terms()) {
        (void)c;
        if (mono.dx != 0 || mono.x_degree() != 0) return false;
    }
    return true;
}

std::vector<EquivariantForm> invariant_generators(const LinearAction& act) {
    auto P = [&](const char* s) { return EquivariantForm::parse(s, act.k(), act.m); };
    if (act.m == 2)
        return {P("x1^2 + x2^2"), P("x1*dx2 - x2*dx1"), P("dx1^dx2"), P("u1"), P("x1*dx1 + x2*dx2")};
    return {P("x1^2 + x2^2 + x3^2"),       P("u1*x1 + u2*x2 + u3*x3"),
            P("u1^2 + u2^2 + u3^2"),       P("u1*dx1 + u2*dx2 + u3*dx3"),
            P("x1*dx1 + x2*dx2 + x3*dx3"), P("x1*dx2^dx3 + x2*dx3^dx1 + x3*dx1^dx2"),
            P("dx1^dx2^dx3")};
}

}  // namespace

int main() {
    std::printf("acceptance criteria\n");

    criterion(1, "S^3 conjugation table over Z, Q and Q/Z", 1.0, [](Outcome& o) {
        auto dc = simplicial::s3_conjugation_double_complex(7);
        for (int k = 0; k <= 4; ++k) {
            bool nz = k == 0 || k == 3 || k == 4;
            auto z = simplicial::double_complex_cohomology(dc, k, Coefficients::Z);
            auto q = simplicial::double_complex_cohomology(dc, k, Coefficients::Q);
            auto qz = simplicial::double_complex_cohomology(dc, k, Coefficients::QmodZ);
            std::string at = " in degree " + std::to_string(k);
            o.require(z.integral == (nz ? Z() : FgAbGroup()), "integral" + at + " is " + z.to_string());
            o.require(q.structured == StructuredCoefGroup{0, nz ? 1u : 0u, {}}, "rational" + at + " is " + q.to_string());
            o.require(qz.structured == StructuredCoefGroup{nz ? 1u : 0u, 0, {}}, "Q/Z" + at + " is " + qz.to_string());
        }
    });

    criterion(2, "lens classes equal q/p", 1.0, [](Outcome& o) {
        for (auto [p, q] : std::vector<std::pair<long, long>>{{2, 1}, {3, 1}, {5, 2}, {7, 3}}) {
            Rational expected(q, p);
            expected.canonicalize();
            Rational got = diffcoh::flat_equivariant_chern_class(p, q);
            o.require(got == expected, "(" + std::to_string(p) + ", " + std::to_string(q) + ") gives " + got.get_str());
        }
    });

    criterion(3, "group cohomology of C_p on a point with P = 6", 30.0, [](Outcome& o) {
        for (long p : {2, 3, 5}) {
            auto act = simplicial::point(simplicial::FiniteGroup::cyclic(p));
            std::vector<FgAbGroup> expected{Z(), FgAbGroup(), Zmod(p), FgAbGroup(), Zmod(p)};
            for (int n = 0; n <= 4; ++n) {
                auto v = simplicial::equivariant_cohomology(act, n, Coefficients::Z, 6);
                o.require(v.integral == expected[n],
                          "C_" + std::to_string(p) + " degree " + std::to_string(n) + " is " + v.to_string());
            }
        }
    });

    criterion(4, "free rotation of S^1 matches H^*(S^1)", 0, [](Outcome& o) {
        for (std::size_t p : {2, 3}) {
            auto act = simplicial::free_circle(p);
            for (int k = 0; k <= 3; ++k) {
                auto v = simplicial::equivariant_cohomology(act, k);
                o.require(v.integral == (k <= 1 ? Z() : FgAbGroup()),
                          "C_" + std::to_string(p) + " degree " + std::to_string(k) + " is " + v.to_string());
            }
        }
    });

    std::vector<diffcoh::SweepEntry> sweep;
    criterion(5, "hexagon exactness, groups of order <= 6 on <= 4 points, n <= 4", 300.0, [&](Outcome& o) {
        sweep = diffcoh::hexagon_sweep(diffcoh::small_groups(), 4, 4);
        o.require(!sweep.empty(), "no instances");
        std::size_t bad = 0;
        for (const auto& e : sweep)
            if (!e.exact) {
                if (!bad) o.require(false, e.action + " at n = " + std::to_string(e.n));
                ++bad;
            }
        if (o.ok) o.note = std::to_string(sweep.size()) + " instances";
    });

    criterion(6, "image of -beta is the torsion of H^n on every sweep instance", 0, [&](Outcome& o) {
        o.require(!sweep.empty(), "sweep did not run");
        for (const auto& e : sweep)
            o.require(e.bockstein_is_torsion, e.action + " at n = " + std::to_string(e.n));
    });

    criterion(7, "Cartan identities for S^1 on R^2 and su(2) on R^3", 60.0, [](Outcome& o) {
        std::mt19937_64 rng(7);
        for (const auto& act : {LinearAction::rotation_plane(), LinearAction::su2_vector()}) {
            auto gens = invariant_generators(act);
            for (int i = 0; i < 40; ++i) {
                EquivariantForm w = EquivariantForm::constant(act.k(), act.m, 1 + static_cast<int>(rng() % 3));
                for (std::size_t j = 0, len = 1 + rng() % 3; j < len; ++j) w = w * gens[rng() % gens.size()];
                if (w.is_zero()) continue;
                unsigned deg = w.terms().begin()->first.cartan_degree();
                o.require(cartan::is_invariant(act, w), "generated form is not invariant");
                auto dw = cartan::cartan_d(act, w);
                o.require(w.is_homogeneous(deg) && (dw.is_zero() || dw.is_homogeneous(deg + 1)), "degree not raised by 1");
                o.require(cartan::cartan_d(act, dw).is_zero(), "d_C^2 != 0 on an invariant");
            }
            // 200 random forms in total across the two actions.
            for (int i = 0; i < 100; ++i) {
                unsigned deg = static_cast<unsigned>(rng() % 6);
                auto w = testutil::random_homogeneous(rng, act.k(), act.m, deg);
                auto dw = cartan::cartan_d(act, w);
                o.require(dw.is_zero() || dw.is_homogeneous(deg + 1), "degree not raised by 1");
                o.require(cartan::cartan_d(act, dw) == cartan::lie_operator(act, w), "d_C^2 != sum u_a L_a");
            }
        }
    });

    criterion(8, "truncated Cartan cohomology of the rotation at D = 6, stable at D = 8", 0, [](Outcome& o) {
        auto rot = LinearAction::rotation_plane();
        for (int n = 0; n <= 5; ++n) {
            std::size_t expected = n % 2 == 0 ? 1 : 0;
            auto r = cartan::cartan_cohomology_truncated(rot, n, 6);
            o.require(r.dimension == expected, "degree " + std::to_string(n) + " has dimension " + std::to_string(r.dimension));
            o.require(cartan::cartan_cohomology_dimension(rot, n, 8) == expected, "D = 8 differs in degree " + std::to_string(n));
        }
    });

    criterion(9, "flat representation forms equal P(drho), ranks <= 3", 0, [](Outcome& o) {
        auto rot = LinearAction::rotation_plane();
        auto su = LinearAction::su2_vector();
        std::vector<std::pair<LinearAction, BundleAction>> cases;
        for (std::size_t r = 1; r <= 3; ++r) {
            RatMatrix d(r, r);
            for (std::size_t i = 0; i < r; ++i) d(i, i) = static_cast<long>(i) - 1;
            cases.push_back({rot, BundleAction{{d}, {}}});
            cases.push_back({su, BundleAction::trivial(3, r)});
        }
        cases.push_back({rot, BundleAction{{RatMatrix::from_rows({{0, -2}, {2, 0}})}, {}}});
        cases.push_back({rot, BundleAction{{RatMatrix::from_rows({{1, 1, 0}, {0, 1, 0}, {0, 0, -3}})}, {}}});
        cases.push_back({su, BundleAction{su.rho, {}}});
        std::vector<InvariantPolynomial> polys{InvariantPolynomial::total_chern(), InvariantPolynomial::trace_power(1),
                                               InvariantPolynomial::trace_power(2), InvariantPolynomial::trace_power(3)};
        std::mt19937_64 rng(9);
        for (const auto& [act, bundle] : cases) {
            std::size_t r = bundle.drho.front().rows();
            ConnectionMatrix flat{FormMatrix(r, act.k(), act.m)};
            auto curv = chern_weil::curvature(flat);
            auto mu = chern_weil::moment_map(flat, bundle, act);
            o.require(curv.R.is_zero(), "flat connection has curvature");
            for (const auto& p : polys) {
                auto w = chern_weil::equivariant_characteristic_form(p, curv, mu);
                o.require(w.max_form_degree() == 0 && only_u(w), p.name() + " has positive exterior degree");
                // Compare with P evaluated on the matrix drho(X) at random X.
                for (int t = 0; t < 5; ++t) {
                    std::vector<Rational> u(act.k());
                    RatMatrix x(r, r);
                    for (std::size_t a = 0; a < act.k(); ++a) {
                        u[a] = Rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3));
                        u[a].canonicalize();
                        x = x + bundle.drho[a].scaled(u[a]);
                    }
                    o.require(evaluate_u(w, u) == p.evaluate(x), p.name() + " differs from P(drho)");
                }
            }
        }
    });

    criterion(10, "transgression identity on 50 random invariant connection pairs", 0, [](Outcome& o) {
        std::mt19937_64 rng(10);
        for (int i = 0; i < 50; ++i) {
            auto fam = testutil::random_family(rng, 2);  // ranks <= 2
            auto c0 = testutil::random_connection(rng, fam), c1 = testutil::random_connection(rng, fam);
            auto p = i % 2 ? InvariantPolynomial::total_chern() : InvariantPolynomial::chern(1 + rng() % fam.rank);
            auto t = chern_weil::transgression(c0, c1, p, fam.bundle, fam.act);
            auto diff = chern_weil::characteristic_form(p, c1, fam.bundle, fam.act) -
                        chern_weil::characteristic_form(p, c0, fam.bundle, fam.act);
            o.require(cartan::cartan_d(fam.act, t) == diff, "pair " + std::to_string(i) + " with " + p.name());
        }
    });

    criterion(11, "Whitney sum formula on 50 random block pairs, ranks <= 3", 0, [](Outcome& o) {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 50; ++i) {
            auto fam = testutil::random_family(rng);
            auto fam2 = fam;
            auto c0 = testutil::random_connection(rng, fam), c1 = testutil::random_connection(rng, fam2);
            o.require(chern_weil::whitney_check(c0, fam.bundle, c1, fam2.bundle, fam.act).holds,
                      "pair " + std::to_string(i));
        }
    });

    criterion(12, "bad resolution counterexample and honest lifts", 0, [](Outcome& o) {
        auto bad = complexes::bad_resolution_counterexample();
        o.require(bad.nonzero(), "no nonzero composite");
        o.require(bad.lifts_restrict_to_identity_on_Z, "lifts move the integers");
        auto honest = complexes::bad_resolution_counterexample(
            std::vector<std::vector<bool>>{{}, {false, false}, {false, false, false}});
        o.require(!honest.nonzero(), "honest lifts give a nonzero composite");
        if (o.ok)
            o.note = "witness " + bad.witness.re.get_str() + " + " + bad.witness.im.get_str() + "i maps to " +
                     bad.composite.re.get_str() + " + " + bad.composite.im.get_str() + "i";
    });

    criterion(13, "integration over the group on 100 random closed cochains", 0, [](Outcome& o) {
        std::vector<simplicial::BarLevels> bars;
        for (const auto& g : diffcoh::small_groups())
            bars.push_back(simplicial::bar_levels(simplicial::coset_action(g, {g.identity()}), 3));
        bars.push_back(simplicial::bar_levels(simplicial::free_circle(3), 3));
        bars.push_back(simplicial::bar_levels(simplicial::two_points_swap(), 3));
        std::mt19937_64 rng(13);
        for (int t = 0; t < 100; ++t) {
            const auto& bl = bars[t % bars.size()];
            std::size_t p = 1 + rng() % 3;
            std::size_t k = rng() % bl.action.space().cells.size();
            std::vector<Rational> eta(bl.cells(p - 1, k));
            for (auto& x : eta) {
                x = Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2));
                x.canonicalize();
            }
            auto omega = simplicial::vertical_differential(bl, p - 1, k, eta);
            // closedness of the sample itself
            if (p < bl.P) {
                auto dd = simplicial::vertical_differential(bl, p, k, omega);
                for (const auto& v : dd) o.require(v == 0, "sample is not closed");
            }
            auto avg = simplicial::group_average(bl, p, k, omega);
            o.require(simplicial::vertical_differential(bl, p - 1, k, avg) == omega,
                      "trial " + std::to_string(t) + " on " + bl.action.label);
        }
    });

    criterion(14, "Getzler map commutes with the boundaries, C_2 on two points through level 3", 0, [](Outcome& o) {
        auto failures = cartan::getzler_chain_map_failures(simplicial::bar_levels(simplicial::two_points_swap(), 3));
        o.require(failures == 0, std::to_string(failures) + " basis cochains fail");
    });

    std::printf("%d of 14 criteria failed\n", failures);
    return failures;
}
