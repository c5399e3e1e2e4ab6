#include "doctest.h"
#include "eqdiff/complexes.hpp"
#include "helpers.hpp"

using namespace eqdiff;
using namespace eqdiff::complexes;
using linalg::integer_kernel;
using linalg::to_rational;
using testutil::ints;
using testutil::random_int_matrix;

namespace {

SparseIntMatrix sp(const IntMatrix& m) { return SparseIntMatrix::from_dense(m); }

// Random complex in degrees 0..len-1 with d^{k+1} d^k = 0.
IntCochainComplex random_complex(std::mt19937_64& rng, std::size_t len, int lo = -2, int hi = 2) {
    std::uniform_int_distribution<int> dim(0, 4);
    std::vector<std::size_t> ranks;
    for (std::size_t k = 0; k < len; ++k) ranks.push_back(dim(rng));
    std::vector<SparseIntMatrix> ds;
    IntMatrix prev(ranks[0], 0);
    for (std::size_t k = 0; k + 1 < len; ++k) {
        // d^k kills the image of d^{k-1}: d^k = Y * (annihilator of im d^{k-1}).
        IntMatrix ann = integer_kernel(prev.transpose()).transpose();
        IntMatrix d = ann.rows() ? random_int_matrix(rng, ranks[k + 1], ann.rows(), lo, hi) * ann
                                 : IntMatrix(ranks[k + 1], ranks[k]);
        ds.push_back(sp(d));
        prev = d;
    }
    IntCochainComplex c(0, ranks, ds);
    c.validate();
    return c;
}

// Periodic cochain complex of C_p on a point: Z -0-> Z -p-> Z -0-> Z ...
IntCochainComplex periodic(long p, std::size_t len) {
    std::vector<std::size_t> ranks(len, 1);
    std::vector<SparseIntMatrix> ds;
    for (std::size_t k = 0; k + 1 < len; ++k) ds.push_back(sp(ints({{k % 2 ? p : 0}})));
    return IntCochainComplex(0, ranks, ds);
}

std::size_t induced_rank(const IntCochainComplex& a, const IntCochainComplex& b, const SparseIntMatrix& f, int n) {
    if (a.rank(n) == 0 || b.rank(n) == 0) return 0;
    auto za = linalg::rational_kernel(to_rational(a.differential(n).to_dense()));
    auto bb = to_rational(b.differential(n - 1).to_dense());
    auto img = to_rational(f.to_dense()) * za;
    return linalg::rank(RatMatrix::hstack(bb, img)) - linalg::rank(bb);
}

// (-1)^{pq} on every block of the total degree n.
IntMatrix block_signs(const DoubleComplex& dc, std::size_t n) {
    std::size_t size = 0;
    for (std::size_t p = 0; p <= std::min(n, dc.P); ++p)
        if (n - p <= dc.Q) size += dc.ranks[p][n - p];
    IntMatrix s(size, size);
    for (std::size_t p = 0; p <= std::min(n, dc.P); ++p) {
        std::size_t q = n - p;
        if (q > dc.Q) continue;
        std::size_t off = total_offset(dc, p, q);
        for (std::size_t i = 0; i < dc.ranks[p][q]; ++i) s(off + i, off + i) = (p * q) % 2 ? -1 : 1;
    }
    return s;
}

}  // namespace

TEST_CASE("total complex of a single row is the row") {
    DoubleComplex dc = DoubleComplex::zeros(0, 2, {{1, 2, 1}});
    dc.horizontal[0][0] = sp(ints({{1}, {-1}}));
    dc.horizontal[0][1] = sp(ints({{1, 1}}));
    auto t = total_complex(dc);
    CHECK(t.differential(0) == dc.horizontal[0][0]);
    CHECK(t.differential(1) == dc.horizontal[0][1]);
    CHECK(t.cohomology(1).is_trivial());
}

TEST_CASE("identity square totalizes to an acyclic complex") {
    DoubleComplex dc = DoubleComplex::zeros(1, 1, {{1, 1}, {1, 1}});
    for (std::size_t p = 0; p <= 1; ++p) dc.horizontal[p][0] = sp(ints({{1}}));
    for (std::size_t q = 0; q <= 1; ++q) dc.vertical[0][q] = sp(ints({{1}}));
    auto t = total_complex(dc);
    for (int n = 0; n <= 2; ++n) CHECK(t.cohomology(n).is_trivial());
}

TEST_CASE("ill-formed double complexes are rejected") {
    DoubleComplex dc = DoubleComplex::zeros(1, 1, {{1, 1}, {1, 1}});
    dc.horizontal[0][0] = sp(ints({{1}}));
    dc.vertical[0][1] = sp(ints({{1}}));
    CHECK_THROWS_AS(total_complex(dc), IllFormedDoubleComplex);
}

TEST_CASE("cone of the identity is acyclic") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_complex(rng, 4);
        ChainMap id{a, a, 0, {}};
        for (int n = 0; n <= a.max_degree(); ++n) {
            SparseIntMatrix e(a.rank(n), a.rank(n));
            for (std::size_t i = 0; i < a.rank(n); ++i) e.add(i, i, 1);
            e.finalize();
            id.components.push_back(e);
        }
        auto c = cone(id);
        for (int n = c.min_degree(); n <= c.max_degree(); ++n) CHECK(c.cohomology(n).is_trivial());
    }
}

TEST_CASE("cone of multiplication by 2") {
    IntCochainComplex z(0, {1}, {});
    ChainMap two{z, z, 0, {sp(ints({{2}}))}};
    auto c = cone(two);
    CHECK(c.min_degree() == -1);
    CHECK(c.cohomology(-1).is_trivial());
    CHECK(c.cohomology(0) == FgAbGroup(0, {2}));
}

TEST_CASE("cone rejects non-chain maps") {
    IntCochainComplex a(0, {1, 1}, {sp(ints({{1}}))});
    IntCochainComplex b(0, {1, 1}, {sp(ints({{0}}))});
    ChainMap m{a, b, 0, {sp(ints({{1}})), sp(ints({{1}}))}};
    CHECK_THROWS_AS(cone(m), NotChainMap);
}

TEST_CASE("cone long exact sequence rank bookkeeping") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> scal(-1, 1);
    for (int trial = 0; trial < 60; ++trial) {
        auto a = random_complex(rng, 4);
        const int top = a.max_degree();
        // f = c id + d h + h d over a projection onto a random sub-sum.
        Integer c = scal(rng);
        std::vector<IntMatrix> h;
        for (int n = 0; n <= top + 1; ++n) h.push_back(random_int_matrix(rng, a.rank(n - 1), a.rank(n), -1, 1));
        ChainMap f{a, a, 0, {}};
        for (int n = 0; n <= top; ++n) {
            IntMatrix m = IntMatrix::identity(a.rank(n)).scaled(c);
            if (n > 0) m = m + a.differential(n - 1).to_dense() * h[n];
            m = m + h[n + 1] * a.differential(n).to_dense();
            f.components.push_back(sp(m));
        }
        f.validate();
        auto cn = cone(f);
        for (int k = -1; k <= top; ++k) {
            std::size_t coker = a.rational_betti(k) - induced_rank(a, a, f.component(k), k);
            std::size_t ker = a.rational_betti(k + 1) - induced_rank(a, a, f.component(k + 1), k + 1);
            CHECK(cn.rational_betti(k) == coker + ker);
        }
    }
}

TEST_CASE("reduction preserves cohomology and low degrees") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 60; ++trial) {
        auto c = random_complex(rng, 6, -1, 1);
        auto r = reduce(c, 1);
        CHECK(r.rank(0) == c.rank(0));
        CHECK(r.differential(0).rows() <= c.differential(0).rows());
        for (int n = 0; n <= c.max_degree(); ++n) CHECK(r.cohomology(n) == c.cohomology(n));
    }
}

TEST_CASE("complex cohomology with coefficient modes") {
    auto c = periodic(3, 6);
    CHECK(c.cohomology(2) == FgAbGroup(0, {3}));
    CHECK(c.cohomology(1, Coefficients::QmodZ) == linalg::StructuredCoefGroup{0, 0, FgAbGroup(0, {3})});
    CHECK(c.cohomology(0, Coefficients::QmodZ) == linalg::StructuredCoefGroup{1, 0, FgAbGroup()});
    CHECK(c.cohomology(0, Coefficients::Q) == linalg::StructuredCoefGroup{0, 1, FgAbGroup()});
    CHECK(c.cohomology(2, Coefficients::Q) == linalg::StructuredCoefGroup{});
}

TEST_CASE("bockstein on torsion-free cohomology is zero") {
    IntCochainComplex c(0, {2, 1}, {sp(ints({{1, -1}}))});
    auto r = bockstein(c, 1);
    CHECK(r.image.is_trivial());
    CHECK(r.image_is_torsion);
}

TEST_CASE("bockstein of the periodic complex hits Z/p") {
    for (long p : {2, 3, 5}) {
        auto c = periodic(p, 6);
        auto r = bockstein(c, 2);
        CHECK(r.image == FgAbGroup(0, {Integer(p)}));
        CHECK(r.image_is_torsion);
        auto v = bockstein_apply(c, 2, {Rational(1, p)});
        CHECK(v == std::vector<Integer>{-1});
    }
    CHECK_THROWS_AS(bockstein_apply(periodic(2, 4), 2, {Rational(1, 3)}), NotACocycle);
}

TEST_CASE("bad resolution counterexample") {
    auto r = bad_resolution_counterexample();
    CHECK(r.nonzero());
    CHECK(r.witness == GaussianRational{0, 1});
    CHECK(r.composite == GaussianRational{0, 2});
    CHECK(r.composite_on_real == GaussianRational{0, 0});
    CHECK(r.lifts_restrict_to_identity_on_Z);
    auto honest = bad_resolution_counterexample(std::vector<std::vector<bool>>{{}, {false, false}, {false, false, false}});
    CHECK_FALSE(honest.nonzero());
    CHECK(honest.composite_on_real == GaussianRational{0, 0});
}

TEST_CASE("quasi-isomorphism verdicts") {
    DoubleComplex dc = DoubleComplex::zeros(1, 1, {{1, 1}, {1, 0}});
    dc.horizontal[0][0] = sp(ints({{0}}));
    dc.vertical[0][0] = sp(ints({{1}}));
    dc.validate();
    DoubleComplexMap id{dc, dc, {{sp(ints({{1}})), sp(ints({{1}}))}, {sp(ints({{1}})), SparseIntMatrix(0, 0)}}};
    auto v = quasi_iso_by_rows(id, RowDirection::FixedP, 2, 3);
    CHECK(v.rowwise);
    CHECK(v.total);
    DoubleComplexMap zero = id;
    zero.components[0][1] = sp(ints({{0}}));
    zero.components[0][0] = sp(ints({{0}}));
    zero.components[1][0] = sp(ints({{0}}));
    v = quasi_iso_by_rows(zero, RowDirection::FixedP, 2, 3);
    CHECK_FALSE(v.rowwise);
    CHECK_FALSE(v.total);
    CHECK_FALSE(v.details.empty());
}

TEST_CASE("synthetic homotopy complexes satisfy the axioms") {
    std::mt19937_64 rng(13);
    int nonzero_s = 0;
    for (int trial = 0; trial < 30; ++trial) {
        auto h = synthetic_homotopy_complex(rng, 3, 4);
        CHECK_NOTHROW(h.validate());
        auto t = homotopy_total(h);
        CHECK_NOTHROW(t.validate());
        for (auto& lvl : h.s)
            for (auto& comp : lvl)
                for (auto& m : comp) nonzero_s += !m.is_zero();
    }
    CHECK(nonzero_s > 0);
}

TEST_CASE("broken homotopy complexes name the failing relation") {
    std::mt19937_64 rng(2);
    auto h = synthetic_homotopy_complex(rng, 2, 3);
    h.faces[1][0][0] = h.faces[1][0][0].scaled(2);
    CHECK_THROWS_AS(h.validate(), AxiomViolation);
}

TEST_CASE("homotopy total agrees with total complex when s = 0 and f^2 = 0") {
    // Constant simplicial module over a two-term complex: f^2 = 0 and s = 0.
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        auto h = synthetic_homotopy_complex(rng, 3, 2);
        auto dc = underlying_double_complex(h);
        auto a = homotopy_total(h);
        auto b = total_complex(dc);
        REQUIRE(a.ranks() == b.ranks());
        for (int n = 0; n < a.max_degree(); ++n) {
            CHECK(block_signs(dc, n + 1) * a.differential(n).to_dense() == b.differential(n).to_dense() * block_signs(dc, n));
            CHECK(a.cohomology(n) == b.cohomology(n));
        }
    }
}

TEST_CASE("cone of a homotopy morphism is a homotopy complex") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        auto h = synthetic_homotopy_complex(rng, 2, 4);
        HomotopyMorphism id{h, h, {}};
        for (std::size_t p = 0; p <= h.P; ++p) {
            id.components.emplace_back();
            for (int q = h.qmin; q <= h.qmax; ++q) id.components[p].push_back(IntMatrix::identity(h.rank(p, q)));
        }
        auto c = cone(id);
        CHECK_NOTHROW(c.validate());
        auto t = homotopy_total(c);
        for (int n = t.min_degree(); n <= t.max_degree() - 1; ++n) CHECK(t.rational_betti(n) == 0);
    }
}
