#include "eqdiff/complexes.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>
#include <set>

namespace eqdiff::complexes {

using linalg::to_rational;

std::string to_string(Coefficients c) {
    switch (c) {
        case Coefficients::Z: return "Z";
        case Coefficients::Q: return "Q";
        case Coefficients::QmodZ: return "Q/Z";
    }
    return "?";
}

Coefficients coefficients_from_string(const std::string& s) {
    if (s == "z" || s == "Z") return Coefficients::Z;
    if (s == "q" || s == "Q" || s == "c" || s == "C") return Coefficients::Q;
    if (s == "qz" || s == "Q/Z" || s == "cz" || s == "C/Z") return Coefficients::QmodZ;
    throw SchemaError("unknown coefficient mode '" + s + "' (expected z, q or qz)");
}

namespace {

// Assembles a sparse matrix from sparse blocks at given offsets.
class BlockBuilder {
public:
    BlockBuilder(std::size_t rows, std::size_t cols) : m_(rows, cols) {}
    void put(std::size_t r0, std::size_t c0, const SparseIntMatrix& b, int sign = 1) {
        for (std::size_t j = 0; j < b.cols(); ++j)
            for (const auto& [i, v] : b.column(j)) m_.add(r0 + i, c0 + j, sign > 0 ? v : Integer(-v));
    }
    void put(std::size_t r0, std::size_t c0, const IntMatrix& b, int sign = 1) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                if (b(i, j) != 0) m_.add(r0 + i, c0 + j, sign > 0 ? b(i, j) : Integer(-b(i, j)));
    }
    SparseIntMatrix done() {
        m_.finalize();
        return std::move(m_);
    }

private:
    SparseIntMatrix m_;
};

bool equal(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t j = 0; j < a.cols(); ++j)
        if (a.column(j) != b.column(j)) return false;
    return true;
}

IntMatrix zero_dense(std::size_t r, std::size_t c) { return IntMatrix(r, c); }

}  // namespace

IntCochainComplex::IntCochainComplex(int min_degree, std::vector<std::size_t> ranks,
                                     std::vector<SparseIntMatrix> differentials)
    : min_degree_(min_degree), ranks_(std::move(ranks)), d_(std::move(differentials)) {
    std::size_t expected = ranks_.empty() ? 0 : ranks_.size() - 1;
    if (d_.size() != expected) throw DimensionMismatch("complex needs one differential between consecutive degrees");
    for (std::size_t k = 0; k < d_.size(); ++k)
        if (d_[k].cols() != ranks_[k] || d_[k].rows() != ranks_[k + 1])
            throw DimensionMismatch("differential d^" + std::to_string(min_degree_ + static_cast<int>(k)) +
                                    " has the wrong shape");
}

std::size_t IntCochainComplex::rank(int n) const {
    if (ranks_.empty() || n < min_degree_ || n > max_degree()) return 0;
    return ranks_[n - min_degree_];
}

SparseIntMatrix IntCochainComplex::differential(int n) const {
    if (n >= min_degree_ && n < max_degree()) return d_[n - min_degree_];
    return SparseIntMatrix(rank(n + 1), rank(n));
}

void IntCochainComplex::validate() const {
    for (std::size_t k = 0; k + 1 < d_.size(); ++k)
        if (!(d_[k + 1] * d_[k]).is_zero())
            throw CompositionNotZero("d^" + std::to_string(min_degree_ + static_cast<int>(k) + 1) + " d^" +
                                     std::to_string(min_degree_ + static_cast<int>(k)) + " != 0");
}

FgAbGroup IntCochainComplex::cohomology(int n) const {
    return linalg::cohomology_at(differential(n - 1), differential(n));
}

std::size_t IntCochainComplex::rational_betti(int n) const {
    return rank(n) - linalg::rank(differential(n)) - linalg::rank(differential(n - 1));
}

linalg::StructuredCoefGroup IntCochainComplex::cohomology(int n, Coefficients c) const {
    switch (c) {
        case Coefficients::Q: return linalg::coefficient_change(cohomology(n), FgAbGroup(), linalg::CoefMode::C);
        case Coefficients::QmodZ:
            return linalg::coefficient_change(cohomology(n), cohomology(n + 1), linalg::CoefMode::CmodZ);
        case Coefficients::Z: break;
    }
    throw InternalError("integral cohomology is an FgAbGroup, not a structured group");
}

IntCochainComplex reduce(const IntCochainComplex& c, int protect_below) {
    const int lo = c.min_degree(), hi = c.max_degree();
    if (c.ranks().empty()) return c;
    const std::size_t nd = c.ranks().size();
    // alive[k][i]: basis element i of degree lo+k survives.
    std::vector<std::vector<bool>> alive(nd);
    for (std::size_t k = 0; k < nd; ++k) alive[k].assign(c.ranks()[k], true);
    // Row-map form of every differential, updated in place.
    std::vector<std::vector<std::map<std::size_t, Integer>>> rows(nd ? nd - 1 : 0);
    for (int n = lo; n < hi; ++n) {
        const SparseIntMatrix d = c.differential(n);
        auto& r = rows[n - lo];
        r.assign(d.rows(), {});
        for (std::size_t j = 0; j < d.cols(); ++j)
            for (const auto& [i, v] : d.column(j)) r[i].emplace(j, v);
    }
    for (int n = std::max(lo, protect_below); n < hi; ++n) {
        auto& r = rows[n - lo];
        const std::size_t ncols = c.rank(n);
        std::vector<std::set<std::size_t>> col_rows(ncols);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (const auto& [j, v] : r[i]) col_rows[j].insert(i);
        // Markowitz order: cancel the unit entry (b, e) with the smallest
        // (|column b| - 1)(|row e| - 1), which bounds the fill-in it creates.
        using Cand = std::tuple<std::size_t, std::size_t, std::size_t>;  // cost, column, row
        std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;
        auto cost = [&](std::size_t b, std::size_t e) { return (col_rows[b].size() - 1) * (r[e].size() - 1); };
        auto is_unit = [&](std::size_t b, std::size_t e) {
            auto it = r[e].find(b);
            return it != r[e].end() && (it->second == 1 || it->second == -1);
        };
        for (std::size_t i = 0; i < r.size(); ++i)
            for (const auto& [j, v] : r[i])
                if (v == 1 || v == -1) heap.emplace(cost(j, i), j, i);
        while (!heap.empty()) {
            auto [c0, b, e] = heap.top();
            heap.pop();
            if (!alive[n - lo][b] || !alive[n - lo + 1][e] || !is_unit(b, e)) continue;
            if (std::size_t c1 = cost(b, e); c1 != c0) {
                heap.emplace(c1, b, e);
                continue;
            }
            const auto prow = r[e];
            const Integer eps = prow.at(b);
            std::vector<std::size_t> targets(col_rows[b].begin(), col_rows[b].end());
            for (std::size_t y : targets) {
                if (y == e) continue;
                Integer factor = r[y].at(b) * eps;
                for (const auto& [x, v] : prow) {
                    auto it = r[y].find(x);
                    if (it == r[y].end()) {
                        it = r[y].emplace(x, -factor * v).first;
                        col_rows[x].insert(y);
                    } else {
                        it->second -= factor * v;
                        if (it->second == 0) {
                            r[y].erase(it);
                            col_rows[x].erase(y);
                            continue;
                        }
                    }
                    if (x != b && (it->second == 1 || it->second == -1)) heap.emplace(cost(x, y), x, y);
                }
            }
            for (const auto& [x, v] : prow) col_rows[x].erase(e);
            r[e].clear();
            alive[n - lo][b] = false;
            alive[n - lo + 1][e] = false;
        }
    }
    // Reindex survivors and drop cancelled rows and columns.
    std::vector<std::vector<std::size_t>> newidx(nd);
    std::vector<std::size_t> ranks(nd);
    for (std::size_t k = 0; k < nd; ++k) {
        newidx[k].assign(alive[k].size(), SIZE_MAX);
        for (std::size_t i = 0; i < alive[k].size(); ++i)
            if (alive[k][i]) newidx[k][i] = ranks[k]++;
    }
    std::vector<SparseIntMatrix> ds;
    for (std::size_t k = 0; k + 1 < nd; ++k) {
        SparseIntMatrix d(ranks[k + 1], ranks[k]);
        for (std::size_t i = 0; i < rows[k].size(); ++i) {
            if (!alive[k + 1][i]) continue;
            for (const auto& [j, v] : rows[k][i])
                if (alive[k][j]) d.add(newidx[k + 1][i], newidx[k][j], v);
        }
        d.finalize();
        ds.push_back(std::move(d));
    }
    IntCochainComplex out(lo, ranks, std::move(ds));
    out.validate();
    return out;
}

SparseIntMatrix ChainMap::component(int n) const {
    int k = n - source.min_degree();
    if (k >= 0 && k < static_cast<int>(components.size())) return components[k];
    return SparseIntMatrix(target.rank(n + shift), source.rank(n));
}

void ChainMap::validate() const {
    const int lo = source.min_degree(), hi = source.max_degree();
    if (components.size() != source.ranks().size())
        throw NotChainMap("chain map needs one component per source degree");
    for (int n = lo; n <= hi; ++n) {
        const auto f = component(n);
        if (f.rows() != target.rank(n + shift) || f.cols() != source.rank(n))
            throw NotChainMap("component in degree " + std::to_string(n) + " has the wrong shape");
    }
    for (int n = lo - 1; n <= hi; ++n) {
        if (!equal(target.differential(n + shift) * component(n), component(n + 1) * source.differential(n)))
            throw NotChainMap("map does not commute with differentials in degree " + std::to_string(n));
    }
}

IntCochainComplex cone(const ChainMap& w) {
    w.validate();
    if (w.shift != 0) throw NotChainMap("cone needs a degree-preserving map");
    const auto& A = w.source;
    const auto& B = w.target;
    int lo = std::min(A.min_degree() - 1, B.min_degree());
    int hi = std::max(A.max_degree() - 1, B.max_degree());
    std::vector<std::size_t> ranks;
    for (int k = lo; k <= hi; ++k) ranks.push_back(A.rank(k + 1) + B.rank(k));
    std::vector<SparseIntMatrix> ds;
    for (int k = lo; k < hi; ++k) {
        BlockBuilder bb(A.rank(k + 2) + B.rank(k + 1), A.rank(k + 1) + B.rank(k));
        bb.put(0, 0, A.differential(k + 1), -1);
        bb.put(A.rank(k + 2), 0, w.component(k + 1), -1);
        bb.put(A.rank(k + 2), A.rank(k + 1), B.differential(k));
        ds.push_back(bb.done());
    }
    IntCochainComplex c(lo, ranks, std::move(ds));
    c.validate();
    return c;
}

DoubleComplex DoubleComplex::zeros(std::size_t P, std::size_t Q, std::vector<std::vector<std::size_t>> ranks) {
    DoubleComplex dc;
    dc.P = P;
    dc.Q = Q;
    dc.ranks = std::move(ranks);
    if (dc.ranks.size() != P + 1) throw IllFormedDoubleComplex("ranks must have P+1 rows");
    for (auto& r : dc.ranks)
        if (r.size() != Q + 1) throw IllFormedDoubleComplex("ranks must have Q+1 columns");
    dc.horizontal.assign(P + 1, {});
    for (std::size_t p = 0; p <= P; ++p)
        for (std::size_t q = 0; q < Q; ++q) dc.horizontal[p].emplace_back(dc.ranks[p][q + 1], dc.ranks[p][q]);
    dc.vertical.assign(P, {});
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t q = 0; q <= Q; ++q) dc.vertical[p].emplace_back(dc.ranks[p + 1][q], dc.ranks[p][q]);
    return dc;
}

void DoubleComplex::validate() const {
    auto fail = [](const std::string& m) { throw IllFormedDoubleComplex(m); };
    if (ranks.size() != P + 1 || horizontal.size() != P + 1 || vertical.size() != P) fail("level count mismatch");
    for (std::size_t p = 0; p <= P; ++p) {
        if (ranks[p].size() != Q + 1 || horizontal[p].size() != Q) fail("grade count mismatch");
        for (std::size_t q = 0; q < Q; ++q)
            if (horizontal[p][q].rows() != ranks[p][q + 1] || horizontal[p][q].cols() != ranks[p][q])
                fail("horizontal map at (" + std::to_string(p) + "," + std::to_string(q) + ") has the wrong shape");
    }
    for (std::size_t p = 0; p < P; ++p) {
        if (vertical[p].size() != Q + 1) fail("grade count mismatch");
        for (std::size_t q = 0; q <= Q; ++q)
            if (vertical[p][q].rows() != ranks[p + 1][q] || vertical[p][q].cols() != ranks[p][q])
                fail("vertical map at (" + std::to_string(p) + "," + std::to_string(q) + ") has the wrong shape");
    }
    for (std::size_t p = 0; p <= P; ++p)
        for (std::size_t q = 0; q + 1 < Q; ++q)
            if (!(horizontal[p][q + 1] * horizontal[p][q]).is_zero())
                fail("d∘d != 0 at (" + std::to_string(p) + "," + std::to_string(q) + ")");
    for (std::size_t p = 0; p + 1 < P; ++p)
        for (std::size_t q = 0; q <= Q; ++q)
            if (!(vertical[p + 1][q] * vertical[p][q]).is_zero())
                fail("∂∘∂ != 0 at (" + std::to_string(p) + "," + std::to_string(q) + ")");
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t q = 0; q < Q; ++q)
            if (!equal(horizontal[p + 1][q] * vertical[p][q], vertical[p][q + 1] * horizontal[p][q]))
                fail("square at (" + std::to_string(p) + "," + std::to_string(q) + ") does not commute");
}

IntCochainComplex DoubleComplex::row(std::size_t p) const {
    return IntCochainComplex(0, ranks[p], horizontal[p]);
}

IntCochainComplex DoubleComplex::column(std::size_t q) const {
    std::vector<std::size_t> r;
    std::vector<SparseIntMatrix> d;
    for (std::size_t p = 0; p <= P; ++p) r.push_back(ranks[p][q]);
    for (std::size_t p = 0; p < P; ++p) d.push_back(vertical[p][q]);
    return IntCochainComplex(0, r, d);
}

std::size_t total_offset(const DoubleComplex& dc, std::size_t p, std::size_t q) {
    std::size_t n = p + q, off = 0;
    for (std::size_t pp = 0; pp < p; ++pp)
        if (n - pp <= dc.Q) off += dc.ranks[pp][n - pp];
    return off;
}

IntCochainComplex total_complex(const DoubleComplex& dc) {
    dc.validate();
    const std::size_t top = dc.P + dc.Q;
    std::vector<std::size_t> ranks(top + 1, 0);
    for (std::size_t p = 0; p <= dc.P; ++p)
        for (std::size_t q = 0; q <= dc.Q; ++q) ranks[p + q] += dc.ranks[p][q];
    std::vector<SparseIntMatrix> ds;
    for (std::size_t n = 0; n < top; ++n) {
        BlockBuilder bb(ranks[n + 1], ranks[n]);
        for (std::size_t p = 0; p <= std::min(n, dc.P); ++p) {
            std::size_t q = n - p;
            if (q > dc.Q) continue;
            std::size_t col = total_offset(dc, p, q);
            if (q < dc.Q) bb.put(total_offset(dc, p, q + 1), col, dc.horizontal[p][q]);
            if (p < dc.P) bb.put(total_offset(dc, p + 1, q), col, dc.vertical[p][q], q % 2 ? -1 : 1);
        }
        ds.push_back(bb.done());
    }
    IntCochainComplex t(0, ranks, std::move(ds));
    t.validate();
    return t;
}

void DoubleComplexMap::validate() const {
    const auto& S = source;
    const auto& T = target;
    if (S.P != T.P || S.Q != T.Q) throw NotChainMap("double complex map between different shapes");
    for (std::size_t p = 0; p <= S.P; ++p)
        for (std::size_t q = 0; q <= S.Q; ++q) {
            const auto& f = components[p][q];
            if (f.rows() != T.ranks[p][q] || f.cols() != S.ranks[p][q])
                throw NotChainMap("component (" + std::to_string(p) + "," + std::to_string(q) + ") has the wrong shape");
            if (q < S.Q && !equal(T.horizontal[p][q] * f, components[p][q + 1] * S.horizontal[p][q]))
                throw NotChainMap("map does not commute with d at (" + std::to_string(p) + "," + std::to_string(q) + ")");
            if (p < S.P && !equal(T.vertical[p][q] * f, components[p + 1][q] * S.vertical[p][q]))
                throw NotChainMap("map does not commute with ∂ at (" + std::to_string(p) + "," + std::to_string(q) + ")");
        }
}

namespace {

// Whether f induces an isomorphism H^n(A; Q) -> H^n(B; Q).
bool induces_rational_iso(const IntCochainComplex& a, const IntCochainComplex& b, const SparseIntMatrix& f, int n,
                          std::string& why) {
    RatMatrix za = a.rank(n) ? linalg::rational_kernel(to_rational(a.differential(n).to_dense()))
                             : RatMatrix(0, 0);
    RatMatrix bb = to_rational(b.differential(n - 1).to_dense());
    std::size_t ha = a.rational_betti(n), hb = b.rational_betti(n);
    if (ha != hb) {
        why = "dimensions " + std::to_string(ha) + " vs " + std::to_string(hb);
        return false;
    }
    if (ha == 0) return true;
    RatMatrix img = to_rational(f.to_dense()) * za;
    std::size_t rb = linalg::rank(bb);
    std::size_t r = linalg::rank(RatMatrix::hstack(bb, img));
    if (r - rb != ha) {
        why = "induced map has rank " + std::to_string(r - rb) + " on a space of dimension " + std::to_string(ha);
        return false;
    }
    return true;
}

SparseIntMatrix total_component(const DoubleComplexMap& m, const IntCochainComplex& ts, const IntCochainComplex& tt,
                                std::size_t n) {
    BlockBuilder bb(tt.rank(static_cast<int>(n)), ts.rank(static_cast<int>(n)));
    for (std::size_t p = 0; p <= std::min(n, m.source.P); ++p) {
        std::size_t q = n - p;
        if (q > m.source.Q) continue;
        bb.put(total_offset(m.target, p, q), total_offset(m.source, p, q), m.components[p][q]);
    }
    return bb.done();
}

}  // namespace

QuasiIsoVerdict quasi_iso_by_rows(const DoubleComplexMap& m, RowDirection dir, int row_limit, int total_limit) {
    m.validate();
    QuasiIsoVerdict v;
    v.valid_below = total_limit;
    v.rowwise = true;
    const auto& S = m.source;
    const auto& T = m.target;
    std::size_t fixed_count = dir == RowDirection::FixedP ? S.P + 1 : S.Q + 1;
    for (std::size_t k = 0; k < fixed_count; ++k) {
        IntCochainComplex a = dir == RowDirection::FixedP ? S.row(k) : S.column(k);
        IntCochainComplex b = dir == RowDirection::FixedP ? T.row(k) : T.column(k);
        std::vector<SparseIntMatrix> comps;
        std::size_t len = dir == RowDirection::FixedP ? S.Q + 1 : S.P + 1;
        for (std::size_t j = 0; j < len; ++j)
            comps.push_back(dir == RowDirection::FixedP ? m.components[k][j] : m.components[j][k]);
        for (int n = 0; n < std::min<int>(row_limit, static_cast<int>(len)); ++n) {
            std::string why;
            if (!induces_rational_iso(a, b, comps[n], n, why)) {
                v.rowwise = false;
                v.details.push_back((dir == RowDirection::FixedP ? "row p=" : "column q=") + std::to_string(k) +
                                    ", degree " + std::to_string(n) + ": " + why);
            }
        }
    }
    IntCochainComplex ts = total_complex(S), tt = total_complex(T);
    v.total = true;
    for (int n = 0; n < std::min<int>(total_limit, ts.max_degree() + 1); ++n) {
        std::string why;
        if (!induces_rational_iso(ts, tt, total_component(m, ts, tt, n), n, why)) {
            v.total = false;
            v.details.push_back("total degree " + std::to_string(n) + ": " + why);
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Simplicial homotopy cochain complexes

std::size_t SimplicialHomotopyComplex::rank(std::size_t p, int q) const {
    if (p > P || q < qmin || q > qmax) return 0;
    return ranks[p][q - qmin];
}

IntMatrix SimplicialHomotopyComplex::face(std::size_t p, std::size_t i, int q) const {
    if (p == 0 || p > P || i > p || q < qmin || q > qmax) return zero_dense(rank(p, q), rank(p - 1, q));
    return faces[p][i][q - qmin];
}

IntMatrix SimplicialHomotopyComplex::degeneracy(std::size_t p, std::size_t i, int q) const {
    if (p >= P || i > p || q < qmin || q > qmax) return zero_dense(rank(p, q), rank(p + 1, q));
    return degeneracies[p][i][q - qmin];
}

IntMatrix SimplicialHomotopyComplex::f_at(std::size_t p, int q) const {
    if (p > P || q < qmin || q >= qmax) return zero_dense(rank(p, q + 1), rank(p, q));
    return f[p][q - qmin];
}

IntMatrix SimplicialHomotopyComplex::s_at(std::size_t p, std::size_t i, int q) const {
    if (p == 0 || p > P || i >= p || q < qmin || q + 2 > qmax) return zero_dense(rank(p - 1, q + 2), rank(p, q));
    return s[p][i][q - qmin];
}

IntMatrix SimplicialHomotopyComplex::boundary(std::size_t p, int q) const {
    IntMatrix b(rank(p + 1, q), rank(p, q));
    if (p >= P) return b;
    for (std::size_t i = 0; i <= p + 1; ++i) {
        if (i % 2)
            b = b - face(p + 1, i, q);
        else
            b = b + face(p + 1, i, q);
    }
    return b;
}

IntMatrix SimplicialHomotopyComplex::homotopy(std::size_t p, int q) const {
    if (p == 0) return IntMatrix(0, rank(p, q));
    IntMatrix h(rank(p - 1, q + 2), rank(p, q));
    for (std::size_t i = 0; i < p; ++i) {
        if (i % 2)
            h = h - s_at(p, i, q);
        else
            h = h + s_at(p, i, q);
    }
    return h;
}

SimplicialHomotopyComplex SimplicialHomotopyComplex::allocate(std::size_t P, int qmin, int qmax,
                                                              std::vector<std::vector<std::size_t>> ranks) {
    SimplicialHomotopyComplex h;
    h.P = P;
    h.qmin = qmin;
    h.qmax = qmax;
    h.ranks = std::move(ranks);
    const int nq = qmax - qmin + 1;
    h.faces.assign(P + 1, {});
    h.degeneracies.assign(P + 1, {});
    h.f.assign(P + 1, {});
    h.s.assign(P + 1, {});
    for (std::size_t p = 0; p <= P; ++p) {
        if (p > 0)
            for (std::size_t i = 0; i <= p; ++i) {
                h.faces[p].emplace_back();
                for (int q = qmin; q <= qmax; ++q) h.faces[p][i].emplace_back(h.rank(p, q), h.rank(p - 1, q));
            }
        if (p < P)
            for (std::size_t i = 0; i <= p; ++i) {
                h.degeneracies[p].emplace_back();
                for (int q = qmin; q <= qmax; ++q) h.degeneracies[p][i].emplace_back(h.rank(p, q), h.rank(p + 1, q));
            }
        for (int q = qmin; q < qmax; ++q) h.f[p].emplace_back(h.rank(p, q + 1), h.rank(p, q));
        for (std::size_t i = 0; i < p; ++i) {
            h.s[p].emplace_back();
            for (int q = qmin; q + 2 <= qmax; ++q) h.s[p][i].emplace_back(h.rank(p - 1, q + 2), h.rank(p, q));
        }
    }
    (void)nq;
    return h;
}

void SimplicialHomotopyComplex::validate() const {
    auto where = [](std::size_t p, int q) { return " at level " + std::to_string(p) + ", grade " + std::to_string(q); };
    for (std::size_t p = 0; p <= P; ++p)
        for (int q = qmin; q <= qmax; ++q) {
            // Cosimplicial identities for faces into level p+1 from level p-1.
            if (p >= 1 && p + 1 <= P)
                for (std::size_t j = 1; j <= p + 1; ++j)
                    for (std::size_t i = 0; i < j; ++i)
                        if (!(face(p + 1, j, q) * face(p, i, q) == face(p + 1, i, q) * face(p, j - 1, q)))
                            throw AxiomViolation("simplicial identity ∂_i∂_j = ∂_{j-1}∂_i fails for i=" +
                                                 std::to_string(i) + ", j=" + std::to_string(j) + where(p, q));
            // Degeneracies against faces, maps level p -> p.
            if (p + 1 <= P)
                for (std::size_t j = 0; j <= p; ++j)
                    for (std::size_t i = 0; i <= p + 1; ++i) {
                        IntMatrix lhs = degeneracy(p, j, q) * face(p + 1, i, q);
                        IntMatrix rhs;
                        if (i == j || i == j + 1)
                            rhs = IntMatrix::identity(rank(p, q));
                        else if (i < j)
                            rhs = face(p, i, q) * degeneracy(p - 1, j - 1, q);
                        else
                            rhs = face(p, i - 1, q) * degeneracy(p - 1, j, q);
                        if (p == 0 && i != j && i != j + 1) continue;
                        if (!(lhs == rhs))
                            throw AxiomViolation("simplicial identity between σ_" + std::to_string(j) + " and ∂_" +
                                                 std::to_string(i) + " fails" + where(p, q));
                    }
            if (p + 2 <= P)
                for (std::size_t j = 0; j <= p; ++j)
                    for (std::size_t i = 0; i <= j; ++i)
                        if (!(degeneracy(p, j, q) * degeneracy(p + 1, i, q) ==
                              degeneracy(p, i, q) * degeneracy(p + 1, j + 1, q)))
                            throw AxiomViolation("simplicial identity σ_iσ_j = σ_{j+1}σ_i fails" + where(p, q));
            // f is a map of simplicial modules.
            if (p >= 1)
                for (std::size_t i = 0; i <= p; ++i)
                    if (!(f_at(p, q) * face(p, i, q) == face(p, i, q + 1) * f_at(p - 1, q)))
                        throw AxiomViolation("f does not commute with ∂_" + std::to_string(i) + where(p, q));
            if (p < P)
                for (std::size_t i = 0; i <= p; ++i)
                    if (!(f_at(p, q) * degeneracy(p, i, q) == degeneracy(p, i, q + 1) * f_at(p + 1, q)))
                        throw AxiomViolation("f does not commute with σ_" + std::to_string(i) + where(p, q));
            // s∂ + ∂s = -f^2
            IntMatrix lhs(rank(p, q + 2), rank(p, q));
            if (p < P) lhs = lhs + homotopy(p + 1, q) * boundary(p, q);
            if (p > 0) lhs = lhs + boundary(p - 1, q + 2) * homotopy(p, q);
            IntMatrix f2 = f_at(p, q + 1) * f_at(p, q);
            if (!(lhs == -f2)) throw AxiomViolation("s∂+∂s = -f² fails" + where(p, q));
            // sf = fs, componentwise
            for (std::size_t i = 0; i < p; ++i)
                if (!(s_at(p, i, q + 1) * f_at(p, q) == f_at(p - 1, q + 2) * s_at(p, i, q)))
                    throw AxiomViolation("sf = fs fails for s_" + std::to_string(i) + where(p, q));
            // s^2 = 0
            if (p >= 2 && !(homotopy(p - 1, q + 2) * homotopy(p, q)).is_zero())
                throw AxiomViolation("s² = 0 fails" + where(p, q));
        }
}

IntCochainComplex homotopy_total(const SimplicialHomotopyComplex& h) {
    h.validate();
    const int lo = h.qmin, hi = static_cast<int>(h.P) + h.qmax;
    auto offset = [&](std::size_t p, int q) {
        std::size_t off = 0;
        int n = static_cast<int>(p) + q;
        for (std::size_t pp = 0; pp < p; ++pp) off += h.rank(pp, n - static_cast<int>(pp));
        return off;
    };
    std::vector<std::size_t> ranks;
    for (int n = lo; n <= hi; ++n) {
        std::size_t r = 0;
        for (std::size_t p = 0; p <= h.P; ++p) r += h.rank(p, n - static_cast<int>(p));
        ranks.push_back(r);
    }
    std::vector<SparseIntMatrix> ds;
    for (int n = lo; n < hi; ++n) {
        BlockBuilder bb(ranks[n + 1 - lo], ranks[n - lo]);
        for (std::size_t p = 0; p <= h.P; ++p) {
            int q = n - static_cast<int>(p);
            if (q < h.qmin || q > h.qmax || h.rank(p, q) == 0) continue;
            std::size_t col = offset(p, q);
            if (p < h.P) bb.put(offset(p + 1, q), col, h.boundary(p, q));
            if (p > 0 && q + 2 <= h.qmax) bb.put(offset(p - 1, q + 2), col, h.homotopy(p, q));
            if (q < h.qmax) bb.put(offset(p, q + 1), col, h.f_at(p, q), p % 2 ? -1 : 1);
        }
        ds.push_back(bb.done());
    }
    IntCochainComplex t(lo, ranks, std::move(ds));
    try {
        t.validate();
    } catch (const CompositionNotZero& e) {
        throw AxiomViolation(std::string("total boundary does not square to zero: ") + e.what());
    }
    return t;
}

void HomotopyMorphism::validate() const {
    const auto& S = source;
    const auto& T = target;
    if (S.P != T.P || S.qmin != T.qmin || S.qmax != T.qmax) throw NotChainMap("morphism between different shapes");
    auto w = [&](std::size_t p, int q) {
        if (p > S.P || q < S.qmin || q > S.qmax) return IntMatrix(T.rank(p, q), S.rank(p, q));
        return components[p][q - S.qmin];
    };
    for (std::size_t p = 0; p <= S.P; ++p)
        for (int q = S.qmin; q <= S.qmax; ++q) {
            auto where = " at level " + std::to_string(p) + ", grade " + std::to_string(q);
            if (w(p, q).rows() != T.rank(p, q) || w(p, q).cols() != S.rank(p, q))
                throw NotChainMap("component has the wrong shape" + where);
            if (!(T.f_at(p, q) * w(p, q) == w(p, q + 1) * S.f_at(p, q))) throw NotChainMap("w f != f w" + where);
            for (std::size_t i = 0; p >= 1 && i <= p; ++i)
                if (!(T.face(p, i, q) * w(p - 1, q) == w(p, q) * S.face(p, i, q)))
                    throw NotChainMap("w does not commute with ∂_" + std::to_string(i) + where);
            for (std::size_t i = 0; p < S.P && i <= p; ++i)
                if (!(T.degeneracy(p, i, q) * w(p + 1, q) == w(p, q) * S.degeneracy(p, i, q)))
                    throw NotChainMap("w does not commute with σ_" + std::to_string(i) + where);
            for (std::size_t i = 0; i < p; ++i)
                if (!(T.s_at(p, i, q) * w(p, q) == w(p - 1, q + 2) * S.s_at(p, i, q)))
                    throw NotChainMap("w does not commute with s_" + std::to_string(i) + where);
        }
}

SimplicialHomotopyComplex cone(const HomotopyMorphism& w) {
    w.validate();
    const auto& F = w.source;
    const auto& G = w.target;
    auto wc = [&](std::size_t p, int q) {
        if (q < F.qmin || q > F.qmax) return IntMatrix(G.rank(p, q), F.rank(p, q));
        return w.components[p][q - F.qmin];
    };
    const int qmin = std::min(F.qmin - 1, G.qmin), qmax = std::max(F.qmax - 1, G.qmax);
    std::vector<std::vector<std::size_t>> ranks(F.P + 1);
    for (std::size_t p = 0; p <= F.P; ++p)
        for (int k = qmin; k <= qmax; ++k) ranks[p].push_back(F.rank(p, k + 1) + G.rank(p, k));
    auto h = SimplicialHomotopyComplex::allocate(F.P, qmin, qmax, ranks);
    auto diag = [](const IntMatrix& a, const IntMatrix& b) {
        IntMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
        m.set_block(0, 0, a);
        m.set_block(a.rows(), a.cols(), b);
        return m;
    };
    for (std::size_t p = 0; p <= F.P; ++p)
        for (int k = qmin; k <= qmax; ++k) {
            const int kk = k - qmin;
            if (p > 0)
                for (std::size_t i = 0; i <= p; ++i) h.faces[p][i][kk] = diag(F.face(p, i, k + 1), G.face(p, i, k));
            if (p < F.P)
                for (std::size_t i = 0; i <= p; ++i)
                    h.degeneracies[p][i][kk] = diag(F.degeneracy(p, i, k + 1), G.degeneracy(p, i, k));
            if (k < qmax) {
                IntMatrix m(h.rank(p, k + 1), h.rank(p, k));
                const std::size_t a0 = F.rank(p, k + 1), a1 = F.rank(p, k + 2);
                m.set_block(0, 0, -F.f_at(p, k + 1));
                m.set_block(a1, 0, -wc(p, k + 1));
                m.set_block(a1, a0, G.f_at(p, k));
                h.f[p][kk] = m;
            }
            if (k + 2 <= qmax)
                for (std::size_t i = 0; i < p; ++i) h.s[p][i][kk] = diag(F.s_at(p, i, k + 1), G.s_at(p, i, k));
        }
    h.validate();
    return h;
}

namespace {

IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
    IntMatrix u = IntMatrix::identity(n);
    if (n < 2) return u;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (std::size_t step = 0; step < 3 * n; ++step) {
        std::size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        Integer c = coef(rng);
        for (std::size_t k = 0; k < n; ++k) u(i, k) += c * u(j, k);
    }
    return u;
}

IntMatrix unimodular_inverse(const IntMatrix& u) {
    return linalg::to_integer([&] {
        RatMatrix x;
        linalg::solve(to_rational(u), RatMatrix::identity(u.rows()), x);
        return x;
    }());
}

}  // namespace

SimplicialHomotopyComplex synthetic_homotopy_complex(std::mt19937_64& rng, std::size_t P, int grades) {
    std::uniform_int_distribution<int> small(1, 2);
    std::uniform_int_distribution<int> coef(-2, 2);
    // Blocks per grade: [incoming a_{q-1} | homology h_q | outgoing a_q].
    std::vector<std::size_t> a(grades, 0), h(grades, 0), r(grades, 0);
    for (int q = 0; q < grades; ++q) {
        a[q] = q + 1 < grades ? small(rng) : 0;
        h[q] = small(rng) - 1;
    }
    for (int q = 0; q < grades; ++q) r[q] = (q > 0 ? a[q - 1] : 0) + h[q] + a[q];
    std::vector<IntMatrix> fq(grades > 0 ? grades - 1 : 0);
    for (int q = 0; q + 1 < grades; ++q) {
        IntMatrix j(r[q + 1], r[q]);
        std::size_t out0 = (q > 0 ? a[q - 1] : 0) + h[q];
        for (std::size_t t = 0; t < a[q]; ++t) j(t, out0 + t) = small(rng);
        fq[q] = j;
    }
    std::vector<IntMatrix> U(grades), Ui(grades);
    for (int q = 0; q < grades; ++q) {
        U[q] = random_unimodular(rng, r[q]);
        Ui[q] = unimodular_inverse(U[q]);
    }
    std::vector<std::vector<std::size_t>> ranks(P + 1, std::vector<std::size_t>(r.begin(), r.end()));
    auto out = SimplicialHomotopyComplex::allocate(P, 0, grades - 1, ranks);
    for (std::size_t p = 0; p <= P; ++p) {
        for (int q = 0; q < grades; ++q) {
            if (p > 0)
                for (std::size_t i = 0; i <= p; ++i) out.faces[p][i][q] = IntMatrix::identity(r[q]);
            if (p < P)
                for (std::size_t i = 0; i <= p; ++i) out.degeneracies[p][i][q] = IntMatrix::identity(r[q]);
            if (q + 1 < grades) out.f[p][q] = U[q + 1] * fq[q] * Ui[q];
        }
    }
    // s_0 = f K f on odd levels; every other component vanishes.
    for (std::size_t p = 1; p <= P; p += 2)
        for (int q = 0; q + 2 < grades; ++q) {
            IntMatrix k(r[q + 1], r[q + 1]);
            for (std::size_t i = 0; i < r[q + 1]; ++i)
                for (std::size_t j = 0; j < r[q + 1]; ++j) k(i, j) = coef(rng);
            out.s[p][0][q] = U[q + 2] * fq[q + 1] * k * fq[q] * Ui[q];
        }
    out.validate();
    return out;
}

DoubleComplex underlying_double_complex(const SimplicialHomotopyComplex& h) {
    const std::size_t Q = static_cast<std::size_t>(h.qmax - h.qmin);
    std::vector<std::vector<std::size_t>> ranks(h.P + 1);
    for (std::size_t p = 0; p <= h.P; ++p)
        for (int q = h.qmin; q <= h.qmax; ++q) ranks[p].push_back(h.rank(p, q));
    DoubleComplex dc = DoubleComplex::zeros(h.P, Q, ranks);
    for (std::size_t p = 0; p <= h.P; ++p)
        for (std::size_t q = 0; q <= Q; ++q) {
            int qq = h.qmin + static_cast<int>(q);
            if (q < Q) dc.horizontal[p][q] = SparseIntMatrix::from_dense(h.f_at(p, qq));
            if (p < h.P) dc.vertical[p][q] = SparseIntMatrix::from_dense(h.boundary(p, qq));
        }
    dc.validate();
    return dc;
}

// ---------------------------------------------------------------------------
// Bockstein

std::vector<Integer> bockstein_apply(const IntCochainComplex& c, int n, const std::vector<Rational>& qz) {
    if (qz.size() != c.rank(n - 1)) throw DimensionMismatch("cochain has the wrong length");
    std::vector<Rational> lift(qz.size());
    for (std::size_t i = 0; i < qz.size(); ++i) {
        Integer fl;
        mpz_fdiv_q(fl.get_mpz_t(), qz[i].get_num_mpz_t(), qz[i].get_den_mpz_t());
        lift[i] = qz[i] - Rational(fl);
    }
    const SparseIntMatrix d = c.differential(n - 1);
    std::vector<Rational> img(d.rows());
    for (std::size_t j = 0; j < d.cols(); ++j)
        for (const auto& [i, v] : d.column(j)) img[i] += Rational(v) * lift[j];
    std::vector<Integer> out(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (img[i].get_den() != 1)
            throw NotACocycle("cochain is not closed mod Z in degree " + std::to_string(n - 1));
        out[i] = -img[i].get_num();
    }
    return out;
}

BocksteinReport bockstein(const IntCochainComplex& c, int n) {
    BocksteinReport rep;
    rep.degree = n;
    const std::size_t a = c.rank(n - 1), b = c.rank(n);
    RatMatrix d = to_rational(c.differential(n - 1).to_dense());
    // Q/Z cocycles: b in Q^a with d b integral.
    auto zqz = linalg::preimage(d, linalg::MixedGroup::subspace(a, RatMatrix::identity(a)),
                                linalg::MixedGroup::lattice(b, RatMatrix::identity(b)));
    rep.generators = zqz.lattice_rank();
    RatMatrix images(b, zqz.lattice_rank());
    for (std::size_t k = 0; k < zqz.lattice_rank(); ++k) {
        std::vector<Rational> col(a);
        for (std::size_t i = 0; i < a; ++i) col[i] = zqz.lattice_basis()(i, k);
        auto z = bockstein_apply(c, n, col);
        for (std::size_t i = 0; i < b; ++i) images(i, k) = Rational(z[i]);
    }
    auto boundaries = linalg::MixedGroup::lattice(b, d);
    auto im = linalg::MixedGroup::lattice(b, images) + boundaries;
    auto q = linalg::quotient(im, boundaries);
    rep.image = FgAbGroup(q.free_rank, q.torsion);
    rep.torsion = c.cohomology(n).torsion_subgroup();
    rep.image_is_torsion = q.circle_rank == 0 && q.vector_rank == 0 && rep.image == rep.torsion;
    return rep;
}

// ---------------------------------------------------------------------------
// Counterexample

namespace {

GaussianRational apply_lift(bool conj, const GaussianRational& z) { return conj ? GaussianRational{z.re, -z.im} : z; }

GaussianRational boundary_into(const std::vector<bool>& conj, const GaussianRational& z) {
    GaussianRational out{0, 0};
    for (std::size_t i = 0; i < conj.size(); ++i) {
        GaussianRational t = apply_lift(conj[i], z);
        if (i % 2) {
            out.re -= t.re;
            out.im -= t.im;
        } else {
            out.re += t.re;
            out.im += t.im;
        }
    }
    return out;
}

}  // namespace

CounterexampleReport bad_resolution_counterexample(std::optional<std::vector<std::vector<bool>>> conjugated) {
    CounterexampleReport r;
    if (conjugated) {
        r.conjugated = *conjugated;
    } else {
        r.conjugated = {{}, {false, true}, {false, false, false}};
    }
    if (r.conjugated.size() < 3 || r.conjugated[1].size() != 2 || r.conjugated[2].size() != 3)
        throw SchemaError("lift pattern needs 2 faces into level 1 and 3 faces into level 2");
    r.level = 0;
    for (const auto& lvl : r.conjugated)
        for (bool c : lvl) {
            GaussianRational one{1, 0};
            if (!(apply_lift(c, one) == one)) r.lifts_restrict_to_identity_on_Z = false;
        }
    r.witness = {0, 1};
    r.composite = boundary_into(r.conjugated[2], boundary_into(r.conjugated[1], r.witness));
    r.composite_on_real = boundary_into(r.conjugated[2], boundary_into(r.conjugated[1], GaussianRational{1, 0}));
    return r;
}

}  // namespace eqdiff::complexes
