#include "eqdiff/diffcoh.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "eqdiff/errors.hpp"

namespace eqdiff::diffcoh {

using linalg::IntMatrix;
using linalg::SparseIntMatrix;
using linalg::preimage;
using linalg::quotient;
using linalg::to_rational;

namespace {

RatMatrix dmat(const IntCochainComplex& c, int m) { return to_rational(c.differential(m).to_dense()); }

RatMatrix zeros(std::size_t r, std::size_t c) { return RatMatrix(r, c); }

MixedGroup full_space(std::size_t n) { return MixedGroup::subspace(n, RatMatrix::identity(n)); }
MixedGroup full_lattice(std::size_t n) { return MixedGroup::lattice(n, RatMatrix::identity(n)); }

Rational frac(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    Rational r = q - Rational(f);
    r.canonicalize();
    return r;
}

bool is_integral(const Rational& q) { return q.get_den() == 1; }

std::string sup(int n) { return std::to_string(n); }

Corner make_corner(std::string name, std::string label, MixedGroup z, MixedGroup b) {
    if (!z.contains(b)) throw InternalError("corner " + name + ": coboundaries not inside cocycles");
    Corner c{std::move(name), std::move(label), std::move(z), std::move(b), {}};
    c.structure = quotient(c.cocycles, c.coboundaries);
    return c;
}

struct Builder {
    HexagonReport rep;

    const Corner& get(const std::string& n) const { return rep.corner(n); }
    const CornerMap& map(const std::string& n) const {
        for (const auto& m : rep.maps)
            if (m.name == n) return m;
        throw InternalError("no hexagon map " + n);
    }

    void add_map(std::string name, std::string from, std::string to, RatMatrix m) {
        const Corner &x = get(from), &y = get(to);
        if (m.rows() != y.cocycles.dim() || m.cols() != x.cocycles.dim())
            throw InternalError("map " + name + " has the wrong shape");
        if (!y.cocycles.contains(x.cocycles.image(m)) || !y.coboundaries.contains(x.coboundaries.image(m)))
            throw InternalError("map " + name + " is not well defined on classes");
        rep.maps.push_back({std::move(name), std::move(from), std::move(to), std::move(m)});
    }

    // exactness at the target of f, which is the source of g
    bool middle(const std::string& seq, const std::string& f, const std::string& g) {
        const CornerMap &mf = map(f), &mg = map(g);
        const Corner &x = get(mf.from), &y = get(mf.to), &w = get(mg.to);
        MixedGroup im = x.cocycles.image(mf.matrix) + y.coboundaries;
        MixedGroup ker = preimage(mg.matrix, y.cocycles, w.coboundaries);
        bool ok = im.contains(ker) && ker.contains(im);
        rep.checks.push_back({seq, y.name, quotient(im, y.coboundaries), quotient(ker, y.coboundaries), ok});
        return ok;
    }

    bool injective(const std::string& seq, const std::string& f) {
        const CornerMap& mf = map(f);
        const Corner &x = get(mf.from), &y = get(mf.to);
        MixedGroup ker = preimage(mf.matrix, x.cocycles, y.coboundaries);
        bool ok = x.coboundaries.contains(ker);
        rep.checks.push_back({seq, x.name, MixedQuotient{}, quotient(ker, x.coboundaries), ok});
        return ok;
    }

    bool surjective(const std::string& seq, const std::string& g) {
        const CornerMap& mg = map(g);
        const Corner &y = get(mg.from), &w = get(mg.to);
        MixedGroup im = y.cocycles.image(mg.matrix) + w.coboundaries;
        bool ok = im.contains(w.cocycles);
        rep.checks.push_back({seq, w.name, quotient(im, w.coboundaries), w.structure, ok});
        return ok;
    }

    void commutes(const std::string& label, const std::string& src, const std::string& tgt, const RatMatrix& p1,
                  const RatMatrix& p2) {
        bool ok = get(tgt).coboundaries.contains(get(src).cocycles.image(p1 - p2));
        rep.commutativity.push_back({label, ok});
    }

    void beta_torsion() {
        const Corner &b = get("B"), &c = get("C");
        MixedGroup im = b.cocycles.image(map("minus_beta").matrix) + c.coboundaries;
        MixedQuotient q = quotient(im, c.coboundaries);
        rep.beta_image_is_torsion = q.free_rank == 0 && q.circle_rank == 0 && q.vector_rank == 0 &&
                                    q.torsion == c.structure.torsion;
    }
};

// Corners A..D and the top row maps, from any integral complex.
void top_row(Builder& bd, const IntCochainComplex& c, int n) {
    const std::size_t a = c.rank(n - 1), r = c.rank(n);
    const RatMatrix d0 = dmat(c, n - 1), dm = dmat(c, n - 2), d1 = dmat(c, n);
    const std::vector<bool> no(a, false), yes_r(r, true), no_r(r, false);
    auto& cs = bd.rep.corners;
    cs.push_back(make_corner("A", "H^" + sup(n - 1) + "(ℂ)", linalg::mixed_kernel(d0, no),
                             MixedGroup::subspace(a, dm)));
    cs.push_back(make_corner("B", "H^" + sup(n - 1) + "(ℂ/ℤ)", preimage(d0, full_space(a), full_lattice(r)),
                             full_lattice(a) + MixedGroup::subspace(a, dm)));
    cs.push_back(make_corner("C", "H^" + sup(n) + "(ℤ)", linalg::mixed_kernel(d1, yes_r), MixedGroup::lattice(r, d0)));
    cs.push_back(make_corner("D", "H^" + sup(n) + "(ℂ)", linalg::mixed_kernel(d1, no_r), MixedGroup::subspace(r, d0)));
    bd.add_map("alpha", "A", "B", RatMatrix::identity(a));
    bd.add_map("minus_beta", "B", "C", -d0);
    bd.add_map("iota", "C", "D", RatMatrix::identity(r));
    bool t1 = bd.middle("top", "alpha", "minus_beta");
    bool t2 = bd.middle("top", "minus_beta", "iota");
    bd.rep.top_row = t1 && t2;
    bd.beta_torsion();
}

const char* kHexagonArt = R"(
   {A} ──α──▶ {B} ──−β──▶ {C} ──ι──▶ {D}
          ╲             j╲         ↗I             ↗
           ε╲              {Hhat}               ╱
             ↘           a↗       ↘R          ╱
               {E} ──d──────────▶ {F} ──────╯
)";

}  // namespace

// ---------------------------------------------------------------------------
// Deligne cone

std::size_t DeligneComplexData::dim(int m) const {
    return base.rank(m) + (has_truncated_forms() ? base.rank(m) : 0) + base.rank(m - 1);
}

std::vector<bool> DeligneComplexData::integral_mask(int m) const {
    std::vector<bool> mask(dim(m), false);
    for (std::size_t i = 0; i < base.rank(m); ++i) mask[i] = true;
    return mask;
}

RatMatrix DeligneComplexData::differential(int m) const {
    const bool s = has_truncated_forms();
    const std::size_t r0 = base.rank(m), r1 = base.rank(m + 1);
    const RatMatrix d = dmat(base, m), dprev = dmat(base, m - 1);
    RatMatrix out(dim(m + 1), dim(m));
    // rows: z' (r1), ω' (s r1), η' (r0); columns: z (r0), ω (s r0), η (rm)
    const std::size_t row_eta = r1 + (s ? r1 : 0), col_eta = r0 + (s ? r0 : 0);
    out.set_block(0, 0, d);
    if (s) {
        out.set_block(r1, r0, d);
        out.set_block(row_eta, r0, RatMatrix::identity(r0));
    }
    out.set_block(row_eta, 0, -RatMatrix::identity(r0));
    out.set_block(row_eta, col_eta, -dprev);
    return out;
}

bool DeligneComplexData::square_zero() const {
    for (int m = base.min_degree() - 1; m <= base.max_degree() + 1; ++m)
        if (!(differential(m + 1) * differential(m)).is_zero()) return false;
    return true;
}

namespace {

// Reduced bar columns of single orbits, shared across the actions of a sweep.
struct OrbitCache {
    using Key = std::tuple<std::vector<std::vector<std::size_t>>, std::vector<std::vector<std::size_t>>, std::size_t>;
    std::mutex mu;
    std::map<Key, IntCochainComplex> done;
};

IntCochainComplex direct_sum(const std::vector<IntCochainComplex>& parts, std::size_t levels) {
    std::vector<std::size_t> ranks(levels + 1, 0);
    for (const auto& c : parts)
        for (std::size_t k = 0; k <= levels; ++k) ranks[k] += c.rank(static_cast<int>(k));
    std::vector<SparseIntMatrix> ds;
    for (std::size_t k = 0; k < levels; ++k) {
        SparseIntMatrix d(ranks[k + 1], ranks[k]);
        std::size_t ro = 0, co = 0;
        for (const auto& c : parts) {
            const SparseIntMatrix dk = c.differential(static_cast<int>(k));
            for (std::size_t j = 0; j < dk.cols(); ++j)
                for (const auto& [i, v] : dk.column(j)) d.add(ro + i, co + j, v);
            ro += c.rank(static_cast<int>(k) + 1);
            co += c.rank(static_cast<int>(k));
        }
        d.finalize();
        ds.push_back(std::move(d));
    }
    return IntCochainComplex(0, ranks, std::move(ds));
}

// The bar column of M is the direct sum of the bar columns of its orbits;
// each orbit is reduced on its own.
IntCochainComplex zero_dim_bar_complex_impl(const GAction& act, std::size_t levels, OrbitCache* cache) {
    const auto& cells = act.space().cells;
    for (std::size_t k = 1; k < cells.size(); ++k)
        if (cells[k] > 0)
            throw PositiveDimensionalInput("M has cells in dimension " + std::to_string(k) +
                                           "; use hexagon with supplied form corners");
    const std::size_t pts = cells.empty() ? 0 : cells[0], order = act.group().order();
    std::vector<bool> seen(pts, false);
    std::vector<IntCochainComplex> parts;
    for (std::size_t m0 = 0; m0 < pts; ++m0) {
        if (seen[m0]) continue;
        std::vector<std::size_t> orbit;
        for (std::size_t g = 0; g < order; ++g) orbit.push_back(act.act(g).target[0][m0]);
        std::sort(orbit.begin(), orbit.end());
        orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
        std::vector<std::vector<std::size_t>> perms(order, std::vector<std::size_t>(orbit.size()));
        for (std::size_t g = 0; g < order; ++g)
            for (std::size_t i = 0; i < orbit.size(); ++i) {
                seen[orbit[i]] = true;
                auto it = std::lower_bound(orbit.begin(), orbit.end(), act.act(g).target[0][orbit[i]]);
                perms[g][i] = static_cast<std::size_t>(it - orbit.begin());
            }
        OrbitCache::Key key{act.group().table(), perms, levels};
        if (cache) {
            std::lock_guard<std::mutex> lk(cache->mu);
            if (auto it = cache->done.find(key); it != cache->done.end()) {
                parts.push_back(it->second);
                continue;
            }
        }
        auto sub = simplicial::point_action(act.group(), perms);
        auto dc = simplicial::cellular_double_complex(simplicial::bar_levels(sub, levels));
        parts.push_back(complexes::reduce(dc.column(0), 0));
        if (cache) {
            std::lock_guard<std::mutex> lk(cache->mu);
            cache->done.emplace(key, parts.back());
        }
    }
    return direct_sum(parts, levels);
}

}  // namespace

IntCochainComplex zero_dim_bar_complex(const GAction& act, std::size_t levels) {
    return zero_dim_bar_complex_impl(act, levels, nullptr);
}

DeligneComplexData deligne_complex(const GAction& act, int n) {
    if (n < 0) throw SchemaError("degree must be >= 0");
    return DeligneComplexData{n, zero_dim_bar_complex(act, static_cast<std::size_t>(n) + 1)};
}

DiffCohReport differential_cohomology_of_complex(const IntCochainComplex& c, int n) {
    HexagonReport h = hexagon_of_complex(c, n);
    DiffCohReport r;
    r.n = n;
    r.group = h.corner("Hhat").structure;
    r.forms_part = h.corner("E").structure;
    r.integral_part = h.corner("C").structure.finitely_generated_part();
    r.split = r.forms_part.free_rank == 0 && r.forms_part.torsion.empty();
    return r;
}

DiffCohReport differential_cohomology_zero_dim(const GAction& act, int n) {
    if (n < 0) throw SchemaError("degree must be >= 0");
    return differential_cohomology_of_complex(zero_dim_bar_complex(act, static_cast<std::size_t>(n) + 1), n);
}

// ---------------------------------------------------------------------------
// Hexagon

const Corner& HexagonReport::corner(const std::string& name) const {
    for (const auto& c : corners)
        if (c.name == name) return c;
    throw InternalError("hexagon has no corner " + name);
}

bool HexagonReport::has_corner(const std::string& name) const {
    return std::any_of(corners.begin(), corners.end(), [&](const Corner& c) { return c.name == name; });
}

bool HexagonReport::all_exact() const {
    return top_row.value_or(false) && bottom_row.value_or(false) && flat_diagonal.value_or(false) &&
           topological_diagonal.value_or(false);
}

bool HexagonReport::all_commute() const {
    return std::all_of(commutativity.begin(), commutativity.end(), [](const auto& c) { return c.commutes; });
}

std::string HexagonReport::to_text() const {
    auto cell = [&](const std::string& name) {
        if (!has_corner(name)) return std::string("[" + name + ": not computed]");
        const Corner& c = corner(name);
        return c.label + " = " + c.structure.to_string();
    };
    std::string art = kHexagonArt;
    for (const char* k : {"Hhat", "A", "B", "C", "D", "E", "F"}) {
        std::string key = std::string("{") + k + "}";
        auto pos = art.find(key);
        if (pos != std::string::npos) art.replace(pos, key.size(), cell(k));
    }
    auto verdict = [](const std::optional<bool>& v) {
        return v ? (*v ? std::string("exact") : std::string("NOT exact")) : std::string("not evaluated");
    };
    std::ostringstream os;
    os << "hexagon in degree n = " << n << art;
    os << "top row: " << verdict(top_row) << "\n";
    os << "bottom row: " << verdict(bottom_row) << "\n";
    os << "flat diagonal: " << verdict(flat_diagonal) << "\n";
    os << "topological diagonal: " << verdict(topological_diagonal) << "\n";
    for (const auto& c : commutativity) os << c.name << ": " << (c.commutes ? "commutes" : "FAILS") << "\n";
    if (beta_image_is_torsion)
        os << "image of −β = torsion of " << corner("C").label << ": " << (*beta_image_is_torsion ? "yes" : "no")
           << "\n";
    return os.str();
}

HexagonReport hexagon_of_complex(const IntCochainComplex& c, int n) {
    if (n < 0) throw SchemaError("degree must be >= 0");
    Builder bd;
    bd.rep.n = n;
    top_row(bd, c, n);

    const DeligneComplexData dn{n, c};
    const bool sig = dn.has_truncated_forms();
    const std::size_t a = c.rank(n - 1), r = c.rank(n);
    const RatMatrix d0 = dmat(c, n - 1), dm = dmat(c, n - 2), d1 = dmat(c, n);
    const std::size_t e = n >= 1 ? a : 0, f = sig ? r : 0;
    auto& cs = bd.rep.corners;

    MixedGroup ez = MixedGroup::zero(0), eb = MixedGroup::zero(0);
    if (n >= 1) {
        ez = linalg::mixed_kernel(d0, std::vector<bool>(a, false));
        eb = linalg::mixed_kernel(d0, std::vector<bool>(a, true)) + MixedGroup::subspace(a, dm);
    }
    cs.push_back(make_corner("E", "Ω^" + sup(n - 1) + "/Ω^" + sup(n - 1) + "_ℤ", ez, eb));
    MixedGroup fz = sig ? linalg::mixed_kernel(d1, std::vector<bool>(r, true)) : MixedGroup::zero(0);
    cs.push_back(make_corner("F", "Ω^" + sup(n) + "_ℤ", fz, MixedGroup::zero(f)));
    cs.push_back(make_corner("Hhat", "Ĥ^" + sup(n),
                             linalg::mixed_kernel(dn.differential(n), dn.integral_mask(n)),
                             MixedGroup::coordinate(dn.integral_mask(n - 1)).image(dn.differential(n - 1))));

    // Ĥ coordinates: z (r), ω (f), η (a)
    const std::size_t h = dn.dim(n), h_eta = r + f;
    RatMatrix eps = zeros(e, a), j = zeros(h, a), amap = zeros(h, e), imap = zeros(r, h), rmap = zeros(f, h);
    if (n >= 1) eps = RatMatrix::identity(a);
    j.set_block(0, 0, -d0);
    j.set_block(h_eta, 0, RatMatrix::identity(a));
    if (n >= 1) amap.set_block(h_eta, 0, RatMatrix::identity(a));
    imap.set_block(0, 0, RatMatrix::identity(r));
    if (sig) rmap.set_block(0, r, RatMatrix::identity(r));
    RatMatrix dr = zeros(r, f);
    if (sig) dr = RatMatrix::identity(r);

    bd.add_map("epsilon", "A", "E", eps);
    bd.add_map("d", "E", "F", zeros(f, e));
    bd.add_map("de_rham", "F", "D", dr);
    bd.add_map("j", "B", "Hhat", j);
    bd.add_map("a", "E", "Hhat", amap);
    bd.add_map("I", "Hhat", "C", imap);
    bd.add_map("R", "Hhat", "F", rmap);

    bool b1 = bd.middle("bottom", "epsilon", "d");
    bool b2 = bd.middle("bottom", "d", "de_rham");
    bd.rep.bottom_row = b1 && b2;
    bool f1 = bd.injective("flat diagonal", "j");
    bool f2 = bd.middle("flat diagonal", "j", "R");
    bool f3 = bd.surjective("flat diagonal", "R");
    bd.rep.flat_diagonal = f1 && f2 && f3;
    bool g1 = bd.injective("topological diagonal", "a");
    bool g2 = bd.middle("topological diagonal", "a", "I");
    bool g3 = bd.surjective("topological diagonal", "I");
    bd.rep.topological_diagonal = g1 && g2 && g3;

    bd.commutes("j∘α = a∘ε", "A", "Hhat", j, amap * eps);
    bd.commutes("I∘j = −β", "B", "C", imap * j, -d0);
    bd.commutes("R∘a = d", "E", "F", rmap * amap, zeros(f, e));
    bd.commutes("ι∘I = (de Rham)∘R", "Hhat", "D", imap, dr * rmap);
    return bd.rep;
}

HexagonReport hexagon(const GAction& act, int n) {
    if (n < 0) throw SchemaError("degree must be >= 0");
    return hexagon_of_complex(zero_dim_bar_complex(act, static_cast<std::size_t>(n) + 1), n);
}

void SuppliedForms::validate() const {
    const std::size_t dim = closed.rows();
    if (d.cols() != dim || face0.cols() != dim || face1.cols() != dim || face0.rows() != face1.rows() ||
        (periods.cols() > 0 && periods.rows() != dim))
        throw InconsistentCorners("supplied form matrices have inconsistent shapes");
    if (!(d * closed).is_zero()) throw InconsistentCorners("a supplied form is not closed (dω ≠ 0)");
    if (!(face0 * closed == face1 * closed))
        throw InconsistentCorners("a supplied form is not invariant (∂₀^*ω ≠ ∂₁^*ω)");
    if (periods.cols() > 0 && !MixedGroup::subspace(dim, closed).contains(MixedGroup::lattice(dim, periods)))
        throw InconsistentCorners("period lattice is not inside the closed invariant forms");
}

HexagonReport hexagon_supplied(const DoubleComplex& dc, int n, const std::optional<SuppliedForms>& forms) {
    if (n < 0) throw SchemaError("degree must be >= 0");
    dc.validate();
    if (static_cast<std::size_t>(n) + 1 > dc.P + dc.Q)
        throw SchemaError("degree " + std::to_string(n) + " needs total degree n+1 inside the double complex");
    Builder bd;
    bd.rep.n = n;
    top_row(bd, complexes::total_complex(dc), n);
    if (forms) {
        forms->validate();
        const std::size_t dim = forms->closed.rows();
        std::size_t closed_dim = linalg::rank(forms->closed);
        bd.rep.corners.push_back(make_corner("F",
                                             "Ω^" + sup(n) + "_ℤ (closed invariant forms: dim " +
                                                 std::to_string(closed_dim) + ")",
                                             MixedGroup::lattice(dim, forms->periods), MixedGroup::zero(dim)));
    }
    return bd.rep;
}

// ---------------------------------------------------------------------------
// Lens bundle

FlatEquivariantLineBundle FlatEquivariantLineBundle::lens(std::size_t p, std::size_t q) {
    if (p < 2 || q >= p) throw SchemaError("lens bundle needs p >= 2 and 0 <= q < p");
    FlatEquivariantLineBundle l;
    l.p = p;
    l.q = q;
    l.transport.assign(p, Rational(0));
    l.fiber.assign(p, std::vector<Rational>(p));
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t v = 0; v < p; ++v) l.fiber[k][v] = frac(Rational(k * q, p));
    return l;
}

Rational FlatEquivariantLineBundle::total_holonomy() const {
    Rational s = 0;
    for (const auto& t : transport) s += t;
    return s;
}

Rational evaluate_on_fundamental_domain(const FlatEquivariantLineBundle& l) {
    const std::size_t p = l.p;
    if (!is_integral(l.total_holonomy())) throw NotACocycle("total holonomy of the flat bundle is not integral");
    auto bl = simplicial::bar_levels(simplicial::free_circle(p), 2);
    auto dc = simplicial::cellular_double_complex(bl);
    auto tot = complexes::total_complex(dc);
    const std::size_t off_a = complexes::total_offset(dc, 0, 1), off_b = complexes::total_offset(dc, 1, 0);

    // cocycle in total degree 1 with Q/Z values
    RatMatrix x(tot.rank(1), 1);
    for (std::size_t e = 0; e < p; ++e) x(off_a + e, 0) = l.transport[e];
    for (std::size_t g = 0; g < p; ++g)
        for (std::size_t v = 0; v < p; ++v) x(off_b + g * p + v, 0) = l.fiber[g][v];
    RatMatrix dx = to_rational(tot.differential(1).to_dense()) * x;
    for (std::size_t i = 0; i < dx.rows(); ++i)
        if (!is_integral(dx(i, 0))) throw NotACocycle("holonomy data is not a cocycle mod Z");

    // e_0 + s (g, v_0), with s fixed by asking the chain to be a cycle
    const IntMatrix d0t = tot.differential(0).to_dense().transpose();
    for (int s : {1, -1}) {
        IntMatrix tau(tot.rank(1), 1);
        tau(off_a + 0, 0) = 1;
        tau(off_b + 1 * p + 0, 0) = s;
        if (!(d0t * tau).is_zero()) continue;
        Rational v = 0;
        for (std::size_t i = 0; i < tau.rows(); ++i) v += Rational(tau(i, 0)) * x(i, 0);
        return frac(v);
    }
    throw InternalError("fundamental-domain chain is not a cycle");
}

Rational flat_equivariant_chern_class(std::size_t p, std::size_t q) {
    return evaluate_on_fundamental_domain(FlatEquivariantLineBundle::lens(p, q));
}

// ---------------------------------------------------------------------------
// Homotopy formula

namespace {

Rational eval_poly(const std::vector<Rational>& c, const Rational& t) {
    Rational v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
}

std::vector<Rational> derivative(const std::vector<Rational>& c) {
    std::vector<Rational> d(c.size() > 1 ? c.size() - 1 : 0);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * Rational(static_cast<long>(k));
    return d;
}

// ∫_a^b f dt for a polynomial f
Rational integrate(const std::vector<Rational>& f, const Rational& a, const Rational& b) {
    std::vector<Rational> prim(f.size() + 1);
    for (std::size_t k = 0; k < f.size(); ++k) prim[k + 1] = f[k] / Rational(static_cast<long>(k + 1));
    return eval_poly(prim, b) - eval_poly(prim, a);
}

}  // namespace

HomotopyFormulaReport homotopy_formula_check(const GAction& act, const IntervalCocycle& x) {
    const std::size_t pts = act.space().cells.empty() ? 0 : act.space().cells[0];
    for (std::size_t k = 1; k < act.space().cells.size(); ++k)
        if (act.space().cells[k] > 0) throw PositiveDimensionalInput("M must be 0-dimensional");
    const auto& br = x.breaks;
    if (br.size() < 2 || br.front() != 0 || br.back() != 1) throw SchemaError("breaks must run from 0 to 1");
    for (std::size_t i = 1; i < br.size(); ++i)
        if (!(br[i - 1] < br[i])) throw SchemaError("breaks must increase");
    const std::size_t pieces = br.size() - 1;
    if (x.phi.size() != pts) throw SchemaError("need one polynomial family per point");
    for (const auto& per : x.phi)
        if (per.size() != pieces) throw SchemaError("need one polynomial per piece");

    for (std::size_t m = 0; m < pts; ++m)
        for (std::size_t j = 0; j + 1 < pieces; ++j)
            if (!is_integral(eval_poly(x.phi[m][j + 1], br[j + 1]) - eval_poly(x.phi[m][j], br[j + 1])))
                throw NotACocycle("jump at t = " + linalg::to_string(br[j + 1]) + " is not an integer");
    for (std::size_t g = 0; g < act.group().order(); ++g)
        for (std::size_t m = 0; m < pts; ++m)
            if (x.phi[act.act(g).target[0][m]] != x.phi[m]) throw NotACocycle("interval data is not G-invariant");

    // Ĥ^1(M): cocycles (z, η) and coboundaries from degree 0.
    IntCochainComplex c = simplicial::cellular_double_complex(simplicial::bar_levels(act, 2)).column(0);
    DeligneComplexData d1{1, c};
    MixedGroup z = linalg::mixed_kernel(d1.differential(1), d1.integral_mask(1));
    MixedGroup b = MixedGroup::coordinate(d1.integral_mask(0)).image(d1.differential(0));
    const std::size_t eta = c.rank(1);

    HomotopyFormulaReport rep;
    RatMatrix lhs(d1.dim(1), 1), rhs(d1.dim(1), 1);
    for (std::size_t m = 0; m < pts; ++m) {
        Rational l = eval_poly(x.phi[m].back(), 1) - eval_poly(x.phi[m].front(), 0);
        Rational r = 0;
        for (std::size_t j = 0; j < pieces; ++j) r += integrate(derivative(x.phi[m][j]), br[j], br[j + 1]);
        lhs(eta + m, 0) = l;
        rhs(eta + m, 0) = r;
        rep.lhs.push_back(frac(l));
        rep.rhs.push_back(frac(r));
    }
    rep.holds = z.contains_vector(lhs) && z.contains_vector(rhs) && b.contains_vector(lhs - rhs);
    return rep;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<simplicial::FiniteGroup> small_groups() {
    std::vector<simplicial::FiniteGroup> g;
    for (std::size_t n = 1; n <= 6; ++n) g.push_back(simplicial::FiniteGroup::cyclic(n));
    g.push_back(simplicial::FiniteGroup::symmetric(3));
    return g;
}

namespace {

bool check_ok(const HexagonReport& r, const std::string& seq, const std::string& pos) {
    bool found = false, ok = true;
    for (const auto& c : r.checks)
        if (c.sequence == seq && c.position == pos) {
            found = true;
            ok = ok && c.exact;
        }
    return found && ok;
}

}  // namespace

std::vector<SweepEntry> hexagon_sweep(const std::vector<simplicial::FiniteGroup>& groups, std::size_t max_points,
                                      int max_n, unsigned workers) {
    std::vector<GAction> actions;
    for (const auto& g : groups)
        for (auto& a : simplicial::all_point_actions(g, max_points)) actions.push_back(std::move(a));

    if (workers == 0) {
        if (const char* env = std::getenv("EQDIFF_WORKERS")) workers = static_cast<unsigned>(std::atoi(env));
        if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(actions.size(), 1)));

    std::vector<std::vector<SweepEntry>> per(actions.size());
    OrbitCache cache;
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto work = [&] {
        for (std::size_t i = next++; i < actions.size(); i = next++) {
            try {
                const GAction& act = actions[i];
                IntCochainComplex c = zero_dim_bar_complex_impl(act, static_cast<std::size_t>(max_n) + 1, &cache);
                for (int n = 0; n <= max_n; ++n) {
                    HexagonReport h = hexagon_of_complex(c, n);
                    SweepEntry e;
                    e.group = act.group().name();
                    e.action = act.label;
                    e.n = n;
                    e.exact = h.all_exact();
                    e.commutes = h.all_commute();
                    e.bockstein_is_torsion =
                        h.beta_image_is_torsion.value_or(false) && complexes::bockstein(c, n).image_is_torsion;
                    e.i_onto = check_ok(h, "topological diagonal", "C");
                    e.ker_i_matches = check_ok(h, "topological diagonal", "Hhat") &&
                                      check_ok(h, "topological diagonal", "E");
                    per[i].push_back(std::move(e));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);

    std::vector<SweepEntry> out;
    for (auto& v : per)
        for (auto& e : v) out.push_back(std::move(e));
    return out;
}

}  // namespace eqdiff::diffcoh
