#include "eqdiff/json_io.hpp"

#include <algorithm>

namespace eqdiff::io {

namespace {

using simplicial::CellComplex;
using simplicial::FiniteGroup;
using simplicial::GAction;
using simplicial::SignedCellMap;

std::size_t to_size(const json& j, const std::string& what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw SchemaError(what + " must be a nonnegative integer");
    return j.get<std::size_t>();
}

int to_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw SchemaError(what + " must be an integer");
    return j.get<int>();
}

bool to_bool(const json& j, const std::string& what) {
    if (!j.is_boolean()) throw SchemaError(what + " must be true or false");
    return j.get<bool>();
}

std::string to_str(const json& j, const std::string& what) {
    if (!j.is_string()) throw SchemaError(what + " must be a string");
    return j.get<std::string>();
}

const json& array_of(const json& j, const std::string& what) {
    if (!j.is_array()) throw SchemaError(what + " must be an array");
    return j;
}

std::optional<bool> optional_bool(const json& j, const std::string& what) {
    if (j.is_null()) return std::nullopt;
    return to_bool(j, what);
}

json optional_json(const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); }

std::size_t parse_count(const std::string& s, const std::string& what) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw SchemaError(what + " needs a nonnegative integer, got '" + s + "'");
    return std::stoul(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t k = s.find(sep, start);
        out.push_back(s.substr(start, k == std::string::npos ? std::string::npos : k - start));
        if (k == std::string::npos) return out;
        start = k + 1;
    }
}

template <class T, class F>
std::vector<T> vector_from_json(const json& j, const std::string& what, F&& f) {
    std::vector<T> out;
    for (const auto& e : array_of(j, what)) out.push_back(f(e));
    return out;
}

template <class T>
json array_json(const std::vector<T>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(to_json(x));
    return a;
}

template <class T>
json matrix_json(const linalg::Matrix<T>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
        rows.push_back(std::move(r));
    }
    // A plain array cannot carry the column count of a matrix without rows.
    if (m.rows() == 0 && m.cols() > 0) return json{{"shape", {0, m.cols()}}, {"entries", rows}};
    return rows;
}

template <class T, class F>
linalg::Matrix<T> matrix_from(const json& j, std::optional<std::size_t> rows, std::optional<std::size_t> cols,
                              F&& entry) {
    const json* entries = &j;
    if (j.is_object()) {
        expect_object(j, {"shape", "entries"}, {}, "matrix");
        const json& shape = array_of(j.at("shape"), "matrix shape");
        if (shape.size() != 2) throw SchemaError("matrix shape must be [rows, cols]");
        std::size_t r = to_size(shape[0], "matrix rows"), c = to_size(shape[1], "matrix cols");
        if ((rows && *rows != r) || (cols && *cols != c)) throw SchemaError("matrix shape disagrees with its context");
        rows = r;
        cols = c;
        entries = &j.at("entries");
    }
    const json& a = array_of(*entries, "matrix");
    if (rows && a.size() != *rows)
        throw SchemaError("matrix has " + std::to_string(a.size()) + " rows, expected " + std::to_string(*rows));
    std::size_t c = a.empty() ? cols.value_or(0) : array_of(a[0], "matrix row").size();
    if (cols && c != *cols)
        throw SchemaError("matrix has " + std::to_string(c) + " columns, expected " + std::to_string(*cols));
    linalg::Matrix<T> m(a.size(), c);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const json& row = array_of(a[i], "matrix row");
        if (row.size() != c) throw SchemaError("ragged matrix rows");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = entry(row[k]);
    }
    return m;
}

SignedCellMap cell_map_from_json(const json& j, const CellComplex& space) {
    expect_object(j, {"element"}, {"target", "sign"}, "generator");
    SignedCellMap m = SignedCellMap::identity(space.cells);
    if (j.contains("target")) {
        const json& t = array_of(j.at("target"), "generator target");
        if (t.size() != space.cells.size()) throw SchemaError("generator target needs one list per cell dimension");
        for (std::size_t k = 0; k < t.size(); ++k) {
            m.target[k] = vector_from_json<std::size_t>(t[k], "generator target",
                                                        [](const json& e) { return to_size(e, "cell index"); });
            if (m.target[k].size() != space.cells[k]) throw SchemaError("generator target has the wrong length");
        }
    }
    if (j.contains("sign")) {
        const json& s = array_of(j.at("sign"), "generator sign");
        if (s.size() != space.cells.size()) throw SchemaError("generator sign needs one list per cell dimension");
        for (std::size_t k = 0; k < s.size(); ++k) {
            m.sign[k] = vector_from_json<int>(s[k], "generator sign", [](const json& e) {
                int v = to_int(e, "sign");
                if (v != 1 && v != -1) throw SchemaError("signs must be +1 or -1");
                return v;
            });
            if (m.sign[k].size() != space.cells[k]) throw SchemaError("generator sign has the wrong length");
        }
    }
    return m;
}

bool is_named_action(const std::string& s) {
    return s == "point" || s == "two-points" || s == "regular" || s == "free-circle" || s == "trivial-circle" ||
           s.rfind("coset:", 0) == 0 || s.rfind("lens-s3:", 0) == 0;
}

std::size_t cyclic_order(const FiniteGroup& g, const std::string& space) {
    if (g.name() != "cyclic:" + std::to_string(g.order()) && !(g.order() == 1 && g.name() == "trivial"))
        throw InvalidAction("space '" + space + "' needs a cyclic:p group, got " + g.name());
    return g.order();
}

json structure_json(const std::vector<std::vector<std::vector<Rational>>>& c) {
    json a = json::array();
    for (const auto& row : c) {
        json r = json::array();
        for (const auto& v : row) r.push_back(array_json(v));
        a.push_back(std::move(r));
    }
    return a;
}

cartan::LieAlgebra lie_algebra_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "su2") return cartan::LieAlgebra::su2();
        if (s.rfind("abelian:", 0) == 0) return cartan::LieAlgebra::abelian(parse_count(s.substr(8), "abelian:k"));
        throw SchemaError("unknown Lie algebra '" + s + "' (expected su2 or abelian:k)");
    }
    expect_object(j, {"dim", "structure"}, {"names"}, "Lie algebra");
    cartan::LieAlgebra g;
    g.dim = to_size(j.at("dim"), "Lie algebra dim");
    if (j.contains("names"))
        g.names = vector_from_json<std::string>(j.at("names"), "names", [](const json& e) { return to_str(e, "name"); });
    else
        for (std::size_t a = 0; a < g.dim; ++a) g.names.push_back("X" + std::to_string(a + 1));
    if (g.names.size() != g.dim) throw SchemaError("Lie algebra needs one name per basis element");
    const json& c = array_of(j.at("structure"), "structure constants");
    if (c.size() != g.dim) throw SchemaError("structure constants need shape dim x dim x dim");
    for (const auto& row : c) {
        std::vector<std::vector<Rational>> r;
        if (array_of(row, "structure constants").size() != g.dim)
            throw SchemaError("structure constants need shape dim x dim x dim");
        for (const auto& v : row) {
            r.push_back(vector_from_json<Rational>(v, "structure constants", rational_from_json));
            if (r.back().size() != g.dim) throw SchemaError("structure constants need shape dim x dim x dim");
        }
        g.c.push_back(std::move(r));
    }
    g.validate();
    return g;
}

}  // namespace

void expect_object(const json& j, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional, const std::string& context) {
    if (!j.is_object()) throw SchemaError(context + " must be a JSON object");
    for (const char* k : required)
        if (!j.contains(k)) throw SchemaError(context + " is missing the field '" + k + "'");
    for (const auto& [key, value] : j.items()) {
        bool known = std::any_of(required.begin(), required.end(), [&](const char* k) { return key == k; }) ||
                     std::any_of(optional.begin(), optional.end(), [&](const char* k) { return key == k; });
        if (!known) throw SchemaError(context + " has the unknown field '" + key + "'");
    }
}

// ---------------------------------------------------------------------------
// Scalars and matrices

json to_json(const Integer& z) { return z.get_str(); }
json to_json(const Rational& q) { return q.get_str(); }

Integer integer_from_json(const json& j) {
    if (j.is_number_integer()) return Integer(std::to_string(j.get<long long>()));
    if (j.is_number_unsigned()) return Integer(std::to_string(j.get<unsigned long long>()));
    if (!j.is_string()) throw SchemaError("integers are JSON integers or decimal strings");
    Integer z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw SchemaError("malformed integer '" + j.get<std::string>() + "'");
    return z;
}

Rational rational_from_json(const json& j) {
    if (j.is_number_integer() || j.is_number_unsigned()) return Rational(integer_from_json(j));
    if (!j.is_string()) throw SchemaError("rationals are JSON integers or strings like \"-2/3\"");
    const std::string s = j.get<std::string>();
    auto slash = s.find('/');
    Integer num, den = 1;
    if (num.set_str(s.substr(0, slash), 10) != 0 ||
        (slash != std::string::npos && den.set_str(s.substr(slash + 1), 10) != 0))
        throw SchemaError("malformed rational '" + s + "'");
    if (den == 0) throw SchemaError("rational '" + s + "' has zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

json to_json(const IntMatrix& m) { return matrix_json(m); }
json to_json(const RatMatrix& m) { return matrix_json(m); }
json to_json(const linalg::SparseIntMatrix& m) { return matrix_json(m.to_dense()); }

IntMatrix int_matrix_from_json(const json& j, std::optional<std::size_t> rows, std::optional<std::size_t> cols) {
    return matrix_from<Integer>(j, rows, cols, integer_from_json);
}

RatMatrix rat_matrix_from_json(const json& j, std::optional<std::size_t> rows, std::optional<std::size_t> cols) {
    return matrix_from<Rational>(j, rows, cols, rational_from_json);
}

// ---------------------------------------------------------------------------
// Complexes

json to_json(const complexes::IntCochainComplex& c) {
    json ds = json::array();
    for (int n = c.min_degree(); n < c.max_degree(); ++n) ds.push_back(to_json(c.differential(n)));
    return {{"min_degree", c.min_degree()}, {"ranks", c.ranks()}, {"differentials", ds}};
}

complexes::IntCochainComplex cochain_complex_from_json(const json& j) {
    expect_object(j, {"ranks", "differentials"}, {"min_degree"}, "cochain complex");
    int lo = j.contains("min_degree") ? to_int(j.at("min_degree"), "min_degree") : 0;
    auto ranks = vector_from_json<std::size_t>(j.at("ranks"), "ranks", [](const json& e) { return to_size(e, "rank"); });
    const json& ds = array_of(j.at("differentials"), "differentials");
    std::size_t expected = ranks.empty() ? 0 : ranks.size() - 1;
    if (ds.size() != expected)
        throw SchemaError("a complex with " + std::to_string(ranks.size()) + " degrees needs " +
                          std::to_string(expected) + " differentials");
    std::vector<linalg::SparseIntMatrix> d;
    for (std::size_t k = 0; k < ds.size(); ++k)
        d.push_back(linalg::SparseIntMatrix::from_dense(int_matrix_from_json(ds[k], ranks[k + 1], ranks[k])));
    complexes::IntCochainComplex c(lo, ranks, d);
    c.validate();
    return c;
}

json to_json(const complexes::DoubleComplex& dc) {
    json h = json::array(), v = json::array();
    for (std::size_t p = 0; p <= dc.P; ++p) {
        json row = json::array();
        for (std::size_t q = 0; q < dc.Q; ++q) row.push_back(to_json(dc.horizontal[p][q]));
        h.push_back(row);
    }
    for (std::size_t p = 0; p < dc.P; ++p) {
        json row = json::array();
        for (std::size_t q = 0; q <= dc.Q; ++q) row.push_back(to_json(dc.vertical[p][q]));
        v.push_back(row);
    }
    return {{"P", dc.P}, {"Q", dc.Q}, {"ranks", dc.ranks}, {"horizontal", h}, {"vertical", v},
            {"coeff", complexes::to_string(dc.coeff)}};
}

complexes::DoubleComplex double_complex_from_json(const json& j) {
    expect_object(j, {"P", "Q", "ranks"}, {"horizontal", "vertical", "coeff"}, "double complex");
    std::size_t P = to_size(j.at("P"), "P"), Q = to_size(j.at("Q"), "Q");
    const json& r = array_of(j.at("ranks"), "ranks");
    if (r.size() != P + 1) throw SchemaError("double complex ranks need P + 1 rows");
    std::vector<std::vector<std::size_t>> ranks;
    for (const auto& row : r) {
        ranks.push_back(vector_from_json<std::size_t>(row, "ranks", [](const json& e) { return to_size(e, "rank"); }));
        if (ranks.back().size() != Q + 1) throw SchemaError("double complex ranks need Q + 1 columns");
    }
    complexes::DoubleComplex dc = complexes::DoubleComplex::zeros(P, Q, ranks);
    // Omitted blocks stay zero, which keeps hand-written inputs short.
    if (j.contains("horizontal")) {
        const json& h = array_of(j.at("horizontal"), "horizontal");
        if (h.size() != P + 1) throw SchemaError("horizontal maps need P + 1 rows of Q entries");
        for (std::size_t p = 0; p <= P; ++p) {
            if (array_of(h[p], "horizontal").size() != Q) throw SchemaError("horizontal maps need Q entries per row");
            for (std::size_t q = 0; q < Q; ++q)
                dc.horizontal[p][q] =
                    linalg::SparseIntMatrix::from_dense(int_matrix_from_json(h[p][q], ranks[p][q + 1], ranks[p][q]));
        }
    }
    if (j.contains("vertical")) {
        const json& v = array_of(j.at("vertical"), "vertical");
        if (v.size() != P) throw SchemaError("vertical maps need P rows of Q + 1 entries");
        for (std::size_t p = 0; p < P; ++p) {
            if (array_of(v[p], "vertical").size() != Q + 1) throw SchemaError("vertical maps need Q + 1 entries per row");
            for (std::size_t q = 0; q <= Q; ++q)
                dc.vertical[p][q] =
                    linalg::SparseIntMatrix::from_dense(int_matrix_from_json(v[p][q], ranks[p + 1][q], ranks[p][q]));
        }
    }
    if (j.contains("coeff")) dc.coeff = complexes::coefficients_from_string(to_str(j.at("coeff"), "coeff"));
    dc.validate();
    return dc;
}

// ---------------------------------------------------------------------------
// Groups, spaces, actions

json to_json(const FiniteGroup& g) { return {{"name", g.name()}, {"table", g.table()}}; }

FiniteGroup group_from_json(const json& j) {
    if (j.is_string()) return FiniteGroup::from_name(j.get<std::string>());
    expect_object(j, {"table"}, {"name"}, "group");
    std::vector<std::vector<std::size_t>> table;
    for (const auto& row : array_of(j.at("table"), "group table"))
        table.push_back(vector_from_json<std::size_t>(row, "group table", [](const json& e) { return to_size(e, "element"); }));
    return FiniteGroup(table, j.contains("name") ? to_str(j.at("name"), "group name") : "");
}

json to_json(const CellComplex& c) {
    json b = json::array();
    for (std::size_t k = 1; k < c.boundary.size(); ++k) b.push_back(to_json(c.boundary[k]));
    return {{"cells", c.cells}, {"boundary", b}};
}

CellComplex cell_complex_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "point") return CellComplex::points(1);
        if (s == "circle") return CellComplex::circle();
        if (s.rfind("points:", 0) == 0) return CellComplex::points(parse_count(s.substr(7), "points:N"));
        if (s.rfind("polygon:", 0) == 0) {
            std::size_t n = parse_count(s.substr(8), "polygon:N");
            if (n == 0) throw SchemaError("polygon:N needs N >= 1");
            return CellComplex::polygon(n);
        }
        throw SchemaError("unknown cell complex '" + s + "'");
    }
    expect_object(j, {"cells"}, {"boundary"}, "cell complex");
    CellComplex c;
    c.cells = vector_from_json<std::size_t>(j.at("cells"), "cells", [](const json& e) { return to_size(e, "cell count"); });
    if (c.cells.empty()) throw SchemaError("a cell complex needs cells in dimension 0");
    c.boundary.push_back(IntMatrix(0, c.cells[0]));
    const json empty = json::array();
    const json& b = j.contains("boundary") ? array_of(j.at("boundary"), "boundary") : empty;
    if (b.size() != c.cells.size() - 1) throw SchemaError("cell complex needs one boundary matrix per dimension >= 1");
    for (std::size_t k = 1; k < c.cells.size(); ++k)
        c.boundary.push_back(int_matrix_from_json(b[k - 1], c.cells[k - 1], c.cells[k]));
    c.validate();
    return c;
}

json to_json(const GAction& a) {
    json gens = json::array();
    for (std::size_t g = 0; g < a.group().order(); ++g) {
        if (g == a.group().identity()) continue;
        gens.push_back({{"element", g}, {"target", a.act(g).target}, {"sign", a.act(g).sign}});
    }
    return {{"group", to_json(a.group())}, {"space", to_json(a.space())}, {"generators", gens}, {"label", a.label}};
}

GAction named_action(const FiniteGroup& g, const std::string& space) {
    if (space == "point") return simplicial::point(g);
    if (space == "two-points") {
        if (g.order() != 2) throw InvalidAction("two-points needs a group of order 2");
        GAction a = simplicial::two_points_swap();
        return GAction(g, a.space(), {a.act(0), a.act(1)});
    }
    if (space == "regular") {
        GAction a = simplicial::coset_action(g, {g.identity()});
        a.label = g.name() + " acting on itself";
        return a;
    }
    if (space.rfind("coset:", 0) == 0) {
        std::vector<std::size_t> h;
        for (const auto& s : split(space.substr(6), ',')) h.push_back(parse_count(s, "coset:a,b,..."));
        for (std::size_t x : h)
            if (x >= g.order()) throw InvalidAction("subgroup element out of range");
        return simplicial::coset_action(g, h);
    }
    if (space == "free-circle") return simplicial::free_circle(cyclic_order(g, space));
    if (space == "trivial-circle") return simplicial::trivial_circle(g);
    if (space.rfind("lens-s3:", 0) == 0)
        return simplicial::lens_s3(cyclic_order(g, space), parse_count(space.substr(8), "lens-s3:Q"));
    if (space.rfind("points:", 0) == 0) {
        GAction a = GAction::trivial(g, cell_complex_from_json(space));
        a.label = g.name() + " acting trivially on " + space.substr(7) + " points";
        return a;
    }
    throw SchemaError("unknown space '" + space +
                      "' (expected point, points:N, two-points, regular, coset:..., free-circle, trivial-circle or "
                      "lens-s3:Q)");
}

GAction action_from_json(const json& j) {
    expect_object(j, {"group", "space"}, {"generators", "label"}, "action");
    FiniteGroup g = group_from_json(j.at("group"));
    const json& space = j.at("space");
    GAction a;
    if (space.is_string() && !j.contains("generators") &&
        (is_named_action(space.get<std::string>()) || space.get<std::string>().rfind("points:", 0) == 0)) {
        a = named_action(g, space.get<std::string>());
    } else {
        CellComplex c = cell_complex_from_json(space);
        std::vector<std::pair<std::size_t, SignedCellMap>> gens;
        if (j.contains("generators"))
            for (const auto& e : array_of(j.at("generators"), "generators")) {
                std::size_t el = to_size(e.at("element"), "generator element");
                if (el >= g.order()) throw SchemaError("generator element out of range");
                gens.emplace_back(el, cell_map_from_json(e, c));
            }
        a = GAction::from_generators(g, c, gens);
        a.label = g.name() + " acting on a " + std::to_string(c.total_cells()) + "-cell complex";
    }
    if (j.contains("label")) a.label = to_str(j.at("label"), "label");
    return a;
}

// ---------------------------------------------------------------------------
// Group values

json to_json(const linalg::FgAbGroup& g) {
    return {{"free_rank", g.free_rank()}, {"torsion", array_json(g.torsion())}, {"text", g.to_string()}};
}

linalg::FgAbGroup fg_group_from_json(const json& j) {
    expect_object(j, {"free_rank", "torsion"}, {"text"}, "abelian group");
    return linalg::FgAbGroup::from_cyclic_orders([&] {
        std::vector<Integer> orders(to_size(j.at("free_rank"), "free_rank"), Integer(0));
        for (auto& t : vector_from_json<Integer>(j.at("torsion"), "torsion", integer_from_json)) orders.push_back(t);
        return orders;
    }());
}

json to_json(const linalg::StructuredCoefGroup& g) {
    return {{"circle_rank", g.divisible_circle_rank},
            {"vector_rank", g.vector_rank},
            {"finite_part", to_json(g.finite_part)},
            {"text", g.to_string()}};
}

linalg::StructuredCoefGroup structured_group_from_json(const json& j) {
    expect_object(j, {"circle_rank", "vector_rank", "finite_part"}, {"text"}, "structured group");
    return {to_size(j.at("circle_rank"), "circle_rank"), to_size(j.at("vector_rank"), "vector_rank"),
            fg_group_from_json(j.at("finite_part"))};
}

json to_json(const linalg::MixedQuotient& q) {
    return {{"free_rank", q.free_rank},
            {"torsion", array_json(q.torsion)},
            {"circle_rank", q.circle_rank},
            {"vector_rank", q.vector_rank},
            {"text", q.to_string()}};
}

linalg::MixedQuotient mixed_quotient_from_json(const json& j) {
    expect_object(j, {"free_rank", "torsion", "circle_rank", "vector_rank"}, {"text"}, "group structure");
    linalg::MixedQuotient q;
    q.free_rank = to_size(j.at("free_rank"), "free_rank");
    q.torsion = vector_from_json<Integer>(j.at("torsion"), "torsion", integer_from_json);
    q.circle_rank = to_size(j.at("circle_rank"), "circle_rank");
    q.vector_rank = to_size(j.at("vector_rank"), "vector_rank");
    return q;
}

json to_json(const linalg::MixedGroup& g) {
    return {{"dim", g.dim()}, {"lattice", to_json(g.lattice_basis())}, {"space", to_json(g.space_basis())}};
}

linalg::MixedGroup mixed_group_from_json(const json& j) {
    expect_object(j, {"dim", "lattice", "space"}, {}, "subgroup");
    std::size_t dim = to_size(j.at("dim"), "dim");
    return linalg::MixedGroup(dim, rat_matrix_from_json(j.at("lattice"), dim), rat_matrix_from_json(j.at("space"), dim));
}

json to_json(const simplicial::CohomologyValue& v) {
    json j = {{"coeff", complexes::to_string(v.coeff)}, {"text", v.to_string()}};
    if (v.coeff == complexes::Coefficients::Z)
        j["integral"] = to_json(v.integral);
    else
        j["structured"] = to_json(v.structured);
    return j;
}

simplicial::CohomologyValue cohomology_value_from_json(const json& j) {
    expect_object(j, {"coeff"}, {"integral", "structured", "text"}, "cohomology value");
    simplicial::CohomologyValue v;
    v.coeff = complexes::coefficients_from_string(to_str(j.at("coeff"), "coeff"));
    const char* part = v.coeff == complexes::Coefficients::Z ? "integral" : "structured";
    if (!j.contains(part)) throw SchemaError(std::string("cohomology value needs '") + part + "'");
    if (v.coeff == complexes::Coefficients::Z)
        v.integral = fg_group_from_json(j.at("integral"));
    else
        v.structured = structured_group_from_json(j.at("structured"));
    return v;
}

// ---------------------------------------------------------------------------
// Differential cohomology reports

json to_json(const diffcoh::DiffCohReport& r) {
    return {{"n", r.n},
            {"group", to_json(r.group)},
            {"forms_part", to_json(r.forms_part)},
            {"integral_part", to_json(r.integral_part)},
            {"split", r.split}};
}

diffcoh::DiffCohReport diffcoh_report_from_json(const json& j) {
    expect_object(j, {"n", "group", "forms_part", "integral_part", "split"}, {}, "differential cohomology report");
    diffcoh::DiffCohReport r;
    r.n = to_int(j.at("n"), "n");
    r.group = mixed_quotient_from_json(j.at("group"));
    r.forms_part = mixed_quotient_from_json(j.at("forms_part"));
    r.integral_part = fg_group_from_json(j.at("integral_part"));
    r.split = to_bool(j.at("split"), "split");
    return r;
}

json to_json(const diffcoh::Corner& c) {
    return {{"name", c.name},
            {"label", c.label},
            {"cocycles", to_json(c.cocycles)},
            {"coboundaries", to_json(c.coboundaries)},
            {"structure", to_json(c.structure)}};
}

json to_json(const diffcoh::CornerMap& m) {
    return {{"name", m.name}, {"from", m.from}, {"to", m.to}, {"matrix", to_json(m.matrix)}};
}

json to_json(const diffcoh::ExactnessCheck& c) {
    return {{"sequence", c.sequence},
            {"position", c.position},
            {"image", to_json(c.image)},
            {"kernel", to_json(c.kernel)},
            {"exact", c.exact}};
}

json to_json(const diffcoh::CommutativityCheck& c) { return {{"name", c.name}, {"commutes", c.commutes}}; }

json to_json(const diffcoh::HexagonReport& r) {
    return {{"n", r.n},
            {"corners", array_json(r.corners)},
            {"maps", array_json(r.maps)},
            {"checks", array_json(r.checks)},
            {"commutativity", array_json(r.commutativity)},
            {"verdicts",
             {{"top_row", optional_json(r.top_row)},
              {"bottom_row", optional_json(r.bottom_row)},
              {"flat_diagonal", optional_json(r.flat_diagonal)},
              {"topological_diagonal", optional_json(r.topological_diagonal)},
              {"beta_image_is_torsion", optional_json(r.beta_image_is_torsion)}}}};
}

diffcoh::HexagonReport hexagon_report_from_json(const json& j) {
    expect_object(j, {"n", "corners", "maps", "checks", "commutativity", "verdicts"}, {}, "hexagon report");
    diffcoh::HexagonReport r;
    r.n = to_int(j.at("n"), "n");
    for (const auto& c : array_of(j.at("corners"), "corners")) {
        expect_object(c, {"name", "label", "cocycles", "coboundaries", "structure"}, {}, "corner");
        r.corners.push_back({to_str(c.at("name"), "name"), to_str(c.at("label"), "label"),
                             mixed_group_from_json(c.at("cocycles")), mixed_group_from_json(c.at("coboundaries")),
                             mixed_quotient_from_json(c.at("structure"))});
    }
    for (const auto& m : array_of(j.at("maps"), "maps")) {
        expect_object(m, {"name", "from", "to", "matrix"}, {}, "corner map");
        diffcoh::CornerMap cm{to_str(m.at("name"), "name"), to_str(m.at("from"), "from"), to_str(m.at("to"), "to"), {}};
        std::optional<std::size_t> rows, cols;
        if (r.has_corner(cm.to)) rows = r.corner(cm.to).cocycles.dim();
        if (r.has_corner(cm.from)) cols = r.corner(cm.from).cocycles.dim();
        cm.matrix = rat_matrix_from_json(m.at("matrix"), rows, cols);
        r.maps.push_back(std::move(cm));
    }
    for (const auto& c : array_of(j.at("checks"), "checks")) {
        expect_object(c, {"sequence", "position", "image", "kernel", "exact"}, {}, "exactness check");
        r.checks.push_back({to_str(c.at("sequence"), "sequence"), to_str(c.at("position"), "position"),
                            mixed_quotient_from_json(c.at("image")), mixed_quotient_from_json(c.at("kernel")),
                            to_bool(c.at("exact"), "exact")});
    }
    for (const auto& c : array_of(j.at("commutativity"), "commutativity")) {
        expect_object(c, {"name", "commutes"}, {}, "commutativity check");
        r.commutativity.push_back({to_str(c.at("name"), "name"), to_bool(c.at("commutes"), "commutes")});
    }
    const json& v = j.at("verdicts");
    expect_object(v, {"top_row", "bottom_row", "flat_diagonal", "topological_diagonal", "beta_image_is_torsion"}, {},
                  "verdicts");
    r.top_row = optional_bool(v.at("top_row"), "top_row");
    r.bottom_row = optional_bool(v.at("bottom_row"), "bottom_row");
    r.flat_diagonal = optional_bool(v.at("flat_diagonal"), "flat_diagonal");
    r.topological_diagonal = optional_bool(v.at("topological_diagonal"), "topological_diagonal");
    r.beta_image_is_torsion = optional_bool(v.at("beta_image_is_torsion"), "beta_image_is_torsion");
    return r;
}

json to_json(const diffcoh::SweepEntry& e) {
    return {{"group", e.group},       {"action", e.action},
            {"n", e.n},               {"exact", e.exact},
            {"commutes", e.commutes}, {"bockstein_is_torsion", e.bockstein_is_torsion},
            {"i_onto", e.i_onto},     {"ker_i_matches", e.ker_i_matches}};
}

diffcoh::SweepEntry sweep_entry_from_json(const json& j) {
    expect_object(j, {"group", "action", "n", "exact", "commutes", "bockstein_is_torsion", "i_onto", "ker_i_matches"},
                  {}, "sweep entry");
    return {to_str(j.at("group"), "group"),
            to_str(j.at("action"), "action"),
            to_int(j.at("n"), "n"),
            to_bool(j.at("exact"), "exact"),
            to_bool(j.at("commutes"), "commutes"),
            to_bool(j.at("bockstein_is_torsion"), "bockstein_is_torsion"),
            to_bool(j.at("i_onto"), "i_onto"),
            to_bool(j.at("ker_i_matches"), "ker_i_matches")};
}

json to_json(const diffcoh::HomotopyFormulaReport& r) {
    return {{"holds", r.holds}, {"lhs", array_json(r.lhs)}, {"rhs", array_json(r.rhs)}};
}

diffcoh::HomotopyFormulaReport homotopy_report_from_json(const json& j) {
    expect_object(j, {"holds", "lhs", "rhs"}, {}, "homotopy formula report");
    return {to_bool(j.at("holds"), "holds"), vector_from_json<Rational>(j.at("lhs"), "lhs", rational_from_json),
            vector_from_json<Rational>(j.at("rhs"), "rhs", rational_from_json)};
}

json to_json(const diffcoh::IntervalCocycle& x) {
    json phi = json::array();
    for (const auto& point : x.phi) {
        json pieces = json::array();
        for (const auto& poly : point) pieces.push_back(array_json(poly));
        phi.push_back(pieces);
    }
    return {{"breaks", array_json(x.breaks)}, {"phi", phi}};
}

diffcoh::IntervalCocycle interval_cocycle_from_json(const json& j) {
    expect_object(j, {"breaks", "phi"}, {}, "interval cocycle");
    diffcoh::IntervalCocycle x;
    x.breaks = vector_from_json<Rational>(j.at("breaks"), "breaks", rational_from_json);
    if (x.breaks.size() < 2) throw SchemaError("breaks must include both ends of the interval");
    for (const auto& point : array_of(j.at("phi"), "phi")) {
        std::vector<std::vector<Rational>> pieces;
        for (const auto& poly : array_of(point, "phi pieces"))
            pieces.push_back(vector_from_json<Rational>(poly, "polynomial", rational_from_json));
        if (pieces.size() != x.breaks.size() - 1)
            throw SchemaError("each point needs one polynomial per piece of the interval");
        x.phi.push_back(std::move(pieces));
    }
    return x;
}

json to_json(const diffcoh::SuppliedForms& f) {
    return {{"closed", to_json(f.closed)}, {"d", to_json(f.d)},         {"face0", to_json(f.face0)},
            {"face1", to_json(f.face1)},   {"periods", to_json(f.periods)}};
}

diffcoh::SuppliedForms supplied_forms_from_json(const json& j) {
    expect_object(j, {"closed", "d", "face0", "face1", "periods"}, {}, "supplied forms");
    diffcoh::SuppliedForms f;
    f.closed = rat_matrix_from_json(j.at("closed"));
    f.d = rat_matrix_from_json(j.at("d"), std::nullopt, f.closed.rows());
    f.face0 = rat_matrix_from_json(j.at("face0"), std::nullopt, f.closed.rows());
    f.face1 = rat_matrix_from_json(j.at("face1"), f.face0.rows(), f.closed.rows());
    f.periods = rat_matrix_from_json(j.at("periods"), f.closed.rows());
    return f;
}

// ---------------------------------------------------------------------------
// Cartan model

json to_json(const cartan::CartanCohomology& c) {
    return {{"degree", c.degree}, {"bound", c.bound}, {"dimension", c.dimension}, {"saturated", c.saturated}};
}

cartan::CartanCohomology cartan_cohomology_from_json(const json& j) {
    expect_object(j, {"degree", "bound", "dimension", "saturated"}, {}, "Cartan cohomology");
    cartan::CartanCohomology c;
    c.degree = to_int(j.at("degree"), "degree");
    c.bound = static_cast<unsigned>(to_size(j.at("bound"), "bound"));
    c.dimension = to_size(j.at("dimension"), "dimension");
    c.saturated = to_bool(j.at("saturated"), "saturated");
    return c;
}

json to_json(const cartan::LinearAction& a) {
    json rho = json::array(), finite = json::array();
    for (const auto& r : a.rho) rho.push_back(to_json(r));
    for (const auto& f : a.finite) finite.push_back({{"space", to_json(f.space)}, {"coadjoint", to_json(f.coadjoint)}});
    json alg = {{"dim", a.algebra.dim}, {"names", a.algebra.names}, {"structure", structure_json(a.algebra.c)}};
    return {{"algebra", alg}, {"m", a.m}, {"rho", rho}, {"finite", finite}};
}

cartan::LinearAction linear_action_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "rotation") return cartan::LinearAction::rotation_plane();
        if (s == "su2") return cartan::LinearAction::su2_vector();
        if (s.rfind("trivial:", 0) == 0) {
            auto parts = split(s.substr(8), ',');
            if (parts.size() != 2) throw SchemaError("trivial linear action needs the form trivial:k,m");
            return cartan::LinearAction::trivial(parse_count(parts[0], "trivial:k,m"), parse_count(parts[1], "trivial:k,m"));
        }
        throw SchemaError("unknown linear action '" + s + "' (expected rotation, su2 or trivial:k,m)");
    }
    expect_object(j, {"algebra", "m", "rho"}, {"finite"}, "linear action");
    cartan::LinearAction a;
    a.algebra = lie_algebra_from_json(j.at("algebra"));
    a.m = to_size(j.at("m"), "m");
    for (const auto& r : array_of(j.at("rho"), "rho")) a.rho.push_back(rat_matrix_from_json(r, a.m, a.m));
    if (a.rho.size() != a.algebra.dim) throw SchemaError("rho needs one matrix per Lie algebra basis element");
    if (j.contains("finite"))
        for (const auto& f : array_of(j.at("finite"), "finite")) {
            expect_object(f, {"space", "coadjoint"}, {}, "finite symmetry");
            a.finite.push_back({rat_matrix_from_json(f.at("space"), a.m, a.m),
                                rat_matrix_from_json(f.at("coadjoint"), a.k(), a.k())});
        }
    a.validate();
    return a;
}

json to_json(const cartan::EquivariantForm& w) { return {{"k", w.k()}, {"m", w.m()}, {"form", w.to_string()}}; }

cartan::EquivariantForm form_from_json(const json& j) {
    expect_object(j, {"k", "m", "form"}, {}, "equivariant form");
    return cartan::EquivariantForm::parse(to_str(j.at("form"), "form"), to_size(j.at("k"), "k"), to_size(j.at("m"), "m"));
}

// ---------------------------------------------------------------------------
// Bundles

json to_json(const chern_weil::BundleAction& b) {
    json drho = json::array(), finite = json::array();
    for (const auto& m : b.drho) drho.push_back(to_json(m));
    for (const auto& m : b.finite) finite.push_back(to_json(m));
    return {{"drho", drho}, {"finite", finite}};
}

chern_weil::BundleAction bundle_action_from_json(const json& j, std::size_t k) {
    expect_object(j, {"drho"}, {"finite"}, "bundle action");
    chern_weil::BundleAction b;
    for (const auto& m : array_of(j.at("drho"), "drho")) {
        b.drho.push_back(rat_matrix_from_json(m));
        if (b.drho.back().rows() != b.drho.front().rows() || b.drho.back().cols() != b.drho.front().rows())
            throw SchemaError("drho matrices must be square of one common size");
    }
    if (b.drho.size() != k) throw SchemaError("drho needs one matrix per Lie algebra basis element");
    if (j.contains("finite"))
        for (const auto& m : array_of(j.at("finite"), "finite")) b.finite.push_back(rat_matrix_from_json(m));
    return b;
}

}  // namespace eqdiff::io
