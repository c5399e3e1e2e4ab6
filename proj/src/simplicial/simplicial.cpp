#include "eqdiff/simplicial.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace eqdiff::simplicial {

using linalg::to_rational;

// ---------------------------------------------------------------------------
// Groups

FiniteGroup::FiniteGroup(std::vector<std::vector<std::size_t>> table, std::string name)
    : table_(std::move(table)), name_(std::move(name)) {
    const std::size_t n = table_.size();
    if (n == 0) throw InvalidAction("a group needs at least one element");
    for (const auto& row : table_) {
        if (row.size() != n) throw InvalidAction("multiplication table is not square");
        for (std::size_t x : row)
            if (x >= n) throw InvalidAction("multiplication table entry out of range");
    }
    bool found = false;
    for (std::size_t e = 0; e < n && !found; ++e) {
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a) ok = table_[e][a] == a && table_[a][e] == a;
        if (ok) {
            identity_ = e;
            found = true;
        }
    }
    if (!found) throw InvalidAction("multiplication table has no identity");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
                    throw InvalidAction("multiplication is not associative");
    inverse_.assign(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (table_[a][b] == identity_ && table_[b][a] == identity_) inverse_[a] = b;
    for (std::size_t a = 0; a < n; ++a)
        if (inverse_[a] == n) throw InvalidAction("element " + std::to_string(a) + " has no inverse");
}

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
    if (n == 0) throw SchemaError("cyclic group needs n >= 1");
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
    return FiniteGroup(t, "cyclic:" + std::to_string(n));
}

FiniteGroup FiniteGroup::symmetric(std::size_t n) {
    if (n == 0 || n > 5) throw SchemaError("symmetric group supported for 1 <= n <= 5");
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = i;
    std::vector<std::vector<std::size_t>> t(perms.size(), std::vector<std::size_t>(perms.size()));
    for (std::size_t a = 0; a < perms.size(); ++a)
        for (std::size_t b = 0; b < perms.size(); ++b) {
            std::vector<std::size_t> c(n);
            for (std::size_t x = 0; x < n; ++x) c[x] = perms[a][perms[b][x]];
            t[a][b] = index.at(c);
        }
    return FiniteGroup(t, "symmetric:" + std::to_string(n));
}

FiniteGroup FiniteGroup::dihedral(std::size_t n) {
    if (n == 0) throw SchemaError("dihedral group needs n >= 1");
    const std::size_t m = 2 * n;
    std::vector<std::vector<std::size_t>> t(m, std::vector<std::size_t>(m));
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y) {
            std::size_t a = x % n, e = x / n, b = y % n, f = y / n;
            std::size_t k = e ? (a + n - b) % n : (a + b) % n;
            t[x][y] = k + n * ((e + f) % 2);
        }
    return FiniteGroup(t, "dihedral:" + std::to_string(n));
}

FiniteGroup FiniteGroup::quaternion8() {
    // Units 1, i, j, k as 0..3; unit products with signs.
    static const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sgn[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    std::vector<std::vector<std::size_t>> t(8, std::vector<std::size_t>(8));
    for (std::size_t x = 0; x < 8; ++x)
        for (std::size_t y = 0; y < 8; ++y) {
            std::size_t u = x / 2, v = y / 2;
            int s = (x % 2 ? -1 : 1) * (y % 2 ? -1 : 1) * sgn[u][v];
            t[x][y] = 2 * unit[u][v] + (s < 0 ? 1 : 0);
        }
    return FiniteGroup(t, "quaternion:8");
}

FiniteGroup FiniteGroup::from_name(const std::string& name) {
    if (name == "trivial") return cyclic(1);
    auto colon = name.find(':');
    if (colon == std::string::npos) throw SchemaError("group name '" + name + "' needs the form family:n");
    std::string fam = name.substr(0, colon);
    std::size_t n = 0;
    try {
        std::size_t used = 0;
        n = std::stoul(name.substr(colon + 1), &used);
        if (used != name.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw SchemaError("group name '" + name + "' has a malformed order");
    }
    if (fam == "cyclic") return cyclic(n);
    if (fam == "symmetric") return symmetric(n);
    if (fam == "dihedral") return dihedral(n);
    if (fam == "quaternion") {
        if (n != 8) throw SchemaError("only quaternion:8 is available");
        return quaternion8();
    }
    throw SchemaError("unknown group family '" + fam + "'");
}

std::vector<std::vector<std::size_t>> FiniteGroup::subgroup_classes() const {
    const std::size_t n = order();
    auto closure = [&](std::size_t a, std::size_t b) {
        std::vector<bool> in(n, false);
        std::vector<std::size_t> elems{identity_};
        in[identity_] = true;
        for (std::size_t k = 0; k < elems.size(); ++k)
            for (std::size_t g : {a, b}) {
                std::size_t x = mul(elems[k], g);
                if (!in[x]) {
                    in[x] = true;
                    elems.push_back(x);
                }
            }
        std::sort(elems.begin(), elems.end());
        return elems;
    };
    std::set<std::vector<std::size_t>> all;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) all.insert(closure(a, b));
    std::set<std::vector<std::size_t>> reps;
    std::set<std::vector<std::size_t>> seen;
    for (const auto& h : all) {
        if (seen.count(h)) continue;
        std::vector<std::size_t> best = h;
        for (std::size_t g = 0; g < n; ++g) {
            std::vector<std::size_t> c;
            for (std::size_t x : h) c.push_back(mul(mul(g, x), inverse(g)));
            std::sort(c.begin(), c.end());
            seen.insert(c);
            best = std::min(best, c);
        }
        reps.insert(best);
    }
    std::vector<std::vector<std::size_t>> out(reps.begin(), reps.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.size() > y.size(); });
    return out;
}

// ---------------------------------------------------------------------------
// Cell complexes and cellular maps

CellComplex CellComplex::points(std::size_t n) { return CellComplex{{n}, {IntMatrix(0, n)}}; }

CellComplex CellComplex::polygon(std::size_t n) {
    IntMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        b(i, i) -= 1;
        b((i + 1) % n, i) += 1;
    }
    return CellComplex{{n, n}, {IntMatrix(0, n), b}};
}

CellComplex CellComplex::circle() { return polygon(1); }

std::size_t CellComplex::total_cells() const { return std::accumulate(cells.begin(), cells.end(), std::size_t{0}); }

void CellComplex::validate() const {
    if (boundary.size() != cells.size()) throw AxiomViolation("cell complex needs one boundary matrix per dimension");
    for (std::size_t k = 1; k < cells.size(); ++k)
        if (boundary[k].rows() != cells[k - 1] || boundary[k].cols() != cells[k])
            throw AxiomViolation("boundary in dimension " + std::to_string(k) + " has the wrong shape");
    for (std::size_t k = 2; k < cells.size(); ++k)
        if (!(boundary[k - 1] * boundary[k]).is_zero())
            throw AxiomViolation("cellular ∂∘∂ != 0 in dimension " + std::to_string(k));
}

IntMatrix CellComplex::coboundary(std::size_t k) const {
    if (k + 1 >= cells.size()) return IntMatrix(0, k < cells.size() ? cells[k] : 0);
    return boundary[k + 1].transpose();
}

SignedCellMap SignedCellMap::identity(const std::vector<std::size_t>& cells) {
    SignedCellMap m;
    for (std::size_t n : cells) {
        m.target.emplace_back(n);
        std::iota(m.target.back().begin(), m.target.back().end(), 0);
        m.sign.emplace_back(n, 1);
    }
    return m;
}

SignedCellMap SignedCellMap::after(const SignedCellMap& first) const {
    SignedCellMap m;
    m.target.resize(first.target.size());
    m.sign.resize(first.sign.size());
    for (std::size_t k = 0; k < first.target.size(); ++k) {
        m.target[k].resize(first.target[k].size());
        m.sign[k].resize(first.target[k].size());
        for (std::size_t c = 0; c < first.target[k].size(); ++c) {
            std::size_t t = first.target[k][c];
            m.target[k][c] = target[k][t];
            m.sign[k][c] = first.sign[k][c] * sign[k][t];
        }
    }
    return m;
}

IntMatrix SignedCellMap::chain_matrix(std::size_t k, std::size_t target_cells) const {
    IntMatrix m(target_cells, target[k].size());
    for (std::size_t c = 0; c < target[k].size(); ++c) m(target[k][c], c) = sign[k][c];
    return m;
}

// ---------------------------------------------------------------------------
// Actions

GAction::GAction(FiniteGroup group, CellComplex space, std::vector<SignedCellMap> action)
    : group_(std::move(group)), space_(std::move(space)), action_(std::move(action)) {
    validate();
}

void GAction::validate() const {
    space_.validate();
    const std::size_t n = group_.order();
    if (action_.size() != n) throw InvalidAction("action needs one cellular map per group element");
    for (std::size_t g = 0; g < n; ++g) {
        const auto& a = action_[g];
        if (a.target.size() != space_.cells.size() || a.sign.size() != space_.cells.size())
            throw InvalidAction("cell map of element " + std::to_string(g) + " misses a dimension");
        for (std::size_t k = 0; k < space_.cells.size(); ++k) {
            if (a.target[k].size() != space_.cells[k] || a.sign[k].size() != space_.cells[k])
                throw InvalidAction("cell map of element " + std::to_string(g) + " has the wrong size");
            std::vector<bool> hit(space_.cells[k], false);
            for (std::size_t c = 0; c < space_.cells[k]; ++c) {
                if (a.target[k][c] >= space_.cells[k] || hit[a.target[k][c]])
                    throw InvalidAction("element " + std::to_string(g) + " does not permute the cells");
                if (a.sign[k][c] != 1 && a.sign[k][c] != -1) throw InvalidAction("orientation signs must be ±1");
                hit[a.target[k][c]] = true;
            }
        }
    }
    if (!(action_[group_.identity()] == SignedCellMap::identity(space_.cells)))
        throw InvalidAction("the identity element does not act trivially");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (!(action_[a].after(action_[b]) == action_[group_.mul(a, b)]))
                throw InvalidAction("action is not a homomorphism at (" + std::to_string(a) + ", " +
                                    std::to_string(b) + ")");
    for (std::size_t g = 0; g < n; ++g)
        for (std::size_t k = 1; k < space_.cells.size(); ++k) {
            IntMatrix lhs = space_.boundary[k] * action_[g].chain_matrix(k, space_.cells[k]);
            IntMatrix rhs = action_[g].chain_matrix(k - 1, space_.cells[k - 1]) * space_.boundary[k];
            if (!(lhs == rhs))
                throw InvalidAction("element " + std::to_string(g) + " does not commute with the boundary in dimension " +
                                    std::to_string(k));
        }
}

GAction GAction::from_generators(FiniteGroup group, CellComplex space,
                                 const std::vector<std::pair<std::size_t, SignedCellMap>>& generators) {
    const std::size_t n = group.order();
    std::vector<std::optional<SignedCellMap>> act(n);
    act[group.identity()] = SignedCellMap::identity(space.cells);
    std::queue<std::size_t> todo;
    todo.push(group.identity());
    while (!todo.empty()) {
        std::size_t h = todo.front();
        todo.pop();
        for (const auto& [s, m] : generators) {
            if (s >= n) throw InvalidAction("generator index out of range");
            std::size_t sh = group.mul(s, h);
            SignedCellMap img = m.after(*act[h]);
            if (!act[sh]) {
                act[sh] = img;
                todo.push(sh);
            } else if (!(*act[sh] == img)) {
                throw InvalidAction("generator images violate a group relation");
            }
        }
    }
    std::vector<SignedCellMap> maps;
    for (std::size_t g = 0; g < n; ++g) {
        if (!act[g]) throw InvalidAction("generators do not generate the group");
        maps.push_back(*act[g]);
    }
    return GAction(std::move(group), std::move(space), std::move(maps));
}

GAction GAction::trivial(FiniteGroup group, CellComplex space) {
    std::vector<SignedCellMap> maps(group.order(), SignedCellMap::identity(space.cells));
    return GAction(std::move(group), std::move(space), std::move(maps));
}

GAction point_action(const FiniteGroup& g, const std::vector<std::vector<std::size_t>>& perm_of_element) {
    if (perm_of_element.size() != g.order()) throw InvalidAction("need one permutation per group element");
    std::size_t m = perm_of_element.empty() ? 0 : perm_of_element[0].size();
    std::vector<SignedCellMap> maps;
    for (const auto& p : perm_of_element) {
        if (p.size() != m) throw InvalidAction("permutations of different lengths");
        maps.push_back(SignedCellMap{{p}, {std::vector<int>(m, 1)}});
    }
    return GAction(g, CellComplex::points(m), maps);
}

GAction coset_action(const FiniteGroup& g, const std::vector<std::size_t>& subgroup) {
    std::vector<std::vector<std::size_t>> cosets;
    std::vector<std::size_t> coset_of(g.order(), SIZE_MAX);
    for (std::size_t x = 0; x < g.order(); ++x) {
        if (coset_of[x] != SIZE_MAX) continue;
        std::vector<std::size_t> c;
        for (std::size_t h : subgroup) c.push_back(g.mul(x, h));
        for (std::size_t y : c) coset_of[y] = cosets.size();
        cosets.push_back(c);
    }
    std::vector<std::vector<std::size_t>> perms(g.order());
    for (std::size_t a = 0; a < g.order(); ++a)
        for (const auto& c : cosets) perms[a].push_back(coset_of[g.mul(a, c[0])]);
    return point_action(g, perms);
}

std::vector<GAction> all_point_actions(const FiniteGroup& g, std::size_t max_points) {
    std::vector<std::vector<std::vector<std::size_t>>> orbit_perms;  // per type: perm per element
    for (const auto& h : g.subgroup_classes()) {
        if (g.order() / h.size() > max_points) continue;
        GAction a = coset_action(g, h);
        std::vector<std::vector<std::size_t>> perms;
        for (std::size_t x = 0; x < g.order(); ++x) perms.push_back(a.act(x).target[0]);
        orbit_perms.push_back(perms);
    }
    std::vector<GAction> out;
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t used) {
        if (!chosen.empty()) {
            std::vector<std::vector<std::size_t>> perms(g.order());
            std::size_t off = 0;
            std::string label;
            for (std::size_t t : chosen) {
                const auto& op = orbit_perms[t];
                for (std::size_t x = 0; x < g.order(); ++x)
                    for (std::size_t v : op[x]) perms[x].push_back(off + v);
                off += op[0].size();
                label += (label.empty() ? "" : "+") + std::to_string(op[0].size());
            }
            GAction a = point_action(g, perms);
            a.label = g.name() + " on orbits " + label;
            out.push_back(std::move(a));
        }
        for (std::size_t t = start; t < orbit_perms.size(); ++t) {
            std::size_t sz = orbit_perms[t][0].size();
            if (used + sz > max_points) continue;
            chosen.push_back(t);
            rec(t, used + sz);
            chosen.pop_back();
        }
    };
    rec(0, 0);
    return out;
}

GAction point(const FiniteGroup& g) {
    GAction a = GAction::trivial(g, CellComplex::points(1));
    a.label = g.name() + " on a point";
    return a;
}

GAction two_points_swap() {
    GAction a = point_action(FiniteGroup::cyclic(2), {{0, 1}, {1, 0}});
    a.label = "cyclic:2 swapping two points";
    return a;
}

GAction free_circle(std::size_t p) {
    if (p == 0) throw SchemaError("free circle needs p >= 1");
    auto shift = [&](std::size_t k) {
        SignedCellMap m;
        for (int d = 0; d < 2; ++d) {
            m.target.emplace_back(p);
            for (std::size_t i = 0; i < p; ++i) m.target.back()[i] = (i + k) % p;
            m.sign.emplace_back(p, 1);
        }
        return m;
    };
    std::vector<SignedCellMap> maps;
    for (std::size_t k = 0; k < p; ++k) maps.push_back(shift(k));
    GAction a(FiniteGroup::cyclic(p), CellComplex::polygon(p), maps);
    a.label = "cyclic:" + std::to_string(p) + " rotating a " + std::to_string(p) + "-gon";
    return a;
}

GAction trivial_circle(const FiniteGroup& g) {
    GAction a = GAction::trivial(g, CellComplex::circle());
    a.label = g.name() + " acting trivially on a circle";
    return a;
}

GAction lens_s3(std::size_t p, std::size_t q) {
    if (p < 2) throw SchemaError("lens action needs p >= 2");
    if (std::gcd(p, q) != 1) throw InvalidAction("lens weight q must be coprime to p");
    CellComplex s;
    s.cells = {p, p, p, p};
    s.boundary.push_back(IntMatrix(0, p));
    IntMatrix b1(p, p), b2(p, p), b3(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        b1((i + 1) % p, i) += 1;
        b1(i, i) -= 1;
        for (std::size_t j = 0; j < p; ++j) b2(j, i) = 1;
        b3((i + q) % p, i) += 1;
        b3(i, i) -= 1;
    }
    s.boundary.push_back(b1);
    s.boundary.push_back(b2);
    s.boundary.push_back(b3);
    std::vector<SignedCellMap> maps;
    for (std::size_t k = 0; k < p; ++k) {
        SignedCellMap m;
        for (int d = 0; d < 4; ++d) {
            m.target.emplace_back(p);
            for (std::size_t i = 0; i < p; ++i) m.target.back()[i] = (i + k) % p;
            m.sign.emplace_back(p, 1);
        }
        maps.push_back(m);
    }
    GAction a(FiniteGroup::cyclic(p), s, maps);
    a.label = "cyclic:" + std::to_string(p) + " acting freely on S^3 with weights (1, " + std::to_string(q) + ")";
    return a;
}

// ---------------------------------------------------------------------------
// Bar levels

std::size_t BarLevels::tuples(std::size_t p) const {
    std::size_t t = 1;
    for (std::size_t i = 0; i < p; ++i) t *= action.group().order();
    return t;
}

std::vector<std::size_t> BarLevels::decode(std::size_t p, std::size_t tuple) const {
    const std::size_t n = action.group().order();
    std::vector<std::size_t> g(p);
    for (std::size_t i = p; i-- > 0;) {
        g[i] = tuple % n;
        tuple /= n;
    }
    return g;
}

std::size_t BarLevels::encode(const std::vector<std::size_t>& tuple) const {
    std::size_t idx = 0;
    for (std::size_t g : tuple) idx = idx * action.group().order() + g;
    return idx;
}

BarLevels bar_levels(const GAction& act, std::size_t P) {
    act.validate();
    BarLevels bl;
    bl.action = act;
    bl.P = P;
    const auto& G = act.group();
    const auto& cells = act.space().cells;
    bl.faces.resize(P + 1);
    bl.degeneracies.resize(P + 1);
    for (std::size_t p = 1; p <= P; ++p) {
        for (std::size_t i = 0; i <= p; ++i) {
            SignedCellMap m;
            for (std::size_t k = 0; k < cells.size(); ++k) {
                m.target.emplace_back(bl.cells(p, k));
                m.sign.emplace_back(bl.cells(p, k), 1);
            }
            for (std::size_t t = 0; t < bl.tuples(p); ++t) {
                auto g = bl.decode(p, t);
                std::vector<std::size_t> h;
                const SignedCellMap* on_cell = nullptr;
                if (i == 0) {
                    h.assign(g.begin() + 1, g.end());
                } else if (i < p) {
                    h = g;
                    h[i - 1] = G.mul(g[i - 1], g[i]);
                    h.erase(h.begin() + i);
                } else {
                    h.assign(g.begin(), g.end() - 1);
                    on_cell = &act.act(g[p - 1]);
                }
                std::size_t th = bl.encode(h);
                for (std::size_t k = 0; k < cells.size(); ++k)
                    for (std::size_t c = 0; c < cells[k]; ++c) {
                        std::size_t tc = on_cell ? on_cell->target[k][c] : c;
                        m.target[k][t * cells[k] + c] = th * cells[k] + tc;
                        m.sign[k][t * cells[k] + c] = on_cell ? on_cell->sign[k][c] : 1;
                    }
            }
            bl.faces[p].push_back(std::move(m));
        }
    }
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t i = 0; i <= p; ++i) {
            SignedCellMap m;
            for (std::size_t k = 0; k < cells.size(); ++k) {
                m.target.emplace_back(bl.cells(p, k));
                m.sign.emplace_back(bl.cells(p, k), 1);
            }
            for (std::size_t t = 0; t < bl.tuples(p); ++t) {
                auto g = bl.decode(p, t);
                g.insert(g.begin() + i, G.identity());
                std::size_t th = bl.encode(g);
                for (std::size_t k = 0; k < cells.size(); ++k)
                    for (std::size_t c = 0; c < cells[k]; ++c) m.target[k][t * cells[k] + c] = th * cells[k] + c;
            }
            bl.degeneracies[p].push_back(std::move(m));
        }
    }
    bl.validate();
    return bl;
}

void BarLevels::validate() const {
    const auto& cells = action.space().cells;
    auto id = [&](std::size_t p) {
        std::vector<std::size_t> c;
        for (std::size_t k = 0; k < cells.size(); ++k) c.push_back(this->cells(p, k));
        return SignedCellMap::identity(c);
    };
    auto fail = [](const std::string& what, std::size_t p) {
        throw AxiomViolation("simplicial identity " + what + " fails at level " + std::to_string(p));
    };
    for (std::size_t p = 2; p <= P; ++p)
        for (std::size_t j = 1; j <= p; ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (!(faces[p - 1][i].after(faces[p][j]) == faces[p - 1][j - 1].after(faces[p][i])))
                    fail("∂_i∂_j = ∂_{j-1}∂_i", p);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t j = 0; j <= p; ++j)
            for (std::size_t i = 0; i <= p + 1; ++i) {
                SignedCellMap lhs = faces[p + 1][i].after(degeneracies[p][j]);
                if (i == j || i == j + 1) {
                    if (!(lhs == id(p))) fail("∂_jσ_j = ∂_{j+1}σ_j = id", p);
                } else if (i < j) {
                    if (!(lhs == degeneracies[p - 1][j - 1].after(faces[p][i]))) fail("∂_iσ_j = σ_{j-1}∂_i", p);
                } else if (!(lhs == degeneracies[p - 1][j].after(faces[p][i - 1]))) {
                    fail("∂_iσ_j = σ_j∂_{i-1}", p);
                }
            }
    for (std::size_t p = 0; p + 1 < P; ++p)
        for (std::size_t j = 0; j <= p; ++j)
            for (std::size_t i = 0; i <= j; ++i)
                if (!(degeneracies[p + 1][i].after(degeneracies[p][j]) ==
                      degeneracies[p + 1][j + 1].after(degeneracies[p][i])))
                    fail("σ_iσ_j = σ_{j+1}σ_i", p);
}

SparseIntMatrix face_pullback(const BarLevels& bl, std::size_t p, std::size_t i, std::size_t k) {
    const auto& f = bl.faces[p][i];
    SparseIntMatrix m(bl.cells(p, k), bl.cells(p - 1, k));
    for (std::size_t c = 0; c < f.target[k].size(); ++c) m.add(c, f.target[k][c], f.sign[k][c]);
    m.finalize();
    return m;
}

namespace {

SparseIntMatrix block_diagonal(const IntMatrix& b, std::size_t copies) {
    SparseIntMatrix m(b.rows() * copies, b.cols() * copies);
    for (std::size_t t = 0; t < copies; ++t)
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                if (b(i, j) != 0) m.add(t * b.rows() + i, t * b.cols() + j, b(i, j));
    m.finalize();
    return m;
}

SparseIntMatrix vertical_map(const BarLevels& bl, std::size_t p, std::size_t k) {
    SparseIntMatrix m(bl.cells(p + 1, k), bl.cells(p, k));
    for (std::size_t i = 0; i <= p + 1; ++i) {
        const auto& f = bl.faces[p + 1][i];
        int s = i % 2 ? -1 : 1;
        for (std::size_t c = 0; c < f.target[k].size(); ++c) m.add(c, f.target[k][c], s * f.sign[k][c]);
    }
    m.finalize();
    return m;
}

}  // namespace

DoubleComplex cellular_double_complex(const BarLevels& bl, Coefficients coeff) {
    const auto& space = bl.action.space();
    const std::size_t Q = space.dim();
    std::vector<std::vector<std::size_t>> ranks(bl.P + 1);
    for (std::size_t p = 0; p <= bl.P; ++p)
        for (std::size_t q = 0; q <= Q; ++q) ranks[p].push_back(bl.cells(p, q));
    DoubleComplex dc = DoubleComplex::zeros(bl.P, Q, ranks);
    dc.coeff = coeff;
    for (std::size_t p = 0; p <= bl.P; ++p)
        for (std::size_t q = 0; q < Q; ++q) dc.horizontal[p][q] = block_diagonal(space.coboundary(q), bl.tuples(p));
    for (std::size_t p = 0; p < bl.P; ++p)
        for (std::size_t q = 0; q <= Q; ++q) dc.vertical[p][q] = vertical_map(bl, p, q);
    dc.validate();
    return dc;
}

complexes::SimplicialHomotopyComplex bar_homotopy_complex(const BarLevels& bl) {
    const auto& space = bl.action.space();
    const int Q = static_cast<int>(space.dim());
    std::vector<std::vector<std::size_t>> ranks(bl.P + 1);
    for (std::size_t p = 0; p <= bl.P; ++p)
        for (int q = 0; q <= Q; ++q) ranks[p].push_back(bl.cells(p, q));
    auto h = complexes::SimplicialHomotopyComplex::allocate(bl.P, 0, Q, ranks);
    for (std::size_t p = 0; p <= bl.P; ++p)
        for (int q = 0; q <= Q; ++q) {
            if (p > 0)
                for (std::size_t i = 0; i <= p; ++i) h.faces[p][i][q] = face_pullback(bl, p, i, q).to_dense();
            if (p < bl.P)
                for (std::size_t i = 0; i <= p; ++i) {
                    const auto& s = bl.degeneracies[p][i];
                    IntMatrix m(bl.cells(p, q), bl.cells(p + 1, q));
                    for (std::size_t c = 0; c < s.target[q].size(); ++c) m(c, s.target[q][c]) = s.sign[q][c];
                    h.degeneracies[p][i][q] = m;
                }
            if (q < Q) h.f[p][q] = block_diagonal(space.coboundary(q), bl.tuples(p)).to_dense();
        }
    h.validate();
    return h;
}

std::string CohomologyValue::to_string() const {
    return coeff == Coefficients::Z ? integral.to_string() : structured.to_string();
}

CohomologyValue double_complex_cohomology(const DoubleComplex& dc, int n, Coefficients coeff) {
    CohomologyValue v;
    v.coeff = coeff;
    if (n < 0) return v;
    IntCochainComplex t = complexes::total_complex(dc);
    if (coeff == Coefficients::Z)
        v.integral = t.cohomology(n);
    else
        v.structured = t.cohomology(n, coeff);
    return v;
}

CohomologyValue equivariant_cohomology(const GAction& act, int n, Coefficients coeff, std::size_t truncation) {
    if (n < 0) return CohomologyValue{coeff, {}, {}};
    std::size_t P = truncation ? truncation : static_cast<std::size_t>(n) + 2;
    std::size_t needed = static_cast<std::size_t>(n) + (coeff == Coefficients::QmodZ ? 2 : 1);
    if (P < needed)
        throw SchemaError("truncation " + std::to_string(P) + " is too small for degree " + std::to_string(n));
    return double_complex_cohomology(cellular_double_complex(bar_levels(act, P), coeff), n, coeff);
}

// ---------------------------------------------------------------------------
// Group averaging

std::vector<Rational> group_average(const BarLevels& bl, std::size_t p, std::size_t k,
                                    const std::vector<Rational>& omega) {
    if (p == 0 || p > bl.P) throw DimensionMismatch("group average needs 1 <= p <= P");
    if (omega.size() != bl.cells(p, k)) throw DimensionMismatch("cochain has the wrong length");
    const std::size_t n = bl.action.group().order();
    const std::size_t cells = bl.action.space().cells[k];
    const std::size_t rest = bl.tuples(p - 1);
    std::vector<Rational> out(rest * cells);
    for (std::size_t t = 0; t < rest; ++t)
        for (std::size_t c = 0; c < cells; ++c) {
            Rational s = 0;
            for (std::size_t g = 0; g < n; ++g) s += omega[(g * rest + t) * cells + c];
            out[t * cells + c] = s / Rational(n);
        }
    return out;
}

std::vector<Integer> group_average_integral(const BarLevels& bl, std::size_t p, std::size_t k,
                                            const std::vector<Integer>& omega) {
    std::vector<Rational> q(omega.begin(), omega.end());
    std::vector<Integer> out;
    for (const auto& x : group_average(bl, p, k, q)) {
        if (x.get_den() != 1)
            throw CoefficientNotDivisible("averaging over a group of order " +
                                          std::to_string(bl.action.group().order()) + " leaves a fraction");
        out.push_back(x.get_num());
    }
    return out;
}

std::vector<Rational> vertical_differential(const BarLevels& bl, std::size_t p, std::size_t k,
                                            const std::vector<Rational>& omega) {
    if (p >= bl.P) throw DimensionMismatch("no level above the truncation");
    if (omega.size() != bl.cells(p, k)) throw DimensionMismatch("cochain has the wrong length");
    std::vector<Rational> out(bl.cells(p + 1, k));
    for (std::size_t i = 0; i <= p + 1; ++i) {
        const auto& f = bl.faces[p + 1][i];
        for (std::size_t c = 0; c < out.size(); ++c) {
            Rational v = omega[f.target[k][c]] * f.sign[k][c];
            if (i % 2)
                out[c] -= v;
            else
                out[c] += v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Invariants and induced maps

IntMatrix invariant_cochains(const GAction& act, std::size_t k) {
    const std::size_t n = act.space().cells[k];
    IntMatrix stacked(0, n);
    for (std::size_t g = 0; g < act.group().order(); ++g) {
        IntMatrix pull = act.act(g).chain_matrix(k, n).transpose();
        stacked = IntMatrix::vstack(stacked, pull - IntMatrix::identity(n));
    }
    return stacked.rows() ? linalg::integer_kernel(stacked) : IntMatrix::identity(n);
}

complexes::DoubleComplexMap invariant_inclusion(const GAction& act, std::size_t P) {
    BarLevels bl = bar_levels(act, P);
    DoubleComplex target = cellular_double_complex(bl);
    const std::size_t Q = act.space().dim();
    std::vector<IntMatrix> inv;
    for (std::size_t q = 0; q <= Q; ++q) inv.push_back(invariant_cochains(act, q));
    std::vector<std::vector<std::size_t>> ranks(P + 1, std::vector<std::size_t>(Q + 1, 0));
    for (std::size_t q = 0; q <= Q; ++q) ranks[0][q] = inv[q].cols();
    DoubleComplex source = DoubleComplex::zeros(P, Q, ranks);
    for (std::size_t q = 0; q < Q; ++q) {
        if (inv[q].cols() == 0 || inv[q + 1].cols() == 0) continue;
        RatMatrix x;
        if (!linalg::solve(to_rational(inv[q + 1]), to_rational(act.space().coboundary(q) * inv[q]), x))
            throw InternalError("coboundary does not preserve invariant cochains");
        source.horizontal[0][q] = SparseIntMatrix::from_dense(linalg::to_integer(x));
    }
    complexes::DoubleComplexMap m{source, target, {}};
    for (std::size_t p = 0; p <= P; ++p) {
        m.components.emplace_back();
        for (std::size_t q = 0; q <= Q; ++q)
            m.components[p].push_back(p == 0 ? SparseIntMatrix::from_dense(inv[q])
                                             : SparseIntMatrix(target.ranks[p][q], 0));
    }
    m.validate();
    return m;
}

complexes::DoubleComplexMap induced_map(const BarLevels& source, const BarLevels& target, const SignedCellMap& f) {
    const auto& gm = source.action;
    const auto& gn = target.action;
    if (gm.group().order() != gn.group().order() || gm.group().table() != gn.group().table())
        throw InvalidAction("induced map needs the same group on both sides");
    if (source.P != target.P) throw DimensionMismatch("induced map needs equal truncations");
    const std::size_t Q = gm.space().dim();
    if (gn.space().dim() != Q || f.target.size() != Q + 1) throw DimensionMismatch("cell dimensions differ");
    // Equivariance and cellularity of f.
    for (std::size_t g = 0; g < gm.group().order(); ++g)
        if (!(f.after(gm.act(g)) == gn.act(g).after(f))) throw InvalidAction("cellular map is not equivariant");
    for (std::size_t k = 1; k <= Q; ++k)
        if (!(gn.space().boundary[k] * f.chain_matrix(k, gn.space().cells[k]) ==
              f.chain_matrix(k - 1, gn.space().cells[k - 1]) * gm.space().boundary[k]))
            throw NotChainMap("cell map does not commute with the boundary");
    complexes::DoubleComplexMap m{cellular_double_complex(target), cellular_double_complex(source), {}};
    for (std::size_t p = 0; p <= source.P; ++p) {
        m.components.emplace_back();
        for (std::size_t k = 0; k <= Q; ++k) {
            const std::size_t cm = gm.space().cells[k], cn = gn.space().cells[k];
            SparseIntMatrix pull(source.cells(p, k), target.cells(p, k));
            for (std::size_t t = 0; t < source.tuples(p); ++t)
                for (std::size_t c = 0; c < cm; ++c) pull.add(t * cm + c, t * cn + f.target[k][c], f.sign[k][c]);
            pull.finalize();
            m.components[p].push_back(std::move(pull));
        }
    }
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Simplicial covers

std::vector<std::size_t> SimplicialCover::index(std::size_t p, std::size_t alpha) const {
    std::vector<std::size_t> idx(p + 1);
    for (std::size_t i = p + 1; i-- > 0;) {
        idx[i] = alpha % base_size;
        alpha /= base_size;
    }
    return idx;
}

std::size_t SimplicialCover::encode(const std::vector<std::size_t>& idx) const {
    std::size_t a = 0;
    for (std::size_t x : idx) a = a * base_size + x;
    return a;
}

namespace {

CellSet empty_cells(const BarLevels& bl, std::size_t p) {
    CellSet s;
    for (std::size_t k = 0; k < bl.action.space().cells.size(); ++k) s.emplace_back(bl.cells(p, k), false);
    return s;
}

bool subset(const CellSet& a, const CellSet& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t c = 0; c < a[k].size(); ++c)
            if (a[k][c] && !b[k][c]) return false;
    return true;
}

}  // namespace

SimplicialCover simplicial_cover(const BarLevels& bl, const std::vector<CellSet>& base_cover) {
    const auto& space = bl.action.space();
    if (base_cover.empty()) throw NotACover("cover has no members");
    for (const auto& u : base_cover) {
        if (u.size() != space.cells.size()) throw SchemaError("cover member needs one cell list per dimension");
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (u[k].size() != space.cells[k]) throw SchemaError("cover member has the wrong number of cells");
            if (k == 0) continue;
            for (std::size_t c = 0; c < u[k].size(); ++c)
                if (u[k][c])
                    for (std::size_t f = 0; f < space.cells[k - 1]; ++f)
                        if (space.boundary[k](f, c) != 0 && !u[k - 1][f])
                            throw SchemaError("cover member is not a subcomplex");
        }
    }
    for (std::size_t k = 0; k < space.cells.size(); ++k)
        for (std::size_t c = 0; c < space.cells[k]; ++c) {
            bool hit = false;
            for (const auto& u : base_cover) hit = hit || u[k][c];
            if (!hit) throw NotACover("cell " + std::to_string(c) + " of dimension " + std::to_string(k) + " is not covered");
        }
    SimplicialCover cov;
    cov.P = bl.P;
    cov.base_size = base_cover.size();
    cov.members.push_back(base_cover);
    for (std::size_t p = 1; p <= bl.P; ++p) {
        std::size_t count = 1;
        for (std::size_t i = 0; i <= p; ++i) count *= cov.base_size;
        std::vector<CellSet> level;
        for (std::size_t a = 0; a < count; ++a) {
            auto idx = cov.index(p, a);
            CellSet u = empty_cells(bl, p);
            for (std::size_t k = 0; k < u.size(); ++k)
                for (std::size_t c = 0; c < u[k].size(); ++c) {
                    bool in = true;
                    for (std::size_t i = 0; i <= p && in; ++i) {
                        auto di = idx;
                        di.erase(di.begin() + i);
                        in = cov.members[p - 1][cov.encode(di)][k][bl.faces[p][i].target[k][c]];
                    }
                    u[k][c] = in;
                }
            level.push_back(std::move(u));
        }
        cov.members.push_back(std::move(level));
    }
    return cov;
}

void validate_cover(const BarLevels& bl, const SimplicialCover& cov) {
    for (std::size_t p = 0; p <= cov.P; ++p) {
        // Each level is covered.
        CellSet all = empty_cells(bl, p);
        for (const auto& u : cov.members[p])
            for (std::size_t k = 0; k < u.size(); ++k)
                for (std::size_t c = 0; c < u[k].size(); ++c)
                    if (u[k][c]) all[k][c] = true;
        for (const auto& dim : all)
            for (bool b : dim)
                if (!b) throw AxiomViolation("derived cover misses a cell at level " + std::to_string(p));
        for (std::size_t a = 0; a < cov.members[p].size(); ++a) {
            auto idx = cov.index(p, a);
            const auto& u = cov.members[p][a];
            for (std::size_t k = 0; k < u.size(); ++k)
                for (std::size_t c = 0; c < u[k].size(); ++c) {
                    if (!u[k][c]) continue;
                    for (std::size_t i = 0; p > 0 && i <= p; ++i) {
                        auto di = idx;
                        di.erase(di.begin() + i);
                        if (!cov.members[p - 1][cov.encode(di)][k][bl.faces[p][i].target[k][c]])
                            throw AxiomViolation("face ∂_" + std::to_string(i) + " leaves the derived cover at level " +
                                                 std::to_string(p));
                    }
                    for (std::size_t i = 0; p < cov.P && i <= p; ++i) {
                        auto si = idx;
                        si.insert(si.begin() + i, idx[i]);
                        if (!cov.members[p + 1][cov.encode(si)][k][bl.degeneracies[p][i].target[k][c]])
                            throw AxiomViolation("degeneracy σ_" + std::to_string(i) +
                                                 " leaves the derived cover at level " + std::to_string(p));
                    }
                }
        }
    }
}

bool refinement_commutes(const SimplicialCover& fine, const SimplicialCover& coarse,
                         const std::vector<std::size_t>& phi) {
    if (phi.size() != fine.base_size || fine.P != coarse.P) return false;
    for (std::size_t b : phi)
        if (b >= coarse.base_size) return false;
    auto lift = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> out;
        for (std::size_t x : idx) out.push_back(phi[x]);
        return out;
    };
    for (std::size_t p = 0; p <= fine.P; ++p)
        for (std::size_t b = 0; b < fine.members[p].size(); ++b) {
            auto idx = fine.index(p, b);
            if (!subset(fine.members[p][b], coarse.members[p][coarse.encode(lift(idx))])) return false;
            for (std::size_t i = 0; p > 0 && i <= p; ++i) {
                auto di = idx;
                di.erase(di.begin() + i);
                auto li = lift(idx);
                li.erase(li.begin() + i);
                if (lift(di) != li) return false;
            }
        }
    return true;
}

// ---------------------------------------------------------------------------
// S^3 conjugation

DoubleComplex s3_conjugation_double_complex(std::size_t P) {
    std::vector<std::vector<std::size_t>> ranks;
    for (std::size_t p = 0; p <= P; ++p) ranks.push_back({1, 0, 0, p + 1});
    DoubleComplex dc = DoubleComplex::zeros(P, 3, ranks);
    for (std::size_t p = 0; p < P; ++p) {
        IntMatrix v0(1, 1);
        v0(0, 0) = p % 2;
        dc.vertical[p][0] = SparseIntMatrix::from_dense(v0);
        // Level p+1 has 3-cells 1..p+2: the sphere in one slot, e elsewhere;
        // slot p+2 is the space. A face sends cell j to a cell or collapses it.
        IntMatrix v(p + 2, p + 1);
        for (std::size_t i = 0; i <= p + 1; ++i) {
            const int s = i % 2 ? -1 : 1;
            for (std::size_t j = 1; j <= p + 2; ++j) {
                std::size_t img = 0;
                if (i == 0)
                    img = j == 1 ? 0 : j - 1;
                else if (i <= p)
                    img = j <= i ? j : j - 1;
                else
                    img = j <= p ? j : (j == p + 1 ? 0 : p + 1);
                if (img) v(j - 1, img - 1) += s;
            }
        }
        dc.vertical[p][3] = SparseIntMatrix::from_dense(v);
    }
    dc.validate();
    return dc;
}

}  // namespace eqdiff::simplicial
