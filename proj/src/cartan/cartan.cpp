#include "eqdiff/cartan.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>

#include "eqdiff/errors.hpp"

namespace eqdiff::cartan {

namespace {

constexpr std::size_t kMaxCoordinates = 32;

// Sign of dx_A ∧ dx_B reordered to ascending order: (-1)^{#(i in A, j in B, i > j)}.
int wedge_sign(std::uint32_t a, std::uint32_t b) {
    unsigned swaps = 0;
    for (std::uint32_t rest = b; rest; rest &= rest - 1) {
        unsigned j = static_cast<unsigned>(std::countr_zero(rest));
        swaps += static_cast<unsigned>(std::popcount(a >> (j + 1)));
    }
    return swaps % 2 ? -1 : 1;
}

Rational power(const Rational& v, unsigned e) {
    Rational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= v;
    return r;
}

void compositions(std::size_t vars, unsigned total, std::vector<unsigned>& cur, std::size_t pos,
                  std::vector<std::vector<unsigned>>& out) {
    if (pos + 1 == vars) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (unsigned e = 0; e <= total; ++e) {
        cur[pos] = total - e;
        compositions(vars, e, cur, pos + 1, out);
    }
}

std::vector<std::vector<unsigned>> exponent_vectors(std::size_t vars, unsigned total) {
    std::vector<std::vector<unsigned>> out;
    if (vars == 0) {
        if (total == 0) out.emplace_back();
        return out;
    }
    std::vector<unsigned> cur(vars, 0);
    compositions(vars, total, cur, 0, out);
    return out;
}

std::vector<std::uint32_t> masks_of_size(std::size_t m, unsigned r) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << m); ++s)
        if (static_cast<unsigned>(std::popcount(s)) == r) out.push_back(s);
    return out;
}

}  // namespace

unsigned Monomial::u_degree() const { return std::accumulate(u.begin(), u.end(), 0u); }
unsigned Monomial::x_degree() const { return std::accumulate(x.begin(), x.end(), 0u); }
unsigned Monomial::form_degree() const { return static_cast<unsigned>(std::popcount(dx)); }

EquivariantForm EquivariantForm::constant(std::size_t k, std::size_t m, const Rational& c) {
    Monomial mono{std::vector<unsigned>(k, 0), std::vector<unsigned>(m, 0), 0};
    return monomial(k, m, mono, c);
}

EquivariantForm EquivariantForm::x(std::size_t k, std::size_t m, std::size_t i) {
    if (i >= m) throw SchemaError("coordinate index out of range");
    Monomial mono{std::vector<unsigned>(k, 0), std::vector<unsigned>(m, 0), 0};
    mono.x[i] = 1;
    return monomial(k, m, mono);
}

EquivariantForm EquivariantForm::u(std::size_t k, std::size_t m, std::size_t a) {
    if (a >= k) throw SchemaError("Lie algebra generator index out of range");
    Monomial mono{std::vector<unsigned>(k, 0), std::vector<unsigned>(m, 0), 0};
    mono.u[a] = 1;
    return monomial(k, m, mono);
}

EquivariantForm EquivariantForm::dx(std::size_t k, std::size_t m, std::size_t i) {
    if (i >= m) throw SchemaError("coordinate index out of range");
    Monomial mono{std::vector<unsigned>(k, 0), std::vector<unsigned>(m, 0), std::uint32_t{1} << i};
    return monomial(k, m, mono);
}

EquivariantForm EquivariantForm::monomial(std::size_t k, std::size_t m, const Monomial& mono, const Rational& c) {
    if (m > kMaxCoordinates) throw SchemaError("at most 32 coordinates are supported");
    if (mono.u.size() != k || mono.x.size() != m || (m < kMaxCoordinates && (mono.dx >> m) != 0))
        throw DimensionMismatch("monomial does not fit the form space");
    EquivariantForm f(k, m);
    f.add_term(mono, c);
    return f;
}

void EquivariantForm::add_term(const Monomial& mono, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(mono, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

int EquivariantForm::max_cartan_degree() const {
    int d = -1;
    for (const auto& [mono, c] : terms_) d = std::max(d, static_cast<int>(mono.cartan_degree()));
    return d;
}

bool EquivariantForm::is_homogeneous(unsigned cartan_degree) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const auto& t) { return t.first.cartan_degree() == cartan_degree; });
}

unsigned EquivariantForm::max_form_degree() const {
    unsigned d = 0;
    for (const auto& [mono, c] : terms_) d = std::max(d, mono.form_degree());
    return d;
}

unsigned EquivariantForm::max_u_degree() const {
    unsigned d = 0;
    for (const auto& [mono, c] : terms_) d = std::max(d, mono.u_degree());
    return d;
}

void EquivariantForm::check_same_space(const EquivariantForm& o) const {
    if (k_ != o.k_ || m_ != o.m_) throw DimensionMismatch("forms live in different spaces");
}

EquivariantForm EquivariantForm::operator+(const EquivariantForm& o) const {
    check_same_space(o);
    EquivariantForm r = *this;
    for (const auto& [mono, c] : o.terms_) r.add_term(mono, c);
    return r;
}

EquivariantForm EquivariantForm::operator-(const EquivariantForm& o) const {
    check_same_space(o);
    EquivariantForm r = *this;
    for (const auto& [mono, c] : o.terms_) r.add_term(mono, -c);
    return r;
}

EquivariantForm EquivariantForm::operator-() const { return *this * Rational(-1); }

EquivariantForm EquivariantForm::operator*(const Rational& s) const {
    EquivariantForm r(k_, m_);
    if (s == 0) return r;
    for (const auto& [mono, c] : terms_) r.terms_.emplace(mono, c * s);
    return r;
}

EquivariantForm EquivariantForm::operator*(const EquivariantForm& o) const {
    check_same_space(o);
    EquivariantForm r(k_, m_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            if (ma.dx & mb.dx) continue;
            Monomial mono;
            mono.u.resize(k_);
            mono.x.resize(m_);
            for (std::size_t a = 0; a < k_; ++a) mono.u[a] = ma.u[a] + mb.u[a];
            for (std::size_t i = 0; i < m_; ++i) mono.x[i] = ma.x[i] + mb.x[i];
            mono.dx = ma.dx | mb.dx;
            r.add_term(mono, wedge_sign(ma.dx, mb.dx) * ca * cb);
        }
    return r;
}

EquivariantForm EquivariantForm::partial_x(std::size_t i) const {
    EquivariantForm r(k_, m_);
    for (const auto& [mono, c] : terms_) {
        if (mono.x[i] == 0) continue;
        Monomial d = mono;
        --d.x[i];
        r.add_term(d, c * mono.x[i]);
    }
    return r;
}

EquivariantForm EquivariantForm::partial_u(std::size_t a) const {
    EquivariantForm r(k_, m_);
    for (const auto& [mono, c] : terms_) {
        if (mono.u[a] == 0) continue;
        Monomial d = mono;
        --d.u[a];
        r.add_term(d, c * mono.u[a]);
    }
    return r;
}

EquivariantForm EquivariantForm::component(std::uint32_t mask) const {
    EquivariantForm r(k_, m_);
    for (const auto& [mono, c] : terms_)
        if (mono.dx == mask) {
            Monomial d = mono;
            d.dx = 0;
            r.add_term(d, c);
        }
    return r;
}

EquivariantForm EquivariantForm::widened(std::size_t k, std::size_t m) const {
    if (k < k_ || m < m_) throw DimensionMismatch("widening must not drop variables");
    EquivariantForm r(k, m);
    for (const auto& [mono, c] : terms_) {
        Monomial d = mono;
        d.u.resize(k, 0);
        d.x.resize(m, 0);
        r.add_term(d, c);
    }
    return r;
}

std::string EquivariantForm::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mono, c] : terms_) {
        std::vector<std::string> factors;
        for (std::size_t a = 0; a < k_; ++a)
            if (mono.u[a])
                factors.push_back("u" + std::to_string(a + 1) + (mono.u[a] > 1 ? "^" + std::to_string(mono.u[a]) : ""));
        for (std::size_t i = 0; i < m_; ++i)
            if (mono.x[i])
                factors.push_back("x" + std::to_string(i + 1) + (mono.x[i] > 1 ? "^" + std::to_string(mono.x[i]) : ""));
        std::string wedge;
        for (std::size_t i = 0; i < m_; ++i)
            if (mono.dx >> i & 1u) wedge += (wedge.empty() ? "dx" : "^dx") + std::to_string(i + 1);
        if (!wedge.empty()) factors.push_back(wedge);

        Rational mag = abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        bool show_coeff = factors.empty() || mag != 1;
        if (show_coeff) os << linalg::to_string(mag);
        for (std::size_t f = 0; f < factors.size(); ++f) os << (f || show_coeff ? "*" : "") << factors[f];
    }
    return os.str();
}

namespace {

class Parser {
public:
    Parser(const std::string& text, std::size_t k, std::size_t m) : s_(text), k_(k), m_(m) {}

    EquivariantForm parse() {
        EquivariantForm f = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw SchemaError("form parse error at position " + std::to_string(pos_) + ": " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char ch) {
        skip();
        return pos_ < s_.size() && s_[pos_] == ch;
    }

    bool peek_digit() {
        skip();
        return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
    }

    std::string digits() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected digits");
        return s_.substr(start, pos_ - start);
    }

    std::size_t index(std::size_t bound, const char* what) {
        std::string d = digits();
        if (d.size() > 6) fail(std::string("index too large for ") + what);
        std::size_t i = std::stoul(d);
        if (i == 0 || i > bound) fail(std::string(what) + " index out of range");
        return i - 1;
    }

    EquivariantForm expr() {
        EquivariantForm acc(k_, m_);
        bool negative = false;
        if (peek('+') || peek('-')) negative = s_[pos_++] == '-';
        for (;;) {
            EquivariantForm t = term();
            acc = negative ? acc - t : acc + t;
            if (peek('+') || peek('-'))
                negative = s_[pos_++] == '-';
            else
                break;
        }
        return acc;
    }

    EquivariantForm term() {
        EquivariantForm acc = EquivariantForm::constant(k_, m_, 1);
        EquivariantForm last = factor();
        for (;;) {
            if (peek('*')) {
                ++pos_;
                acc = acc * last;
                last = factor();
            } else if (peek('^')) {
                ++pos_;
                if (peek_digit()) {
                    std::string d = digits();
                    if (d.size() > 3) fail("exponent too large");
                    unsigned e = static_cast<unsigned>(std::stoul(d));
                    EquivariantForm p = EquivariantForm::constant(k_, m_, 1);
                    for (unsigned i = 0; i < e; ++i) p = p * last;
                    last = p;
                } else {
                    acc = acc * last;
                    last = factor();
                }
            } else {
                break;
            }
        }
        return acc * last;
    }

    EquivariantForm factor() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char ch = s_[pos_];
        if (ch == '(') {
            ++pos_;
            EquivariantForm f = expr();
            if (!peek(')')) fail("expected ')'");
            ++pos_;
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            Integer num(digits());
            Integer den = 1;
            if (peek('/')) {
                ++pos_;
                skip();
                den = Integer(digits());
                if (den == 0) fail("zero denominator");
            }
            Rational q(num, den);
            q.canonicalize();
            return EquivariantForm::constant(k_, m_, q);
        }
        if (s_.compare(pos_, 2, "dx") == 0) {
            pos_ += 2;
            return EquivariantForm::dx(k_, m_, index(m_, "dx"));
        }
        if (ch == 'x') {
            ++pos_;
            return EquivariantForm::x(k_, m_, index(m_, "x"));
        }
        if (ch == 'u') {
            ++pos_;
            return EquivariantForm::u(k_, m_, index(k_, "u"));
        }
        fail("expected a number, variable or '('");
    }

    const std::string& s_;
    std::size_t k_;
    std::size_t m_;
    std::size_t pos_ = 0;
};

}  // namespace

EquivariantForm EquivariantForm::parse(const std::string& text, std::size_t k, std::size_t m) {
    if (m > kMaxCoordinates) throw SchemaError("at most 32 coordinates are supported");
    return Parser(text, k, m).parse();
}

EquivariantForm exterior_d(const EquivariantForm& w) {
    EquivariantForm r(w.k(), w.m());
    for (const auto& [mono, c] : w.terms())
        for (std::size_t j = 0; j < w.m(); ++j) {
            if (mono.x[j] == 0 || (mono.dx >> j & 1u)) continue;
            Monomial d = mono;
            --d.x[j];
            d.dx |= std::uint32_t{1} << j;
            int sign = std::popcount(mono.dx & ((std::uint32_t{1} << j) - 1)) % 2 ? -1 : 1;
            r.add_term(d, c * mono.x[j] * sign);
        }
    return r;
}

namespace {

void check_field(const VectorField& v, const EquivariantForm& w) {
    if (v.size() != w.m()) throw DimensionMismatch("vector field has the wrong number of components");
    for (const auto& comp : v) {
        if (comp.k() != w.k() || comp.m() != w.m()) throw DimensionMismatch("vector field in a different space");
        if (comp.max_form_degree() != 0) throw DimensionMismatch("vector field components must be functions");
    }
}

// f with the dx part of `mono` removed, as a 0-form.
EquivariantForm coefficient_of(std::size_t k, std::size_t m, const Monomial& mono, const Rational& c) {
    Monomial f = mono;
    f.dx = 0;
    return EquivariantForm::monomial(k, m, f, c);
}

EquivariantForm apply_field(const VectorField& v, const EquivariantForm& f) {
    EquivariantForm r(f.k(), f.m());
    for (std::size_t j = 0; j < v.size(); ++j)
        if (!v[j].is_zero()) r = r + v[j] * f.partial_x(j);
    return r;
}

}  // namespace

EquivariantForm interior(const VectorField& v, const EquivariantForm& w) {
    check_field(v, w);
    EquivariantForm r(w.k(), w.m());
    for (const auto& [mono, c] : w.terms()) {
        int position = 0;
        for (std::uint32_t rest = mono.dx; rest; rest &= rest - 1, ++position) {
            unsigned i = static_cast<unsigned>(std::countr_zero(rest));
            if (v[i].is_zero()) continue;
            Monomial reduced = mono;
            reduced.dx &= ~(std::uint32_t{1} << i);
            EquivariantForm term = EquivariantForm::monomial(w.k(), w.m(), reduced, position % 2 ? -c : c);
            r = r + v[i] * term;
        }
    }
    return r;
}

EquivariantForm lie_derivative(const VectorField& v, const EquivariantForm& w) {
    check_field(v, w);
    EquivariantForm r(w.k(), w.m());
    for (const auto& [mono, c] : w.terms()) {
        EquivariantForm f = coefficient_of(w.k(), w.m(), mono, c);
        Monomial wedge_only{std::vector<unsigned>(w.k(), 0), std::vector<unsigned>(w.m(), 0), mono.dx};
        r = r + apply_field(v, f) * EquivariantForm::monomial(w.k(), w.m(), wedge_only);
        int position = 0;
        for (std::uint32_t rest = mono.dx; rest; rest &= rest - 1, ++position) {
            unsigned i = static_cast<unsigned>(std::countr_zero(rest));
            EquivariantForm dvi = exterior_d(v[i]);
            if (dvi.is_zero()) continue;
            Monomial others{std::vector<unsigned>(w.k(), 0), std::vector<unsigned>(w.m(), 0),
                            mono.dx & ~(std::uint32_t{1} << i)};
            EquivariantForm moved = dvi * EquivariantForm::monomial(w.k(), w.m(), others);
            r = r + f * (position % 2 ? -moved : moved);
        }
    }
    return r;
}

VectorField bracket(const VectorField& a, const VectorField& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector fields of different dimension");
    VectorField r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = apply_field(a, b[i]) - apply_field(b, a[i]);
    return r;
}

LieAlgebra LieAlgebra::abelian(std::size_t k) {
    LieAlgebra g;
    g.dim = k;
    for (std::size_t a = 0; a < k; ++a) g.names.push_back("X" + std::to_string(a + 1));
    g.c.assign(k, std::vector<std::vector<Rational>>(k, std::vector<Rational>(k, 0)));
    return g;
}

LieAlgebra LieAlgebra::su2() {
    LieAlgebra g = abelian(3);
    for (std::size_t a = 0; a < 3; ++a) {
        std::size_t b = (a + 1) % 3, e = (a + 2) % 3;
        g.c[a][b][e] = 1;
        g.c[b][a][e] = -1;
    }
    return g;
}

void LieAlgebra::validate() const {
    if (c.size() != dim || names.size() != dim) throw AxiomViolation("structure constants have the wrong shape");
    for (const auto& row : c) {
        if (row.size() != dim) throw AxiomViolation("structure constants have the wrong shape");
        for (const auto& v : row)
            if (v.size() != dim) throw AxiomViolation("structure constants have the wrong shape");
    }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            for (std::size_t e = 0; e < dim; ++e)
                if (c[a][b][e] != -c[b][a][e]) throw AxiomViolation("bracket is not antisymmetric");
    // [[a,b],e] + [[b,e],a] + [[e,a],b] = 0
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            for (std::size_t e = 0; e < dim; ++e)
                for (std::size_t out = 0; out < dim; ++out) {
                    Rational s = 0;
                    for (std::size_t f = 0; f < dim; ++f)
                        s += c[a][b][f] * c[f][e][out] + c[b][e][f] * c[f][a][out] + c[e][a][f] * c[f][b][out];
                    if (s != 0) throw AxiomViolation("bracket violates the Jacobi identity");
                }
}

LinearAction LinearAction::rotation_plane() {
    LinearAction act;
    act.algebra = LieAlgebra::abelian(1);
    act.m = 2;
    act.rho = {RatMatrix::from_rows({{0, -1}, {1, 0}})};
    return act;
}

LinearAction LinearAction::su2_vector() {
    LinearAction act;
    act.algebra = LieAlgebra::su2();
    act.m = 3;
    act.rho = {RatMatrix::from_rows({{0, 0, 0}, {0, 0, -1}, {0, 1, 0}}),
               RatMatrix::from_rows({{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}}),
               RatMatrix::from_rows({{0, -1, 0}, {1, 0, 0}, {0, 0, 0}})};
    return act;
}

LinearAction LinearAction::trivial(std::size_t k, std::size_t m) {
    LinearAction act;
    act.algebra = LieAlgebra::abelian(k);
    act.m = m;
    act.rho.assign(k, RatMatrix(m, m));
    return act;
}

void LinearAction::validate() const {
    algebra.validate();
    if (m > kMaxCoordinates) throw SchemaError("at most 32 coordinates are supported");
    if (rho.size() != algebra.dim) throw AxiomViolation("one representation matrix per generator is required");
    for (const auto& r : rho)
        if (r.rows() != m || r.cols() != m) throw AxiomViolation("representation matrix has the wrong shape");
    for (std::size_t a = 0; a < k(); ++a)
        for (std::size_t b = 0; b < k(); ++b) {
            RatMatrix lhs(m, m);
            for (std::size_t e = 0; e < k(); ++e) lhs = lhs + rho[e].scaled(algebra.c[a][b][e]);
            if (lhs != rho[a] * rho[b] - rho[b] * rho[a])
                throw AxiomViolation("representation does not preserve the bracket");
        }
    for (const auto& s : finite) {
        if (s.space.rows() != m || s.space.cols() != m || s.coadjoint.rows() != k() || s.coadjoint.cols() != k())
            throw AxiomViolation("finite symmetry has the wrong shape");
    }
}

VectorField fundamental_vector_field(const LinearAction& act, const std::vector<Rational>& coeffs) {
    if (coeffs.size() != act.k()) throw DimensionMismatch("Lie algebra element has the wrong dimension");
    RatMatrix r(act.m, act.m);
    for (std::size_t a = 0; a < act.k(); ++a) r = r + act.rho[a].scaled(coeffs[a]);
    VectorField v(act.m, act.zero());
    for (std::size_t i = 0; i < act.m; ++i)
        for (std::size_t j = 0; j < act.m; ++j)
            if (r(i, j) != 0) v[i] = v[i] + EquivariantForm::x(act.k(), act.m, j) * r(i, j);
    return v;
}

VectorField fundamental_vector_field(const LinearAction& act, std::size_t a) {
    std::vector<Rational> coeffs(act.k(), 0);
    coeffs.at(a) = 1;
    return fundamental_vector_field(act, coeffs);
}

EquivariantForm contraction(const LinearAction& act, const EquivariantForm& w) {
    EquivariantForm r = act.zero();
    for (std::size_t a = 0; a < act.k(); ++a)
        r = r + EquivariantForm::u(act.k(), act.m, a) * interior(fundamental_vector_field(act, a), w);
    return r;
}

EquivariantForm cartan_d(const LinearAction& act, const EquivariantForm& w) {
    return exterior_d(w) + contraction(act, w);
}

EquivariantForm lie_operator(const LinearAction& act, const EquivariantForm& w) {
    EquivariantForm r = act.zero();
    for (std::size_t a = 0; a < act.k(); ++a)
        r = r + EquivariantForm::u(act.k(), act.m, a) * lie_derivative(fundamental_vector_field(act, a), w);
    return r;
}

EquivariantForm invariance_operator(const LinearAction& act, std::size_t b, const EquivariantForm& w) {
    EquivariantForm r = lie_derivative(fundamental_vector_field(act, b), w);
    for (std::size_t a = 0; a < act.k(); ++a)
        for (std::size_t e = 0; e < act.k(); ++e) {
            const Rational& coeff = act.algebra.c[b][a][e];
            if (coeff == 0) continue;
            r = r + EquivariantForm::u(act.k(), act.m, a) * w.partial_u(e) * coeff;
        }
    return r;
}

EquivariantForm transform(const FiniteSymmetry& s, const EquivariantForm& w) {
    std::size_t k = w.k(), m = w.m();
    std::vector<EquivariantForm> xs(m, EquivariantForm(k, m)), dxs(m, EquivariantForm(k, m)),
        us(k, EquivariantForm(k, m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (s.space(i, j) != 0) {
                xs[i] = xs[i] + EquivariantForm::x(k, m, j) * s.space(i, j);
                dxs[i] = dxs[i] + EquivariantForm::dx(k, m, j) * s.space(i, j);
            }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (s.coadjoint(a, b) != 0) us[a] = us[a] + EquivariantForm::u(k, m, b) * s.coadjoint(a, b);
    EquivariantForm r(k, m);
    for (const auto& [mono, c] : w.terms()) {
        EquivariantForm t = EquivariantForm::constant(k, m, c);
        for (std::size_t a = 0; a < k; ++a)
            for (unsigned e = 0; e < mono.u[a]; ++e) t = t * us[a];
        for (std::size_t i = 0; i < m; ++i)
            for (unsigned e = 0; e < mono.x[i]; ++e) t = t * xs[i];
        for (std::uint32_t rest = mono.dx; rest; rest &= rest - 1) t = t * dxs[std::countr_zero(rest)];
        r = r + t;
    }
    return r;
}

bool is_invariant(const LinearAction& act, const EquivariantForm& w) {
    for (std::size_t b = 0; b < act.k(); ++b)
        if (!invariance_operator(act, b, w).is_zero()) return false;
    for (const auto& s : act.finite)
        if (transform(s, w) != w) return false;
    return true;
}

namespace {

// Monomials of Cartan degree n and weight w.
std::vector<Monomial> block_basis(std::size_t k, std::size_t m, int n, unsigned w) {
    std::vector<Monomial> out;
    if (n < 0) return out;
    for (unsigned r = 0; r <= m && r <= static_cast<unsigned>(n) && r <= w; ++r) {
        if ((static_cast<unsigned>(n) - r) % 2) continue;
        unsigned j = (static_cast<unsigned>(n) - r) / 2;
        if (j > 0 && k == 0) continue;
        auto us = exponent_vectors(k, j);
        auto xs = exponent_vectors(m, w - r);
        auto masks = masks_of_size(m, r);
        for (const auto& u : us)
            for (const auto& x : xs)
                for (auto mask : masks) out.push_back(Monomial{u, x, mask});
    }
    return out;
}

RatMatrix operator_matrix(const std::vector<Monomial>& source, const std::vector<Monomial>& target,
                          std::size_t k, std::size_t m, const std::function<EquivariantForm(const EquivariantForm&)>& op) {
    std::map<Monomial, std::size_t> index;
    for (std::size_t i = 0; i < target.size(); ++i) index[target[i]] = i;
    RatMatrix mat(target.size(), source.size());
    for (std::size_t j = 0; j < source.size(); ++j) {
        EquivariantForm img = op(EquivariantForm::monomial(k, m, source[j]));
        for (const auto& [mono, c] : img.terms()) {
            auto it = index.find(mono);
            if (it == index.end()) throw InternalError("operator left its weight block");
            mat(it->second, j) = c;
        }
    }
    return mat;
}

// Columns spanning the invariant elements of a block.
RatMatrix invariant_basis(const LinearAction& act, const std::vector<Monomial>& basis) {
    std::size_t k = act.k(), m = act.m;
    RatMatrix conditions(0, basis.size());
    for (std::size_t b = 0; b < k; ++b)
        conditions = RatMatrix::vstack(
            conditions,
            operator_matrix(basis, basis, k, m, [&](const EquivariantForm& f) { return invariance_operator(act, b, f); }));
    for (const auto& s : act.finite)
        conditions = RatMatrix::vstack(
            conditions, operator_matrix(basis, basis, k, m, [&](const EquivariantForm& f) { return transform(s, f) - f; }));
    if (conditions.rows() == 0) return RatMatrix::identity(basis.size());
    return linalg::rational_kernel(conditions);
}

std::size_t weight_block_cohomology(const LinearAction& act, int n, unsigned w) {
    std::size_t k = act.k(), m = act.m;
    auto cur = block_basis(k, m, n, w);
    if (cur.empty()) return 0;
    auto next = block_basis(k, m, n + 1, w);
    auto prev = block_basis(k, m, n - 1, w);
    auto dC = [&](const EquivariantForm& f) { return cartan_d(act, f); };
    RatMatrix inv = invariant_basis(act, cur);
    std::size_t rank_out = 0, rank_in = 0;
    if (!next.empty() && inv.cols()) rank_out = linalg::rank(operator_matrix(cur, next, k, m, dC) * inv);
    if (!prev.empty()) {
        RatMatrix inv_prev = invariant_basis(act, prev);
        if (inv_prev.cols()) rank_in = linalg::rank(operator_matrix(prev, cur, k, m, dC) * inv_prev);
    }
    return inv.cols() - rank_out - rank_in;
}

}  // namespace

std::size_t cartan_cohomology_dimension(const LinearAction& act, int n, unsigned D, bool* saturated) {
    act.validate();
    std::size_t total = 0;
    if (saturated) *saturated = false;
    for (unsigned w = 0; w <= D; ++w) {
        std::size_t h = weight_block_cohomology(act, n, w);
        total += h;
        if (w == D && h > 0 && saturated) *saturated = true;
    }
    return total;
}

CartanCohomology cartan_cohomology_truncated(const LinearAction& act, int n, unsigned D) {
    CartanCohomology r;
    r.degree = n;
    r.bound = D;
    r.dimension = cartan_cohomology_dimension(act, n, D, &r.saturated);
    std::size_t wider = cartan_cohomology_dimension(act, n, D + 2);
    if (wider != r.dimension)
        throw TruncationUnstable("Cartan cohomology in degree " + std::to_string(n) + " changes from " +
                                 std::to_string(r.dimension) + " to " + std::to_string(wider) +
                                 " when the weight bound grows from " + std::to_string(D) + " to " +
                                 std::to_string(D + 2));
    return r;
}

LinearAction extend_by_interval(const LinearAction& act) {
    LinearAction ext = act;
    ext.m = act.m + 1;
    for (auto& r : ext.rho) {
        RatMatrix big(ext.m, ext.m);
        big.set_block(0, 0, r);
        r = big;
    }
    for (auto& s : ext.finite) {
        RatMatrix big(ext.m, ext.m);
        big.set_block(0, 0, s.space);
        big(act.m, act.m) = 1;
        s.space = big;
    }
    return ext;
}

EquivariantForm fiber_integrate_interval(const EquivariantForm& w) {
    if (w.m() == 0) throw DimensionMismatch("fiber integration needs an interval coordinate");
    std::size_t m = w.m() - 1;
    std::uint32_t dt = std::uint32_t{1} << m;
    EquivariantForm r(w.k(), m);
    for (const auto& [mono, c] : w.terms()) {
        if (!(mono.dx & dt)) continue;
        // ι(∂_t) moves dt across every other dx, all of which precede it.
        int sign = (mono.form_degree() - 1) % 2 ? -1 : 1;
        Monomial d;
        d.u = mono.u;
        d.x.assign(mono.x.begin(), mono.x.begin() + static_cast<std::ptrdiff_t>(m));
        d.dx = mono.dx & ~dt;
        r.add_term(d, c * sign / Rational(mono.x[m] + 1));
    }
    return r;
}

EquivariantForm restrict_interval(const EquivariantForm& w, const Rational& value) {
    if (w.m() == 0) throw DimensionMismatch("restriction needs an interval coordinate");
    std::size_t m = w.m() - 1;
    std::uint32_t dt = std::uint32_t{1} << m;
    EquivariantForm r(w.k(), m);
    for (const auto& [mono, c] : w.terms()) {
        if (mono.dx & dt) continue;
        Monomial d;
        d.u = mono.u;
        d.x.assign(mono.x.begin(), mono.x.begin() + static_cast<std::ptrdiff_t>(m));
        d.dx = mono.dx;
        r.add_term(d, c * power(value, mono.x[m]));
    }
    return r;
}

std::vector<ShuffleIndex> shuffle_set(std::size_t l, std::size_t p) {
    if (l > p) throw SchemaError("shuffle needs l <= p");
    std::vector<ShuffleIndex> out;
    std::vector<bool> chosen(p, false);
    std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(l), true);
    // prev_permutation over a sorted-descending selection enumerates subsets in lexicographic order
    do {
        ShuffleIndex s;
        s.l = l;
        s.p = p;
        for (std::size_t v = 0; v < p; ++v)
            if (chosen[v]) s.perm.push_back(v + 1);
        for (std::size_t v = 0; v < p; ++v)
            if (!chosen[v]) s.perm.push_back(v + 1);
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j)
                if (s.perm[i] > s.perm[j]) ++inversions;
        s.sign = inversions % 2 ? -1 : 1;
        out.push_back(std::move(s));
    } while (std::prev_permutation(chosen.begin(), chosen.end()));
    return out;
}

GroupCochain getzler_map_finite(const simplicial::BarLevels& bl, std::size_t p, std::size_t q,
                                const std::vector<Rational>& omega) {
    const auto& cells = bl.action.space().cells;
    if (q >= cells.size() || p > bl.P) throw DimensionMismatch("bidegree outside the bar levels");
    if (omega.size() != bl.cells(p, q)) throw DimensionMismatch("cochain has the wrong length");
    GroupCochain f;
    f.p = p;
    f.q = q;
    f.values.assign(bl.tuples(p), std::vector<Rational>(cells[q]));
    for (std::size_t t = 0; t < bl.tuples(p); ++t)
        for (std::size_t c = 0; c < cells[q]; ++c) f.values[t][c] = omega[t * cells[q] + c];
    return f;
}

GroupCochain getzler_dbar(const simplicial::GAction& act, const GroupCochain& f) {
    const auto& G = act.group();
    std::size_t n = G.order();
    std::size_t cq = act.space().cells.at(f.q);
    std::size_t p = f.p;
    std::size_t count = 1;
    for (std::size_t i = 0; i <= p; ++i) count *= n;
    auto decode = [&](std::size_t code, std::size_t len) {
        std::vector<std::size_t> g(len);
        for (std::size_t i = len; i-- > 0;) {
            g[i] = code % n;
            code /= n;
        }
        return g;
    };
    auto encode = [&](const std::vector<std::size_t>& g) {
        std::size_t code = 0;
        for (auto x : g) code = code * n + x;
        return code;
    };
    GroupCochain r;
    r.p = p + 1;
    r.q = f.q;
    r.values.assign(count, std::vector<Rational>(cq));
    for (std::size_t code = 0; code < count; ++code) {
        auto g = decode(code, p + 1);
        auto& out = r.values[code];
        std::vector<std::size_t> tail(g.begin() + 1, g.end());
        for (std::size_t c = 0; c < cq; ++c) out[c] += f.values[encode(tail)][c];
        for (std::size_t i = 1; i <= p; ++i) {
            std::vector<std::size_t> merged;
            for (std::size_t j = 0; j < p + 1; ++j) {
                if (j == i - 1) {
                    merged.push_back(G.mul(g[j], g[j + 1]));
                    ++j;
                } else {
                    merged.push_back(g[j]);
                }
            }
            const auto& v = f.values[encode(merged)];
            for (std::size_t c = 0; c < cq; ++c) out[c] += (i % 2 ? -1 : 1) * v[c];
        }
        std::vector<std::size_t> head(g.begin(), g.end() - 1);
        const auto& v = f.values[encode(head)];
        const auto& map = act.act(g[p]);
        int s = (p + 1) % 2 ? -1 : 1;
        for (std::size_t c = 0; c < cq; ++c) out[c] += s * map.sign[f.q][c] * v[map.target[f.q][c]];
    }
    return r;
}

std::size_t getzler_chain_map_failures(const simplicial::BarLevels& bl) {
    std::size_t failures = 0;
    const auto& cells = bl.action.space().cells;
    for (std::size_t p = 0; p < bl.P; ++p)
        for (std::size_t q = 0; q < cells.size(); ++q)
            for (std::size_t e = 0; e < bl.cells(p, q); ++e) {
                std::vector<Rational> omega(bl.cells(p, q), 0);
                omega[e] = 1;
                auto lhs = getzler_map_finite(bl, p + 1, q, simplicial::vertical_differential(bl, p, q, omega));
                auto rhs = getzler_dbar(bl.action, getzler_map_finite(bl, p, q, omega));
                if (lhs.values != rhs.values) ++failures;
            }
    return failures;
}

}  // namespace eqdiff::cartan
