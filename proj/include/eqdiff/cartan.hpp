#pragma once

// Cartan model for linear actions on R^m with polynomial coefficients.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eqdiff/exact_linalg.hpp"
#include "eqdiff/simplicial.hpp"

namespace eqdiff::cartan {

using linalg::Integer;
using linalg::Rational;
using linalg::RatMatrix;

// u^a x^b dx_I with I encoded as a bit mask (bit i = dx_{i+1}).
struct Monomial {
    std::vector<unsigned> u;
    std::vector<unsigned> x;
    std::uint32_t dx = 0;

    unsigned u_degree() const;
    unsigned x_degree() const;
    unsigned form_degree() const;
    unsigned cartan_degree() const { return 2 * u_degree() + form_degree(); }
    auto operator<=>(const Monomial&) const = default;
};

// Element of S(g^v) ⊗ Ω(R^m) with rational polynomial coefficients.
class EquivariantForm {
public:
    EquivariantForm() = default;
    EquivariantForm(std::size_t k, std::size_t m) : k_(k), m_(m) {}

    static EquivariantForm constant(std::size_t k, std::size_t m, const Rational& c);
    static EquivariantForm x(std::size_t k, std::size_t m, std::size_t i);   // 0-based
    static EquivariantForm u(std::size_t k, std::size_t m, std::size_t a);
    static EquivariantForm dx(std::size_t k, std::size_t m, std::size_t i);
    static EquivariantForm monomial(std::size_t k, std::size_t m, const Monomial& mono, const Rational& c = 1);
    // Grammar: sums of products of rationals, x1..xm, u1..uk, dx1..dxm and
    // parenthesized sums; '*' and '^' both multiply, '^' followed by an
    // integer is a power.
    static EquivariantForm parse(const std::string& text, std::size_t k, std::size_t m);

    std::size_t k() const noexcept { return k_; }
    std::size_t m() const noexcept { return m_; }
    const std::map<Monomial, Rational>& terms() const noexcept { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add_term(const Monomial& mono, const Rational& c);

    // Largest Cartan degree among terms, or -1 for zero.
    int max_cartan_degree() const;
    bool is_homogeneous(unsigned cartan_degree) const;
    unsigned max_form_degree() const;
    unsigned max_u_degree() const;

    EquivariantForm operator+(const EquivariantForm& o) const;
    EquivariantForm operator-(const EquivariantForm& o) const;
    EquivariantForm operator-() const;
    EquivariantForm operator*(const Rational& c) const;
    // Graded product: u and x commute, dx anticommute.
    EquivariantForm operator*(const EquivariantForm& o) const;
    friend bool operator==(const EquivariantForm&, const EquivariantForm&) = default;

    // Derivatives of the coefficients only.
    EquivariantForm partial_x(std::size_t i) const;
    EquivariantForm partial_u(std::size_t a) const;
    // Components with the given dx mask, as a 0-form.
    EquivariantForm component(std::uint32_t mask) const;
    // Same terms in a space with more variables (new ones appended).
    EquivariantForm widened(std::size_t k, std::size_t m) const;

    std::string to_string() const;

private:
    void check_same_space(const EquivariantForm& o) const;
    std::size_t k_ = 0;
    std::size_t m_ = 0;
    std::map<Monomial, Rational> terms_;
};

using VectorField = std::vector<EquivariantForm>;  // components along ∂/∂x_i

EquivariantForm exterior_d(const EquivariantForm& w);
EquivariantForm interior(const VectorField& v, const EquivariantForm& w);
// Computed as a derivation from V(f) and dV^i, not from Cartan's formula.
EquivariantForm lie_derivative(const VectorField& v, const EquivariantForm& w);
// Bracket of polynomial vector fields.
VectorField bracket(const VectorField& a, const VectorField& b);

struct LieAlgebra {
    std::size_t dim = 0;
    std::vector<std::string> names;
    // c[a][b][e] = coefficient of X_e in [X_a, X_b]
    std::vector<std::vector<std::vector<Rational>>> c;

    static LieAlgebra abelian(std::size_t k);
    static LieAlgebra su2();  // [X1,X2] = X3 and cyclic
    void validate() const;    // antisymmetry and Jacobi; throws AxiomViolation
};

// A finite symmetry acting on R^m and on the dual generators u.
struct FiniteSymmetry {
    RatMatrix space;      // x -> space * x
    RatMatrix coadjoint;  // u_a -> sum_b coadjoint(a, b) u_b
};

struct LinearAction {
    LieAlgebra algebra;
    std::size_t m = 0;
    std::vector<RatMatrix> rho;  // one m x m matrix per basis element
    std::vector<FiniteSymmetry> finite;

    static LinearAction rotation_plane();  // S^1 on R^2, rho = [[0,-1],[1,0]]
    static LinearAction su2_vector();      // su(2) = so(3) on R^3
    static LinearAction trivial(std::size_t k, std::size_t m);
    void validate() const;  // rho is a Lie algebra map; throws AxiomViolation

    std::size_t k() const { return algebra.dim; }
    EquivariantForm zero() const { return EquivariantForm(k(), m); }
};

// X^#(x) = rho(X) x for X = sum_a coeffs[a] X_a.
VectorField fundamental_vector_field(const LinearAction& act, const std::vector<Rational>& coeffs);
VectorField fundamental_vector_field(const LinearAction& act, std::size_t a);

// sum_a u_a ι(X_a^#) w
EquivariantForm contraction(const LinearAction& act, const EquivariantForm& w);
// d_C = d + sum_a u_a ι(X_a^#)
EquivariantForm cartan_d(const LinearAction& act, const EquivariantForm& w);
// sum_a u_a L(X_a^#) w
EquivariantForm lie_operator(const LinearAction& act, const EquivariantForm& w);
// Infinitesimal action of X_b: L(X_b^#) plus the coadjoint action on u.
EquivariantForm invariance_operator(const LinearAction& act, std::size_t b, const EquivariantForm& w);
// Substitution x -> A x, dx -> A dx, u -> coadjoint u.
EquivariantForm transform(const FiniteSymmetry& s, const EquivariantForm& w);
bool is_invariant(const LinearAction& act, const EquivariantForm& w);

struct CartanCohomology {
    int degree = 0;
    unsigned bound = 0;      // weight bound D
    std::size_t dimension = 0;
    bool saturated = false;  // the top weight D contributes classes
    friend bool operator==(const CartanCohomology&, const CartanCohomology&) = default;
};

// Weight = x-degree + form degree, which d_C and the invariance operators
// preserve; the truncation keeps all weights <= D. Throws TruncationUnstable
// when the bound D + 2 gives a different answer.
CartanCohomology cartan_cohomology_truncated(const LinearAction& act, int n, unsigned D);
// Without the stability check.
std::size_t cartan_cohomology_dimension(const LinearAction& act, int n, unsigned D, bool* saturated = nullptr);

// The action extended by an interval coordinate t = x_{m+1}, acted on trivially.
LinearAction extend_by_interval(const LinearAction& act);
// ∫_0^1 ι(∂_t) w dt for w on [0,1] x R^m (t is the last coordinate).
EquivariantForm fiber_integrate_interval(const EquivariantForm& w);
// i_t^* for t = value: drop dt terms and substitute.
EquivariantForm restrict_interval(const EquivariantForm& w, const Rational& value);

struct ShuffleIndex {
    std::size_t l = 0;
    std::size_t p = 0;
    std::vector<std::size_t> perm;  // perm[i] = π(i+1), values 1..p
    int sign = 1;
};

std::vector<ShuffleIndex> shuffle_set(std::size_t l, std::size_t p);

// Group cochains C^p(G, C^q(M)) as values[tuple][cell].
struct GroupCochain {
    std::size_t p = 0;
    std::size_t q = 0;
    std::vector<std::vector<Rational>> values;
};

// For a finite group the comparison map is the reindexing of a cellular
// cochain on G^p x M as a function G^p -> C^q(M).
GroupCochain getzler_map_finite(const simplicial::BarLevels& bl, std::size_t p, std::size_t q,
                                const std::vector<Rational>& omega);
// (d̄f)(g_1..g_{p+1}) = f(g_2..) + sum_i (-1)^i f(..g_i g_{i+1}..) + (-1)^{p+1} g_{p+1}^* f(g_1..g_p)
GroupCochain getzler_dbar(const simplicial::GAction& act, const GroupCochain& f);
// Number of basis cochains (levels < P, all cell dimensions) on which the
// square with ∂ fails to commute; 0 means the identity holds exhaustively.
std::size_t getzler_chain_map_failures(const simplicial::BarLevels& bl);

}  // namespace eqdiff::cartan
