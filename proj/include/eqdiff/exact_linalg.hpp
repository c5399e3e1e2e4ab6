#pragma once

#include <string>
#include <vector>

#include "eqdiff/matrix.hpp"

namespace eqdiff::linalg {

struct SnfDecomposition {
    IntMatrix u;  // unimodular, rows(a) x rows(a)
    IntMatrix s;  // same shape as a, diagonal with d_1 | d_2 | ...
    IntMatrix v;  // unimodular, cols(a) x cols(a)
    IntMatrix u_inv;
    IntMatrix v_inv;

    std::size_t rank() const;
    std::vector<Integer> diagonal() const;
};

// a = u * s * v. Pivot: smallest nonzero |entry|, ties broken row-major.
SnfDecomposition smith_normal_form(const IntMatrix& a);

// Nonzero invariant factors (units included) without transforms.
std::vector<Integer> invariant_factors(const IntMatrix& a);

// Same, for sparse input: unit pivots are eliminated sparsely and the
// remainder goes through the dense routine.
std::vector<Integer> invariant_factors(const SparseIntMatrix& a);
std::size_t rank(const SparseIntMatrix& a);

// Row-style Hermite normal form: h = t * a with t unimodular, h upper
// echelon with positive pivots and reduced entries above each pivot.
struct HermiteDecomposition {
    IntMatrix h;
    IntMatrix t;
    std::size_t rank = 0;
};
HermiteDecomposition hermite_normal_form(const IntMatrix& a);

// Columns form a Z-basis of {x in Z^n : a x = 0}.
IntMatrix integer_kernel(const IntMatrix& a);

class FgAbGroup {
public:
    FgAbGroup() = default;
    // Accepts any list of nonnegative "cyclic orders" (0 meaning Z) and
    // normalizes to invariant-factor form.
    static FgAbGroup from_cyclic_orders(const std::vector<Integer>& orders);
    FgAbGroup(std::size_t free_rank, std::vector<Integer> torsion);

    std::size_t free_rank() const noexcept { return free_rank_; }
    const std::vector<Integer>& torsion() const noexcept { return torsion_; }
    bool is_trivial() const { return free_rank_ == 0 && torsion_.empty(); }
    FgAbGroup torsion_subgroup() const { return FgAbGroup(0, torsion_); }
    Integer torsion_order() const;

    std::string to_string() const;  // e.g. "Z^2 + Z/2 + Z/6", "0"
    friend bool operator==(const FgAbGroup&, const FgAbGroup&) = default;

private:
    std::size_t free_rank_ = 0;
    std::vector<Integer> torsion_;
};

enum class CoefMode { C, CmodZ };

struct StructuredCoefGroup {
    std::size_t divisible_circle_rank = 0;
    std::size_t vector_rank = 0;
    FgAbGroup finite_part;

    std::string to_string() const;
    friend bool operator==(const StructuredCoefGroup&, const StructuredCoefGroup&) = default;
};

// ker(d_out) / im(d_in). Throws CompositionNotZero if d_out * d_in != 0.
FgAbGroup cohomology_at(const IntMatrix& d_in, const IntMatrix& d_out);
FgAbGroup cohomology_at(const SparseIntMatrix& d_in, const SparseIntMatrix& d_out);

StructuredCoefGroup coefficient_change(const FgAbGroup& h_n, const FgAbGroup& h_next, CoefMode mode);

// Rational linear algebra.
struct RowEchelon {
    RatMatrix r;                      // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column per nonzero row
};
RowEchelon rref(const RatMatrix& a);
std::size_t rank(const RatMatrix& a);
RatMatrix rational_kernel(const RatMatrix& a);  // columns form a basis
RatMatrix column_space(const RatMatrix& a);     // independent columns spanning the image
// Some x with a x = b (b may have several columns); false if inconsistent.
bool solve(const RatMatrix& a, const RatMatrix& b, RatMatrix& x);

Integer common_denominator(const RatMatrix& m);

}  // namespace eqdiff::linalg
