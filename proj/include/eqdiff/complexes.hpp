#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eqdiff/exact_linalg.hpp"
#include "eqdiff/mixed.hpp"

namespace eqdiff::complexes {

using linalg::FgAbGroup;
using linalg::Integer;
using linalg::IntMatrix;
using linalg::Rational;
using linalg::RatMatrix;
using linalg::SparseIntMatrix;

enum class Coefficients { Z, Q, QmodZ };

std::string to_string(Coefficients c);
Coefficients coefficients_from_string(const std::string& s);

// Cochain complex of f.g. free Z-modules in degrees [min_degree, max_degree].
// Differentials leaving the top degree are zero.
class IntCochainComplex {
public:
    IntCochainComplex() = default;
    IntCochainComplex(int min_degree, std::vector<std::size_t> ranks, std::vector<SparseIntMatrix> differentials);

    int min_degree() const noexcept { return min_degree_; }
    int max_degree() const noexcept { return min_degree_ + static_cast<int>(ranks_.size()) - 1; }
    std::size_t rank(int n) const;
    // d^n : degree n -> n+1, an all-zero matrix of the right shape outside the range.
    SparseIntMatrix differential(int n) const;
    const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }

    // Shapes plus d^{n+1} d^n = 0; throws CompositionNotZero.
    void validate() const;

    FgAbGroup cohomology(int n) const;
    // dim over Q of H^n(C tensor Q)
    std::size_t rational_betti(int n) const;
    linalg::StructuredCoefGroup cohomology(int n, Coefficients c) const;

private:
    int min_degree_ = 0;
    std::vector<std::size_t> ranks_;
    std::vector<SparseIntMatrix> d_;
};

// Homotopy-equivalent smaller complex obtained by cancelling pairs joined by a
// unit entry of d^k, for k >= protect_below. Degrees below protect_below keep
// their bases, and so does C^{protect_below} as the source of d^{protect_below - 1}.
IntCochainComplex reduce(const IntCochainComplex& c, int protect_below);

struct ChainMap {
    IntCochainComplex source;
    IntCochainComplex target;
    int shift = 0;                      // degree n maps to n + shift
    std::vector<SparseIntMatrix> components;  // indexed from source.min_degree()

    SparseIntMatrix component(int n) const;
    void validate() const;  // throws NotChainMap
};

// Cone^k = A^{k+1} + B^k, d(a, b) = (-d_A a, -w a + d_B b).
IntCochainComplex cone(const ChainMap& w);

// Bidegrees [0,P] x [0,Q]. Horizontal d : (p,q) -> (p,q+1); vertical
// ∂ : (p,q) -> (p+1,q). Squares commute; signs enter at totalization.
struct DoubleComplex {
    std::size_t P = 0;
    std::size_t Q = 0;
    std::vector<std::vector<std::size_t>> ranks;                // [p][q]
    std::vector<std::vector<SparseIntMatrix>> horizontal;       // [p][q], q < Q
    std::vector<std::vector<SparseIntMatrix>> vertical;         // [p][q], p < P
    Coefficients coeff = Coefficients::Z;

    static DoubleComplex zeros(std::size_t P, std::size_t Q, std::vector<std::vector<std::size_t>> ranks);
    std::size_t rank(std::size_t p, std::size_t q) const { return ranks[p][q]; }
    void validate() const;  // throws IllFormedDoubleComplex

    IntCochainComplex row(std::size_t p) const;     // fixed p, horizontal d
    IntCochainComplex column(std::size_t q) const;  // fixed q, vertical ∂
};

// Degree n = sum over p+q=n, blocks ordered by p ascending; differential
// d + (-1)^q ∂.
IntCochainComplex total_complex(const DoubleComplex& dc);
// Block offset of (p, q) inside total degree p+q.
std::size_t total_offset(const DoubleComplex& dc, std::size_t p, std::size_t q);

struct DoubleComplexMap {
    DoubleComplex source;
    DoubleComplex target;
    std::vector<std::vector<SparseIntMatrix>> components;  // [p][q]
    void validate() const;  // throws NotChainMap
};

enum class RowDirection { FixedP, FixedQ };

struct QuasiIsoVerdict {
    bool rowwise = false;
    bool total = false;
    std::vector<std::string> details;
    int valid_below = 0;  // degrees checked are < valid_below
};

// Compares cohomology over Q. Row checks cover index values < row_limit of the
// varying direction, total checks cover degrees < total_limit; this lets the
// caller discard spurious classes at a truncation boundary.
QuasiIsoVerdict quasi_iso_by_rows(const DoubleComplexMap& m, RowDirection dir, int row_limit, int total_limit);

// Graded simplicial module with f and a simplicial zero homotopy s of f^2.
// s carries (p, q) to (p-1, q+2), so that ∂ + s + (-1)^p f has total degree 1.
struct SimplicialHomotopyComplex {
    std::size_t P = 0;
    int qmin = 0;
    int qmax = 0;
    std::vector<std::vector<std::size_t>> ranks;                     // [p][q-qmin]
    std::vector<std::vector<std::vector<IntMatrix>>> faces;          // [p][i][q-qmin]: M^{p-1,q} -> M^{p,q}
    std::vector<std::vector<std::vector<IntMatrix>>> degeneracies;   // [p][i][q-qmin]: M^{p+1,q} -> M^{p,q}
    std::vector<std::vector<IntMatrix>> f;                           // [p][q-qmin]: M^{p,q} -> M^{p,q+1}
    std::vector<std::vector<std::vector<IntMatrix>>> s;              // [p][i][q-qmin]: M^{p,q} -> M^{p-1,q+2}

    std::size_t rank(std::size_t p, int q) const;
    IntMatrix face(std::size_t p, std::size_t i, int q) const;
    IntMatrix degeneracy(std::size_t p, std::size_t i, int q) const;
    IntMatrix f_at(std::size_t p, int q) const;
    IntMatrix s_at(std::size_t p, std::size_t i, int q) const;
    IntMatrix boundary(std::size_t p, int q) const;       // alternating sum, level p -> p+1
    IntMatrix homotopy(std::size_t p, int q) const;       // alternating sum, level p -> p-1

    // All maps zero (identity faces/degeneracies are not implied).
    static SimplicialHomotopyComplex allocate(std::size_t P, int qmin, int qmax,
                                              std::vector<std::vector<std::size_t>> ranks);
    void validate() const;  // throws AxiomViolation naming the failed relation
};

IntCochainComplex homotopy_total(const SimplicialHomotopyComplex& h);

struct HomotopyMorphism {
    SimplicialHomotopyComplex source;
    SimplicialHomotopyComplex target;
    std::vector<std::vector<IntMatrix>> components;  // [p][q-source.qmin]
    void validate() const;                           // throws NotChainMap
};

// Grades F^{k+1} + F~^k, f = [[-f, 0], [-w, f~]] acting on (a, b), s = diag(s, s~).
SimplicialHomotopyComplex cone(const HomotopyMorphism& w);

// Random instance with nonzero s: a constant simplicial module over a random
// cochain complex, s placed on odd levels as f K f, then conjugated by a
// random unimodular change of basis.
SimplicialHomotopyComplex synthetic_homotopy_complex(std::mt19937_64& rng, std::size_t P, int grades);

// The same instance data viewed as a plain simplicial double complex (s ignored).
DoubleComplex underlying_double_complex(const SimplicialHomotopyComplex& h);

// -β: lift a Q/Z cocycle at degree n-1 to [0,1) representatives, apply d and
// negate. Throws NotACocycle when d(rep) is not integral.
std::vector<Integer> bockstein_apply(const IntCochainComplex& c, int n, const std::vector<Rational>& qz_cocycle);

struct BocksteinReport {
    int degree = 0;
    FgAbGroup image;             // image of -β inside H^n(Z)
    FgAbGroup torsion;           // torsion subgroup of H^n(Z)
    bool image_is_torsion = false;
    std::size_t generators = 0;  // lattice generators of the Q/Z cocycle group used
};

BocksteinReport bockstein(const IntCochainComplex& c, int n);

// Q(i) elements as rational pairs.
struct GaussianRational {
    Rational re, im;
    friend bool operator==(const GaussianRational&, const GaussianRational&) = default;
};

struct CounterexampleReport {
    // conjugated[p][i]: whether the lift of the i-th face into level p uses
    // complex conjugation.
    std::vector<std::vector<bool>> conjugated;
    int level = 0;                 // ∂∘∂ evaluated from this level to level+2
    GaussianRational witness;      // input element
    GaussianRational composite;    // ∂∘∂ applied to the witness
    GaussianRational composite_on_real;  // ∂∘∂ applied to 1
    bool lifts_restrict_to_identity_on_Z = true;
    bool nonzero() const { return composite.re != 0 || composite.im != 0; }
};

// Trivial group on a point, resolution Z -> C -> C/Z. With no conjugations all
// composites vanish; the default inserts one conjugation at the face ∂_1 into
// level 1.
CounterexampleReport bad_resolution_counterexample(std::optional<std::vector<std::vector<bool>>> conjugated = {});

}  // namespace eqdiff::complexes
