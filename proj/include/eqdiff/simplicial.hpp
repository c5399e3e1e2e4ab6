#pragma once

// Bar construction G^p x M for a finite group acting cellularly on a finite
// regular cell complex, and the cochain-level tools built on it.

#include <string>
#include <vector>

#include "eqdiff/complexes.hpp"

namespace eqdiff::simplicial {

using complexes::Coefficients;
using complexes::DoubleComplex;
using complexes::IntCochainComplex;
using linalg::FgAbGroup;
using linalg::Integer;
using linalg::IntMatrix;
using linalg::Rational;
using linalg::RatMatrix;
using linalg::SparseIntMatrix;
using linalg::StructuredCoefGroup;

class FiniteGroup {
public:
    FiniteGroup() : FiniteGroup({{0}}, "trivial") {}
    // table[a][b] = index of a*b. Throws InvalidAction unless the table is a group.
    explicit FiniteGroup(std::vector<std::vector<std::size_t>> table, std::string name = "");

    static FiniteGroup cyclic(std::size_t n);
    static FiniteGroup symmetric(std::size_t n);  // permutations in lexicographic order, (ab)(x) = a(b(x))
    static FiniteGroup dihedral(std::size_t n);   // order 2n, element r^k s^e at index k + n e
    static FiniteGroup quaternion8();             // 1, -1, i, -i, j, -j, k, -k
    // "cyclic:5", "symmetric:3", "dihedral:4", "quaternion:8", "trivial".
    static FiniteGroup from_name(const std::string& name);

    std::size_t order() const noexcept { return table_.size(); }
    std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
    std::size_t inverse(std::size_t a) const { return inverse_[a]; }
    std::size_t identity() const noexcept { return identity_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<std::vector<std::size_t>>& table() const noexcept { return table_; }

    // All subgroups, one representative per conjugacy class, as sorted element lists.
    std::vector<std::vector<std::size_t>> subgroup_classes() const;

private:
    std::vector<std::vector<std::size_t>> table_;
    std::vector<std::size_t> inverse_;
    std::size_t identity_ = 0;
    std::string name_;
};

// cells[k] cells in dimension k; boundary[k] (k >= 1) is the cells[k-1] x cells[k]
// incidence matrix of the cellular chain boundary.
struct CellComplex {
    std::vector<std::size_t> cells;
    std::vector<IntMatrix> boundary;  // boundary[0] is unused (0 x cells[0])

    static CellComplex points(std::size_t n);
    static CellComplex polygon(std::size_t n);  // v_i, e_i with ∂e_i = v_{i+1} - v_i
    static CellComplex circle();                // one vertex, one edge

    std::size_t dim() const { return cells.empty() ? 0 : cells.size() - 1; }
    std::size_t total_cells() const;
    void validate() const;  // shapes and ∂∘∂ = 0; throws AxiomViolation
    // Cellular coboundary C^k -> C^{k+1} (transpose of boundary[k+1]).
    IntMatrix coboundary(std::size_t k) const;
};

// A cellular map sending each cell to one cell with an orientation sign.
struct SignedCellMap {
    std::vector<std::vector<std::size_t>> target;  // [dim][cell]
    std::vector<std::vector<int>> sign;            // [dim][cell], +1 or -1

    static SignedCellMap identity(const std::vector<std::size_t>& cells);
    SignedCellMap after(const SignedCellMap& first) const;  // this ∘ first
    // Chain-level matrix in dimension k: column c has sign at row target(c).
    IntMatrix chain_matrix(std::size_t k, std::size_t target_cells) const;
    friend bool operator==(const SignedCellMap&, const SignedCellMap&) = default;
};

class GAction {
public:
    GAction() = default;
    // action[g] for every group element; validated.
    GAction(FiniteGroup group, CellComplex space, std::vector<SignedCellMap> action);
    // Closure of the given generator images under composition; throws
    // InvalidAction when the images do not define a homomorphism.
    static GAction from_generators(FiniteGroup group, CellComplex space,
                                   const std::vector<std::pair<std::size_t, SignedCellMap>>& generators);
    static GAction trivial(FiniteGroup group, CellComplex space);

    const FiniteGroup& group() const noexcept { return group_; }
    const CellComplex& space() const noexcept { return space_; }
    const SignedCellMap& act(std::size_t g) const { return action_[g]; }
    std::string label;

    void validate() const;  // homomorphism, identity, commutes with boundary

private:
    FiniteGroup group_;
    CellComplex space_;
    std::vector<SignedCellMap> action_;
};

// Permutation action of a group on a finite set of points.
GAction point_action(const FiniteGroup& g, const std::vector<std::vector<std::size_t>>& perm_of_element);
// Coset action G/H for a subgroup given as element list.
GAction coset_action(const FiniteGroup& g, const std::vector<std::size_t>& subgroup);
// Every action on at most max_points points, one per isomorphism class, as
// disjoint unions of coset actions.
std::vector<GAction> all_point_actions(const FiniteGroup& g, std::size_t max_points);

GAction point(const FiniteGroup& g);
GAction two_points_swap();                       // C_2 exchanging two points
GAction free_circle(std::size_t p);              // C_p rotating a p-gon
GAction trivial_circle(const FiniteGroup& g);    // one vertex, one edge, trivial action
// Standard equivariant cell structure of S^3 with the free C_p action of
// weights (1, q): cells e^k_i, i in C_p, with ∂e^3_i = e^2_{i+q} - e^2_i.
GAction lens_s3(std::size_t p, std::size_t q);

// Level p of G^• x M has |G|^p copies of the cells of M. A cell is indexed by
// tuple * cells[k] + c, where the tuple (g_1..g_p) is read in base |G| with g_1
// most significant.
struct BarLevels {
    GAction action;
    std::size_t P = 0;
    std::vector<std::vector<SignedCellMap>> faces;         // [p][i], level p -> p-1, p >= 1
    std::vector<std::vector<SignedCellMap>> degeneracies;  // [p][i], level p -> p+1, p < P

    std::size_t tuples(std::size_t p) const;
    std::size_t cells(std::size_t p, std::size_t k) const { return tuples(p) * action.space().cells[k]; }
    std::vector<std::size_t> decode(std::size_t p, std::size_t tuple) const;
    std::size_t encode(const std::vector<std::size_t>& tuple) const;

    void validate() const;  // simplicial identities; throws AxiomViolation
};

BarLevels bar_levels(const GAction& act, std::size_t P);

// (p, q) = cellular q-cochains on level p; horizontal cellular coboundary,
// vertical alternating sum of face pullbacks.
DoubleComplex cellular_double_complex(const BarLevels& bl, Coefficients coeff = Coefficients::Z);
// Pullback along ∂_i (level p-1 cochains -> level p cochains) in cell dimension k.
SparseIntMatrix face_pullback(const BarLevels& bl, std::size_t p, std::size_t i, std::size_t k);
// Same data as a simplicial homotopy complex with f = cellular d and s = 0.
complexes::SimplicialHomotopyComplex bar_homotopy_complex(const BarLevels& bl);

struct CohomologyValue {
    Coefficients coeff = Coefficients::Z;
    FgAbGroup integral;             // used when coeff = Z
    StructuredCoefGroup structured;  // used otherwise
    std::string to_string() const;
    friend bool operator==(const CohomologyValue&, const CohomologyValue&) = default;
};

// Truncation defaults to P = n + 2.
CohomologyValue equivariant_cohomology(const GAction& act, int n, Coefficients coeff = Coefficients::Z,
                                       std::size_t truncation = 0);
// Cohomology of a finite double complex with the same coefficient handling.
CohomologyValue double_complex_cohomology(const DoubleComplex& dc, int n, Coefficients coeff);

// ∫_G over the first group coordinate: level p cochain in cell dimension k to
// level p-1. ∂(∫_G ω) = ω whenever ∂ω = 0.
std::vector<Rational> group_average(const BarLevels& bl, std::size_t p, std::size_t k,
                                    const std::vector<Rational>& omega);
// Integral version; throws CoefficientNotDivisible when |G| does not divide.
std::vector<Integer> group_average_integral(const BarLevels& bl, std::size_t p, std::size_t k,
                                            const std::vector<Integer>& omega);
// ∂ applied to a rational cochain at level p, cell dimension k.
std::vector<Rational> vertical_differential(const BarLevels& bl, std::size_t p, std::size_t k,
                                            const std::vector<Rational>& omega);

// Integral basis (columns) of G-invariant cellular k-cochains on M.
IntMatrix invariant_cochains(const GAction& act, std::size_t k);
// Inclusion of the invariant cochains, placed at level 0, into the cellular
// double complex truncated at P.
complexes::DoubleComplexMap invariant_inclusion(const GAction& act, std::size_t P);

// Functoriality: an equivariant cellular map M -> N induces pullbacks from
// the double complex of N to the one of M.
complexes::DoubleComplexMap induced_map(const BarLevels& source, const BarLevels& target, const SignedCellMap& f);

// A subcomplex given by its cells per dimension.
using CellSet = std::vector<std::vector<bool>>;

struct SimplicialCover {
    std::size_t P = 0;
    std::size_t base_size = 0;  // |A|; level p is indexed by A^{p+1}
    // members[p][alpha] = U^{(p)}_alpha as cells of level p, alpha encoded in base |A|
    // with the first index most significant.
    std::vector<std::vector<CellSet>> members;

    std::vector<std::size_t> index(std::size_t p, std::size_t alpha) const;
    std::size_t encode(const std::vector<std::size_t>& idx) const;
};

SimplicialCover simplicial_cover(const BarLevels& bl, const std::vector<CellSet>& base_cover);
// Throws AxiomViolation unless faces and degeneracies respect the derived covers.
void validate_cover(const BarLevels& bl, const SimplicialCover& cover);
// V refines U via phi: B -> A with V_b inside U_{phi(b)}. Checks the induced
// refinement at every level and that it commutes with index faces.
bool refinement_commutes(const SimplicialCover& fine, const SimplicialCover& coarse,
                         const std::vector<std::size_t>& phi);

// The conjugation action of S^3 on itself with one 0-cell and one 3-cell:
// column 0 has vertical maps 0, 1, 0, 1, ...; column 3 has p+1 cells at level p.
DoubleComplex s3_conjugation_double_complex(std::size_t P);

}  // namespace eqdiff::simplicial
