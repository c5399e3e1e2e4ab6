#pragma once

// Differential cohomology of finite group actions on 0-dimensional cell
// complexes, computed from the Deligne cone over the bar construction, plus
// the hexagon of maps around it and the lens-space line bundle class.
//
// On a 0-dimensional M every form is a function, so the rational cochains of
// the bar complex stand in for the forms and the truncated forms sigma^{>=n}
// survive only for n = 0. Everything is a subquotient of some Q^N described
// by MixedGroup pairs (cocycles, coboundaries).

#include <optional>
#include <string>
#include <vector>

#include "eqdiff/mixed.hpp"
#include "eqdiff/simplicial.hpp"

namespace eqdiff::diffcoh {

using complexes::DoubleComplex;
using complexes::IntCochainComplex;
using linalg::FgAbGroup;
using linalg::MixedGroup;
using linalg::MixedQuotient;
using linalg::Rational;
using linalg::RatMatrix;
using simplicial::GAction;

// Cone(Z ⊕ σ^{≥n}Ω → Ω, (z,ω) ↦ ω − z)[−1] over an integral cochain complex C
// whose rational version plays the role of Ω. Degree m is
// C^m_Z ⊕ C^m_σ ⊕ C^{m−1}_Q with d(z, ω, η) = (dz, dω, ω − z − dη); the σ
// block is present only for n = 0.
struct DeligneComplexData {
    int n = 0;
    IntCochainComplex base;

    bool has_truncated_forms() const { return n <= 0; }
    std::size_t dim(int m) const;
    std::vector<bool> integral_mask(int m) const;
    RatMatrix differential(int m) const;  // degree m -> m + 1
    bool square_zero() const;             // over every degree of the base plus one
};

// Throws PositiveDimensionalInput unless M has only 0-cells. Uses bar levels
// 0..n+1 and a homotopy-equivalent reduction of the column.
DeligneComplexData deligne_complex(const GAction& act, int n);
// Column 0 of the bar double complex through level `levels`, reduced.
IntCochainComplex zero_dim_bar_complex(const GAction& act, std::size_t levels);

struct DiffCohReport {
    int n = 0;
    MixedQuotient group;
    // Ĥ^n sits in 0 → E → Ĥ^n → H^n(Z) → 0 with E = H^{n−1}(ℂ)/H^{n−1}(Z); the
    // divisible part of Ĥ^n always splits off because ℂ/ℤ is injective.
    MixedQuotient forms_part;
    FgAbGroup integral_part;
    bool split = true;
    std::string to_string() const { return group.to_string(); }
    friend bool operator==(const DiffCohReport&, const DiffCohReport&) = default;
};

DiffCohReport differential_cohomology_zero_dim(const GAction& act, int n);
// Same computation on an arbitrary integral complex standing in for the bar column.
DiffCohReport differential_cohomology_of_complex(const IntCochainComplex& c, int n);

// A subquotient Z/B of Q^dim.
struct Corner {
    std::string name;   // A..F or "Hhat"
    std::string label;  // e.g. "H^1(ℂ/ℤ)"
    MixedGroup cocycles;
    MixedGroup coboundaries;
    MixedQuotient structure;
    friend bool operator==(const Corner&, const Corner&) = default;
};

// Chain-level representative between the ambient spaces of two corners.
struct CornerMap {
    std::string name;
    std::string from;
    std::string to;
    RatMatrix matrix;
    friend bool operator==(const CornerMap&, const CornerMap&) = default;
};

// One exactness test. For a middle position X -f-> Y -g-> W the image of f
// and the kernel of g are compared as subgroups of Y; for an end of a short
// exact sequence one of them is the trivial or the full group.
struct ExactnessCheck {
    std::string sequence;
    std::string position;  // corner name
    MixedQuotient image;   // relative to the coboundaries of the position
    MixedQuotient kernel;
    bool exact = false;
    friend bool operator==(const ExactnessCheck&, const ExactnessCheck&) = default;
};

struct CommutativityCheck {
    std::string name;  // e.g. "I∘j = −β"
    bool commutes = false;
    friend bool operator==(const CommutativityCheck&, const CommutativityCheck&) = default;
};

struct HexagonReport {
    int n = 0;
    // A = H^{n−1}(ℂ), B = H^{n−1}(ℂ/ℤ), C = H^n(ℤ), D = H^n(ℂ),
    // E = Ω^{n−1}/Ω^{n−1}_ℤ, F = Ω^n_ℤ, Hhat = Ĥ^n.
    std::vector<Corner> corners;
    std::vector<CornerMap> maps;
    std::vector<ExactnessCheck> checks;
    std::vector<CommutativityCheck> commutativity;
    // Verdicts for "top", "bottom", "flat diagonal" (B → Ĥ → F) and
    // "topological diagonal" (E → Ĥ → C); empty when not evaluated.
    std::optional<bool> top_row, bottom_row, flat_diagonal, topological_diagonal;
    // Image of −β compared with the torsion of H^n(Z).
    std::optional<bool> beta_image_is_torsion;

    const Corner& corner(const std::string& name) const;
    bool has_corner(const std::string& name) const;
    bool all_exact() const;  // all four verdicts evaluated and positive
    bool all_commute() const;
    std::string to_text() const;  // labeled hexagon diagram
    friend bool operator==(const HexagonReport&, const HexagonReport&) = default;
};

HexagonReport hexagon(const GAction& act, int n);
HexagonReport hexagon_of_complex(const IntCochainComplex& c, int n);

// Finite presentation of the closed invariant n-forms of a positive
// dimensional M: columns of `closed` live in Ω^n(M); `d` maps to Ω^{n+1}(M);
// face0/face1 are the two pullbacks to level 1; `periods` are lattice
// generators (columns in Ω^n(M)) of the forms with integral periods.
struct SuppliedForms {
    RatMatrix closed;
    RatMatrix d;
    RatMatrix face0;
    RatMatrix face1;
    RatMatrix periods;
    void validate() const;  // throws InconsistentCorners
};

// Top row from the total complex of a supplied double complex; the F corner
// from the supplied forms. Verdicts needing Ĥ stay unevaluated.
HexagonReport hexagon_supplied(const DoubleComplex& dc, int n, const std::optional<SuppliedForms>& forms);

// S^1 as a p-gon with C_p rotating it, trivial line bundle with trivial
// transport and the generator acting on fibers by q/p.
struct FlatEquivariantLineBundle {
    std::size_t p = 2;
    std::size_t q = 1;
    std::vector<Rational> transport;             // per edge, in Q/Z
    std::vector<std::vector<Rational>> fiber;    // [g][vertex], in Q/Z

    static FlatEquivariantLineBundle lens(std::size_t p, std::size_t q);
    Rational total_holonomy() const;
};

// Returns a representative in [0, 1).
Rational flat_equivariant_chern_class(std::size_t p, std::size_t q);
Rational evaluate_on_fundamental_domain(const FlatEquivariantLineBundle& l);

// A D(1) cocycle on [0,1] × M: the interval split at `breaks`, on each piece j
// and point m a polynomial phi[m][j] (coefficients, constant first) whose
// jumps at the interior breaks are integers.
struct IntervalCocycle {
    std::vector<Rational> breaks;
    std::vector<std::vector<std::vector<Rational>>> phi;
    friend bool operator==(const IntervalCocycle&, const IntervalCocycle&) = default;
};

struct HomotopyFormulaReport {
    bool holds = false;
    std::vector<Rational> lhs;  // i_1^* x − i_0^* x, per point, in [0, 1)
    std::vector<Rational> rhs;  // ∫ R(x) over the interval, per point, in [0, 1)
    friend bool operator==(const HomotopyFormulaReport&, const HomotopyFormulaReport&) = default;
};

// Throws NotACocycle for non-integral jumps or data that is not G-invariant.
HomotopyFormulaReport homotopy_formula_check(const GAction& act, const IntervalCocycle& x);

struct SweepEntry {
    std::string group;
    std::string action;
    int n = 0;
    bool exact = false;
    bool commutes = false;
    bool bockstein_is_torsion = false;
    bool i_onto = false;
    bool ker_i_matches = false;
    friend bool operator==(const SweepEntry&, const SweepEntry&) = default;
};

// Hexagons for every action of each group on at most max_points points and
// every n <= max_n, run on `workers` threads (0: EQDIFF_WORKERS or hardware).
std::vector<SweepEntry> hexagon_sweep(const std::vector<simplicial::FiniteGroup>& groups, std::size_t max_points,
                                      int max_n, unsigned workers = 0);
// C_1..C_6 and S_3.
std::vector<simplicial::FiniteGroup> small_groups();

}  // namespace eqdiff::diffcoh
