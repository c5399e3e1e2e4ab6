#pragma once

// Subgroups of Q^N of the form (finitely generated lattice) + (subspace).
// These model cocycle and coboundary groups of complexes that mix integral
// and rational coordinates, such as Deligne cones and Q/Z cochains.

#include <vector>

#include "eqdiff/exact_linalg.hpp"

namespace eqdiff::linalg {

class MixedGroup {
public:
    MixedGroup() = default;
    // Normalizes: space in reduced column echelon form, lattice generators
    // reduced modulo the space and replaced by a Z-basis.
    MixedGroup(std::size_t dim, const RatMatrix& lattice_gens, const RatMatrix& space_gens);

    static MixedGroup zero(std::size_t dim);
    static MixedGroup lattice(std::size_t dim, const RatMatrix& gens);
    static MixedGroup subspace(std::size_t dim, const RatMatrix& gens);
    // Z on the masked coordinates, Q on the others.
    static MixedGroup coordinate(const std::vector<bool>& integral_mask);

    std::size_t dim() const noexcept { return dim_; }
    const RatMatrix& lattice_basis() const noexcept { return lattice_; }
    const RatMatrix& space_basis() const noexcept { return space_; }
    std::size_t lattice_rank() const noexcept { return lattice_.cols(); }
    std::size_t space_dim() const noexcept { return space_.cols(); }

    MixedGroup operator+(const MixedGroup& other) const;
    MixedGroup image(const RatMatrix& m) const;
    bool contains(const MixedGroup& other) const;
    bool contains_vector(const RatMatrix& v) const;
    friend bool operator==(const MixedGroup&, const MixedGroup&) = default;

private:
    std::size_t dim_ = 0;
    RatMatrix lattice_;
    RatMatrix space_;
};

// {v : m v = 0 and v_i integral wherever integral_mask[i]}.
MixedGroup mixed_kernel(const RatMatrix& m, const std::vector<bool>& integral_mask);

// {x in source : m x in target}.
MixedGroup preimage(const RatMatrix& m, const MixedGroup& source, const MixedGroup& target);

// Structure of Z/B for B contained in Z: free part, finite part, and the
// divisible part split into circle (Q/Z-type) and vector (Q-type) summands.
struct MixedQuotient {
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;
    std::size_t circle_rank = 0;
    std::size_t vector_rank = 0;

    FgAbGroup finitely_generated_part() const { return FgAbGroup(free_rank, torsion); }
    std::string to_string() const;
    friend bool operator==(const MixedQuotient&, const MixedQuotient&) = default;
};

MixedQuotient quotient(const MixedGroup& z, const MixedGroup& b);

// Z-basis (as columns) of the lattice generated by integer columns.
IntMatrix lattice_basis(const IntMatrix& gens);

}  // namespace eqdiff::linalg
