#include "eqdiff/mixed.hpp"

namespace eqdiff::linalg {

namespace {

// Rows span the annihilator of the column span of w (an n x dim matrix);
// its kernel is exactly span(w).
RatMatrix annihilator(const RatMatrix& w, std::size_t dim) {
    if (w.cols() == 0) return RatMatrix::identity(dim);
    return rational_kernel(w.transpose()).transpose();
}

// Reduced column echelon basis of the span of the columns.
RatMatrix canonical_span(const RatMatrix& gens, std::size_t dim) {
    if (gens.cols() == 0) return RatMatrix(dim, 0);
    RowEchelon e = rref(gens.transpose());
    return e.r.block(0, 0, e.pivots.size(), dim).transpose();
}

}  // namespace

IntMatrix lattice_basis(const IntMatrix& gens) {
    if (gens.cols() == 0) return gens;
    HermiteDecomposition h = hermite_normal_form(gens.transpose());
    return h.h.block(0, 0, h.rank, gens.rows()).transpose();
}

MixedGroup::MixedGroup(std::size_t dim, const RatMatrix& lattice_gens, const RatMatrix& space_gens) : dim_(dim) {
    if ((lattice_gens.cols() && lattice_gens.rows() != dim) || (space_gens.cols() && space_gens.rows() != dim))
        throw DimensionMismatch("mixed group generators have wrong ambient dimension");
    space_ = canonical_span(space_gens, dim);
    if (lattice_gens.cols() == 0) {
        lattice_ = RatMatrix(dim, 0);
        return;
    }
    // Reduce lattice generators modulo the space: clear the echelon pivots.
    RatMatrix red = lattice_gens;
    if (space_.cols() > 0) {
        RowEchelon e = rref(space_.transpose());
        for (std::size_t j = 0; j < red.cols(); ++j)
            for (std::size_t k = 0; k < e.pivots.size(); ++k) {
                Rational c = red(e.pivots[k], j);
                if (c == 0) continue;
                for (std::size_t i = 0; i < dim; ++i) red(i, j) -= c * e.r(k, i);
            }
    }
    Integer den = common_denominator(red);
    IntMatrix scaled = to_integer(red.scaled(Rational(den)));
    IntMatrix basis = linalg::lattice_basis(scaled);
    // HNF(k L) = k HNF(L), so the result does not depend on the denominator.
    lattice_ = to_rational(basis).scaled(Rational(1) / Rational(den));
}

MixedGroup MixedGroup::zero(std::size_t dim) { return MixedGroup(dim, RatMatrix(dim, 0), RatMatrix(dim, 0)); }

MixedGroup MixedGroup::lattice(std::size_t dim, const RatMatrix& gens) {
    return MixedGroup(dim, gens, RatMatrix(dim, 0));
}

MixedGroup MixedGroup::subspace(std::size_t dim, const RatMatrix& gens) {
    return MixedGroup(dim, RatMatrix(dim, 0), gens);
}

MixedGroup MixedGroup::coordinate(const std::vector<bool>& integral_mask) {
    const std::size_t n = integral_mask.size();
    std::size_t a = 0;
    for (bool b : integral_mask) a += b;
    RatMatrix lat(n, a), sp(n, n - a);
    std::size_t li = 0, si = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (integral_mask[i])
            lat(i, li++) = 1;
        else
            sp(i, si++) = 1;
    }
    return MixedGroup(n, lat, sp);
}

MixedGroup MixedGroup::operator+(const MixedGroup& o) const {
    if (o.dim_ != dim_) throw DimensionMismatch("mixed group sum across ambients");
    return MixedGroup(dim_, RatMatrix::hstack(lattice_, o.lattice_), RatMatrix::hstack(space_, o.space_));
}

MixedGroup MixedGroup::image(const RatMatrix& m) const {
    if (m.cols() != dim_) throw DimensionMismatch("mixed group image: map has wrong source");
    RatMatrix l = lattice_.cols() ? m * lattice_ : RatMatrix(m.rows(), 0);
    RatMatrix s = space_.cols() ? m * space_ : RatMatrix(m.rows(), 0);
    return MixedGroup(m.rows(), l, s);
}

bool MixedGroup::contains(const MixedGroup& o) const { return (*this + o) == *this; }

bool MixedGroup::contains_vector(const RatMatrix& v) const {
    return contains(MixedGroup::lattice(dim_, v));
}

MixedGroup mixed_kernel(const RatMatrix& m, const std::vector<bool>& integral_mask) {
    const std::size_t n = integral_mask.size();
    if (m.cols() != n) throw DimensionMismatch("mixed kernel: mask length mismatch");
    RatMatrix k = m.rows() ? rational_kernel(m) : RatMatrix::identity(n);
    std::vector<std::size_t> int_idx;
    for (std::size_t i = 0; i < n; ++i)
        if (integral_mask[i]) int_idx.push_back(i);
    if (k.cols() == 0) return MixedGroup::zero(n);
    RatMatrix p = k.select_rows(int_idx);  // a x kdim
    // Elements of the kernel with vanishing integral coordinates.
    RatMatrix w = p.rows() ? k * rational_kernel(p) : k;
    if (int_idx.empty()) return MixedGroup::subspace(n, w);
    // L = span(p) intersected with Z^a, a saturated lattice.
    RatMatrix ann = annihilator(column_space(p), int_idx.size());
    IntMatrix ann_int(ann.rows(), ann.cols());
    if (ann.rows() > 0) {
        RatMatrix scaled = ann;
        for (std::size_t i = 0; i < ann.rows(); ++i) {
            Integer d = 1;
            for (std::size_t j = 0; j < ann.cols(); ++j)
                mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), ann(i, j).get_den_mpz_t());
            for (std::size_t j = 0; j < ann.cols(); ++j) scaled(i, j) *= d;
        }
        ann_int = to_integer(scaled);
    }
    IntMatrix l = ann.rows() ? integer_kernel(ann_int) : IntMatrix::identity(int_idx.size());
    // Lift each basis vector of L into the kernel.
    RatMatrix y;
    if (l.cols() > 0 && !solve(p, to_rational(l), y)) throw InternalError("mixed kernel lift failed");
    RatMatrix lifts = l.cols() ? k * y : RatMatrix(n, 0);
    return MixedGroup(n, lifts, w);
}

MixedGroup preimage(const RatMatrix& m, const MixedGroup& source, const MixedGroup& target) {
    if (m.cols() != source.dim() || m.rows() != target.dim())
        throw DimensionMismatch("preimage: map shape does not match groups");
    const std::size_t a = source.lattice_rank(), w = source.space_dim();
    const std::size_t b = target.lattice_rank(), w2 = target.space_dim();
    const std::size_t t = m.rows();
    RatMatrix big(t, a + w + b + w2);
    if (a) big.set_block(0, 0, m * source.lattice_basis());
    if (w) big.set_block(0, a, m * source.space_basis());
    if (b) big.set_block(0, a + w, -target.lattice_basis());
    if (w2) big.set_block(0, a + w + b, -target.space_basis());
    std::vector<bool> mask(a + w + b + w2, false);
    for (std::size_t i = 0; i < a; ++i) mask[i] = true;
    for (std::size_t i = 0; i < b; ++i) mask[a + w + i] = true;
    MixedGroup params = t ? mixed_kernel(big, mask) : MixedGroup::coordinate(mask);
    RatMatrix embed(source.dim(), a + w + b + w2);
    if (a) embed.set_block(0, 0, source.lattice_basis());
    if (w) embed.set_block(0, a, source.space_basis());
    return params.image(embed);
}

MixedQuotient quotient(const MixedGroup& z, const MixedGroup& b) {
    if (!z.contains(b)) throw InternalError("quotient: B is not contained in Z");
    const std::size_t dim = z.dim();
    MixedQuotient q;
    const std::size_t wz = z.space_dim(), wb = b.space_dim();
    RatMatrix y = annihilator(z.space_basis(), dim);  // kernel is W_Z
    // Lattice part of B that falls into W_Z spans the circle summands.
    std::size_t s_prime = 0;
    if (b.lattice_rank() > 0) {
        RatMatrix proj = y.rows() ? y * b.lattice_basis() : RatMatrix(0, b.lattice_rank());
        RatMatrix ker = proj.rows() ? rational_kernel(proj) : RatMatrix::identity(b.lattice_rank());
        if (ker.cols() > 0) {
            RatMatrix inside = b.lattice_basis() * ker;
            s_prime = rank(RatMatrix::hstack(b.space_basis(), inside)) - wb;
        }
    }
    q.circle_rank = s_prime;
    q.vector_rank = wz - wb - s_prime;
    // Finitely generated part: images of the lattices modulo W_Z.
    const std::size_t mz = z.lattice_rank();
    if (mz > 0) {
        RatMatrix az = y * z.lattice_basis();
        IntMatrix c(mz, 0);
        if (b.lattice_rank() > 0) {
            RatMatrix ab = y * b.lattice_basis();
            RatMatrix sol;
            if (!solve(az, ab, sol)) throw InternalError("quotient: lattice of B not inside lattice of Z");
            c = to_integer(sol);
        }
        std::vector<Integer> f = invariant_factors(c);
        q.free_rank = mz - f.size();
        for (auto& d : f)
            if (d > 1) q.torsion.push_back(d);
    }
    return q;
}

std::string MixedQuotient::to_string() const {
    StructuredCoefGroup div{circle_rank, vector_rank, FgAbGroup()};
    FgAbGroup fg(free_rank, torsion);
    if (div == StructuredCoefGroup{}) return fg.to_string();
    if (fg.is_trivial()) return div.to_string();
    return div.to_string() + " ⊕ " + fg.to_string();
}

}  // namespace eqdiff::linalg
