#include "eqdiff/exact_linalg.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace eqdiff::linalg {

namespace {

int cmpabs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

// Smith reduction with optional bookkeeping of the transforms.
// Invariant while running: original = u * a * v.
class SmithReducer {
public:
    SmithReducer(const IntMatrix& a, bool track) : a_(a), track_(track) {
        if (track_) {
            u_ = IntMatrix::identity(a.rows());
            ui_ = u_;
            v_ = IntMatrix::identity(a.cols());
            vi_ = v_;
        }
    }

    void run() {
        const std::size_t m = a_.rows(), n = a_.cols();
        for (std::size_t t = 0; t < std::min(m, n); ++t) {
            std::size_t pi, pj;
            if (!smallest_in_block(t, pi, pj)) break;
            swap_rows(t, pi);
            swap_cols(t, pj);
            for (;;) {
                bool clean = true;
                for (std::size_t i = t + 1; i < m; ++i) {
                    if (a_(i, t) == 0) continue;
                    Integer q;
                    mpz_fdiv_q(q.get_mpz_t(), a_(i, t).get_mpz_t(), a_(t, t).get_mpz_t());
                    add_row(i, t, -q);
                    if (a_(i, t) != 0) clean = false;
                }
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (a_(t, j) == 0) continue;
                    Integer q;
                    mpz_fdiv_q(q.get_mpz_t(), a_(t, j).get_mpz_t(), a_(t, t).get_mpz_t());
                    add_col(j, t, -q);
                    if (a_(t, j) != 0) clean = false;
                }
                if (!clean) {
                    bring_smallest_cross(t);
                    continue;
                }
                // Row and column are clear; enforce divisibility of the rest.
                bool divisible = true;
                for (std::size_t i = t + 1; i < m && divisible; ++i)
                    for (std::size_t j = t + 1; j < n; ++j)
                        if (a_(i, j) != 0 && !mpz_divisible_p(a_(i, j).get_mpz_t(), a_(t, t).get_mpz_t())) {
                            add_row(t, i, 1);
                            divisible = false;
                            break;
                        }
                if (divisible) break;
            }
            if (a_(t, t) < 0) negate_row(t);
        }
    }

    IntMatrix a_, u_, ui_, v_, vi_;

private:
    bool smallest_in_block(std::size_t t, std::size_t& pi, std::size_t& pj) const {
        bool found = false;
        Integer best;
        for (std::size_t i = t; i < a_.rows(); ++i)
            for (std::size_t j = t; j < a_.cols(); ++j) {
                const Integer& x = a_(i, j);
                if (x == 0) continue;
                if (!found || cmpabs(x, best) < 0) {
                    best = x;
                    pi = i;
                    pj = j;
                    found = true;
                }
            }
        return found;
    }

    // Smallest nonzero among the pivot row/column (pivot included); row
    // entries precede column entries in row-major order.
    void bring_smallest_cross(std::size_t t) {
        std::size_t bi = t, bj = t;
        Integer best = a_(t, t);
        for (std::size_t j = t + 1; j < a_.cols(); ++j)
            if (a_(t, j) != 0 && cmpabs(a_(t, j), best) < 0) {
                best = a_(t, j);
                bi = t;
                bj = j;
            }
        for (std::size_t i = t + 1; i < a_.rows(); ++i)
            if (a_(i, t) != 0 && cmpabs(a_(i, t), best) < 0) {
                best = a_(i, t);
                bi = i;
                bj = t;
            }
        swap_rows(t, bi);
        swap_cols(t, bj);
    }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < a_.cols(); ++c) std::swap(a_(i, c), a_(j, c));
        if (!track_) return;
        for (std::size_t c = 0; c < ui_.cols(); ++c) std::swap(ui_(i, c), ui_(j, c));
        for (std::size_t r = 0; r < u_.rows(); ++r) std::swap(u_(r, i), u_(r, j));
    }

    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < a_.rows(); ++r) std::swap(a_(r, i), a_(r, j));
        if (!track_) return;
        for (std::size_t r = 0; r < vi_.rows(); ++r) std::swap(vi_(r, i), vi_(r, j));
        for (std::size_t c = 0; c < v_.cols(); ++c) std::swap(v_(i, c), v_(j, c));
    }

    // row_i += c * row_j
    void add_row(std::size_t i, std::size_t j, const Integer& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < a_.cols(); ++k)
            if (a_(j, k) != 0) a_(i, k) += c * a_(j, k);
        if (!track_) return;
        for (std::size_t k = 0; k < ui_.cols(); ++k)
            if (ui_(j, k) != 0) ui_(i, k) += c * ui_(j, k);
        for (std::size_t r = 0; r < u_.rows(); ++r)
            if (u_(r, i) != 0) u_(r, j) -= c * u_(r, i);
    }

    // col_j += c * col_i
    void add_col(std::size_t j, std::size_t i, const Integer& c) {
        if (c == 0) return;
        for (std::size_t r = 0; r < a_.rows(); ++r)
            if (a_(r, i) != 0) a_(r, j) += c * a_(r, i);
        if (!track_) return;
        for (std::size_t r = 0; r < vi_.rows(); ++r)
            if (vi_(r, i) != 0) vi_(r, j) += c * vi_(r, i);
        for (std::size_t k = 0; k < v_.cols(); ++k)
            if (v_(j, k) != 0) v_(i, k) -= c * v_(j, k);
    }

    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < a_.cols(); ++k) a_(i, k) = -a_(i, k);
        if (!track_) return;
        for (std::size_t k = 0; k < ui_.cols(); ++k) ui_(i, k) = -ui_(i, k);
        for (std::size_t r = 0; r < u_.rows(); ++r) u_(r, i) = -u_(r, i);
    }

    bool track_;
};

std::vector<Integer> diagonal_of(const IntMatrix& s) {
    std::vector<Integer> d;
    for (std::size_t t = 0; t < std::min(s.rows(), s.cols()); ++t)
        if (s(t, t) != 0) d.push_back(s(t, t));
    return d;
}

}  // namespace

std::size_t SnfDecomposition::rank() const { return diagonal().size(); }

std::vector<Integer> SnfDecomposition::diagonal() const { return diagonal_of(s); }

SnfDecomposition smith_normal_form(const IntMatrix& a) {
    SmithReducer r(a, true);
    r.run();
    return SnfDecomposition{std::move(r.u_), std::move(r.a_), std::move(r.v_), std::move(r.ui_), std::move(r.vi_)};
}

std::vector<Integer> invariant_factors(const IntMatrix& a) {
    SmithReducer r(a, false);
    r.run();
    return diagonal_of(r.a_);
}

std::vector<Integer> invariant_factors(const SparseIntMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::map<std::size_t, Integer>> rows(m);
    std::vector<std::set<std::size_t>> col_rows(n);
    for (std::size_t j = 0; j < n; ++j)
        for (const auto& [i, v] : a.column(j)) {
            rows[i].emplace(j, v);
            col_rows[j].insert(i);
        }

    std::size_t units = 0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return col_rows[x].size() < col_rows[y].size(); });

    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t j : order) {
            if (col_rows[j].empty()) continue;
            std::size_t best = m;
            for (std::size_t i : col_rows[j]) {
                const Integer& v = rows[i].at(j);
                if ((v == 1 || v == -1) && (best == m || rows[i].size() < rows[best].size())) best = i;
            }
            if (best == m) continue;
            const auto prow = rows[best];
            const Integer pv = prow.at(j);
            std::vector<std::size_t> targets(col_rows[j].begin(), col_rows[j].end());
            for (std::size_t i : targets) {
                if (i == best) continue;
                Integer factor = rows[i].at(j) * pv;  // pv = +-1 is its own inverse
                for (const auto& [c, v] : prow) {
                    auto it = rows[i].find(c);
                    if (it == rows[i].end()) {
                        rows[i].emplace(c, -factor * v);
                        col_rows[c].insert(i);
                    } else {
                        it->second -= factor * v;
                        if (it->second == 0) {
                            rows[i].erase(it);
                            col_rows[c].erase(i);
                        }
                    }
                }
            }
            for (const auto& [c, v] : prow) col_rows[c].erase(best);
            rows[best].clear();
            ++units;
            progress = true;
        }
    }

    std::vector<std::size_t> live_rows, live_cols;
    std::map<std::size_t, std::size_t> col_index;
    for (std::size_t i = 0; i < m; ++i)
        if (!rows[i].empty()) live_rows.push_back(i);
    for (std::size_t j = 0; j < n; ++j)
        if (!col_rows[j].empty()) {
            col_index[j] = live_cols.size();
            live_cols.push_back(j);
        }
    IntMatrix rest(live_rows.size(), live_cols.size());
    for (std::size_t r = 0; r < live_rows.size(); ++r)
        for (const auto& [c, v] : rows[live_rows[r]]) rest(r, col_index.at(c)) = v;

    std::vector<Integer> out(units, Integer(1));
    for (auto& d : invariant_factors(rest)) out.push_back(d);
    return out;
}

std::size_t rank(const SparseIntMatrix& a) { return invariant_factors(a).size(); }

HermiteDecomposition hermite_normal_form(const IntMatrix& a) {
    IntMatrix h = a;
    IntMatrix t = IntMatrix::identity(a.rows());
    const std::size_t m = a.rows(), n = a.cols();
    auto add_row = [&](std::size_t i, std::size_t j, const Integer& c) {
        for (std::size_t k = 0; k < n; ++k) h(i, k) += c * h(j, k);
        for (std::size_t k = 0; k < m; ++k) t(i, k) += c * t(j, k);
    };
    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < n; ++k) std::swap(h(i, k), h(j, k));
        for (std::size_t k = 0; k < m; ++k) std::swap(t(i, k), t(j, k));
    };
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        for (;;) {
            std::size_t best = m;
            for (std::size_t i = r; i < m; ++i)
                if (h(i, c) != 0 && (best == m || cmpabs(h(i, c), h(best, c)) < 0)) best = i;
            if (best == m) break;
            swap_rows(r, best);
            bool clean = true;
            for (std::size_t i = r + 1; i < m; ++i) {
                if (h(i, c) == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
                add_row(i, r, -q);
                if (h(i, c) != 0) clean = false;
            }
            if (clean) break;
        }
        if (h(r, c) == 0) continue;
        if (h(r, c) < 0) {
            for (std::size_t k = 0; k < n; ++k) h(r, k) = -h(r, k);
            for (std::size_t k = 0; k < m; ++k) t(r, k) = -t(r, k);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
            if (q != 0) add_row(i, r, -q);
        }
        ++r;
    }
    return HermiteDecomposition{std::move(h), std::move(t), r};
}

IntMatrix integer_kernel(const IntMatrix& a) {
    SnfDecomposition d = smith_normal_form(a);
    std::size_t r = d.rank();
    std::vector<std::size_t> idx;
    for (std::size_t j = r; j < a.cols(); ++j) idx.push_back(j);
    return d.v_inv.select_columns(idx);
}

FgAbGroup::FgAbGroup(std::size_t free_rank, std::vector<Integer> torsion)
    : free_rank_(free_rank), torsion_(std::move(torsion)) {
    for (std::size_t i = 0; i < torsion_.size(); ++i) {
        if (torsion_[i] < 2) throw DimensionMismatch("torsion divisors must be at least 2");
        if (i > 0 && !mpz_divisible_p(torsion_[i].get_mpz_t(), torsion_[i - 1].get_mpz_t()))
            throw DimensionMismatch("torsion divisors must form a divisor chain");
    }
}

FgAbGroup FgAbGroup::from_cyclic_orders(const std::vector<Integer>& orders) {
    std::size_t free = 0;
    std::vector<Integer> finite;
    for (const auto& o : orders) {
        if (o == 0)
            ++free;
        else if (abs(o) > 1)
            finite.push_back(abs(o));
    }
    IntMatrix diag(finite.size(), finite.size());
    for (std::size_t i = 0; i < finite.size(); ++i) diag(i, i) = finite[i];
    std::vector<Integer> tors;
    for (auto& d : invariant_factors(diag))
        if (d > 1) tors.push_back(d);
    return FgAbGroup(free, std::move(tors));
}

Integer FgAbGroup::torsion_order() const {
    Integer n = 1;
    for (const auto& d : torsion_) n *= d;
    return n;
}

std::string FgAbGroup::to_string() const {
    if (is_trivial()) return "0";
    std::string s;
    if (free_rank_ > 0) s = free_rank_ == 1 ? "ℤ" : "ℤ^" + std::to_string(free_rank_);
    for (const auto& d : torsion_) {
        if (!s.empty()) s += " ⊕ ";
        s += "ℤ/" + d.get_str();
    }
    return s;
}

std::string StructuredCoefGroup::to_string() const {
    std::string s;
    if (divisible_circle_rank > 0)
        s = divisible_circle_rank == 1 ? "ℂ/ℤ" : "(ℂ/ℤ)^" + std::to_string(divisible_circle_rank);
    if (vector_rank > 0) {
        if (!s.empty()) s += " ⊕ ";
        s += vector_rank == 1 ? "ℂ" : "ℂ^" + std::to_string(vector_rank);
    }
    if (!finite_part.is_trivial()) {
        if (!s.empty()) s += " ⊕ ";
        s += finite_part.to_string();
    }
    return s.empty() ? "0" : s;
}

FgAbGroup cohomology_at(const SparseIntMatrix& d_in, const SparseIntMatrix& d_out) {
    if (d_in.rows() != d_out.cols())
        throw DimensionMismatch("d_in has " + std::to_string(d_in.rows()) + " rows but d_out has " +
                                std::to_string(d_out.cols()) + " columns");
    if (d_out.rows() > 0 && d_in.cols() > 0 && !(d_out * d_in).is_zero())
        throw CompositionNotZero("d_out * d_in is not zero");
    const std::size_t n = d_in.rows();
    std::size_t r_out = rank(d_out);
    std::vector<Integer> f_in = invariant_factors(d_in);
    std::vector<Integer> tors;
    for (auto& d : f_in)
        if (d > 1) tors.push_back(d);
    // ker(d_out) is saturated, so all torsion of Z^n / im(d_in) lives in H.
    return FgAbGroup(n - r_out - f_in.size(), std::move(tors));
}

FgAbGroup cohomology_at(const IntMatrix& d_in, const IntMatrix& d_out) {
    return cohomology_at(SparseIntMatrix::from_dense(d_in), SparseIntMatrix::from_dense(d_out));
}

StructuredCoefGroup coefficient_change(const FgAbGroup& h_n, const FgAbGroup& h_next, CoefMode mode) {
    StructuredCoefGroup g;
    if (mode == CoefMode::C) {
        g.vector_rank = h_n.free_rank();
    } else {
        g.divisible_circle_rank = h_n.free_rank();
        g.finite_part = h_next.torsion_subgroup();
    }
    return g;
}

RowEchelon rref(const RatMatrix& a) {
    RowEchelon e{a, {}};
    RatMatrix& r = e.r;
    std::size_t row = 0;
    for (std::size_t c = 0; c < r.cols() && row < r.rows(); ++c) {
        std::size_t p = row;
        while (p < r.rows() && r(p, c) == 0) ++p;
        if (p == r.rows()) continue;
        if (p != row)
            for (std::size_t k = 0; k < r.cols(); ++k) std::swap(r(p, k), r(row, k));
        Rational inv = 1 / r(row, c);
        for (std::size_t k = c; k < r.cols(); ++k) r(row, k) *= inv;
        for (std::size_t i = 0; i < r.rows(); ++i) {
            if (i == row || r(i, c) == 0) continue;
            Rational f = r(i, c);
            for (std::size_t k = c; k < r.cols(); ++k)
                if (r(row, k) != 0) r(i, k) -= f * r(row, k);
        }
        e.pivots.push_back(c);
        ++row;
    }
    return e;
}

std::size_t rank(const RatMatrix& a) { return rref(a).pivots.size(); }

RatMatrix rational_kernel(const RatMatrix& a) {
    RowEchelon e = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < a.cols(); ++c)
        if (!is_pivot[c]) free.push_back(c);
    RatMatrix k(a.cols(), free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
        k(free[f], f) = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) k(e.pivots[i], f) = -e.r(i, free[f]);
    }
    return k;
}

RatMatrix column_space(const RatMatrix& a) { return a.select_columns(rref(a).pivots); }

bool solve(const RatMatrix& a, const RatMatrix& b, RatMatrix& x) {
    if (a.rows() != b.rows()) throw DimensionMismatch("solve: row mismatch");
    RowEchelon e = rref(RatMatrix::hstack(a, b));
    x = RatMatrix(a.cols(), b.cols());
    for (std::size_t i = 0; i < e.pivots.size(); ++i) {
        if (e.pivots[i] >= a.cols()) return false;
        for (std::size_t k = 0; k < b.cols(); ++k) x(e.pivots[i], k) = e.r(i, a.cols() + k);
    }
    return true;
}

Integer common_denominator(const RatMatrix& m) {
    Integer d = 1;
    for (const auto& x : m.data()) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
    return d;
}

}  // namespace eqdiff::linalg
