#include "eqdiff/matrix.hpp"

#include <algorithm>
#include <map>

namespace eqdiff::linalg {

RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

IntMatrix to_integer(const RatMatrix& m) {
    IntMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j).get_den() != 1) throw CoefficientNotDivisible("non-integral entry " + to_string(m(i, j)));
            r(i, j) = m(i, j).get_num();
        }
    return r;
}

void SparseIntMatrix::add(std::size_t i, std::size_t j, const Integer& v) {
    if (i >= rows_ || j >= cols_.size()) throw DimensionMismatch("sparse entry out of range");
    if (v != 0) cols_[j].emplace_back(i, v);
}

void SparseIntMatrix::finalize() {
    for (auto& col : cols_) {
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        Column merged;
        for (auto& e : col) {
            if (!merged.empty() && merged.back().first == e.first)
                merged.back().second += e.second;
            else
                merged.push_back(std::move(e));
            if (merged.back().second == 0) merged.pop_back();
        }
        col = std::move(merged);
    }
}

void SparseIntMatrix::set_column(std::size_t j, Column c) {
    cols_[j] = std::move(c);
}

std::size_t SparseIntMatrix::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : cols_) n += c.size();
    return n;
}

bool SparseIntMatrix::is_zero() const {
    for (const auto& c : cols_)
        if (!c.empty()) return false;
    return true;
}

IntMatrix SparseIntMatrix::to_dense() const {
    IntMatrix m(rows_, cols_.size());
    for (std::size_t j = 0; j < cols_.size(); ++j)
        for (const auto& [i, v] : cols_[j]) m(i, j) = v;
    return m;
}

SparseIntMatrix SparseIntMatrix::from_dense(const IntMatrix& m) {
    SparseIntMatrix s(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0) s.cols_[j].emplace_back(i, m(i, j));
    return s;
}

SparseIntMatrix SparseIntMatrix::transpose() const {
    SparseIntMatrix t(cols_.size(), rows_);
    for (std::size_t j = 0; j < cols_.size(); ++j)
        for (const auto& [i, v] : cols_[j]) t.cols_[i].emplace_back(j, v);
    return t;
}

SparseIntMatrix SparseIntMatrix::negated() const {
    SparseIntMatrix n = *this;
    for (auto& c : n.cols_)
        for (auto& e : c) e.second = -e.second;
    return n;
}

SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("sparse product shape mismatch");
    SparseIntMatrix c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        std::map<std::size_t, Integer> acc;
        for (const auto& [k, bkj] : b.column(j))
            for (const auto& [i, aik] : a.column(k)) acc[i] += aik * bkj;
        SparseIntMatrix::Column col;
        for (auto& [i, v] : acc)
            if (v != 0) col.emplace_back(i, v);
        c.set_column(j, std::move(col));
    }
    return c;
}

bool operator==(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_;
}

std::string to_string(const Integer& z) { return z.get_str(); }
std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace eqdiff::linalg
