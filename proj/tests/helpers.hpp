#pragma once

#include <random>

#include "eqdiff/matrix.hpp"

namespace testutil {

using eqdiff::linalg::IntMatrix;
using eqdiff::linalg::Integer;
using eqdiff::linalg::RatMatrix;

inline IntMatrix random_int_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo = -9, int hi = 9) {
    std::uniform_int_distribution<int> d(lo, hi);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

inline IntMatrix ints(std::initializer_list<std::initializer_list<long>> rows) {
    std::vector<std::vector<Integer>> v;
    for (auto& r : rows) {
        v.emplace_back();
        for (long x : r) v.back().emplace_back(x);
    }
    return IntMatrix::from_rows(v);
}

}  // namespace testutil
