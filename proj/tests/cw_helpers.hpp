#pragma once

#include <random>

#include "eqdiff/chern_weil.hpp"

namespace testutil {

using eqdiff::cartan::EquivariantForm;
using eqdiff::cartan::LinearAction;
using eqdiff::chern_weil::BundleAction;
using eqdiff::chern_weil::ConnectionMatrix;
using eqdiff::chern_weil::FormMatrix;
using eqdiff::linalg::Rational;
using eqdiff::linalg::RatMatrix;

// Invariant data: an action on the base, a fiber action and a sampler of
// invariant connections for it.
struct InvariantFamily {
    LinearAction act;
    BundleAction bundle;
    std::size_t rank = 1;
    int kind = 0;
};

inline int small_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// a + b r^2 with small random coefficients
inline EquivariantForm radial(std::mt19937_64& rng, std::size_t k, std::size_t m) {
    EquivariantForm r2(k, m);
    for (std::size_t i = 0; i < m; ++i) r2 = r2 + EquivariantForm::x(k, m, i) * EquivariantForm::x(k, m, i);
    return EquivariantForm::constant(k, m, small_int(rng, -2, 2)) + r2 * Rational(small_int(rng, -1, 1));
}

// 0: rotation of R^2, diagonal fiber weights (rank 1 or 2)
// 1: rotation of R^2, rank 2 fiber rotating with weight q
// 2: su(2) on R^3, trivial fiber of rank 1 or 2
// 3: su(2) on R^3, vector representation on the rank 3 fiber
inline InvariantFamily random_family(std::mt19937_64& rng, int max_kind = 3) {
    InvariantFamily f;
    f.kind = small_int(rng, 0, max_kind);
    switch (f.kind) {
        case 0: {
            f.act = LinearAction::rotation_plane();
            f.rank = static_cast<std::size_t>(small_int(rng, 1, 2));
            RatMatrix d(f.rank, f.rank);
            for (std::size_t i = 0; i < f.rank; ++i) d(i, i) = small_int(rng, -2, 2);
            if (f.rank == 2 && small_int(rng, 0, 1)) d(1, 1) = d(0, 0);
            f.bundle.drho = {d};
            break;
        }
        case 1: {
            f.act = LinearAction::rotation_plane();
            f.rank = 2;
            int q = small_int(rng, 1, 3);
            f.bundle.drho = {RatMatrix::from_rows({{0, -q}, {q, 0}})};
            break;
        }
        case 2: {
            f.act = LinearAction::su2_vector();
            f.rank = static_cast<std::size_t>(small_int(rng, 1, 2));
            f.bundle = BundleAction::trivial(3, f.rank);
            break;
        }
        default: {
            f.act = LinearAction::su2_vector();
            f.rank = 3;
            f.bundle.drho = f.act.rho;
            break;
        }
    }
    return f;
}

inline ConnectionMatrix random_connection(std::mt19937_64& rng, const InvariantFamily& f) {
    std::size_t k = f.act.k(), m = f.act.m, r = f.rank;
    auto X = [&](std::size_t i) { return EquivariantForm::x(k, m, i); };
    auto D = [&](std::size_t i) { return EquivariantForm::dx(k, m, i); };
    FormMatrix A(r, k, m);
    if (f.kind <= 1) {
        EquivariantForm theta = X(0) * D(1) - X(1) * D(0), rho = X(0) * D(0) + X(1) * D(1);
        auto inv1 = [&] { return radial(rng, k, m) * theta + radial(rng, k, m) * rho; };
        if (f.kind == 0) {
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    if (f.bundle.drho[0](i, i) == f.bundle.drho[0](j, j)) A(i, j) = inv1();
        } else {
            EquivariantForm a = inv1(), b = inv1();
            A(0, 0) = a;
            A(1, 1) = a;
            A(0, 1) = -b;
            A(1, 0) = b;
        }
    } else if (f.kind == 2) {
        EquivariantForm xdx = X(0) * D(0) + X(1) * D(1) + X(2) * D(2);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) A(i, j) = radial(rng, k, m) * xdx;
    } else {
        // tensors built from x, dx, δ and ε transform like the fiber
        EquivariantForm xdx = X(0) * D(0) + X(1) * D(1) + X(2) * D(2);
        EquivariantForm c1 = radial(rng, k, m), c2 = radial(rng, k, m), c3 = radial(rng, k, m),
                        c4 = radial(rng, k, m), c5 = radial(rng, k, m);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                EquivariantForm e = c1 * X(i) * D(j) + c2 * X(j) * D(i);
                if (i == j) e = e + c3 * xdx;
                std::size_t l = 3 - i - j;
                if (i != j) {
                    int eps = ((j + 3 - i) % 3 == 1) ? 1 : -1;
                    e = e + c4 * D(l) * Rational(eps) + c5 * X(l) * xdx * Rational(eps);
                }
                A(i, j) = e;
            }
    }
    return ConnectionMatrix{A};
}

}  // namespace testutil
