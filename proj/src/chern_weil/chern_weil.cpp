#include "eqdiff/chern_weil.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <numeric>

#include "eqdiff/errors.hpp"

namespace eqdiff::chern_weil {

using cartan::cartan_d;
using cartan::exterior_d;
using cartan::interior;

FormMatrix::FormMatrix(std::size_t r, std::size_t k, std::size_t m)
    : r_(r), k_(k), m_(m), e_(r * r, EquivariantForm(k, m)) {}

FormMatrix FormMatrix::identity(std::size_t r, std::size_t k, std::size_t m) {
    FormMatrix f(r, k, m);
    for (std::size_t i = 0; i < r; ++i) f(i, i) = EquivariantForm::constant(k, m, 1);
    return f;
}

FormMatrix FormMatrix::constant(const RatMatrix& c, std::size_t k, std::size_t m) {
    if (c.rows() != c.cols()) throw DimensionMismatch("bundle matrices must be square");
    FormMatrix f(c.rows(), k, m);
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) f(i, j) = EquivariantForm::constant(k, m, c(i, j));
    return f;
}

FormMatrix FormMatrix::parse(const std::vector<std::vector<std::string>>& entries, std::size_t k, std::size_t m) {
    FormMatrix f(entries.size(), k, m);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].size() != entries.size()) throw SchemaError("form matrix must be square");
        for (std::size_t j = 0; j < entries.size(); ++j) f(i, j) = EquivariantForm::parse(entries[i][j], k, m);
    }
    return f;
}

void FormMatrix::check_same(const FormMatrix& o) const {
    if (r_ != o.r_ || k_ != o.k_ || m_ != o.m_) throw DimensionMismatch("form matrices of different shape");
}

FormMatrix FormMatrix::operator+(const FormMatrix& o) const {
    check_same(o);
    FormMatrix r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] + o.e_[i];
    return r;
}

FormMatrix FormMatrix::operator-(const FormMatrix& o) const {
    check_same(o);
    FormMatrix r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] - o.e_[i];
    return r;
}

FormMatrix FormMatrix::operator*(const FormMatrix& o) const {
    check_same(o);
    FormMatrix r(r_, k_, m_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t l = 0; l < r_; ++l) {
            const auto& a = (*this)(i, l);
            if (a.is_zero()) continue;
            for (std::size_t j = 0; j < r_; ++j)
                if (!o(l, j).is_zero()) r(i, j) = r(i, j) + a * o(l, j);
        }
    return r;
}

FormMatrix FormMatrix::operator*(const EquivariantForm& f) const {
    return map([&](const EquivariantForm& e) { return e * f; });
}

bool FormMatrix::is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const EquivariantForm& e) { return e.is_zero(); });
}

FormMatrix FormMatrix::block_sum(const FormMatrix& o) const {
    if (k_ != o.k_ || m_ != o.m_) throw DimensionMismatch("block sum over different spaces");
    FormMatrix r(r_ + o.r_, k_, m_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < r_; ++j) r(i, j) = (*this)(i, j);
    for (std::size_t i = 0; i < o.r_; ++i)
        for (std::size_t j = 0; j < o.r_; ++j) r(r_ + i, r_ + j) = o(i, j);
    return r;
}

FormMatrix FormMatrix::widened(std::size_t k, std::size_t m) const {
    FormMatrix r(r_, k, m);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i].widened(k, m);
    return r;
}

std::vector<std::vector<std::string>> FormMatrix::to_strings() const {
    std::vector<std::vector<std::string>> out(r_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < r_; ++j) out[i].push_back((*this)(i, j).to_string());
    return out;
}

BundleAction BundleAction::trivial(std::size_t k, std::size_t r) {
    BundleAction b;
    b.drho.assign(k, RatMatrix(r, r));
    return b;
}

BundleAction BundleAction::line(const std::vector<Rational>& weights) {
    BundleAction b;
    for (const auto& w : weights) b.drho.push_back(RatMatrix::from_rows({{w}}));
    return b;
}

void ConnectionMatrix::validate() const {
    for (std::size_t i = 0; i < A.rank(); ++i)
        for (std::size_t j = 0; j < A.rank(); ++j)
            for (const auto& [mono, c] : A(i, j).terms())
                if (mono.form_degree() != 1 || mono.u_degree() != 0)
                    throw DimensionMismatch("connection entries must be one-forms without u");
}

CurvatureMatrix curvature(const ConnectionMatrix& c) {
    c.validate();
    CurvatureMatrix r{c.A.map([](const EquivariantForm& e) { return exterior_d(e); }) + c.A * c.A};
    if (!bianchi_holds(c, r)) throw InternalError("Bianchi identity failed");
    return r;
}

bool bianchi_holds(const ConnectionMatrix& c, const CurvatureMatrix& r) {
    return r.R.map([](const EquivariantForm& e) { return exterior_d(e); }) == r.R * c.A - c.A * r.R;
}

namespace {

void check_bundle(const LinearAction& act, const BundleAction& bundle, std::size_t rank) {
    if (bundle.drho.size() != act.k()) throw DimensionMismatch("one fiber matrix per generator is required");
    for (const auto& d : bundle.drho)
        if (d.rows() != rank || d.cols() != rank) throw DimensionMismatch("fiber matrix has the wrong rank");
    if (!bundle.finite.empty() && bundle.finite.size() != act.finite.size())
        throw DimensionMismatch("fiber matrices must pair with the finite symmetries");
}

RatMatrix inverse(const RatMatrix& e) {
    RatMatrix x;
    if (!linalg::solve(e, RatMatrix::identity(e.rows()), x)) throw DimensionMismatch("fiber matrix is not invertible");
    return x;
}

}  // namespace

bool connection_is_invariant(const LinearAction& act, const BundleAction& bundle, const ConnectionMatrix& c) {
    c.validate();
    check_bundle(act, bundle, c.rank());
    std::size_t k = c.A.k(), m = c.A.m();
    if (k != act.k() || m != act.m) throw DimensionMismatch("connection lives over a different space");
    for (std::size_t a = 0; a < act.k(); ++a) {
        auto v = cartan::fundamental_vector_field(act, a);
        FormMatrix lie = c.A.map([&](const EquivariantForm& e) { return cartan::lie_derivative(v, e); });
        FormMatrix d = FormMatrix::constant(bundle.drho[a], k, m);
        if (lie != d * c.A - c.A * d) return false;
    }
    for (std::size_t s = 0; s < bundle.finite.size(); ++s) {
        const RatMatrix& e = bundle.finite[s];
        FormMatrix moved = c.A.map([&](const EquivariantForm& f) { return cartan::transform(act.finite[s], f); });
        FormMatrix conj = FormMatrix::constant(e, k, m) * c.A * FormMatrix::constant(inverse(e), k, m);
        if (moved != conj) return false;
    }
    return true;
}

MomentMap moment_map(const ConnectionMatrix& c, const BundleAction& bundle, const LinearAction& act) {
    if (!connection_is_invariant(act, bundle, c))
        throw ConnectionNotInvariant("connection is not invariant under the combined action");
    MomentMap mu;
    for (std::size_t a = 0; a < act.k(); ++a) {
        auto v = cartan::fundamental_vector_field(act, a);
        mu.mu.push_back(c.A.map([&](const EquivariantForm& e) { return interior(v, e); }) +
                        FormMatrix::constant(bundle.drho[a], c.A.k(), c.A.m()));
    }
    return mu;
}

bool moment_map_defining_identity(const ConnectionMatrix& c, const BundleAction& bundle, const LinearAction& act,
                                  const MomentMap& mu, unsigned max_degree) {
    std::size_t r = c.rank(), k = c.A.k(), m = c.A.m();
    auto apply = [&](const FormMatrix& mat, const std::vector<EquivariantForm>& phi) {
        std::vector<EquivariantForm> out(r, EquivariantForm(k, m));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) out[i] = out[i] + mat(i, j) * phi[j];
        return out;
    };
    for (unsigned deg = 0; deg <= max_degree; ++deg) {
        std::vector<std::vector<unsigned>> exps;
        std::vector<unsigned> cur(m, 0);
        std::function<void(std::size_t, unsigned)> gen = [&](std::size_t pos, unsigned left) {
            if (pos + 1 >= m) {
                if (m) cur[m - 1] = left;
                if (m || left == 0) exps.push_back(cur);
                return;
            }
            for (unsigned e = 0; e <= left; ++e) {
                cur[pos] = e;
                gen(pos + 1, left - e);
            }
        };
        gen(0, deg);
        for (const auto& x : exps)
            for (std::size_t j = 0; j < r; ++j) {
                std::vector<EquivariantForm> phi(r, EquivariantForm(k, m));
                phi[j] = EquivariantForm::monomial(k, m, cartan::Monomial{std::vector<unsigned>(k, 0), x, 0});
                for (std::size_t a = 0; a < act.k(); ++a) {
                    auto v = cartan::fundamental_vector_field(act, a);
                    // ∇φ = dφ + Aφ, then contract with X^#
                    auto nabla = apply(c.A, phi);
                    std::vector<EquivariantForm> lhs = apply(mu.mu[a], phi), rhs(r);
                    auto dr = apply(FormMatrix::constant(bundle.drho[a], k, m), phi);
                    for (std::size_t i = 0; i < r; ++i) {
                        EquivariantForm vphi = interior(v, exterior_d(phi[i]));
                        rhs[i] = interior(v, exterior_d(phi[i]) + nabla[i]) + dr[i] - vphi;
                    }
                    if (lhs != rhs) return false;
                }
            }
    }
    return true;
}

namespace {

// Determinant by Laplace expansion along the last row, memoized over column
// subsets: minor[mask] uses the first popcount(mask) rows and the columns in
// mask. Entries must commute.
template <class T>
T determinant(const std::vector<std::size_t>& idx, const std::function<const T&(std::size_t, std::size_t)>& at,
              const T& one) {
    const std::size_t s = idx.size();
    const T zero = one - one;
    std::vector<T> minor(std::size_t{1} << s, zero);
    minor[0] = one;
    for (std::size_t mask = 1; mask < minor.size(); ++mask) {
        const std::size_t row = static_cast<std::size_t>(std::popcount(mask)) - 1;
        T sum = zero;
        std::size_t pos = 0;
        for (std::size_t j = 0; j < s; ++j) {
            if (!(mask >> j & 1u)) continue;
            const T& e = at(idx[row], idx[j]);
            const T& rest = minor[mask ^ (std::size_t{1} << j)];
            if (!(e == zero) && !(rest == zero)) sum = (row + pos) % 2 ? T(sum - e * rest) : T(sum + e * rest);
            ++pos;
        }
        minor[mask] = std::move(sum);
    }
    return minor.back();
}

template <class T>
std::vector<T> elementary(std::size_t r, const std::function<const T&(std::size_t, std::size_t)>& at, const T& one) {
    std::vector<T> e(r + 1, one - one);
    e[0] = one;
    for (std::size_t size = 1; size <= r; ++size) {
        std::vector<bool> pick(r, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < r; ++i)
                if (pick[i]) idx.push_back(i);
            e[size] = e[size] + determinant<T>(idx, at, one);
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return e;
}

}  // namespace

std::vector<EquivariantForm> elementary_symmetric(const FormMatrix& f) {
    return elementary<EquivariantForm>(
        f.rank(), [&](std::size_t i, std::size_t j) -> const EquivariantForm& { return f(i, j); },
        EquivariantForm::constant(f.k(), f.m(), 1));
}

std::vector<Rational> elementary_symmetric(const RatMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("matrix must be square");
    return elementary<Rational>(
        a.rows(), [&](std::size_t i, std::size_t j) -> const Rational& { return a(i, j); }, Rational(1));
}

InvariantPolynomial InvariantPolynomial::parse(const std::string& name) {
    auto colon = name.find(':');
    std::string head = name.substr(0, colon);
    unsigned k = 0;
    if (colon != std::string::npos) {
        std::string tail = name.substr(colon + 1);
        if (tail.empty() || tail.size() > 3 || !std::all_of(tail.begin(), tail.end(), ::isdigit))
            throw SchemaError("bad invariant polynomial degree in '" + name + "'");
        k = static_cast<unsigned>(std::stoul(tail));
    }
    if (head == "total_chern" && colon == std::string::npos) return total_chern();
    if (colon != std::string::npos) {
        if (head == "chern") return chern(k);
        if (head == "trace_power") return trace_power(k);
        if (head == "pontryagin") return pontryagin(k);
    }
    throw SchemaError("unknown invariant polynomial '" + name + "'");
}

std::string InvariantPolynomial::name() const {
    switch (kind) {
        case PolyKind::ChernK: return "chern:" + std::to_string(k);
        case PolyKind::TotalChern: return "total_chern";
        case PolyKind::TracePowerK: return "trace_power:" + std::to_string(k);
        case PolyKind::PontryaginK: return "pontryagin:" + std::to_string(k);
    }
    return "";
}

namespace {

template <class T, class Mat, class Elem>
T evaluate_poly(const InvariantPolynomial& p, const Mat& f, std::size_t r, Elem elem, const T& one,
                const std::function<Mat(const Mat&, const Mat&)>& mul, const std::function<T(const Mat&)>& trace) {
    T zero = one - one;
    switch (p.kind) {
        case PolyKind::ChernK: return p.k <= r ? elem()[p.k] : zero;
        case PolyKind::TotalChern: {
            auto e = elem();
            T s = zero;
            for (const auto& x : e) s = s + x;
            return s;
        }
        case PolyKind::PontryaginK: {
            if (2 * p.k > r) return zero;
            T v = elem()[2 * p.k];
            return p.k % 2 ? zero - v : v;
        }
        case PolyKind::TracePowerK: {
            if (p.k == 0) return one * Rational(static_cast<long>(r));
            Mat pw = f;
            for (unsigned i = 1; i < p.k; ++i) pw = mul(pw, f);
            return trace(pw);
        }
    }
    return zero;
}

}  // namespace

EquivariantForm InvariantPolynomial::evaluate(const FormMatrix& f) const {
    return evaluate_poly<EquivariantForm, FormMatrix>(
        *this, f, f.rank(), [&] { return elementary_symmetric(f); }, EquivariantForm::constant(f.k(), f.m(), 1),
        [](const FormMatrix& a, const FormMatrix& b) { return a * b; },
        [](const FormMatrix& a) {
            EquivariantForm t(a.k(), a.m());
            for (std::size_t i = 0; i < a.rank(); ++i) t = t + a(i, i);
            return t;
        });
}

Rational InvariantPolynomial::evaluate(const RatMatrix& a) const {
    if (a.rows() != a.cols()) throw DimensionMismatch("matrix must be square");
    return evaluate_poly<Rational, RatMatrix>(
        *this, a, a.rows(), [&] { return elementary_symmetric(a); }, Rational(1),
        [](const RatMatrix& x, const RatMatrix& y) { return x * y; },
        [](const RatMatrix& x) {
            Rational t = 0;
            for (std::size_t i = 0; i < x.rows(); ++i) t += x(i, i);
            return t;
        });
}

FormMatrix equivariant_curvature(const CurvatureMatrix& r, const MomentMap& mu) {
    FormMatrix f = r.R;
    for (std::size_t a = 0; a < mu.mu.size(); ++a)
        f = f + mu.mu[a] * EquivariantForm::u(f.k(), f.m(), a);
    return f;
}

EquivariantForm equivariant_characteristic_form(const InvariantPolynomial& p, const CurvatureMatrix& r,
                                                const MomentMap& mu) {
    for (const auto& m : mu.mu)
        if (m.rank() != r.R.rank() || m.k() != r.R.k() || m.m() != r.R.m())
            throw DimensionMismatch("moment map and curvature have different shapes");
    if (mu.mu.size() != r.R.k()) throw DimensionMismatch("one moment matrix per generator is required");
    return p.evaluate(equivariant_curvature(r, mu));
}

EquivariantForm characteristic_form(const InvariantPolynomial& p, const ConnectionMatrix& c,
                                    const BundleAction& bundle, const LinearAction& act) {
    return equivariant_characteristic_form(p, curvature(c), moment_map(c, bundle, act));
}

EquivariantForm transgression(const ConnectionMatrix& a0, const ConnectionMatrix& a1, const InvariantPolynomial& p,
                              const BundleAction& bundle, const LinearAction& act, const std::vector<Rational>& path) {
    if (a0.rank() != a1.rank()) throw DimensionMismatch("connections on bundles of different rank");
    if (!connection_is_invariant(act, bundle, a0) || !connection_is_invariant(act, bundle, a1))
        throw ConnectionNotInvariant("transgression needs invariant connections");
    Rational at0 = path.empty() ? Rational(0) : path[0];
    Rational at1 = std::accumulate(path.begin(), path.end(), Rational(0));
    if (at0 != 0 || at1 != 1) throw SchemaError("path polynomial must satisfy s(0) = 0 and s(1) = 1");

    std::size_t k = act.k(), m = act.m;
    auto ext = cartan::extend_by_interval(act);
    EquivariantForm t = EquivariantForm::x(k, m + 1, m), s(k, m + 1), tp = EquivariantForm::constant(k, m + 1, 1);
    for (const auto& c : path) {
        s = s + tp * c;
        tp = tp * t;
    }
    FormMatrix w0 = a0.A.widened(k, m + 1), w1 = a1.A.widened(k, m + 1);
    ConnectionMatrix at{w0 + (w1 - w0) * s};
    EquivariantForm omega = characteristic_form(p, at, bundle, ext);
    return cartan::fiber_integrate_interval(omega);
}

WhitneyReport whitney_check(const ConnectionMatrix& a, const BundleAction& ba, const ConnectionMatrix& b,
                            const BundleAction& bb, const LinearAction& act) {
    FormMatrix fa = equivariant_curvature(curvature(a), moment_map(a, ba, act));
    FormMatrix fb = equivariant_curvature(curvature(b), moment_map(b, bb, act));
    auto ea = elementary_symmetric(fa), eb = elementary_symmetric(fb);
    WhitneyReport rep;
    rep.lhs = elementary_symmetric(fa.block_sum(fb));
    rep.rhs.assign(rep.lhs.size(), EquivariantForm(fa.k(), fa.m()));
    for (std::size_t i = 0; i < ea.size(); ++i)
        for (std::size_t j = 0; j < eb.size(); ++j) rep.rhs[i + j] = rep.rhs[i + j] + ea[i] * eb[j];
    rep.holds = rep.lhs == rep.rhs;
    return rep;
}

}  // namespace eqdiff::chern_weil
