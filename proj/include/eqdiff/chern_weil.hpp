#pragma once

// Equivariant Chern-Weil forms for trivialized bundles over R^m.
//
// A connection is d + A with A an r x r matrix of one-forms. The group acts
// on the base through a LinearAction and on the fibers infinitesimally
// through matrices drho_E(X_a). The normalizing scalar of the Chern forms is
// kept formal and set to 1, so every form stays rational. A rank-1 bundle
// action [q] stands for multiplication by i q on a complex line.

#include <string>
#include <vector>

#include "eqdiff/cartan.hpp"

namespace eqdiff::chern_weil {

using cartan::EquivariantForm;
using cartan::LinearAction;
using linalg::Rational;
using linalg::RatMatrix;

class FormMatrix {
public:
    FormMatrix() = default;
    FormMatrix(std::size_t r, std::size_t k, std::size_t m);

    static FormMatrix identity(std::size_t r, std::size_t k, std::size_t m);
    static FormMatrix constant(const RatMatrix& c, std::size_t k, std::size_t m);
    static FormMatrix parse(const std::vector<std::vector<std::string>>& entries, std::size_t k, std::size_t m);

    std::size_t rank() const noexcept { return r_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t m() const noexcept { return m_; }
    EquivariantForm& operator()(std::size_t i, std::size_t j) { return e_[i * r_ + j]; }
    const EquivariantForm& operator()(std::size_t i, std::size_t j) const { return e_[i * r_ + j]; }

    FormMatrix operator+(const FormMatrix& o) const;
    FormMatrix operator-(const FormMatrix& o) const;
    FormMatrix operator*(const FormMatrix& o) const;  // entries multiplied with the graded product
    FormMatrix operator*(const EquivariantForm& f) const;
    friend bool operator==(const FormMatrix&, const FormMatrix&) = default;

    bool is_zero() const;
    FormMatrix block_sum(const FormMatrix& o) const;
    FormMatrix widened(std::size_t k, std::size_t m) const;
    template <class F>
    FormMatrix map(F&& f) const {
        FormMatrix r(r_, k_, m_);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = f(e_[i]);
        return r;
    }
    std::vector<std::vector<std::string>> to_strings() const;

private:
    void check_same(const FormMatrix& o) const;
    std::size_t r_ = 0, k_ = 0, m_ = 0;
    std::vector<EquivariantForm> e_;
};

// Infinitesimal fiber action plus optional fiber matrices paired with the
// finite symmetries of the LinearAction.
struct BundleAction {
    std::vector<RatMatrix> drho;
    std::vector<RatMatrix> finite;

    static BundleAction trivial(std::size_t k, std::size_t r);
    static BundleAction line(const std::vector<Rational>& weights);  // rank 1, one weight per generator
};

struct ConnectionMatrix {
    FormMatrix A;
    void validate() const;  // one-forms without u; throws DimensionMismatch
    std::size_t rank() const { return A.rank(); }
};

struct CurvatureMatrix {
    FormMatrix R;
};

// R = dA + A∧A. Throws InternalError if the Bianchi identity fails.
CurvatureMatrix curvature(const ConnectionMatrix& c);
// dR = R∧A − A∧R
bool bianchi_holds(const ConnectionMatrix& c, const CurvatureMatrix& r);

struct MomentMap {
    std::vector<FormMatrix> mu;  // one matrix of functions per generator
};

// L(X_a^#) A = [drho_E(X_a), A] for every a, and for finite symmetries
// A(Sx)(S dx) = E A(x) E^{-1}.
bool connection_is_invariant(const LinearAction& act, const BundleAction& bundle, const ConnectionMatrix& c);
// mu(X_a) = ι(X_a^#) A + drho_E(X_a). Throws ConnectionNotInvariant.
MomentMap moment_map(const ConnectionMatrix& c, const BundleAction& bundle, const LinearAction& act);
// The defining identity mu(X) φ = ∇_{X^#} φ + L^E_X φ on the sections x^b e_j
// with |b| <= max_degree, where L^E_X φ = drho_E(X) φ − X^#(φ).
bool moment_map_defining_identity(const ConnectionMatrix& c, const BundleAction& bundle, const LinearAction& act,
                                  const MomentMap& mu, unsigned max_degree = 2);

enum class PolyKind { ChernK, TotalChern, TracePowerK, PontryaginK };

struct InvariantPolynomial {
    PolyKind kind = PolyKind::TotalChern;
    unsigned k = 0;

    static InvariantPolynomial chern(unsigned k) { return {PolyKind::ChernK, k}; }
    static InvariantPolynomial total_chern() { return {PolyKind::TotalChern, 0}; }
    static InvariantPolynomial trace_power(unsigned k) { return {PolyKind::TracePowerK, k}; }
    static InvariantPolynomial pontryagin(unsigned k) { return {PolyKind::PontryaginK, k}; }
    // "chern:2", "total_chern", "trace_power:3", "pontryagin:1"
    static InvariantPolynomial parse(const std::string& name);
    std::string name() const;

    // Entries must pairwise commute (even forms or scalars).
    EquivariantForm evaluate(const FormMatrix& f) const;
    Rational evaluate(const RatMatrix& a) const;
};

// Elementary symmetric functions e_0..e_r from principal minors.
std::vector<EquivariantForm> elementary_symmetric(const FormMatrix& f);
std::vector<Rational> elementary_symmetric(const RatMatrix& a);

// R + sum_a u_a mu(X_a)
FormMatrix equivariant_curvature(const CurvatureMatrix& r, const MomentMap& mu);
EquivariantForm equivariant_characteristic_form(const InvariantPolynomial& p, const CurvatureMatrix& r,
                                                const MomentMap& mu);
// Convenience: curvature and moment map computed from the connection.
EquivariantForm characteristic_form(const InvariantPolynomial& p, const ConnectionMatrix& c,
                                    const BundleAction& bundle, const LinearAction& act);

// ∫_{[0,1]} ω(∇_t) along A_t = A0 + s(t)(A1 − A0), where s has the given
// coefficients (constant first) and s(0) = 0, s(1) = 1. The default is the
// convex path. Satisfies d_C ω̃ = ω(∇1) − ω(∇0).
EquivariantForm transgression(const ConnectionMatrix& a0, const ConnectionMatrix& a1, const InvariantPolynomial& p,
                              const BundleAction& bundle, const LinearAction& act,
                              const std::vector<Rational>& path = {0, 1});

struct WhitneyReport {
    bool holds = false;
    // Coefficients of t^j in det(I + t F⊕F′) and in det(I + tF) det(I + tF′).
    std::vector<EquivariantForm> lhs;
    std::vector<EquivariantForm> rhs;
};

WhitneyReport whitney_check(const ConnectionMatrix& a, const BundleAction& ba, const ConnectionMatrix& b,
                            const BundleAction& bb, const LinearAction& act);

}  // namespace eqdiff::chern_weil
