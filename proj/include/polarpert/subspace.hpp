#ifndef POLARPERT_SUBSPACE_HPP
#define POLARPERT_SUBSPACE_HPP
//
// Closed subspaces of C^n held as orthonormal bases, orthogonal projectors,
// directed gap δ(V,W), gap metric δ̂(V,W) and gap difference Δ(V,W).
//

#include "polarpert/spectral.hpp"

#include <algorithm>
#include <utility>

namespace polarpert {

// orthonormality residual ‖B*B − I‖ accepted for a stored basis
inline constexpr double basis_orthonormality_tol = 1e-12;

template <typename Real = double>
class Subspace
{
public:
    using matrix_t = CMatrix<Real>;

    Subspace() = default;

    // zero subspace {0} ⊂ C^n
    static Subspace zero(Index ambient) { return Subspace(matrix_t(ambient, 0)); }

    // takes ownership of a basis that is already orthonormal
    static Subspace from_orthonormal(matrix_t basis)
    {
        const Index d = basis.cols();
        if (d > basis.rows())
            throw Error(ErrorKind::InvalidInput, "subspace basis has more columns than the ambient dimension");
        if (d > 0) {
            const matrix_t gram = basis.adjoint() * basis - matrix_t::Identity(d, d);
            if (spectral_norm(gram) > Real(basis_orthonormality_tol))
                throw Error(ErrorKind::InvalidInput, "subspace basis is not orthonormal");
        }
        return Subspace(std::move(basis));
    }

    // column space of an arbitrary spanning set
    template <typename Derived>
    static Subspace span_of(const Eigen::MatrixBase<Derived>& spanning, const TolerancePolicy& tol = {})
    {
        return Subspace(orthonormalize(spanning, tol));
    }

    Index           ambient_dim() const { return basis_.rows(); }
    Index           dim() const { return basis_.cols(); }
    const matrix_t& basis() const { return basis_; }

    // V^⊥, materialized from I − P_V
    Subspace complement(const TolerancePolicy& tol = {}) const
    {
        const Index n = ambient_dim();
        if (dim() == 0)
            return Subspace(matrix_t::Identity(n, n));
        if (dim() == n)
            return zero(n);
        // I − P_V has exactly n − dim unit singular values; a relative cut
        // would let rounding noise of a near-orthonormal basis through
        const matrix_t residual = matrix_t::Identity(n, n) - basis_ * basis_.adjoint();
        return Subspace(matrix_t(svd(residual, tol).u.leftCols(n - dim())));
    }

private:
    explicit Subspace(matrix_t basis)
        : basis_(std::move(basis))
    {}

    matrix_t basis_;
};

template <typename Real>
struct GapReport
{
    Real delta_vw = 0; // δ(V,W)
    Real delta_wv = 0; // δ(W,V)
    Real gap_hat  = 0; // max of the two
    Real gap_diff = 0; // |δ(V,W) − δ(W,V)|
};

enum class SurjectivityClass { BothSurjective, NeitherSurjective, Mixed };

inline const char* to_string(SurjectivityClass c)
{
    switch (c) {
        case SurjectivityClass::BothSurjective:    return "BothSurjective";
        case SurjectivityClass::NeitherSurjective: return "NeitherSurjective";
        case SurjectivityClass::Mixed:             return "Mixed";
    }
    return "Unknown";
}

template <typename Real>
CMatrix<Real> projector(const Subspace<Real>& s)
{
    return s.basis() * s.basis().adjoint();
}

namespace detail {

template <typename Real>
void require_same_ambient(const Subspace<Real>& v, const Subspace<Real>& w)
{
    if (v.ambient_dim() != w.ambient_dim())
        throw Error(ErrorKind::DimensionMismatch, "subspaces live in C^" + std::to_string(v.ambient_dim()) +
                                                      " and C^" + std::to_string(w.ambient_dim()));
}

} // namespace detail

//
// δ(V,W) = ‖(I − P_W)|V‖, evaluated as ‖B_V − B_W(B_W* B_V)‖.
// δ({0}, W) = 0 (empty supremum).
//
template <typename Real>
Real directed_gap(const Subspace<Real>& v, const Subspace<Real>& w)
{
    detail::require_same_ambient(v, w);
    if (v.dim() == 0)
        return Real(0);

    const CMatrix<Real> off = v.basis() - w.basis() * (w.basis().adjoint() * v.basis());
    return std::min(spectral_norm(off), Real(1));
}

template <typename Real>
GapReport<Real> gap_report(const Subspace<Real>& v, const Subspace<Real>& w)
{
    GapReport<Real> g;
    g.delta_vw = directed_gap(v, w);
    g.delta_wv = directed_gap(w, v);
    g.gap_hat  = std::max(g.delta_vw, g.delta_wv);
    g.gap_diff = std::abs(g.delta_vw - g.delta_wv);
    return g;
}

template <typename Real>
Real gap_hat(const Subspace<Real>& v, const Subspace<Real>& w)
{
    return gap_report(v, w).gap_hat;
}

//
// Numerical rank of a contraction (‖M‖ ≤ 1). The reference scale is 1, not
// σ_max(M): cross-projections between nearly orthogonal subspaces are pure
// rounding noise and must count as rank zero.
//
template <typename Real>
Index contraction_rank(const CMatrix<Real>& m, const TolerancePolicy& tol)
{
    const RVector<Real> s   = singular_values(m);
    const Real          cut = Real(tol.rank_cut_factor) * std::sqrt(std::numeric_limits<Real>::epsilon());
    Index               r   = 0;
    while (r < s.size() && s(r) > cut)
        ++r;
    return r;
}

//
// P_V|W ∈ L(W,V) is represented by B_V* B_W (d_V × d_W); it is surjective
// iff that matrix has rank d_V. P_W|V is its adjoint, surjective iff rank d_W.
//
template <typename Real>
SurjectivityClass classify_cross_projections(const Subspace<Real>& v, const Subspace<Real>& w,
                                             const TolerancePolicy& tol = {})
{
    detail::require_same_ambient(v, w);

    const Index r = (v.dim() == 0 || w.dim() == 0)
                        ? 0
                        : contraction_rank<Real>(v.basis().adjoint() * w.basis(), tol);

    const bool onto_v = (r == v.dim());
    const bool onto_w = (r == w.dim());

    if (onto_v && onto_w)
        return SurjectivityClass::BothSurjective;
    if (!onto_v && !onto_w)
        return SurjectivityClass::NeitherSurjective;
    return SurjectivityClass::Mixed;
}

} // namespace polarpert

#endif // POLARPERT_SUBSPACE_HPP
