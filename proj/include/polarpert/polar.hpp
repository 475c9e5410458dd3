#ifndef POLARPERT_POLAR_HPP
#define POLARPERT_POLAR_HPP
//
// Polar decomposition A = Q|A| with the angular factor Q (N(Q) = N(A)),
// the unitary extension of Q for index-zero operators, and the zero-padding
// dilation that brings any operator to index zero.
//

#include "polarpert/subspace.hpp"

namespace polarpert {

// tolerance for identities that hold exactly in real arithmetic
inline constexpr double polar_identity_tol = 1e-8;

template <typename Real = double>
struct PolarResult
{
    CMatrix<Real>   q;         // m×n partial isometry, N(q) = N(a)
    CMatrix<Real>   h;         // n×n, |a| = (a*a)^{1/2}
    Real            sigma = 0; // σ_a
    Index           rank  = 0;
    SvdResult<Real> factors;   // the SVD q, h and sigma were read from

    CMatrix<Real> range_projector() const { return factors.range_basis() * factors.range_basis().adjoint(); }
    CMatrix<Real> corange_projector() const { return factors.corange_basis() * factors.corange_basis().adjoint(); }
    CMatrix<Real> kernel_projector() const { return factors.kernel_basis() * factors.kernel_basis().adjoint(); }
};

template <typename Real = double>
struct UnitaryExtension
{
    CMatrix<Real> u; // square unitary with u|N(A)^⊥ = q|N(A)^⊥ and u N(A) = R(A)^⊥
    CMatrix<Real> q;
};

template <typename Real>
PolarResult<Real> polar_from_svd(SvdResult<Real> s)
{
    if (s.rank == 0)
        throw Error(ErrorKind::ZeroOperator, "polar decomposition of a numerically zero operator");

    const Index r = s.rank;
    const Index n = s.cols();

    PolarResult<Real> p;
    p.q = s.u.leftCols(r) * s.v.leftCols(r).adjoint();

    RVector<Real> diag = RVector<Real>::Zero(n);
    diag.head(s.singvals.size()) = s.singvals;
    p.h = s.v * diag.template cast<std::complex<Real>>().asDiagonal() * s.v.adjoint();

    p.sigma   = s.singvals(r - 1);
    p.rank    = r;
    p.factors = std::move(s);
    return p;
}

template <typename Derived>
PolarResult<typename Derived::RealScalar> polar_decompose(const Eigen::MatrixBase<Derived>& a,
                                                          const TolerancePolicy&             tol = {})
{
    return polar_from_svd(svd(a, tol));
}

//
// Q_{A*} = Q_A* and R(Q) = R(A).
//
template <typename Derived>
bool angular_factor_adjoint_check(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    using Real = typename Derived::RealScalar;

    const CMatrix<Real> ac = to_complex(a);
    const auto          pa = polar_decompose(ac, tol);
    const auto          ps = polar_decompose(ac.adjoint().eval(), tol);

    const bool adjoint_ok = spectral_norm((pa.q.adjoint() - ps.q).eval()) <= Real(polar_identity_tol);

    const auto range_q = Subspace<Real>::span_of(pa.q, tol);
    const auto range_a = Subspace<Real>::from_orthonormal(pa.factors.range_basis());
    const bool range_ok = gap_hat(range_q, range_a) <= Real(polar_identity_tol);

    return adjoint_ok && range_ok;
}

//
// U = Q·P_{N(A)^⊥} + W·P_{N(A)} where W sends the i-th kernel basis vector
// to the i-th basis vector of R(A)^⊥. With both bases taken from one SVD this
// is U_full·V_full*.
//
template <typename Derived>
UnitaryExtension<typename Derived::RealScalar> unitary_extension(const Eigen::MatrixBase<Derived>& a,
                                                                 const TolerancePolicy&             tol = {})
{
    if (a.rows() != a.cols())
        throw Error(ErrorKind::NotIndexZero, "unitary extension needs a square operator (index cols − rows = " +
                                                 std::to_string(a.cols() - a.rows()) + ")");

    const auto p = polar_decompose(a, tol);
    return {p.factors.u * p.factors.v.adjoint(), p.q};
}

//
// Zero-padding to a square operator: tall A becomes [A, 0], wide A becomes
// [A; 0] (the adjoint-dual padding). σ_A and angular-factor distances are
// unchanged.
//
template <typename Derived>
CMatrix<typename Derived::RealScalar> dilate_to_index_zero(const Eigen::MatrixBase<Derived>& a)
{
    using Real = typename Derived::RealScalar;

    const Index   n = std::max(a.rows(), a.cols());
    CMatrix<Real> d = CMatrix<Real>::Zero(n, n);
    d.topLeftCorner(a.rows(), a.cols()) = to_complex(a);
    return d;
}

} // namespace polarpert

#endif // POLARPERT_POLAR_HPP
