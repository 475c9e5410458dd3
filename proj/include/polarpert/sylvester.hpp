#ifndef POLARPERT_SYLVESTER_HPP
#define POLARPERT_SYLVESTER_HPP
//
// XS − TX = Y for Hermitian S (right factor) and T (left factor) by
// simultaneous diagonalization, plus the separation constant δ for which
// ‖X‖ ≤ ‖Y‖/δ when σ(T) ⊂ B_r(a) and σ(S) lies outside B_{r+δ}(a).
//

#include "polarpert/spectral.hpp"

#include <optional>

namespace polarpert {

template <typename Real = double>
struct SylvesterSolution
{
    CMatrix<Real>       x;
    Real                residual = 0;  // ‖XS − TX − Y‖
    std::optional<Real> separation;    // δ, absent if the circle geometry fails
    std::optional<Real> bound_value;   // ‖Y‖/δ
};

//
// σ(T) ⊂ [t_min, t_max] is enclosed by B_r(a) with a the midpoint and r the
// half-width; δ = min_{λ∈σ(S)} |λ − a| − r.
//
template <typename Real>
Real separation_from_spectra(const RVector<Real>& eig_s, const RVector<Real>& eig_t)
{
    if (eig_s.size() == 0 || eig_t.size() == 0)
        throw Error(ErrorKind::InvalidInput, "separation of an empty spectrum");

    const Real a = (eig_t.minCoeff() + eig_t.maxCoeff()) / Real(2);
    const Real r = (eig_t.maxCoeff() - eig_t.minCoeff()) / Real(2);
    const Real delta = (eig_s.array() - a).abs().minCoeff() - r;

    if (!(delta > Real(0)))
        throw Error(ErrorKind::GeometryViolated, "σ(S) meets the smallest disc B_r(a) enclosing σ(T)");
    return delta;
}

template <typename DerivedS, typename DerivedT>
typename DerivedS::RealScalar separation_bound(const Eigen::MatrixBase<DerivedS>& s,
                                               const Eigen::MatrixBase<DerivedT>& t,
                                               const TolerancePolicy&             tol = {})
{
    return separation_from_spectra(eigh(s, tol).eigvals, eigh(t, tol).eigvals);
}

template <typename DerivedS, typename DerivedT, typename DerivedY>
SylvesterSolution<typename DerivedS::RealScalar> solve_sylvester(const Eigen::MatrixBase<DerivedS>& s,
                                                                 const Eigen::MatrixBase<DerivedT>& t,
                                                                 const Eigen::MatrixBase<DerivedY>& y,
                                                                 const TolerancePolicy&             tol = {})
{
    using Real = typename DerivedS::RealScalar;

    if (y.rows() != t.rows() || y.cols() != s.rows())
        throw Error(ErrorKind::DimensionMismatch, "sylvester: Y must be rows(T) × rows(S)");

    const CMatrix<Real> sc = to_complex(s);
    const CMatrix<Real> tc = to_complex(t);
    const CMatrix<Real> yc = to_complex(y);

    const auto es = eigh(sc, tol);
    const auto et = eigh(tc, tol);

    const Real scale   = std::max({spectral_norm(sc), spectral_norm(tc), Real(1)});
    const Real overlap = Real(1e-12) * scale;

    CMatrix<Real> xt = et.q.adjoint() * yc * es.q;
    for (Index j = 0; j < xt.cols(); ++j)
        for (Index i = 0; i < xt.rows(); ++i) {
            const Real gap = es.eigvals(j) - et.eigvals(i);
            if (std::abs(gap) <= overlap)
                throw Error(ErrorKind::SpectraOverlap, "σ(S) and σ(T) are not disjoint");
            xt(i, j) /= gap;
        }

    SylvesterSolution<Real> sol;
    sol.x        = et.q * xt * es.q.adjoint();
    sol.residual = spectral_norm((sol.x * sc - tc * sol.x - yc).eval());

    try {
        sol.separation  = separation_from_spectra(es.eigvals, et.eigvals);
        sol.bound_value = spectral_norm(yc) / *sol.separation;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::GeometryViolated)
            throw;
    }
    return sol;
}

} // namespace polarpert

#endif // POLARPERT_SYLVESTER_HPP
