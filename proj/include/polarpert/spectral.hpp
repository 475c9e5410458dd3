#ifndef POLARPERT_SPECTRAL_HPP
#define POLARPERT_SPECTRAL_HPP
//
// Singular value decomposition (one-sided Jacobi), Hermitian eigenproblems,
// numerical rank, reduced minimum modulus and the Moore-Penrose inverse.
//
// spectral_norm() and orthonormalize() live here as well since both are
// read off the SVD.
//

#include "polarpert/numcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <numeric>
#include <vector>

namespace polarpert {

inline constexpr int jacobi_max_sweeps = 60;

template <typename Real>
struct SvdResult
{
    CMatrix<Real> u;        // m×m unitary
    RVector<Real> singvals; // min(m,n), descending
    CMatrix<Real> v;        // n×n unitary
    Index         rank = 0;

    Index rows() const { return u.rows(); }
    Index cols() const { return v.rows(); }

    // R(A), N(A)^⊥, N(A), R(A)^⊥ as orthonormal bases
    CMatrix<Real> range_basis() const { return u.leftCols(rank); }
    CMatrix<Real> corange_basis() const { return v.leftCols(rank); }
    CMatrix<Real> kernel_basis() const { return v.rightCols(cols() - rank); }
    CMatrix<Real> cokernel_basis() const { return u.rightCols(rows() - rank); }

    Real sigma_max() const { return singvals.size() > 0 ? singvals(0) : Real(0); }
};

template <typename Real>
struct EighResult
{
    CMatrix<Real> q;       // unitary
    RVector<Real> eigvals; // ascending
};

template <typename Real>
Real rank_cut(Index rows, Index cols, Real sigma_max, const TolerancePolicy& tol)
{
    return Real(tol.rank_cut_factor) * Real(std::max(rows, cols)) * std::numeric_limits<Real>::epsilon() *
           sigma_max;
}

template <typename Real>
Index count_above_cut(const RVector<Real>& singvals, Index rows, Index cols, const TolerancePolicy& tol)
{
    if (singvals.size() == 0)
        return 0;
    const Real cut = rank_cut(rows, cols, singvals(0), tol);
    Index r = 0;
    while (r < singvals.size() && singvals(r) > cut)
        ++r;
    return r;
}

namespace detail {

//
// One-sided (Hestenes) Jacobi on the columns of g, rows(g) >= cols(g).
// On return the columns of g are mutually orthogonal and g_in·V = g.
// A rotation is applied to the pair (p,q) only while
//     |g_p* g_q| > threshold · ‖g_p‖‖g_q‖,
// convergence is a full sweep without rotations.
//
template <typename Real>
void hestenes_sweeps(CMatrix<Real>& g, CMatrix<Real>* v)
{
    using std::abs;
    using std::sqrt;
    using Cplx = std::complex<Real>;

    const Index m         = g.rows();
    const Index n         = g.cols();
    const Real  threshold = std::max(Real(1e-14), Real(8) * std::numeric_limits<Real>::epsilon());

    for (int sweep = 0; sweep < jacobi_max_sweeps; ++sweep) {
        bool rotated = false;

        for (Index p = 0; p + 1 < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const Real alpha = g.col(p).squaredNorm();
                const Real beta  = g.col(q).squaredNorm();

                if (alpha == Real(0) || beta == Real(0))
                    continue;

                const Cplx gamma     = g.col(p).dot(g.col(q));
                const Real abs_gamma = abs(gamma);

                if (!(abs_gamma > threshold * sqrt(alpha) * sqrt(beta)))
                    continue;

                rotated = true;

                // remove the phase of gamma, then a real rotation; gamma is
                // rescaled first since noise columns can drive it subnormal
                const Real gscale = std::max(abs(gamma.real()), abs(gamma.imag()));
                Cplx       unphase = std::conj(gamma) / gscale;
                unphase /= abs(unphase);
                const Real zeta    = (beta - alpha) / (Real(2) * abs_gamma);
                const Real t       = (zeta >= Real(0) ? Real(1) : Real(-1)) / (abs(zeta) + std::hypot(Real(1), zeta));
                const Real c       = Real(1) / sqrt(Real(1) + t * t);
                const Real s       = c * t;

                for (Index i = 0; i < m; ++i) {
                    const Cplx gp = g(i, p);
                    const Cplx gq = g(i, q) * unphase;
                    g(i, p)       = c * gp - s * gq;
                    g(i, q)       = s * gp + c * gq;
                }

                if (v != nullptr) {
                    auto& vv = *v;
                    for (Index i = 0; i < vv.rows(); ++i) {
                        const Cplx vp = vv(i, p);
                        const Cplx vq = vv(i, q) * unphase;
                        vv(i, p)      = c * vp - s * vq;
                        vv(i, q)      = s * vp + c * vq;
                    }
                }
            }
        }

        if (!rotated)
            return;
    }

    throw Error(ErrorKind::NonConvergence,
                "one-sided Jacobi did not converge within " + std::to_string(jacobi_max_sweeps) + " sweeps");
}

// extend orthonormal columns b (m×r) to an m×m unitary [b, b⊥]
template <typename Real>
CMatrix<Real> complete_unitary(const CMatrix<Real>& b, Index m)
{
    const Index r = b.cols();
    if (r == m)
        return b;
    if (r == 0)
        return CMatrix<Real>::Identity(m, m);

    Eigen::HouseholderQR<CMatrix<Real>> qr(b);
    const CMatrix<Real>                 full = qr.householderQ() * CMatrix<Real>::Identity(m, m);

    CMatrix<Real> u(m, m);
    u.leftCols(r)     = b;
    u.rightCols(m - r) = full.rightCols(m - r);
    return u;
}

template <typename Real>
SvdResult<Real> svd_tall(const CMatrix<Real>& a, const TolerancePolicy& tol, bool want_vectors)
{
    const Index m = a.rows();
    const Index n = a.cols();

    CMatrix<Real> g = a;
    CMatrix<Real> v;
    if (want_vectors)
        v = CMatrix<Real>::Identity(n, n);

    hestenes_sweeps(g, want_vectors ? &v : nullptr);

    RVector<Real> norms(n);
    for (Index j = 0; j < n; ++j)
        norms(j) = g.col(j).norm();

    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return norms(i) > norms(j); });

    SvdResult<Real> res;
    res.singvals.resize(n);
    for (Index k = 0; k < n; ++k)
        res.singvals(k) = norms(order[k]);
    res.rank = count_above_cut(res.singvals, m, n, tol);

    if (!want_vectors)
        return res;

    CMatrix<Real> ur(m, res.rank);
    res.v.resize(n, n);
    for (Index k = 0; k < n; ++k) {
        res.v.col(k) = v.col(order[k]);
        if (k < res.rank)
            ur.col(k) = g.col(order[k]) / res.singvals(k);
    }
    res.u = complete_unitary(ur, m);
    return res;
}

} // namespace detail

template <typename Derived>
SvdResult<typename Derived::RealScalar> svd(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    using Real = typename Derived::RealScalar;

    if (a.rows() == 0 || a.cols() == 0)
        throw Error(ErrorKind::InvalidInput, "svd requires nonzero dimensions");

    const CMatrix<Real> ac = to_complex(a);
    if (ac.rows() >= ac.cols())
        return detail::svd_tall<Real>(ac, tol, true);

    // A* = U' Σ V'*  ⇒  A = V' Σ U'*
    auto res = detail::svd_tall<Real>(ac.adjoint(), tol, true);
    std::swap(res.u, res.v);
    return res;
}

// singular values only, descending; empty input gives an empty vector
template <typename Derived>
RVector<typename Derived::RealScalar> singular_values(const Eigen::MatrixBase<Derived>& a)
{
    using Real = typename Derived::RealScalar;

    if (a.rows() == 0 || a.cols() == 0)
        return RVector<Real>();

    const CMatrix<Real> ac = to_complex(a);
    if (ac.rows() >= ac.cols())
        return detail::svd_tall<Real>(ac, {}, false).singvals;
    return detail::svd_tall<Real>(ac.adjoint(), {}, false).singvals;
}

template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& a)
{
    const auto s = singular_values(a);
    return s.size() > 0 ? s(0) : typename Derived::RealScalar(0);
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    return count_above_cut(singular_values(a), a.rows(), a.cols(), tol);
}

//
// Orthonormal basis of the column space; n×0 for a numerically zero input.
//
template <typename Derived>
CMatrix<typename Derived::RealScalar> orthonormalize(const Eigen::MatrixBase<Derived>& a,
                                                     const TolerancePolicy&             tol = {})
{
    using Real = typename Derived::RealScalar;

    if (a.cols() == 0 || a.rows() == 0)
        return CMatrix<Real>(a.rows(), 0);
    return svd(a, tol).range_basis();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    if (a.rows() != a.cols())
        return false;
    const auto ac    = to_complex(a);
    const auto scale = spectral_norm(ac);
    return spectral_norm((ac - ac.adjoint()).eval()) <= tol.residual_tol * scale;
}

template <typename Derived>
EighResult<typename Derived::RealScalar> eigh(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    using Real = typename Derived::RealScalar;

    if (a.rows() != a.cols())
        throw Error(ErrorKind::NotHermitian, "eigh: matrix is not square");
    if (!is_hermitian(a, tol))
        throw Error(ErrorKind::NotHermitian, "eigh: ‖a − a*‖ exceeds residual_tol·‖a‖");

    const CMatrix<Real> ac  = to_complex(a);
    const CMatrix<Real> sym = Real(0.5) * (ac + ac.adjoint());

    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(sym);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::NonConvergence, "eigh: Hermitian eigensolver failed");

    return {es.eigenvectors(), es.eigenvalues()};
}

// σ_A: smallest singular value above the rank cut
template <typename Real>
Real reduced_min_modulus(const SvdResult<Real>& s)
{
    if (s.rank == 0)
        throw Error(ErrorKind::ZeroOperator, "reduced minimum modulus of a numerically zero operator");
    return s.singvals(s.rank - 1);
}

template <typename Derived>
typename Derived::RealScalar reduced_min_modulus(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    using Real = typename Derived::RealScalar;

    if (a.rows() == 0 || a.cols() == 0)
        throw Error(ErrorKind::ZeroOperator, "reduced minimum modulus of an empty operator");
    const RVector<Real> s = singular_values(a);
    const Index         r = count_above_cut(s, a.rows(), a.cols(), tol);
    if (r == 0)
        throw Error(ErrorKind::ZeroOperator, "reduced minimum modulus of a numerically zero operator");
    return s(r - 1);
}

template <typename Real>
CMatrix<Real> pinv(const SvdResult<Real>& s)
{
    const Index   r = s.rank;
    CMatrix<Real> vr = s.v.leftCols(r);
    for (Index k = 0; k < r; ++k)
        vr.col(k) /= s.singvals(k);
    return vr * s.u.leftCols(r).adjoint();
}

template <typename Derived>
CMatrix<typename Derived::RealScalar> pinv(const Eigen::MatrixBase<Derived>& a, const TolerancePolicy& tol = {})
{
    return pinv(svd(a, tol));
}

} // namespace polarpert

#endif // POLARPERT_SPECTRAL_HPP
