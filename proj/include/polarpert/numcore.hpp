#ifndef POLARPERT_NUMCORE_HPP
#define POLARPERT_NUMCORE_HPP
//
// Dense complex matrices, basic arithmetic, and the tolerance policy shared
// by every numerical decision in the library.
//

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace polarpert {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Matrix  = CMatrix<double>;
using Complex = std::complex<double>;
using Index   = Eigen::Index;

enum class ErrorKind {
    DimensionMismatch,
    ShapeMismatch,
    ZeroOperator,
    NonConvergence,
    NotHermitian,
    NotIndexZero,
    SpectraOverlap,
    GeometryViolated,
    NotApplicable,
    Ambiguous,
    EpsilonTooLarge,
    InvalidSpec,
    UnknownInstance,
    InvalidInput,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ShapeMismatch:     return "ShapeMismatch";
        case ErrorKind::ZeroOperator:      return "ZeroOperator";
        case ErrorKind::NonConvergence:    return "NonConvergence";
        case ErrorKind::NotHermitian:      return "NotHermitian";
        case ErrorKind::NotIndexZero:      return "NotIndexZero";
        case ErrorKind::SpectraOverlap:    return "SpectraOverlap";
        case ErrorKind::GeometryViolated:  return "GeometryViolated";
        case ErrorKind::NotApplicable:     return "NotApplicable";
        case ErrorKind::Ambiguous:         return "Ambiguous";
        case ErrorKind::EpsilonTooLarge:   return "EpsilonTooLarge";
        case ErrorKind::InvalidSpec:       return "InvalidSpec";
        case ErrorKind::UnknownInstance:   return "UnknownInstance";
        case ErrorKind::InvalidInput:      return "InvalidInput";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

//
// Every "is this numerically zero / equal / surjective" decision goes through
// one of these three numbers.
//
struct TolerancePolicy
{
    // σ counts as nonzero iff σ > rank_cut_factor · max(rows, cols) · ε · σ_max
    double rank_cut_factor = 1.0;
    // multiplicative slack on every "bound holds" verdict
    double bound_slack = 1e-8;
    // residual acceptance for factorizations and Hermitian checks
    double residual_tol = 1e-10;

    void validate() const
    {
        if (!(rank_cut_factor >= 0) || !(bound_slack >= 0) || !(residual_tol >= 0))
            throw Error(ErrorKind::InvalidInput, "tolerance policy fields must be nonnegative");
    }
};

// promote any dense expression (real or complex) to the complex carrier type
template <typename Derived>
CMatrix<typename Derived::RealScalar> to_complex(const Eigen::MatrixBase<Derived>& a)
{
    using Real = typename Derived::RealScalar;
    return a.template cast<std::complex<Real>>();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a)
{
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            const auto z = std::complex<typename Derived::RealScalar>(a(i, j));
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                return false;
        }
    return true;
}

template <typename Derived>
CMatrix<typename Derived::RealScalar> adjoint(const Eigen::MatrixBase<Derived>& a)
{
    return to_complex(a).adjoint();
}

template <typename DerivedA, typename DerivedB>
CMatrix<typename DerivedA::RealScalar> matmul(const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b)
{
    if (a.cols() != b.rows())
        throw Error(ErrorKind::DimensionMismatch,
                    "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    return to_complex(a) * to_complex(b);
}

// residual helper only; all bounds use the spectral norm
template <typename Derived>
typename Derived::RealScalar frobenius_norm(const Eigen::MatrixBase<Derived>& a)
{
    return a.norm();
}

template <typename Real>
CMatrix<Real> identity(Index n)
{
    return CMatrix<Real>::Identity(n, n);
}

} // namespace polarpert

#endif // POLARPERT_NUMCORE_HPP
