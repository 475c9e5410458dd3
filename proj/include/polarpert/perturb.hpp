#ifndef POLARPERT_PERTURB_HPP
#define POLARPERT_PERTURB_HPP
//
// Hypothesis checkers and certificates for the angular-factor perturbation
// bounds
//
//   main      ‖Q₁ − Q₂‖ ≤ 4/(σ₁+σ₂) ‖A₁ − A₂‖
//   improved  ‖Q₁ − Q₂‖ ≤ (1 + √(1 + (σ₁²+σ₂²)/max(σ₁,σ₂)²))/(σ₁+σ₂) ‖A₁ − A₂‖
//   cr_plain  ‖Q₁ − Q₂‖ ≤ (3/(σ₁+σ₂) + 1/min(σ₁,σ₂)) ‖A₁ − A₂‖
//   cr_gap    ‖Q₁ − Q₂‖ ≤ 5/(σ₁+σ₂) ‖A₁ − A₂‖
//
// main and improved need equal index and a vanishing gap difference of the
// ranges or of the kernels; cr_gap needs range or kernel gap below one;
// cr_plain needs nothing beyond closed ranges (always true for matrices).
//
// Also: step-by-step traces of the two proofs, the small-perturbation
// implication and the resolvent scan λ ↦ Q_{A−λI}.
//

#include "polarpert/polar.hpp"
#include "polarpert/sylvester.hpp"

#include <array>
#include <optional>
#include <vector>

namespace polarpert {

// Δ(V,W) = 0 is decided as gap_diff ≤ delta_zero_tol (plus agreement with
// the cross-projection classification); δ̂ < 1 as δ̂ < 1 − gap_margin.
inline constexpr double delta_zero_tol      = 1e-8;
inline constexpr double gap_margin          = 1e-8;
inline constexpr double vanishing_term_tol  = 1e-10;

struct Hypotheses
{
    bool  same_shape        = false;
    bool  index_equal       = false;
    Index rank1             = 0;
    Index rank2             = 0;
    bool  delta_range_zero  = false;
    bool  delta_kernel_zero = false;
    bool  gap_range_lt1     = false;
    bool  gap_kernel_lt1    = false;

    GapReport<double> range_gap;
    GapReport<double> kernel_gap;
    SurjectivityClass range_class  = SurjectivityClass::NeitherSurjective;
    SurjectivityClass kernel_class = SurjectivityClass::NeitherSurjective;
};

struct Certificate
{
    double sigma1 = 0;
    double sigma2 = 0;
    double dist   = 0; // ‖A₁ − A₂‖
    double qdist  = 0; // ‖Q₁ − Q₂‖

    double                bound_main     = 0;
    double                bound_improved = 0;
    double                bound_cr_plain = 0;
    std::optional<double> bound_cr_gap;

    Hypotheses hyp;

    bool main_applicable   = false;
    bool cr_gap_applicable = false;

    // a bound that is not applicable holds vacuously
    bool main_holds     = true;
    bool improved_holds = true;
    bool cr_plain_holds = true;
    bool cr_gap_holds   = true;

    bool all_hold() const { return main_holds && improved_holds && cr_plain_holds && cr_gap_holds; }
};

// four summands of XD₁ + D₂X with X = U₂*Q₁ − P_{N(A₂)^⊥}
struct MainTrace
{
    bool   swapped = false; // inputs exchanged so that σ₁ ≤ σ₂
    bool   dilated = false; // non-square inputs were padded to index zero
    double sigma1  = 0;
    double sigma2  = 0;
    double dist    = 0;
    double qdist   = 0;

    std::array<double, 4> summand{};  // norms of the four summands
    double x_norm            = 0;     // ‖X‖, equals qdist
    double rhs_norm          = 0;     // ‖XD₁ + D₂X‖
    double sylvester_bound   = 0;     // rhs_norm/(σ₁+σ₂)
    double identity_residual = 0;     // ‖XD₁ + D₂X − Σ summands‖
    double resolve_error     = 0;     // ‖X − solve_sylvester(D₁, −D₂, XD₁ + D₂X)‖

    std::array<bool, 4> summand_holds{};
    bool x_equals_qdist  = false;
    bool sylvester_holds = false;
    bool identity_holds  = false;
    bool resolve_holds   = false;

    bool all_hold() const
    {
        return summand_holds[0] && summand_holds[1] && summand_holds[2] && summand_holds[3] &&
               x_equals_qdist && sylvester_holds && identity_holds && resolve_holds;
    }
};

// X = Q₂*Q₁ − P_{N(A₂)^⊥}; no hypothesis on the pair
struct CrTrace
{
    bool   swapped = false;
    double sigma1  = 0;
    double sigma2  = 0;
    double dist    = 0;
    double qdist   = 0;

    double first_term     = 0; // ‖Q₂*Q₁|A₁| − |A₂|‖
    double second_term    = 0; // ‖|A₂|Q₂*Q₁ − P_{N(A₂)^⊥}|A₁|‖
    double vanishing_term = 0; // ‖σ₂ P_{N(A₂)} Q₂*Q₁ P_{N(A₁)^⊥}‖
    double kernel_term    = 0; // ‖σ₁ P_{N(A₂)^⊥} P_{N(A₁)}‖
    double cokernel_term  = 0; // ‖P_{N(Q₂*)} Q₁‖
    double range_gap      = 0; // δ̂(R(A₂), R(A₁))

    double x_norm            = 0;
    double rhs_norm          = 0;
    double identity_residual = 0;

    bool first_holds     = false;
    bool second_holds    = false;
    bool vanishing_holds = false;
    bool kernel_holds    = false;
    bool cokernel_holds  = false;
    bool sylvester_holds = false; // ‖X‖ ≤ ‖XD₁ + D₂X‖/(σ₁+σ₂)
    bool x_holds         = false; // ‖X‖ ≤ 3/(σ₁+σ₂)·dist
    bool split_holds     = false; // qdist ≤ ‖X‖ + cokernel_term
    bool identity_holds  = false;

    bool all_hold() const
    {
        return first_holds && second_holds && vanishing_holds && kernel_holds && cokernel_holds &&
               sylvester_holds && x_holds && split_holds && identity_holds;
    }
};

struct SmallPertReport
{
    double sigma1  = 0;
    double sigma2  = 0;
    double dist    = 0;
    double gap_hat = 0; // δ̂(R(A₁), R(A₂))

    bool ranks_equal = false;
    bool applies     = false; // equal ranks and dist < max(σ₁,σ₂)/3
    bool gap_lt1     = false;

    // ‖A₁† − A₂†‖ ≤ 2‖A₁†‖‖A₂†‖‖A₁ − A₂‖, vacuous for unequal ranks
    double pinv_dist  = 0;
    double wedin_rhs  = 0;
    bool   wedin_holds = true;

    bool implication_holds() const { return !applies || gap_lt1; }
};

struct ScanStep
{
    Complex               lambda;
    Complex               lambda_next;
    double                qdist = 0;   // ‖Q_{A−λI} − Q_{A−λ'I}‖
    std::optional<double> bound;       // 4/(σ+σ')·|λ − λ'| when ranks agree
};

Hypotheses check_hypotheses(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol = {});

Certificate certify(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol = {});

MainTrace proof_trace_main(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol = {});

CrTrace proof_trace_cr(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol = {});

SmallPertReport small_pert_implication(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol = {});

std::vector<ScanStep> scan_resolvent_angular(const Matrix& a, Complex center, double radius, int samples,
                                             const TolerancePolicy& tol = {});

double max_step_distance(const std::vector<ScanStep>& scan);

} // namespace polarpert

#endif // POLARPERT_PERTURB_HPP
