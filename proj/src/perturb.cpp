#include "polarpert/perturb.hpp"

#include <cmath>
#include <numbers>

namespace polarpert {

namespace {

using Polar = PolarResult<double>;
using Space = Subspace<double>;

void require_same_shape(const Matrix& a1, const Matrix& a2)
{
    if (a1.rows() != a2.rows() || a1.cols() != a2.cols())
        throw Error(ErrorKind::ShapeMismatch, std::to_string(a1.rows()) + "x" + std::to_string(a1.cols()) +
                                                  " vs " + std::to_string(a2.rows()) + "x" +
                                                  std::to_string(a2.cols()));
}

Space range_of(const Polar& p) { return Space::from_orthonormal(p.factors.range_basis()); }
Space kernel_of(const Polar& p) { return Space::from_orthonormal(p.factors.kernel_basis()); }

//
// Δ(V,W) = 0 ⟺ both cross-projections surjective or both not. The gap
// difference and the classification have to agree; a disagreement means
// the pair sits on the numerical boundary and is rejected.
//
bool decide_delta_zero(const GapReport<double>& g, SurjectivityClass c, const char* which)
{
    const bool by_gap   = g.gap_diff <= delta_zero_tol;
    const bool by_class = c != SurjectivityClass::Mixed;
    if (by_gap != by_class)
        throw Error(ErrorKind::Ambiguous, std::string("gap difference of the ") + which + " is " +
                                              std::to_string(g.gap_diff) + " but cross-projections are " +
                                              to_string(c));
    return by_gap;
}

Hypotheses hypotheses_from(const Matrix& a1, const Matrix& a2, const Polar& p1, const Polar& p2,
                           const TolerancePolicy& tol)
{
    Hypotheses h;
    h.same_shape  = a1.rows() == a2.rows() && a1.cols() == a2.cols();
    h.index_equal = (a1.cols() - a1.rows()) == (a2.cols() - a2.rows());
    h.rank1       = p1.rank;
    h.rank2       = p2.rank;

    const Space r1 = range_of(p1), r2 = range_of(p2);
    const Space n1 = kernel_of(p1), n2 = kernel_of(p2);

    h.range_gap    = gap_report(r1, r2);
    h.kernel_gap   = gap_report(n1, n2);
    h.range_class  = classify_cross_projections(r1, r2, tol);
    h.kernel_class = classify_cross_projections(n1, n2, tol);

    h.delta_range_zero  = decide_delta_zero(h.range_gap, h.range_class, "ranges");
    h.delta_kernel_zero = decide_delta_zero(h.kernel_gap, h.kernel_class, "kernels");
    h.gap_range_lt1     = h.range_gap.gap_hat < 1.0 - gap_margin;
    h.gap_kernel_lt1    = h.kernel_gap.gap_hat < 1.0 - gap_margin;
    return h;
}

bool within(double value, double bound, double slack, double floor = 0.0)
{
    return value <= bound * (1.0 + slack) + floor;
}

// absolute allowance for identities evaluated through several products
double rounding_floor(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol)
{
    return tol.residual_tol * std::max({1.0, spectral_norm(a1), spectral_norm(a2)});
}

} // namespace

Hypotheses check_hypotheses(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol)
{
    require_same_shape(a1, a2);
    return hypotheses_from(a1, a2, polar_decompose(a1, tol), polar_decompose(a2, tol), tol);
}

Certificate certify(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol)
{
    require_same_shape(a1, a2);

    const Polar p1 = polar_decompose(a1, tol);
    const Polar p2 = polar_decompose(a2, tol);

    Certificate c;
    c.hyp    = hypotheses_from(a1, a2, p1, p2, tol);
    c.sigma1 = p1.sigma;
    c.sigma2 = p2.sigma;
    c.dist   = spectral_norm((a1 - a2).eval());
    c.qdist  = spectral_norm((p1.q - p2.q).eval());

    const double sum  = c.sigma1 + c.sigma2;
    const double smax = std::max(c.sigma1, c.sigma2);
    const double smin = std::min(c.sigma1, c.sigma2);

    c.bound_main     = 4.0 * c.dist / sum;
    c.bound_improved = (1.0 + std::sqrt(1.0 + (c.sigma1 * c.sigma1 + c.sigma2 * c.sigma2) / (smax * smax))) *
                       c.dist / sum;
    c.bound_cr_plain = c.dist * (3.0 / sum + 1.0 / smin);

    c.main_applicable   = c.hyp.index_equal && (c.hyp.delta_range_zero || c.hyp.delta_kernel_zero);
    c.cr_gap_applicable = c.hyp.gap_range_lt1 || c.hyp.gap_kernel_lt1;
    if (c.cr_gap_applicable)
        c.bound_cr_gap = 5.0 * c.dist / sum;

    const double slack = tol.bound_slack;
    if (c.main_applicable) {
        c.main_holds     = within(c.qdist, c.bound_main, slack);
        c.improved_holds = within(c.qdist, c.bound_improved, slack);
    }
    c.cr_plain_holds = within(c.qdist, c.bound_cr_plain, slack);
    if (c.cr_gap_applicable)
        c.cr_gap_holds = within(c.qdist, *c.bound_cr_gap, slack);

    return c;
}

MainTrace proof_trace_main(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol)
{
    require_same_shape(a1, a2);

    const Hypotheses hyp = check_hypotheses(a1, a2, tol);
    if (!hyp.delta_range_zero)
        throw Error(ErrorKind::NotApplicable, "main trace follows the Δ(R(A₁),R(A₂)) = 0 branch; "
                                              "pass the adjoint pair for the kernel branch");

    MainTrace t;
    t.dilated = a1.rows() != a1.cols();

    Matrix b1 = t.dilated ? dilate_to_index_zero(a1) : a1;
    Matrix b2 = t.dilated ? dilate_to_index_zero(a2) : a2;

    Polar p1 = polar_decompose(b1, tol);
    Polar p2 = polar_decompose(b2, tol);
    if (p1.sigma > p2.sigma) {
        std::swap(b1, b2);
        std::swap(p1, p2);
        t.swapped = true;
    }

    const Index  n     = b1.cols();
    const double floor = rounding_floor(a1, a2, tol);
    const double slack = tol.bound_slack;

    t.sigma1 = p1.sigma;
    t.sigma2 = p2.sigma;
    t.dist   = spectral_norm((a1 - a2).eval());
    t.qdist  = spectral_norm((polar_decompose(a1, tol).q - polar_decompose(a2, tol).q).eval());

    const Matrix u1  = p1.factors.u * p1.factors.v.adjoint();
    const Matrix u2  = p2.factors.u * p2.factors.v.adjoint();
    const Matrix pk1 = p1.kernel_projector();
    const Matrix pk2 = p2.kernel_projector();
    const Matrix pc1 = p1.corange_projector();
    const Matrix pc2 = p2.corange_projector();

    const Matrix u2q1 = u2.adjoint() * p1.q;
    const Matrix x    = u2q1 - pc2;
    const Matrix d1   = p1.h + t.sigma1 * pk1;
    const Matrix d2   = p2.h + t.sigma2 * pk2;
    const Matrix rhs  = x * d1 + d2 * x;

    const std::array<Matrix, 4> parts = {
        // U₂*Q₁|A₁| − |A₂| = U₂*(A₁ − A₂); this form avoids cancellation
        // when the pair is close and the summand is tight against dist
        Matrix(u2.adjoint() * (b1 - b2)),
        Matrix(p2.h * u2q1 - pc2 * p1.h),
        Matrix(-t.sigma1 * pc2 * pk1),
        Matrix(t.sigma2 * pk2 * u2.adjoint() * u1 * pc1),
    };

    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        t.summand[i]       = spectral_norm(parts[i]);
        t.summand_holds[i] = within(t.summand[i], t.dist, slack, floor);
        sum += parts[i];
    }

    t.x_norm            = spectral_norm(x);
    t.rhs_norm          = spectral_norm(rhs);
    t.sylvester_bound   = t.rhs_norm / (t.sigma1 + t.sigma2);
    t.identity_residual = spectral_norm((rhs - sum).eval());

    t.x_equals_qdist  = std::abs(t.x_norm - t.qdist) <= floor;
    t.sylvester_holds = within(t.x_norm, t.sylvester_bound, slack, floor);
    t.identity_holds  = t.identity_residual <= floor;

    // X is the unique solution of X·D₁ − (−D₂)·X = XD₁ + D₂X
    const auto sol  = solve_sylvester(d1, (-d2).eval(), rhs, tol);
    t.resolve_error = spectral_norm((sol.x - x).eval());
    t.resolve_holds = t.resolve_error <= polar_identity_tol * std::max(1.0, t.x_norm);

    return t;
}

CrTrace proof_trace_cr(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol)
{
    require_same_shape(a1, a2);

    Polar p1 = polar_decompose(a1, tol);
    Polar p2 = polar_decompose(a2, tol);

    CrTrace t;
    if (p1.sigma > p2.sigma) {
        std::swap(p1, p2);
        t.swapped = true;
    }

    const Index  m     = a1.rows();
    const double floor = rounding_floor(a1, a2, tol);
    const double slack = tol.bound_slack;

    t.sigma1 = p1.sigma;
    t.sigma2 = p2.sigma;
    t.dist   = spectral_norm((a1 - a2).eval());
    t.qdist  = spectral_norm((p1.q - p2.q).eval());

    const Matrix pk1  = p1.kernel_projector();
    const Matrix pk2  = p2.kernel_projector();
    const Matrix pc1  = p1.corange_projector();
    const Matrix pc2  = p2.corange_projector();
    const Matrix q2q1 = p2.q.adjoint() * p1.q;

    const Matrix x   = q2q1 - pc2;
    const Matrix d1  = p1.h + t.sigma1 * pk1;
    const Matrix d2  = p2.h + t.sigma2 * pk2;
    const Matrix rhs = x * d1 + d2 * x;

    const Matrix first     = q2q1 * p1.h - p2.h;
    const Matrix second    = p2.h * q2q1 - pc2 * p1.h;
    const Matrix vanishing = t.sigma2 * pk2 * q2q1 * pc1;
    const Matrix kernel    = -t.sigma1 * pc2 * pk1;

    t.first_term        = spectral_norm(first);
    t.second_term       = spectral_norm(second);
    t.vanishing_term    = spectral_norm(vanishing);
    t.kernel_term       = spectral_norm(kernel);
    t.identity_residual = spectral_norm((rhs - (first + second + vanishing + kernel)).eval());

    const Matrix cokernel_proj = Matrix::Identity(m, m) - p2.q * p2.q.adjoint();
    t.cokernel_term            = spectral_norm((cokernel_proj * p1.q).eval());
    t.range_gap                = gap_hat(range_of(p2), range_of(p1));

    t.x_norm   = spectral_norm(x);
    t.rhs_norm = spectral_norm(rhs);

    const double sum = t.sigma1 + t.sigma2;
    t.first_holds     = within(t.first_term, t.dist, slack, floor);
    t.second_holds    = within(t.second_term, t.dist, slack, floor);
    t.vanishing_holds = t.vanishing_term <= vanishing_term_tol;
    t.kernel_holds    = within(t.kernel_term, t.sigma1 / t.sigma2 * t.dist, slack, floor);
    t.cokernel_holds  = t.cokernel_term <= t.range_gap + polar_identity_tol;
    t.sylvester_holds = within(t.x_norm, t.rhs_norm / sum, slack, floor);
    t.x_holds         = within(t.x_norm, 3.0 * t.dist / sum, slack, floor);
    t.split_holds     = t.qdist <= t.x_norm + t.cokernel_term + floor;
    t.identity_holds  = t.identity_residual <= floor;

    return t;
}

SmallPertReport small_pert_implication(const Matrix& a1, const Matrix& a2, const TolerancePolicy& tol)
{
    require_same_shape(a1, a2);

    const Polar p1 = polar_decompose(a1, tol);
    const Polar p2 = polar_decompose(a2, tol);

    SmallPertReport r;
    r.sigma1      = p1.sigma;
    r.sigma2      = p2.sigma;
    r.dist        = spectral_norm((a1 - a2).eval());
    r.ranks_equal = p1.rank == p2.rank;
    r.applies     = r.ranks_equal && r.dist < std::max(r.sigma1, r.sigma2) / 3.0;
    r.gap_hat     = gap_hat(range_of(p1), range_of(p2));
    r.gap_lt1     = r.gap_hat < 1.0 - gap_margin;

    if (r.ranks_equal) {
        const Matrix pinv1 = pinv(p1.factors);
        const Matrix pinv2 = pinv(p2.factors);
        r.pinv_dist        = spectral_norm((pinv1 - pinv2).eval());
        r.wedin_rhs        = 2.0 * spectral_norm(pinv1) * spectral_norm(pinv2) * r.dist;
        r.wedin_holds      = within(r.pinv_dist, r.wedin_rhs, tol.bound_slack);
    }
    return r;
}

std::vector<ScanStep> scan_resolvent_angular(const Matrix& a, Complex center, double radius, int samples,
                                             const TolerancePolicy& tol)
{
    if (a.rows() != a.cols())
        throw Error(ErrorKind::InvalidInput, "resolvent scan needs a square matrix");
    if (!(radius > 0.0))
        throw Error(ErrorKind::InvalidInput, "resolvent scan radius must be positive");
    if (samples < 1)
        throw Error(ErrorKind::InvalidInput, "resolvent scan needs at least one sample");

    const Index n = a.rows();

    std::vector<Complex> lambdas(samples);
    std::vector<Polar>   polars;
    polars.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / samples;
        lambdas[k]         = center + std::polar(radius, angle);
        polars.push_back(polar_decompose((a - lambdas[k] * Matrix::Identity(n, n)).eval(), tol));
    }

    std::vector<ScanStep> steps(samples);
    for (int k = 0; k < samples; ++k) {
        const int next = (k + 1) % samples;

        ScanStep& s   = steps[k];
        s.lambda      = lambdas[k];
        s.lambda_next = lambdas[next];
        s.qdist       = spectral_norm((polars[k].q - polars[next].q).eval());
        if (polars[k].rank == polars[next].rank)
            s.bound = 4.0 / (polars[k].sigma + polars[next].sigma) * std::abs(lambdas[k] - lambdas[next]);
    }
    return steps;
}

double max_step_distance(const std::vector<ScanStep>& scan)
{
    double m = 0.0;
    for (const auto& s : scan)
        m = std::max(m, s.qdist);
    return m;
}

} // namespace polarpert
