//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Optional argv[1] is the path of the polarpert CLI for the
// exit-code contract.
//

#include "polarpert/io.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace polarpert;

namespace {

struct Outcome
{
    bool        pass = true;
    std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome    out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!out.pass)
        ++failures;
    std::printf("[%s] %-4s %s | %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
    std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// independent of the library SVD
double eigen_norm(const Matrix& a)
{
    return a.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

bool le_slack(double v, double bound, double slack) { return v <= bound * (1.0 + slack); }

Subspace<double> random_subspace(Index n, Index d, std::uint64_t seed)
{
    return Subspace<double>::from_orthonormal(random_unitary(n, seed).leftCols(d));
}

// e^{-i t H} with H Hermitian of unit norm
Matrix small_rotation(Index n, double t, std::uint64_t seed)
{
    CounterRng rng(seed);
    Matrix     z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            z(i, j) = Complex(rng.normal(), rng.normal());
    const Matrix h  = 0.5 * (z + z.adjoint());
    const auto   eh = eigh(h);
    const double sc = eh.eigvals.cwiseAbs().maxCoeff();
    Eigen::VectorXcd ph(n);
    for (Index k = 0; k < n; ++k)
        ph(k) = std::polar(1.0, -t * eh.eigvals(k) / sc);
    return eh.q * ph.asDiagonal() * eh.q.adjoint();
}

//
// 1 and 2: main and improved bounds over the default corpus
//
Outcome main_corpus(bool improved)
{
    CorpusConfig cfg;
    cfg.trials = 10000;
    cfg.seed   = 42;

    long   applicable = 0, bad = 0, order_bad = 0;
    double worst      = 0;
    for (long i = 0; i < cfg.trials; ++i) {
        const auto p = draw_corpus_pair(cfg, i);
        const auto c = certify(p.a1, p.a2, cfg.tol);

        const double s = c.sigma1 + c.sigma2, mx = std::max(c.sigma1, c.sigma2);
        const double main_b = 4.0 * c.dist / s;
        const double impr_b = (1.0 + std::sqrt(1.0 + (c.sigma1 * c.sigma1 + c.sigma2 * c.sigma2) / (mx * mx))) * c.dist / s;

        if (improved && !(impr_b <= main_b))
            ++order_bad;
        if (!c.main_applicable)
            continue;
        ++applicable;
        const double b = improved ? impr_b : main_b;
        if (!le_slack(c.qdist, b, 1e-8))
            ++bad;
        if (b > 0)
            worst = std::max(worst, c.qdist / b);
    }

    Outcome out;
    out.pass   = bad == 0 && order_bad == 0 && applicable > 0;
    out.detail = fmt("applicable %ld/%ld, violations %ld, worst qdist/bound %.6f", applicable, cfg.trials, bad, worst);
    if (improved)
        out.detail += fmt(", improved>main in %ld", order_bad);

    if (!improved) {
        // the full corpus runner on the same configuration, single-threaded
        const auto rep = run_corpus(cfg);
        out.pass       = out.pass && rep.failures.empty() && rep.runtime_seconds < 120.0;
        out.detail += fmt("; corpus runner: %zu failures in %.1fs", rep.failures.size(), rep.runtime_seconds);
    }
    return out;
}

//
// 3: universal estimate on unrestricted pairs
//
Outcome universal_estimate()
{
    CorpusConfig cfg;
    long         bad_plain = 0, bad_gap = 0, gap_subset = 0;
    double       worst_plain = 0, worst_gap = 0;
    const long   trials      = 10000;

    for (long i = 0; i < trials; ++i) {
        const auto p = draw_pair(Ensemble::Unrestricted, cfg, hash64(1234, static_cast<std::uint64_t>(i)));
        const auto c = certify(p.a1, p.a2, cfg.tol);

        const double s     = c.sigma1 + c.sigma2;
        const double plain = c.dist * (3.0 / s + 1.0 / std::min(c.sigma1, c.sigma2));
        if (!le_slack(c.qdist, plain, 1e-8))
            ++bad_plain;
        if (plain > 0)
            worst_plain = std::max(worst_plain, c.qdist / plain);

        if (c.hyp.gap_range_lt1 || c.hyp.gap_kernel_lt1) {
            ++gap_subset;
            const double g = 5.0 * c.dist / s;
            if (!le_slack(c.qdist, g, 1e-8))
                ++bad_gap;
            if (g > 0)
                worst_gap = std::max(worst_gap, c.qdist / g);
        }
    }
    return {bad_plain == 0 && bad_gap == 0 && gap_subset > 0,
            fmt("%ld pairs: plain violations %ld (worst %.4f); gap subset %ld, violations %ld (worst %.4f)", trials,
                bad_plain, worst_plain, gap_subset, bad_gap, worst_gap)};
}

//
// 4: orthogonal-projection instance
//
Outcome remark_instance()
{
    const auto inst = named_instance("remark-projections");
    const auto c    = certify(inst.a1, inst.a2);
    const auto& h   = c.hyp;

    const double tol = 1e-12;
    const bool   nums = std::abs(c.sigma1 - 1) <= tol && std::abs(c.sigma2 - 1) <= tol && std::abs(c.dist - 1) <= tol &&
                      std::abs(c.qdist - 1) <= tol && std::abs(c.bound_main - 2) <= tol;
    const bool flags = h.index_equal && h.delta_range_zero && h.delta_kernel_zero && h.rank1 == 1 && h.rank2 == 2;

    return {nums && flags, fmt("sigma=(%.15g, %.15g) dist=%.15g qdist=%.15g bound_main=%.15g ranks=(%ld, %ld)",
                               c.sigma1, c.sigma2, c.dist, c.qdist, c.bound_main, long(h.rank1), long(h.rank2))};
}

//
// 5: hypothesis-necessity witness
//
Outcome nested_rank_drop()
{
    const auto inst = named_instance("nested-rank-drop(0.01)");
    const auto c    = certify(inst.a1, inst.a2);

    const double expect_main = 4 * 0.01 / 1.01;
    const double expect_cr   = 0.01 * (3 / 1.01 + 1 / 0.01);
    const bool   ok          = std::abs(c.qdist - 1) <= 1e-6 && std::abs(c.bound_main - expect_main) <= 1e-6 &&
                    c.qdist > c.bound_main && !c.main_applicable && std::abs(c.bound_cr_plain - expect_cr) <= 1e-6 &&
                    c.qdist <= c.bound_cr_plain * (1 + 1e-8);
    return {ok, fmt("qdist=%.9f would-be bound_main=%.6f main_applicable=%d bound_cr_plain=%.6f", c.qdist,
                    c.bound_main, int(c.main_applicable), c.bound_cr_plain)};
}

//
// 6: gap identities in C^8
//
Outcome gap_identities()
{
    const Index n   = 8;
    long        bad = 0, lt1 = 0;
    double      e1 = 0, e2 = 0, e3 = 0;

    for (std::uint64_t i = 0; i < 1000; ++i) {
        CounterRng rng(hash64(606, i));
        const Index dv = rng.uniform_int(0, n);

        Subspace<double> v = random_subspace(n, dv, rng.child(0).key());
        Subspace<double> w;
        const bool       rotated = i % 3 == 0;
        if (rotated) {
            // nearby subspace of equal dimension
            const double t = rng.uniform() * 0.5;
            w = Subspace<double>::span_of((small_rotation(n, t, rng.child(1).key()) * v.basis()).eval());
        } else {
            w = random_subspace(n, rng.uniform_int(0, n), rng.child(1).key());
        }

        const auto   g  = gap_report(v, w);
        const double d1 = std::abs(g.gap_hat - eigen_norm(projector(v) - projector(w)));
        const double d2 = std::abs(directed_gap(v.complement(), w.complement()) - g.delta_wv);
        e1 = std::max(e1, d1);
        e2 = std::max(e2, d2);
        bool ok = d1 <= 1e-10 && d2 <= 1e-10;
        // gap < 1 is exercised on the rotated family; elsewhere a directed
        // gap of exactly 1 may round to just below it
        if (rotated) {
            ++lt1;
            e3 = std::max(e3, g.gap_diff);
            ok = ok && g.gap_hat < 1 && g.gap_diff <= 1e-10;
        }
        if (!ok)
            ++bad;
    }
    return {bad == 0 && lt1 > 0, fmt("1000 pairs, %ld rotated with gap<1: max errors %.2e / %.2e / %.2e, failures %ld", lt1,
                                     e1, e2, e3, bad)};
}

//
// 7: vanishing gap difference ⟺ both or neither cross projection surjective
//
Outcome deltazero_equivalence()
{
    long disagreements = 0;
    long counts[4]     = {0, 0, 0, 0};

    for (std::uint64_t i = 0; i < 1000; ++i) {
        CounterRng   rng(hash64(707, i));
        const Index  n    = rng.uniform_int(2, 8);
        const int    kind = int(i % 4);
        const Matrix u    = random_unitary(n, rng.child(0).key());

        Subspace<double> v, w;
        switch (kind) {
            case 0: { // equal dimensions
                const Index d = rng.uniform_int(1, n);
                v = random_subspace(n, d, rng.child(1).key());
                w = random_subspace(n, d, rng.child(2).key());
                break;
            }
            case 1: { // V ⊊ W
                const Index dw = rng.uniform_int(1, n);
                const Index dv = rng.uniform_int(0, dw - 1);
                const Matrix inner = random_unitary(dw, rng.child(1).key());
                w = Subspace<double>::from_orthonormal(u.leftCols(dw));
                v = Subspace<double>::from_orthonormal((u.leftCols(dw) * inner.leftCols(dv)).eval());
                if (rng.uniform() < 0.5)
                    std::swap(v, w);
                break;
            }
            case 2: { // V ⊥ W
                const Index dv = rng.uniform_int(1, n - 1);
                const Index dw = rng.uniform_int(1, n - dv);
                v = Subspace<double>::from_orthonormal(u.leftCols(dv));
                w = Subspace<double>::from_orthonormal(u.middleCols(dv, dw));
                break;
            }
            default: // independent dimensions and positions
                v = random_subspace(n, rng.uniform_int(0, n), rng.child(1).key());
                w = random_subspace(n, rng.uniform_int(0, n), rng.child(2).key());
        }

        const bool small = gap_report(v, w).gap_diff <= 1e-8;
        const bool both_or_neither = classify_cross_projections(v, w) != SurjectivityClass::Mixed;
        if (small != both_or_neither)
            ++disagreements;
        ++counts[kind];
    }
    return {disagreements == 0, fmt("equal %ld, nested %ld, orthogonal %ld, random %ld: disagreements %ld", counts[0],
                                    counts[1], counts[2], counts[3], disagreements)};
}

//
// 8: Sylvester residual and separation bound
//
Outcome sylvester_suite()
{
    long   bad   = 0;
    double worst = 0;

    for (std::uint64_t i = 0; i < 1000; ++i) {
        CounterRng  rng(hash64(808, i));
        const Index m = rng.uniform_int(1, 6), n = rng.uniform_int(1, 6);

        Eigen::VectorXd et(m), es(n);
        for (Index k = 0; k < m; ++k)
            et(k) = 6 * rng.uniform() - 3;
        const double a = (et.maxCoeff() + et.minCoeff()) / 2, r = (et.maxCoeff() - et.minCoeff()) / 2;
        for (Index k = 0; k < n; ++k)
            es(k) = a + (rng.uniform() < 0.5 ? -1 : 1) * (r + 0.01 + 3 * rng.uniform());

        const Matrix us = random_unitary(n, rng.child(0).key());
        const Matrix ut = random_unitary(m, rng.child(1).key());
        const Matrix s  = us * es.cast<Complex>().asDiagonal() * us.adjoint();
        const Matrix t  = ut * et.cast<Complex>().asDiagonal() * ut.adjoint();

        Matrix y(m, n);
        for (Index jj = 0; jj < n; ++jj)
            for (Index ii = 0; ii < m; ++ii)
                y(ii, jj) = Complex(rng.normal(), rng.normal());

        const auto   sol = solve_sylvester(s, t, y);
        const double yn  = eigen_norm(y);
        const double res = eigen_norm(sol.x * s - t * sol.x - y);
        if (!sol.separation) {
            ++bad;
            continue;
        }
        const double xb = yn / *sol.separation;
        worst           = std::max(worst, eigen_norm(sol.x) / xb);
        if (!(res <= 1e-10 * std::max(1.0, yn)) || !le_slack(eigen_norm(sol.x), xb, 1e-10))
            ++bad;
    }

    const auto   tight = solve_sylvester(Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 1.0),
                                         Matrix::Constant(1, 1, 1.0));
    const double gap   = std::abs(eigen_norm(tight.x) - 1.0 / 2.0);
    return {bad == 0 && gap <= 1e-12,
            fmt("1000 systems: failures %ld, worst ‖X‖δ/‖Y‖ %.6f; scalar tight case |‖X‖ − ‖Y‖/δ| = %.1e", bad, worst,
                gap)};
}

//
// 9: proof traces
//
Outcome proof_traces()
{
    CorpusConfig cfg;
    const Ensemble applicable_kinds[] = {Ensemble::EqualRank, Ensemble::SmallPerturbation, Ensemble::RemarkStyle};

    long   main_bad = 0, kernel_branch = 0;
    double worst_summand = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto p = draw_pair(applicable_kinds[i % 3], cfg, hash64(909, i));
        const auto h = check_hypotheses(p.a1, p.a2);

        MainTrace t;
        if (h.delta_range_zero) {
            t = proof_trace_main(p.a1, p.a2);
        } else if (h.delta_kernel_zero) {
            ++kernel_branch;
            t = proof_trace_main(adjoint(p.a1), adjoint(p.a2));
        } else {
            ++main_bad;
            continue;
        }
        bool ok = t.all_hold();
        for (double s : t.summand) {
            ok = ok && le_slack(s, t.dist, 1e-8);
            if (t.dist > 0)
                worst_summand = std::max(worst_summand, s / t.dist);
        }
        if (!ok)
            ++main_bad;
    }

    long   cr_bad = 0;
    double worst_vanishing = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto p = draw_pair(Ensemble::Unrestricted, cfg, hash64(910, i));
        const auto t = proof_trace_cr(p.a1, p.a2);
        worst_vanishing = std::max(worst_vanishing, t.vanishing_term);
        if (!t.all_hold() || !(t.vanishing_term <= 1e-10))
            ++cr_bad;
    }

    return {main_bad == 0 && cr_bad == 0,
            fmt("main: 1000 applicable pairs (%ld via adjoints), failures %ld, worst summand/dist %.4f; "
                "cr: 1000 unrestricted pairs, failures %ld, max vanishing term %.1e",
                kernel_branch, main_bad, worst_summand, cr_bad, worst_vanishing)};
}

//
// 10: small perturbations of equal rank
//
Outcome small_perturbations()
{
    CorpusConfig cfg;
    long         bad = 0;
    double       worst_gap = 0, worst_wedin = 0;

    for (std::uint64_t i = 0; i < 1000; ++i) {
        CounterRng   rng(hash64(1010, i));
        const Index  m = rng.uniform_int(1, 10), n = rng.uniform_int(1, 10);
        const Index  r = rng.uniform_int(1, std::min(m, n));
        const Matrix a1 = generate({m, n, r, cfg.sigma_min, cfg.sigma_max, rng.child(0).key()});

        // ‖E‖ ≤ eps < σ₁/3 ≤ max(σ₁,σ₂)/3
        const double eps = reduced_min_modulus(a1) * rng.log_uniform(1e-4, 0.33);
        const Matrix a2  = perturb_rank_preserving(a1, eps, rng.child(1).key());

        const auto sp = small_pert_implication(a1, a2);
        if (sp.applies)
            worst_gap = std::max(worst_gap, sp.gap_hat);
        if (sp.wedin_rhs > 0)
            worst_wedin = std::max(worst_wedin, sp.pinv_dist / sp.wedin_rhs);

        // independent recheck of the pseudoinverse inequality
        const Matrix p1 = pinv(a1), p2 = pinv(a2);
        const bool   wedin = le_slack(eigen_norm(p1 - p2), 2 * eigen_norm(p1) * eigen_norm(p2) * eigen_norm(a1 - a2), 1e-8);

        if (!sp.ranks_equal || !sp.applies || !sp.gap_lt1 || !sp.wedin_holds || !wedin)
            ++bad;
    }
    return {bad == 0, fmt("1000 pairs: failures %ld, max gap %.4f, worst pinv ratio %.4f", bad, worst_gap, worst_wedin)};
}

//
// 11: polar and partial-isometry axioms
//
Outcome polar_axioms()
{
    long bad = 0, square = 0;
    double worst_proj = 0, worst_dil = 0;

    for (std::uint64_t i = 0; i < 2000; ++i) {
        CounterRng   rng(hash64(1111, i));
        const Index  m = rng.uniform_int(1, 8), n = rng.uniform_int(1, 8);
        const Index  k = std::min(m, n);
        const Matrix a = generate({m, n, rng.uniform_int(1, k), 0.1, 10, rng.child(0).key()});
        const Matrix b = generate({m, n, rng.uniform_int(1, k), 0.1, 10, rng.child(1).key()});

        const auto p  = polar_decompose(a);
        const double e1 = eigen_norm(p.q.adjoint() * p.q - p.corange_projector());
        const double e2 = eigen_norm(p.q * p.q.adjoint() - p.range_projector());
        worst_proj      = std::max({worst_proj, e1, e2});
        bool ok         = e1 <= 1e-8 && e2 <= 1e-8 && angular_factor_adjoint_check(a);

        if (m == n) {
            ++square;
            const auto ext = unitary_extension(a);
            ok = ok && eigen_norm(ext.u.adjoint() * ext.u - Matrix::Identity(n, n)) <= 1e-8 &&
                 eigen_norm(ext.u.adjoint() * ext.q - p.corange_projector()) <= 1e-8 &&
                 eigen_norm(a - ext.u * p.h) <= 1e-8 * std::max(1.0, eigen_norm(a));
        }

        const double qd  = eigen_norm(p.q - polar_decompose(b).q);
        const double qdd = eigen_norm(polar_decompose(dilate_to_index_zero(a)).q - polar_decompose(dilate_to_index_zero(b)).q);
        worst_dil        = std::max(worst_dil, std::abs(qd - qdd));
        ok               = ok && std::abs(qd - qdd) <= 1e-10;

        if (!ok)
            ++bad;
    }
    return {bad == 0, fmt("2000 matrices (%ld square): failures %ld, max projector residual %.1e, max dilation "
                          "change %.1e",
                          square, bad, worst_proj, worst_dil)};
}

//
// 12: continuity scan around a rank drop
//
Outcome resolvent_scan()
{
    Matrix a   = Matrix::Zero(2, 2);
    a(0, 0)    = 1;
    const double d64   = max_step_distance(scan_resolvent_angular(a, 0, 0.1, 64));
    const double d128  = max_step_distance(scan_resolvent_angular(a, 0, 0.1, 128));
    const double ratio = d64 / d128;
    return {std::abs(ratio - 2.0) <= 0.1 * 2.0, fmt("max step 64: %.6f, 128: %.6f, ratio %.4f", d64, d128, ratio)};
}

//
// CLI exit-code contract
//
int run_cli(const std::string& cli, const std::vector<std::string>& args)
{
    std::string cmd = "'" + cli + "'";
    for (const auto& a : args)
        cmd += " '" + a + "'";
    cmd += " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_contract(const std::string& cli)
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("polarpert_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto path = [&](const char* f) { return (dir / f).string(); };

    std::vector<std::string> notes;
    bool                     ok = true;
    auto expect = [&](const char* what, int got, int want) {
        notes.push_back(fmt("%s=%d", what, got));
        ok = ok && got == want;
    };

    expect("named", run_cli(cli, {"named", "--name", "remark-projections", "--a1", path("r1.json"), "--a2", path("r2.json")}), 0);
    expect("certify", run_cli(cli, {"certify", "--a1", path("r1.json"), "--a2", path("r2.json"), "--out", path("c.json")}), 0);
    if (fs::exists(path("c.json"))) {
        const Json c = read_json_file(path("c.json"));
        ok           = ok && std::abs(c.at("bound_main").get<double>() - 2.0) <= 1e-12;
    } else {
        ok = false;
    }

    run_cli(cli, {"named", "--name", "nested-rank-drop(0.01)", "--a1", path("n1.json"), "--a2", path("n2.json")});
    expect("require-main", run_cli(cli, {"certify", "--a1", path("n1.json"), "--a2", path("n2.json"), "--require-main"}), 1);
    expect("mismatch", run_cli(cli, {"certify", "--a1", path("r1.json"), "--a2", path("n2.json")}), 2);
    expect("badflag", run_cli(cli, {"certify", "--nope"}), 2);

    // gen → polar → Q·|A| reproduces the matrix
    expect("gen", run_cli(cli, {"gen", "--shape", "5x3", "--rank", "2", "--seed", "9", "--out", path("g.json")}), 0);
    expect("polar", run_cli(cli, {"polar", "--a", path("g.json"), "--out", path("p.json")}), 0);
    if (fs::exists(path("p.json"))) {
        const Json   pj = read_json_file(path("p.json"));
        const Matrix g  = read_matrix(path("g.json"));
        const Matrix q  = matrix_from_json(pj.at("q"));
        const Matrix h  = matrix_from_json(pj.at("h"));
        ok              = ok && eigen_norm(g - q * h) <= 1e-9;
    } else {
        ok = false;
    }

    expect("corpus", run_cli(cli, {"corpus", "--trials", "10000", "--seed", "42", "--shape", "8x6", "--report", path("r.json")}), 0);
    if (fs::exists(path("r.json")))
        ok = ok && read_json_file(path("r.json")).at("failures").empty();
    else
        ok = false;

    fs::remove_all(dir);

    std::string detail;
    for (const auto& n : notes)
        detail += (detail.empty() ? "" : " ") + n;
    return {ok, "exit codes " + detail};
}

} // namespace

int main(int argc, char** argv)
{
    run("1", "main bound on the default corpus", [] { return main_corpus(false); });
    run("2", "improved bound on the default corpus", [] { return main_corpus(true); });
    run("3", "universal estimate on unrestricted pairs", universal_estimate);
    run("4", "orthogonal projections instance", remark_instance);
    run("5", "nested rank drop witness", nested_rank_drop);
    run("6", "gap identities in C^8", gap_identities);
    run("7", "gap difference vs surjectivity class", deltazero_equivalence);
    run("8", "Sylvester solver and separation bound", sylvester_suite);
    run("9", "proof traces", proof_traces);
    run("10", "small perturbations of equal rank", small_perturbations);
    run("11", "polar and partial isometry axioms", polar_axioms);
    run("12", "resolvent scan continuity", resolvent_scan);

    if (argc > 1) {
        const std::string cli = argv[1];
        run("CLI", "exit-code contract and flagship corpus", [&] { return cli_contract(cli); });
    }

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
