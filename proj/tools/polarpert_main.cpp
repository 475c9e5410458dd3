//
// polarpert: command-line front end.
//
// Exit codes: 0 all requested checks passed, 1 a verified inequality failed
// beyond slack, 2 invalid input or flags.
//

#include "polarpert/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

using namespace polarpert;

namespace {

constexpr int exit_ok     = 0;
constexpr int exit_failed = 1;
constexpr int exit_input  = 2;

struct Options
{
    std::string a1, a2, a, s, t, y, v, w;
    std::string out;
    std::string format = "json";
    std::string shape;
    std::string center = "0,0";
    std::string name;

    std::optional<double> tol;
    long                  trials    = 1;
    std::uint64_t         seed      = 0;
    std::optional<Index>  rank;
    double                sigma_min = 0.1;
    double                sigma_max = 10.0;
    double                radius    = 0.1;
    int                   samples   = 64;
    unsigned              threads   = 1;
    bool                  require_main = false;
};

std::pair<Index, Index> parse_shape(const std::string& text)
{
    const auto x = text.find_first_of("xX");
    try {
        if (x == std::string::npos)
            throw std::invalid_argument(text);
        std::size_t used_r = 0, used_c = 0;
        const long  r = std::stol(text.substr(0, x), &used_r);
        const long  c = std::stol(text.substr(x + 1), &used_c);
        if (used_r != x || used_c != text.size() - x - 1 || r < 1 || c < 1)
            throw std::invalid_argument(text);
        return {r, c};
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidInput, "--shape must look like RxC with positive R and C, got '" + text + "'");
    }
}

Complex parse_complex(const std::string& text)
{
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos)
            throw std::invalid_argument(text);
        std::size_t used_re = 0, used_im = 0;
        const double re = std::stod(text.substr(0, comma), &used_re);
        const double im = std::stod(text.substr(comma + 1), &used_im);
        if (used_re != comma || used_im != text.size() - comma - 1 || !std::isfinite(re) || !std::isfinite(im))
            throw std::invalid_argument(text);
        return {re, im};
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidInput, "--center must look like re,im, got '" + text + "'");
    }
}

const std::string& required(const std::string& path, const char* flag)
{
    if (path.empty())
        throw Error(ErrorKind::InvalidInput, std::string(flag) + " is required");
    return path;
}

TolerancePolicy policy(const Options& o)
{
    TolerancePolicy tol;
    if (o.tol)
        tol.bound_slack = *o.tol;
    tol.validate();
    return tol;
}

void emit(const Options& o, const Json& j)
{
    if (o.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(o.out, j);
}

int cmd_polar(const Options& o)
{
    const auto   tol = policy(o);
    const Matrix a   = read_matrix(required(o.a, "--a"));
    const auto   p   = polar_decompose(a, tol);

    Json j = to_json(p);
    j["reconstruction_residual"] = spectral_norm((a - p.q * p.h).eval());
    emit(o, j);
    return exit_ok;
}

int cmd_gap(const Options& o)
{
    const auto tol = policy(o);
    const auto v   = read_subspace(required(o.v, "--v"), tol);
    const auto w   = read_subspace(required(o.w, "--w"), tol);

    Json j = to_json(gap_report(v.subspace, w.subspace));
    j["v_was_orthonormal"] = v.was_orthonormal;
    j["w_was_orthonormal"] = w.was_orthonormal;
    emit(o, j);
    return exit_ok;
}

int cmd_classify(const Options& o)
{
    const auto tol = policy(o);
    const auto v   = read_subspace(required(o.v, "--v"), tol);
    const auto w   = read_subspace(required(o.w, "--w"), tol);

    const auto g = gap_report(v.subspace, w.subspace);
    Json       j = {{"class", to_string(classify_cross_projections(v.subspace, w.subspace, tol))},
                    {"dim_v", v.subspace.dim()},
                    {"dim_w", w.subspace.dim()},
                    {"contraction_rank", v.subspace.dim() == 0 || w.subspace.dim() == 0
                                             ? Index(0)
                                             : contraction_rank<double>(v.subspace.basis().adjoint() * w.subspace.basis(), tol)},
                    {"gap_diff", g.gap_diff}};
    emit(o, j);
    return exit_ok;
}

int cmd_sylvester(const Options& o)
{
    const auto   tol = policy(o);
    const Matrix s   = read_matrix(required(o.s, "--s"));
    const Matrix t   = read_matrix(required(o.t, "--t"));
    const Matrix y   = read_matrix(required(o.y, "--y"));

    const auto sol = solve_sylvester(s, t, y, tol);

    const double y_norm      = spectral_norm(y);
    const bool   residual_ok = sol.residual <= tol.residual_tol * std::max(1.0, y_norm);
    const bool   bound_ok =
        !sol.bound_value || spectral_norm(sol.x) <= *sol.bound_value * (1.0 + tol.bound_slack);

    Json j = to_json(sol);
    j["residual_holds"] = residual_ok;
    j["bound_holds"]    = bound_ok;
    emit(o, j);
    return residual_ok && bound_ok ? exit_ok : exit_failed;
}

int cmd_certify(const Options& o)
{
    const auto   tol = policy(o);
    const Matrix a1  = read_matrix(required(o.a1, "--a1"));
    const Matrix a2  = read_matrix(required(o.a2, "--a2"));
    const auto   c   = certify(a1, a2, tol);

    emit(o, to_json(c));

    if (!c.all_hold())
        return exit_failed;
    if (o.require_main && !(c.main_applicable && c.main_holds))
        return exit_failed;
    return exit_ok;
}

int cmd_trace(const Options& o)
{
    const auto   tol = policy(o);
    const Matrix a1  = read_matrix(required(o.a1, "--a1"));
    const Matrix a2  = read_matrix(required(o.a2, "--a2"));

    const auto hyp = check_hypotheses(a1, a2, tol);
    const auto cr  = proof_trace_cr(a1, a2, tol);
    bool       ok  = cr.all_hold();

    Json j = {{"cr", to_json(cr)}, {"main", nullptr}, {"main_branch", nullptr}};
    if (hyp.delta_range_zero) {
        const auto mt = proof_trace_main(a1, a2, tol);
        j["main"]        = to_json(mt);
        j["main_branch"] = "range";
        ok               = ok && mt.all_hold();
    } else if (hyp.delta_kernel_zero) {
        const auto mt = proof_trace_main(adjoint(a1), adjoint(a2), tol);
        j["main"]        = to_json(mt);
        j["main_branch"] = "kernel";
        ok               = ok && mt.all_hold();
    }
    emit(o, j);
    return ok ? exit_ok : exit_failed;
}

int cmd_corpus(const Options& o)
{
    CorpusConfig cfg;
    cfg.tol       = policy(o);
    cfg.trials    = o.trials;
    cfg.seed      = o.seed;
    cfg.rank      = o.rank;
    cfg.sigma_min = o.sigma_min;
    cfg.sigma_max = o.sigma_max;
    cfg.threads   = o.threads;
    if (!o.shape.empty())
        cfg.shape = parse_shape(o.shape);

    const auto rep = run_corpus(cfg);
    emit(o, to_json(rep));
    return rep.failures.empty() ? exit_ok : exit_failed;
}

int cmd_scan(const Options& o)
{
    const auto   tol  = policy(o);
    const Matrix a    = read_matrix(required(o.a, "--a"));
    const auto   scan = scan_resolvent_angular(a, parse_complex(o.center), o.radius, o.samples, tol);

    bool ok = true;
    for (const auto& step : scan)
        if (step.bound && step.qdist > *step.bound * (1.0 + tol.bound_slack))
            ok = false;

    Json j = to_json(scan);
    j["bounds_hold"] = ok;
    emit(o, j);
    return ok ? exit_ok : exit_failed;
}

int cmd_gen(const Options& o)
{
    if (o.shape.empty())
        throw Error(ErrorKind::InvalidInput, "--shape is required");
    const auto [m, n] = parse_shape(o.shape);

    InstanceSpec spec{m, n, o.rank.value_or(std::min(m, n)), o.sigma_min, o.sigma_max, o.seed};
    emit(o, matrix_to_json(generate(spec)));
    return exit_ok;
}

int cmd_named(const Options& o)
{
    const auto inst = named_instance(required(o.name, "--name"));

    // --a1/--a2 name output files here
    if (!o.a1.empty())
        write_json_file(o.a1, matrix_to_json(inst.a1));
    if (!o.a2.empty())
        write_json_file(o.a2, matrix_to_json(inst.a2));

    emit(o, {{"name", o.name}, {"note", inst.note}, {"a1", matrix_to_json(inst.a1)}, {"a2", matrix_to_json(inst.a2)}});
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Polar decomposition perturbation bounds: factors, gaps, certificates and corpora"};
    app.require_subcommand(1, 1);

    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "write JSON here instead of stdout");
        sub->add_option("--tol", o.tol, "multiplicative slack on verified inequalities")->check(CLI::NonNegativeNumber);
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json"}));
    };

    auto* polar = app.add_subcommand("polar", "angular factor, |A| and reduced minimum modulus");
    polar->add_option("--a", o.a, "matrix JSON")->required();
    add_common(polar);

    auto* gap = app.add_subcommand("gap", "directed gaps, gap metric and gap difference of two subspaces");
    auto* classify = app.add_subcommand("classify", "surjectivity class of the cross projections");
    for (auto* sub : {gap, classify}) {
        sub->add_option("--v", o.v, "subspace JSON")->required();
        sub->add_option("--w", o.w, "subspace JSON")->required();
        add_common(sub);
    }

    auto* sylv = app.add_subcommand("sylvester", "solve XS - TX = Y for Hermitian S, T");
    sylv->add_option("--s", o.s, "matrix JSON")->required();
    sylv->add_option("--t", o.t, "matrix JSON")->required();
    sylv->add_option("--y", o.y, "matrix JSON")->required();
    add_common(sylv);

    auto* cert  = app.add_subcommand("certify", "hypotheses and bound certificate for a pair");
    auto* trace = app.add_subcommand("trace", "step-by-step proof traces for a pair");
    for (auto* sub : {cert, trace}) {
        sub->add_option("--a1", o.a1, "matrix JSON")->required();
        sub->add_option("--a2", o.a2, "matrix JSON")->required();
        add_common(sub);
    }
    cert->add_flag("--require-main", o.require_main, "fail unless the main bound applies and holds");

    auto* corpus = app.add_subcommand("corpus", "seeded randomized corpus over all checks");
    corpus->add_option("--trials", o.trials, "number of trials");
    corpus->add_option("--seed", o.seed, "master seed");
    corpus->add_option("--shape", o.shape, "fixed shape RxC");
    corpus->add_option("--rank", o.rank, "fixed rank")->check(CLI::PositiveNumber);
    corpus->add_option("--sigma-min", o.sigma_min, "smallest nonzero singular value");
    corpus->add_option("--sigma-max", o.sigma_max, "largest singular value");
    corpus->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    corpus->add_option("--report", o.out, "alias of --out");
    add_common(corpus);

    auto* scan = app.add_subcommand("scan", "angular factor of A - lambda I around a circle");
    scan->add_option("--a", o.a, "matrix JSON")->required();
    scan->add_option("--center", o.center, "circle center re,im");
    scan->add_option("--radius", o.radius, "circle radius");
    scan->add_option("--samples", o.samples, "points on the circle");
    add_common(scan);

    auto* gen = app.add_subcommand("gen", "seeded random matrix with prescribed rank");
    gen->add_option("--shape", o.shape, "RxC")->required();
    gen->add_option("--rank", o.rank, "rank (default min(R, C))")->check(CLI::PositiveNumber);
    gen->add_option("--seed", o.seed, "seed");
    gen->add_option("--sigma-min", o.sigma_min, "smallest nonzero singular value");
    gen->add_option("--sigma-max", o.sigma_max, "largest singular value");
    add_common(gen);

    auto* named = app.add_subcommand("named", "built-in instance pairs");
    named->add_option("--name", o.name, "remark-projections | intro-counterexample(eps) | nested-rank-drop(eps)")
        ->required();
    named->add_option("--a1", o.a1, "also write A1 to this path");
    named->add_option("--a2", o.a2, "also write A2 to this path");
    add_common(named);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "polarpert: " << e.what() << '\n';
        return exit_input;
    }

    if (o.threads == 0)
        o.threads = std::max(1u, std::thread::hardware_concurrency());

    try {
        if (*polar)    return cmd_polar(o);
        if (*gap)      return cmd_gap(o);
        if (*classify) return cmd_classify(o);
        if (*sylv)     return cmd_sylvester(o);
        if (*cert)     return cmd_certify(o);
        if (*trace)    return cmd_trace(o);
        if (*corpus)   return cmd_corpus(o);
        if (*scan)     return cmd_scan(o);
        if (*gen)      return cmd_gen(o);
        if (*named)    return cmd_named(o);
    } catch (const Error& e) {
        std::cerr << "polarpert: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}
