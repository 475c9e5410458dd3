#include "polarpert/genlab.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

namespace polarpert {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

// phases e^{-i t H} for Hermitian H with ‖H‖ = 1
Matrix unitary_flow(Index n, double t, CounterRng& rng)
{
    Matrix z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            z(i, j) = Complex(rng.normal(), rng.normal());

    const Matrix h  = 0.5 * (z + z.adjoint());
    const auto   eh = eigh(h);
    const double scale = eh.eigvals.cwiseAbs().maxCoeff();

    Eigen::VectorXcd phases(n);
    for (Index k = 0; k < n; ++k)
        phases(k) = std::polar(1.0, -t * eh.eigvals(k) / scale);
    return eh.q * phases.asDiagonal() * eh.q.adjoint();
}

Eigen::VectorXd log_uniform_values(Index count, double lo, double hi, CounterRng& rng)
{
    Eigen::VectorXd s(count);
    for (Index k = 0; k < count; ++k)
        s(k) = rng.log_uniform(lo, hi);
    return s;
}

Matrix compose(const Matrix& u, const Eigen::VectorXd& s, const Matrix& v)
{
    return u * s.cast<Complex>().asDiagonal() * v.adjoint();
}

double parse_parameter(const std::string& name, const std::string& stem, double fallback)
{
    if (name == stem)
        return fallback;

    const std::string open = stem + "(";
    if (name.size() <= open.size() + 1 || name.compare(0, open.size(), open) != 0 || name.back() != ')')
        throw Error(ErrorKind::UnknownInstance, "unknown named instance '" + name + "'");

    const std::string arg = name.substr(open.size(), name.size() - open.size() - 1);
    std::size_t       used = 0;
    double            eps  = 0;
    try {
        eps = std::stod(arg, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidInput, "named instance parameter '" + arg + "' is not a number");
    }
    if (used != arg.size() || !std::isfinite(eps) || !(eps > 0))
        throw Error(ErrorKind::InvalidInput, "named instance parameter must be a positive number");
    return eps;
}

bool stem_matches(const std::string& name, const std::string& stem)
{
    return name == stem || name.rfind(stem + "(", 0) == 0;
}

//
// corpus ensembles
//

using Shape = std::pair<Index, Index>;

bool range_orthogonal_feasible(Index m, Index n) { return m >= 3 && std::min(m, n) >= 2; }

bool remark_feasible(const Shape& s)
{
    return range_orthogonal_feasible(s.first, s.second) || range_orthogonal_feasible(s.second, s.first);
}

std::optional<Shape> pick_shape(const CorpusConfig& cfg, CounterRng& rng, bool remark)
{
    if (cfg.shape) {
        if (remark && !remark_feasible(*cfg.shape))
            return std::nullopt;
        return cfg.shape;
    }

    if (!remark)
        return Shape{rng.uniform_int(1, cfg.max_dim), rng.uniform_int(1, cfg.max_dim)};

    if (cfg.max_dim < 3)
        return std::nullopt;
    for (;;) {
        const Shape s{rng.uniform_int(2, cfg.max_dim), rng.uniform_int(2, cfg.max_dim)};
        if (remark_feasible(s))
            return s;
    }
}

Index pick_rank(const CorpusConfig& cfg, CounterRng& rng, Index max_rank)
{
    if (cfg.rank)
        return std::clamp<Index>(*cfg.rank, 1, max_rank);
    return rng.uniform_int(1, max_rank);
}

// m×n pair whose ranges are mutually orthogonal and whose ranks differ
std::pair<Matrix, Matrix> range_orthogonal_pair(Index m, Index n, const CorpusConfig& cfg, CounterRng& rng)
{
    const Index k = std::min(m, n);

    std::vector<std::pair<Index, Index>> ranks;
    for (Index r1 = 1; r1 <= k; ++r1)
        for (Index r2 = 1; r2 <= k; ++r2)
            if (r1 != r2 && r1 + r2 <= m)
                ranks.emplace_back(r1, r2);

    auto pick             = rng.child(0);
    const auto [r1, r2]   = ranks[static_cast<std::size_t>(pick.uniform_int(0, Index(ranks.size()) - 1))];
    const Matrix u        = random_unitary(m, rng.child(1).key());
    const Matrix v1       = random_unitary(n, rng.child(2).key());
    const Matrix v2       = random_unitary(n, rng.child(3).key());
    auto         sing_rng = rng.child(4);

    const Eigen::VectorXd s1 = log_uniform_values(r1, cfg.sigma_min, cfg.sigma_max, sing_rng);
    const Eigen::VectorXd s2 = log_uniform_values(r2, cfg.sigma_min, cfg.sigma_max, sing_rng);

    return {compose(u.middleCols(0, r1), s1, v1.leftCols(r1)), compose(u.middleCols(r1, r2), s2, v2.leftCols(r2))};
}

InstanceSpec spec_for(const Shape& s, Index rank, const CorpusConfig& cfg, std::uint64_t seed)
{
    return {s.first, s.second, rank, cfg.sigma_min, cfg.sigma_max, seed};
}

//
// corpus trial
//

struct TrialOutcome
{
    Ensemble                      ensemble = Ensemble::EqualRank;
    std::uint64_t                 seed     = 0;
    std::vector<std::string>      failed;
    std::map<std::string, double> slack;
    std::vector<std::string>      applicable;
};

void record_slack(TrialOutcome& out, const std::string& name, double qdist, double bound)
{
    out.applicable.push_back(name);
    if (bound > 0)
        out.slack[name] = qdist / bound;
}

TrialOutcome run_trial(const CorpusPair& pair, const TolerancePolicy& tol)
{
    TrialOutcome out;
    out.ensemble = pair.ensemble;
    out.seed     = pair.seed;

    auto check = [&](bool ok, const char* name) {
        if (!ok)
            out.failed.emplace_back(name);
    };

    try {
        const Matrix&     a1 = pair.a1;
        const Matrix&     a2 = pair.a2;
        const Certificate c  = certify(a1, a2, tol);
        const Hypotheses& h  = c.hyp;

        check(c.main_holds, "main");
        check(c.improved_holds, "improved");
        check(c.cr_plain_holds, "cr_plain");
        check(c.cr_gap_holds, "cr_gap");
        check(c.bound_improved <= c.bound_main * (1.0 + 1e-12), "improved_le_main");

        if (c.main_applicable) {
            record_slack(out, "main", c.qdist, c.bound_main);
            record_slack(out, "improved", c.qdist, c.bound_improved);
        }
        record_slack(out, "cr_plain", c.qdist, c.bound_cr_plain);
        if (c.cr_gap_applicable)
            record_slack(out, "cr_gap", c.qdist, *c.bound_cr_gap);

        // the ensembles are built to satisfy the main hypothesis
        if (pair.ensemble != Ensemble::Unrestricted)
            check(c.main_applicable, "main_applicability");
        if (pair.ensemble == Ensemble::RemarkStyle)
            check(h.rank1 != h.rank2, "remark_unequal_ranks");
        if (h.same_shape && h.rank1 == h.rank2)
            check(h.delta_range_zero && h.delta_kernel_zero, "equal_rank_delta_zero");

        // duality: Q_{A*} = Q_A* and σ_{A*} = σ_A
        {
            const auto   s1 = polar_decompose(adjoint(a1), tol);
            const auto   s2 = polar_decompose(adjoint(a2), tol);
            const double qd = spectral_norm((s1.q - s2.q).eval());
            check(std::abs(qd - c.qdist) <= 1e-10 && std::abs(s1.sigma - c.sigma1) <= 1e-10 * c.sigma1 &&
                      std::abs(s2.sigma - c.sigma2) <= 1e-10 * c.sigma2,
                  "duality");
        }

        // δ(R(A₁),R(A₂)) ≤ dist/σ₁, and dist/max(σ₁,σ₂) once δ̂ < 1
        {
            const double slack = 1.0 + tol.bound_slack;
            bool ok = h.range_gap.delta_vw <= c.dist / c.sigma1 * slack &&
                      h.range_gap.delta_wv <= c.dist / c.sigma2 * slack;
            if (h.gap_range_lt1)
                ok = ok && h.range_gap.gap_hat <= c.dist / std::max(c.sigma1, c.sigma2) * slack;
            check(ok, "gap_lemma");
        }

        check(proof_trace_cr(a1, a2, tol).all_hold(), "trace_cr");

        if (h.delta_range_zero) {
            out.applicable.emplace_back("trace_main");
            check(proof_trace_main(a1, a2, tol).all_hold(), "trace_main");
        } else if (h.delta_kernel_zero) {
            out.applicable.emplace_back("trace_main");
            check(proof_trace_main(adjoint(a1), adjoint(a2), tol).all_hold(), "trace_main");
        }

        if (h.rank1 == h.rank2) {
            const auto sp = small_pert_implication(a1, a2, tol);
            check(sp.implication_holds() && sp.wedin_holds, "small_pert");
        }
    } catch (const Error& e) {
        out.failed.push_back(std::string("error:") + to_string(e.kind()));
    }

    return out;
}

} // namespace

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t hash64(std::uint64_t parent, std::uint64_t index)
{
    return mix64(mix64(parent) ^ ((index + 1) * golden_gamma));
}

std::uint64_t CounterRng::next_u64()
{
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
}

double CounterRng::uniform()
{
    return double(next_u64() >> 11) * 0x1.0p-53;
}

Index CounterRng::uniform_int(Index lo, Index hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<Index>(next_u64() % span);
}

double CounterRng::normal()
{
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    // u1 in (0, 1] keeps the log finite
    const double u1 = (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r  = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_normal_   = r * std::sin(th);
    return r * std::cos(th);
}

double CounterRng::log_uniform(double lo, double hi)
{
    if (lo == hi)
        return lo;
    return std::exp(std::log(lo) + uniform() * (std::log(hi) - std::log(lo)));
}

void InstanceSpec::validate() const
{
    if (rows < 1 || cols < 1)
        throw Error(ErrorKind::InvalidSpec, "instance shape must be at least 1x1");
    if (rank < 1 || rank > std::min(rows, cols))
        throw Error(ErrorKind::InvalidSpec, "rank must lie in [1, min(rows, cols)]");
    if (!std::isfinite(sigma_min) || !std::isfinite(sigma_max) || !(sigma_min > 0) || !(sigma_min <= sigma_max))
        throw Error(ErrorKind::InvalidSpec, "need 0 < sigma_min <= sigma_max");
}

Matrix random_unitary(Index n, std::uint64_t seed)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidSpec, "random_unitary needs n >= 1");

    CounterRng rng(seed);
    Matrix     z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            z(i, j) = Complex(rng.normal(), rng.normal()) / std::numbers::sqrt2;

    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix                       q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix&                r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0)
            q.col(j) *= r(j, j) / mag;
    }
    return q;
}

Matrix generate(const InstanceSpec& spec)
{
    spec.validate();

    CounterRng   rng(spec.seed);
    const Matrix u = random_unitary(spec.rows, rng.child(0).key());
    const Matrix v = random_unitary(spec.cols, rng.child(1).key());

    auto                  sing_rng = rng.child(2);
    const Eigen::VectorXd s        = log_uniform_values(spec.rank, spec.sigma_min, spec.sigma_max, sing_rng);

    return compose(u.leftCols(spec.rank), s, v.leftCols(spec.rank));
}

//
// A = U_r Σ V_r*  ↦  U_r' (Σ + D) V_r'*  with U' = U e^{-itH_u}, V' = V e^{-itH_v},
// ‖H‖ = 1, t = ε/(3(σ_max + ε)) and |D_kk| ≤ ε/3; this keeps ‖E‖ ≤ ε and
// every nonzero singular value above σ_A − ε/3.
//
Matrix perturb_rank_preserving(const Matrix& a, double epsilon, std::uint64_t seed, const TolerancePolicy& tol)
{
    const auto s = svd(a, tol);
    if (s.rank == 0)
        throw Error(ErrorKind::ZeroOperator, "cannot perturb a numerically zero matrix");

    const double sigma_a = s.singvals(s.rank - 1);
    if (!std::isfinite(epsilon) || epsilon < 0 || !(epsilon < sigma_a / 2))
        throw Error(ErrorKind::EpsilonTooLarge,
                    "epsilon must lie in [0, σ_A/2) = [0, " + std::to_string(sigma_a / 2) + ")");

    CounterRng   rng(seed);
    const double t = epsilon / (3.0 * (s.sigma_max() + epsilon));

    auto         u_rng = rng.child(0);
    auto         v_rng = rng.child(1);
    auto         d_rng = rng.child(2);
    const Matrix u     = s.u * unitary_flow(a.rows(), t, u_rng);
    const Matrix v     = s.v * unitary_flow(a.cols(), t, v_rng);

    Eigen::VectorXd sv = s.singvals.head(s.rank);
    for (Index k = 0; k < s.rank; ++k)
        sv(k) += (2.0 * d_rng.uniform() - 1.0) * epsilon / 3.0;

    return compose(u.leftCols(s.rank), sv, v.leftCols(s.rank));
}

NamedInstance named_instance(const std::string& name)
{
    if (name == "remark-projections") {
        NamedInstance inst;
        inst.a1 = Matrix::Zero(3, 3);
        inst.a2 = Matrix::Zero(3, 3);
        inst.a1(0, 0) = 1;
        inst.a2(1, 1) = 1;
        inst.a2(2, 2) = 1;
        inst.note = "A1 = P_span{e1}, A2 = P_span{e2,e3} in C^3: unequal ranks, vanishing gap differences";
        return inst;
    }

    if (stem_matches(name, "intro-counterexample")) {
        const double  eps = parse_parameter(name, "intro-counterexample", 0.01);
        NamedInstance inst;
        inst.a1   = (eps * eps) * Matrix::Identity(2, 2);
        inst.a2   = eps * Matrix::Identity(2, 2);
        inst.note = "A1 = eps^2 I replaces the zero operator of the original pair (operators must be nonzero), "
                    "A2 = eps I";
        return inst;
    }

    if (stem_matches(name, "nested-rank-drop")) {
        const double  eps = parse_parameter(name, "nested-rank-drop", 0.01);
        NamedInstance inst;
        inst.a1 = Matrix::Zero(2, 2);
        inst.a2 = Matrix::Zero(2, 2);
        inst.a1(0, 0) = 1;
        inst.a1(1, 1) = eps;
        inst.a2(0, 0) = 1;
        inst.note = "A1 = diag(1, eps), A2 = diag(1, 0): nested ranges and kernels, gap differences equal to one";
        return inst;
    }

    throw Error(ErrorKind::UnknownInstance, "unknown named instance '" + name + "'");
}

const char* to_string(Ensemble e)
{
    switch (e) {
        case Ensemble::EqualRank:         return "equal_rank";
        case Ensemble::SmallPerturbation: return "small_perturbation";
        case Ensemble::RemarkStyle:       return "remark_style";
        case Ensemble::Unrestricted:      return "unrestricted";
    }
    return "unknown";
}

CorpusPair draw_pair(Ensemble ensemble, const CorpusConfig& cfg, std::uint64_t seed)
{
    CounterRng rng(seed);
    auto       shape_rng = rng.child(1);

    std::optional<Shape> shape;
    if (ensemble == Ensemble::RemarkStyle) {
        shape = pick_shape(cfg, shape_rng, true);
        if (!shape)
            ensemble = Ensemble::EqualRank;
    }
    if (!shape)
        shape = pick_shape(cfg, shape_rng, false);

    const auto [m, n] = *shape;
    const Index k     = std::min(m, n);

    CorpusPair pair;
    pair.ensemble = ensemble;
    pair.seed     = seed;

    switch (ensemble) {
        case Ensemble::EqualRank: {
            const Index r = pick_rank(cfg, shape_rng, k);
            pair.a1       = generate(spec_for(*shape, r, cfg, rng.child(2).key()));
            pair.a2       = generate(spec_for(*shape, r, cfg, rng.child(3).key()));
            break;
        }
        case Ensemble::SmallPerturbation: {
            const Index r = pick_rank(cfg, shape_rng, k);
            pair.a1       = generate(spec_for(*shape, r, cfg, rng.child(2).key()));

            auto         eps_rng = rng.child(4);
            const double sigma_a = reduced_min_modulus(pair.a1, cfg.tol);
            const double eps     = sigma_a * eps_rng.log_uniform(1e-6, 0.45);
            pair.a2              = perturb_rank_preserving(pair.a1, eps, rng.child(3).key(), cfg.tol);
            break;
        }
        case Ensemble::RemarkStyle: {
            auto       variant_rng = rng.child(5);
            const bool by_range    = range_orthogonal_feasible(m, n);
            const bool by_kernel   = range_orthogonal_feasible(n, m);
            const bool use_kernel  = by_kernel && (!by_range || variant_rng.uniform() < 0.5);

            auto pair_rng = rng.child(2);
            if (use_kernel) {
                // orthogonal coranges: adjoints of an n×m range-orthogonal pair
                auto [b1, b2] = range_orthogonal_pair(n, m, cfg, pair_rng);
                pair.a1       = b1.adjoint();
                pair.a2       = b2.adjoint();
            } else {
                std::tie(pair.a1, pair.a2) = range_orthogonal_pair(m, n, cfg, pair_rng);
            }
            break;
        }
        case Ensemble::Unrestricted: {
            const Index r1 = rng.child(6).uniform_int(1, k);
            const Index r2 = rng.child(7).uniform_int(1, k);
            pair.a1        = generate(spec_for(*shape, r1, cfg, rng.child(2).key()));
            pair.a2        = generate(spec_for(*shape, r2, cfg, rng.child(3).key()));
            break;
        }
    }
    return pair;
}

CorpusPair draw_corpus_pair(const CorpusConfig& cfg, long index)
{
    const std::uint64_t seed = hash64(cfg.seed, static_cast<std::uint64_t>(index));

    const EnsembleMix& mix   = cfg.mix;
    const double       total = mix.equal_rank + mix.small_pert + mix.remark_style + mix.unrestricted;
    if (!(total > 0) || mix.equal_rank < 0 || mix.small_pert < 0 || mix.remark_style < 0 || mix.unrestricted < 0)
        throw Error(ErrorKind::InvalidInput, "ensemble mix weights must be nonnegative with a positive sum");

    const double u = CounterRng(seed).child(0).uniform() * total;

    Ensemble e = Ensemble::Unrestricted;
    if (u < mix.equal_rank)
        e = Ensemble::EqualRank;
    else if (u < mix.equal_rank + mix.small_pert)
        e = Ensemble::SmallPerturbation;
    else if (u < mix.equal_rank + mix.small_pert + mix.remark_style)
        e = Ensemble::RemarkStyle;

    return draw_pair(e, cfg, seed);
}

CorpusReport run_corpus(const CorpusConfig& cfg)
{
    if (cfg.trials < 1)
        throw Error(ErrorKind::InvalidInput, "corpus needs at least one trial");
    if (cfg.max_dim < 1)
        throw Error(ErrorKind::InvalidInput, "corpus max_dim must be positive");
    if (cfg.shape && (cfg.shape->first < 1 || cfg.shape->second < 1))
        throw Error(ErrorKind::InvalidInput, "corpus shape must be at least 1x1");
    if (!std::isfinite(cfg.sigma_min) || !std::isfinite(cfg.sigma_max) || !(cfg.sigma_min > 0) ||
        !(cfg.sigma_min <= cfg.sigma_max))
        throw Error(ErrorKind::InvalidInput, "corpus needs 0 < sigma_min <= sigma_max");
    cfg.tol.validate();

    const auto start = std::chrono::steady_clock::now();

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));

    auto work = [&](long i) {
        CorpusPair pair;
        try {
            pair = draw_corpus_pair(cfg, i);
        } catch (const Error& e) {
            outcomes[i].seed = hash64(cfg.seed, static_cast<std::uint64_t>(i));
            outcomes[i].failed.push_back(std::string("error:") + to_string(e.kind()));
            return;
        }
        outcomes[i] = run_trial(pair, cfg.tol);
    };

    const unsigned threads = std::max(1u, cfg.threads);
    if (threads == 1) {
        for (long i = 0; i < cfg.trials; ++i)
            work(i);
    } else {
        std::atomic<long>        next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (long i = next++; i < cfg.trials; i = next++)
                    work(i);
            });
        for (auto& th : pool)
            th.join();
    }

    // aggregation in trial order
    CorpusReport rep;
    rep.trials = cfg.trials;
    for (long i = 0; i < cfg.trials; ++i) {
        const TrialOutcome& o = outcomes[i];
        ++rep.ensemble_counts[to_string(o.ensemble)];
        for (const auto& name : o.applicable)
            ++rep.applicable_counts[name];
        for (const auto& [name, ratio] : o.slack) {
            auto it = rep.worst_slack.find(name);
            if (it == rep.worst_slack.end() || ratio > it->second)
                rep.worst_slack[name] = ratio;
        }
        for (const auto& name : o.failed)
            rep.failures.push_back({i, o.seed, name});
    }

    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace polarpert
