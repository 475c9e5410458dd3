#ifndef POLARPERT_GENLAB_HPP
#define POLARPERT_GENLAB_HPP
//
// Seeded instance generation and the randomized corpus runner.
//
// Random streams come from a counter-based generator: the i-th draw of the
// stream with key k is mix64(k + (i+1)·γ), γ = 0x9E3779B97F4A7C15, with mix64
// the SplitMix64 finalizer. Child streams (one per trial, one per factor)
// are keyed by
//
//     hash64(parent, index) = mix64(mix64(parent) ^ ((index + 1)·γ))
//
// so a trial's instance depends only on (master seed, trial index).
//

#include "polarpert/perturb.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polarpert {

std::uint64_t mix64(std::uint64_t z);
std::uint64_t hash64(std::uint64_t parent, std::uint64_t index);

class CounterRng
{
public:
    explicit CounterRng(std::uint64_t key)
        : key_(key)
    {}

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();

    // uniform in [0, 1)
    double uniform();

    // uniform in [lo, hi], both inclusive
    Index uniform_int(Index lo, Index hi);

    // standard normal (Box-Muller)
    double normal();

    double log_uniform(double lo, double hi);

    CounterRng child(std::uint64_t index) const { return CounterRng(hash64(key_, index)); }

private:
    std::uint64_t         key_;
    std::uint64_t         counter_ = 0;
    std::optional<double> spare_normal_;
};

struct InstanceSpec
{
    Index         rows      = 1;
    Index         cols      = 1;
    Index         rank      = 1;
    double        sigma_min = 1.0;
    double        sigma_max = 1.0;
    std::uint64_t seed      = 0;

    void validate() const;
};

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of diag(R) moved into Q
Matrix random_unitary(Index n, std::uint64_t seed);

// U·diag(s)·V* with exactly spec.rank nonzero singular values, log-uniform
// in [sigma_min, sigma_max]
Matrix generate(const InstanceSpec& spec);

// a + E with ‖E‖ ≤ epsilon and the same numerical rank; requires
// epsilon < σ_a/2
Matrix perturb_rank_preserving(const Matrix& a, double epsilon, std::uint64_t seed,
                               const TolerancePolicy& tol = {});

struct NamedInstance
{
    Matrix      a1;
    Matrix      a2;
    std::string note;
};

// "remark-projections", "intro-counterexample(eps)", "nested-rank-drop(eps)";
// eps defaults to 0.01 when the parenthesized argument is omitted
NamedInstance named_instance(const std::string& name);

enum class Ensemble { EqualRank, SmallPerturbation, RemarkStyle, Unrestricted };

const char* to_string(Ensemble e);

struct EnsembleMix
{
    double equal_rank   = 0.40;
    double small_pert   = 0.30;
    double remark_style = 0.15;
    double unrestricted = 0.15;
};

struct CorpusConfig
{
    long          trials = 1;
    std::uint64_t seed   = 0;

    // fixed shape; otherwise rows and cols are drawn from [1, max_dim]
    std::optional<std::pair<Index, Index>> shape;
    Index                                  max_dim = 12;
    // fixed rank (clamped to the shape); otherwise drawn per trial
    std::optional<Index> rank;

    double      sigma_min = 0.1;
    double      sigma_max = 10.0;
    EnsembleMix mix;

    unsigned        threads = 1;
    TolerancePolicy tol;
};

struct CorpusFailure
{
    long          trial = 0;
    std::uint64_t seed  = 0;
    std::string   check;
};

struct CorpusReport
{
    long                          trials = 0;
    std::vector<CorpusFailure>    failures;
    std::map<std::string, double> worst_slack; // max qdist/bound over applicable trials
    double                        runtime_seconds = 0;

    std::map<std::string, long> ensemble_counts;
    std::map<std::string, long> applicable_counts;
};

// one drawn pair with the ensemble it came from
struct CorpusPair
{
    Ensemble      ensemble = Ensemble::EqualRank;
    std::uint64_t seed     = 0;
    Matrix        a1;
    Matrix        a2;
};

// the pair run_corpus uses for trial `index`
CorpusPair draw_corpus_pair(const CorpusConfig& config, long index);

// draw from one ensemble with a given child seed
CorpusPair draw_pair(Ensemble ensemble, const CorpusConfig& config, std::uint64_t seed);

CorpusReport run_corpus(const CorpusConfig& config);

} // namespace polarpert

#endif // POLARPERT_GENLAB_HPP
