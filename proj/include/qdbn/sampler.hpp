#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qdbn/chimera.hpp"
#include "qdbn/ising.hpp"
#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"

namespace qdbn {

// Knobs for the simulated annealer backend. beta_eff is the scale folded into
// the QUBO; reads are grouped per gauge; voting_threshold r is the minimum
// within-chain agreement fraction for a read to decode.
struct SamplerConfig {
    double beta_eff = 2.0;
    int reads_per_gauge = 100;
    std::vector<std::string> gauges = {"I", "G", "-G", "-I"};
    double voting_threshold = 0.5;
    double j_fm = 1.0;
    NoiseModel noise;
    HardwareRanges ranges;
    int mcmc_sweeps = 100;   // equilibration sweeps per read
    int gibbs_burn = 50;     // gibbs backend: burn-in sweeps per chain
    int gibbs_samples = 10000;  // gibbs backend: total samples
    std::uint64_t seed = 0;

    void validate() const;
};

struct SampleBatch {
    // rows = reads, columns = hardware qubits, entries +1/-1
    Eigen::Matrix<signed char, Eigen::Dynamic, Eigen::Dynamic> reads;
    std::string gauge;  // gauge the reads were drawn under (metadata)

    int n_reads() const { return static_cast<int>(reads.rows()); }
    int n_qubits() const { return static_cast<int>(reads.cols()); }
};

// Boltzmann samples at inverse temperature beta over the model's node set.
// Every read is an independent restart from a uniform random state followed
// by `sweeps` single-site heat-bath sweeps in randomized site order. When
// `blocks` is nonempty, each sweep additionally proposes one whole-block
// Metropolis flip per block; with blocks = qubit chains this keeps the chain
// degrees of freedom mixing when the chain coupling dwarfs everything else.
// Per-read randomness comes from streams derived by read index, so results
// do not depend on scheduling.
SampleBatch sample_ising(const IsingModel& model, double beta, int n_reads, int sweeps,
                         Rng& rng, const std::vector<std::vector<int>>& blocks = {});

struct DecodeResult {
    MatrixXd visible;  // accepted reads x n_visible, entries 0/1
    MatrixXd hidden;   // accepted reads x n_hidden
    int rejected = 0;
    int total = 0;

    int accepted() const { return total - rejected; }
};

// Per read, per chain: the chain decodes to its majority spin when the
// agreeing fraction reaches r; a read is discarded when any of its chains
// falls short. Exact ties (fraction 1/2, only reachable at r = 0.5) are
// broken by a fair coin.
DecodeResult decode_chains(const SampleBatch& batch, const Embedding& emb, double r,
                           Rng& rng);

struct ChimeraDiagnostics {
    int accepted = 0;
    int rejected = 0;
    std::vector<int> accepted_per_gauge;
    double rescale_min = 1.0;  // smallest scale used across gauges
};

// Full simulated-annealer pipeline: QUBO -> Ising -> chain embedding, then per
// gauge: gauge transform, rescale into programming ranges, control-error
// noise, sampling at beta_eff adjusted for the rescale, un-gauging, chain
// decode. Accepted reads from all gauges pool into one sample average in 0/1
// units. Masked (missing-pair) vh entries are reported as 0. Throws
// NumericalError when every read is rejected.
ExpectationSet estimate_expectations_chimera(const RbmParams& p, const SamplerConfig& cfg,
                                             const ChimeraGraph& graph,
                                             const Embedding& emb,
                                             ChimeraDiagnostics* diag = nullptr);

// Plain block-Gibbs estimate on the RBM itself (visible and hidden layers
// alternately resampled); sample means over all chains after burn-in.
ExpectationSet estimate_expectations_gibbs(const RbmParams& p, int burn_sweeps,
                                           int n_samples, Rng& rng);

// The pluggable model-expectation backend used by pretraining.
struct Estimator {
    virtual ~Estimator() = default;
    virtual ExpectationSet estimate(const RbmParams& p, const MatrixXd& batch,
                                    Rng& rng) = 0;
    virtual std::string name() const = 0;
};

// kind: "exact" | "cd1" | "gibbs" | "chimera". The chimera backend requires a
// graph and keeps a per-size embedding cache; it derives a fresh seed from
// the caller's rng on every call so training iterations see fresh reads.
std::unique_ptr<Estimator> make_estimator(const std::string& kind,
                                          const SamplerConfig& cfg,
                                          const ChimeraGraph* graph = nullptr);

}  // namespace qdbn
