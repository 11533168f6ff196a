#include "qdbn/sampler.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qdbn/errors.hpp"

namespace qdbn {

void SamplerConfig::validate() const {
    if (!(beta_eff > 0.0)) throw std::invalid_argument("sampler: beta_eff must be > 0");
    if (reads_per_gauge < 1) throw std::invalid_argument("sampler: reads_per_gauge < 1");
    if (voting_threshold < 0.5 || voting_threshold > 1.0)
        throw std::invalid_argument("sampler: voting threshold must be in [0.5, 1]");
    if (!(j_fm > 0.0)) throw std::invalid_argument("sampler: j_fm must be > 0");
    if (mcmc_sweeps < 0) throw std::invalid_argument("sampler: negative mcmc_sweeps");
    if (gauges.empty()) throw std::invalid_argument("sampler: no gauges selected");
}

namespace {

// Flattened coupling structure for the sweep inner loop.
struct CompiledModel {
    int n = 0;
    std::vector<double> h;
    std::vector<int> offsets;  // size n+1, into nbr/jval
    std::vector<int> nbr;
    std::vector<double> jval;

    explicit CompiledModel(const IsingModel& m) : n(m.num_nodes()), h(n) {
        for (int i = 0; i < n; ++i) h[i] = m.h[i];
        std::vector<int> deg(n, 0);
        for (const Coupling& c : m.couplings) {
            ++deg[c.a];
            ++deg[c.b];
        }
        offsets.assign(n + 1, 0);
        for (int i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + deg[i];
        nbr.resize(offsets[n]);
        jval.resize(offsets[n]);
        std::vector<int> fill = offsets;
        for (const Coupling& c : m.couplings) {
            nbr[fill[c.a]] = c.b;
            jval[fill[c.a]++] = c.j;
            nbr[fill[c.b]] = c.a;
            jval[fill[c.b]++] = c.j;
        }
    }

    double field(int i, const std::vector<signed char>& s) const {
        double f = h[i];
        for (int t = offsets[i]; t < offsets[i + 1]; ++t) f += jval[t] * s[nbr[t]];
        return f;
    }
};

struct BoundaryTerm {
    int inside;
    int outside;
    double j;
};

struct BlockMoves {
    // per block: members, per-member fields, couplings crossing the boundary
    std::vector<std::vector<int>> members;
    std::vector<std::vector<std::pair<int, double>>> member_h;
    std::vector<std::vector<BoundaryTerm>> boundary;

    BlockMoves(const IsingModel& m, const std::vector<std::vector<int>>& blocks) {
        std::vector<int> of_block(m.num_nodes(), -1);
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (int q : blocks[b]) of_block[q] = static_cast<int>(b);
        members.resize(blocks.size());
        member_h.resize(blocks.size());
        boundary.resize(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            members[b] = blocks[b];
            for (int q : blocks[b]) member_h[b].emplace_back(q, m.h[q]);
        }
        for (const Coupling& c : m.couplings) {
            int ba = of_block[c.a], bb = of_block[c.b];
            if (ba == bb) continue;  // internal to one block (or both free)
            if (ba >= 0) boundary[ba].push_back({c.a, c.b, c.j});
            if (bb >= 0) boundary[bb].push_back({c.b, c.a, c.j});
        }
    }
};

}  // namespace

SampleBatch sample_ising(const IsingModel& model, double beta, int n_reads, int sweeps,
                         Rng& rng, const std::vector<std::vector<int>>& blocks) {
    if (!(beta > 0.0)) throw std::invalid_argument("sample_ising: beta must be > 0");
    if (n_reads < 1) throw std::invalid_argument("sample_ising: n_reads < 1");
    if (sweeps < 0) throw std::invalid_argument("sample_ising: negative sweep count");
    if (!model.h.allFinite()) throw NumericalError("sample_ising: non-finite field");
    for (const Coupling& c : model.couplings)
        if (!std::isfinite(c.j)) throw NumericalError("sample_ising: non-finite coupling");

    const CompiledModel cm(model);
    const BlockMoves bm(model, blocks);
    const std::uint64_t base = rng();

    SampleBatch batch;
    batch.reads.resize(n_reads, cm.n);

    std::vector<signed char> spins(cm.n);
    std::vector<int> order(cm.n);
    for (int read = 0; read < n_reads; ++read) {
        Rng stream = make_stream(base, static_cast<std::uint64_t>(read));
        for (int i = 0; i < cm.n; ++i) spins[i] = bernoulli(stream, 0.5) ? 1 : -1;

        for (int sweep = 0; sweep < sweeps; ++sweep) {
            std::iota(order.begin(), order.end(), 0);
            shuffle(order, stream);
            for (int i : order) {
                const double p_up = sigmoid(2.0 * beta * cm.field(i, spins));
                spins[i] = uniform01(stream) < p_up ? 1 : -1;
            }
            for (std::size_t b = 0; b < bm.members.size(); ++b) {
                double delta = 0.0;  // E(flipped) - E(current)
                for (const auto& [q, hq] : bm.member_h[b]) delta += 2.0 * hq * spins[q];
                for (const BoundaryTerm& t : bm.boundary[b])
                    delta += 2.0 * t.j * spins[t.inside] * spins[t.outside];
                if (delta <= 0.0 || uniform01(stream) < std::exp(-beta * delta)) {
                    for (int q : bm.members[b]) spins[q] = -spins[q];
                }
            }
        }
        for (int i = 0; i < cm.n; ++i) batch.reads(read, i) = spins[i];
    }
    return batch;
}

DecodeResult decode_chains(const SampleBatch& batch, const Embedding& emb, double r,
                           Rng& rng) {
    if (r < 0.5 || r > 1.0)
        throw std::invalid_argument("decode_chains: voting threshold outside [0.5, 1]");
    if (batch.n_qubits() != emb.hardware_qubits)
        throw std::invalid_argument("decode_chains: qubit count mismatch");

    const int n = emb.n_visible, m = emb.n_hidden;
    const int total = batch.n_reads();

    auto chain_sum = [&](const std::vector<int>& chain, int read) {
        int s = 0;
        for (int q : chain) s += batch.reads(read, q);
        return s;
    };
    auto majority_fraction = [](int sum, int len) {
        const int agree = (len + std::abs(sum)) / 2;
        return static_cast<double>(agree) / static_cast<double>(len);
    };

    std::vector<int> accepted_rows;
    for (int read = 0; read < total; ++read) {
        bool ok = true;
        for (int i = 0; ok && i < n; ++i) {
            const auto& chain = emb.visible_chains[i];
            if (majority_fraction(chain_sum(chain, read),
                                  static_cast<int>(chain.size())) < r - 1e-12)
                ok = false;
        }
        for (int j = 0; ok && j < m; ++j) {
            const auto& chain = emb.hidden_chains[j];
            if (majority_fraction(chain_sum(chain, read),
                                  static_cast<int>(chain.size())) < r - 1e-12)
                ok = false;
        }
        if (ok) accepted_rows.push_back(read);
    }

    DecodeResult out;
    out.total = total;
    out.rejected = total - static_cast<int>(accepted_rows.size());
    out.visible.resize(accepted_rows.size(), n);
    out.hidden.resize(accepted_rows.size(), m);

    for (std::size_t row = 0; row < accepted_rows.size(); ++row) {
        const int read = accepted_rows[row];
        for (int i = 0; i < n; ++i) {
            const int sum = chain_sum(emb.visible_chains[i], read);
            int spin = sum > 0 ? 1 : (sum < 0 ? -1 : (bernoulli(rng, 0.5) ? 1 : -1));
            out.visible(row, i) = (spin + 1) / 2;
        }
        for (int j = 0; j < m; ++j) {
            const int sum = chain_sum(emb.hidden_chains[j], read);
            int spin = sum > 0 ? 1 : (sum < 0 ? -1 : (bernoulli(rng, 0.5) ? 1 : -1));
            out.hidden(row, j) = (spin + 1) / 2;
        }
    }
    return out;
}

ExpectationSet estimate_expectations_chimera(const RbmParams& p, const SamplerConfig& cfg,
                                             const ChimeraGraph& graph,
                                             const Embedding& emb,
                                             ChimeraDiagnostics* diag) {
    cfg.validate();
    p.validate();
    if (p.n_visible != emb.n_visible || p.n_hidden != emb.n_hidden)
        throw std::invalid_argument("chimera estimate: embedding size mismatch");

    const IsingModel logical = qubo_to_ising(rbm_to_qubo(p, cfg.beta_eff));
    const IsingModel hw = embed_ising(logical, emb, cfg.j_fm);

    std::vector<std::vector<int>> blocks;
    for (const auto& chain : emb.visible_chains)
        if (chain.size() > 1) blocks.push_back(chain);
    for (const auto& chain : emb.hidden_chains)
        if (chain.size() > 1) blocks.push_back(chain);

    const std::vector<Gauge> all_gauges = make_gauges(graph);
    ChimeraDiagnostics local;
    ChimeraDiagnostics& d = diag ? *diag : local;
    d = ChimeraDiagnostics{};

    std::vector<MatrixXd> v_parts, h_parts;
    long long rows_total = 0;

    for (const std::string& gname : cfg.gauges) {
        int gi = -1;
        for (std::size_t t = 0; t < all_gauges.size(); ++t)
            if (all_gauges[t].name == gname) gi = static_cast<int>(t);
        if (gi < 0) throw std::invalid_argument("chimera estimate: unknown gauge " + gname);
        const Gauge& gauge = all_gauges[gi];

        IsingModel gauged = apply_gauge(hw, gauge);
        auto [scaled, scale] = rescale_to_hardware(gauged, cfg.ranges);
        d.rescale_min = std::min(d.rescale_min, scale);

        Rng noise_rng = make_stream(cfg.seed, static_cast<std::uint64_t>(gi), 101);
        IsingModel noisy = apply_noise(scaled, cfg.noise, cfg.ranges, noise_rng);

        Rng read_rng = make_stream(cfg.seed, static_cast<std::uint64_t>(gi), 202);
        SampleBatch batch = sample_ising(noisy, cfg.beta_eff / scale, cfg.reads_per_gauge,
                                         cfg.mcmc_sweeps, read_rng, blocks);
        batch.gauge = gauge.name;

        // undo the gauge so the decode sees original-frame spins
        for (int q = 0; q < batch.n_qubits(); ++q)
            if (gauge.signs[q] < 0)
                for (int read = 0; read < batch.n_reads(); ++read)
                    batch.reads(read, q) = -batch.reads(read, q);

        Rng decode_rng = make_stream(cfg.seed, static_cast<std::uint64_t>(gi), 303);
        DecodeResult dec = decode_chains(batch, emb, cfg.voting_threshold, decode_rng);
        d.accepted += dec.accepted();
        d.rejected += dec.rejected;
        d.accepted_per_gauge.push_back(dec.accepted());
        if (dec.accepted() > 0) {
            rows_total += dec.accepted();
            v_parts.push_back(std::move(dec.visible));
            h_parts.push_back(std::move(dec.hidden));
        }
    }

    if (rows_total == 0) throw NumericalError("chimera estimate: no accepted samples");

    ExpectationSet e(p.n_visible, p.n_hidden);
    MatrixXd vh_acc = MatrixXd::Zero(p.n_visible, p.n_hidden);
    for (std::size_t t = 0; t < v_parts.size(); ++t) {
        e.v += v_parts[t].colwise().sum().transpose();
        e.h += h_parts[t].colwise().sum().transpose();
        vh_acc += v_parts[t].transpose() * h_parts[t];
    }
    const double denom = static_cast<double>(rows_total);
    e.v /= denom;
    e.h /= denom;
    e.vh = vh_acc / denom;

    for (const auto& [i, j] : emb.missing_pairs) e.vh(i, j) = 0.0;
    return e;
}

ExpectationSet estimate_expectations_gibbs(const RbmParams& p, int burn_sweeps,
                                           int n_samples, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("gibbs estimate: n_samples < 1");
    if (burn_sweeps < 0) throw std::invalid_argument("gibbs estimate: negative burn-in");
    const int n = p.n_visible, m = p.n_hidden;

    const int per_chain = 5000;
    const int n_chains = (n_samples + per_chain - 1) / per_chain;
    const std::uint64_t base = rng();

    ExpectationSet acc(n, m);
    VectorXd v(n), h(m);
    long long kept = 0;
    for (int chain = 0; chain < n_chains; ++chain) {
        Rng stream = make_stream(base, static_cast<std::uint64_t>(chain));
        const int quota =
            std::min(per_chain, n_samples - chain * per_chain);
        for (int i = 0; i < n; ++i) v[i] = bernoulli(stream, 0.5) ? 1.0 : 0.0;
        for (int t = 0; t < burn_sweeps + quota; ++t) {
            VectorXd ph = hidden_conditional(p, v);
            for (int j = 0; j < m; ++j) h[j] = bernoulli(stream, ph[j]) ? 1.0 : 0.0;
            VectorXd pv = visible_conditional(p, h);
            for (int i = 0; i < n; ++i) v[i] = bernoulli(stream, pv[i]) ? 1.0 : 0.0;
            if (t >= burn_sweeps) {
                ++kept;
                acc.v += v;
                acc.h += h;
                acc.vh += v * h.transpose();
            }
        }
    }
    acc.v /= static_cast<double>(kept);
    acc.h /= static_cast<double>(kept);
    acc.vh /= static_cast<double>(kept);
    return acc;
}

namespace {

struct ExactEstimator final : Estimator {
    ExpectationSet estimate(const RbmParams& p, const MatrixXd&, Rng&) override {
        return exact_expectations(p);
    }
    std::string name() const override { return "exact"; }
};

struct Cd1Estimator final : Estimator {
    ExpectationSet estimate(const RbmParams& p, const MatrixXd& batch, Rng& rng) override {
        return cd_expectations(p, batch, rng);
    }
    std::string name() const override { return "cd1"; }
};

struct GibbsEstimator final : Estimator {
    int burn;
    int samples;
    GibbsEstimator(int b, int s) : burn(b), samples(s) {}
    ExpectationSet estimate(const RbmParams& p, const MatrixXd&, Rng& rng) override {
        return estimate_expectations_gibbs(p, burn, samples, rng);
    }
    std::string name() const override { return "gibbs"; }
};

struct ChimeraEstimator final : Estimator {
    SamplerConfig cfg;
    ChimeraGraph graph;
    std::map<std::pair<int, int>, Embedding> embeddings;

    ChimeraEstimator(const SamplerConfig& c, const ChimeraGraph& g) : cfg(c), graph(g) {}

    ExpectationSet estimate(const RbmParams& p, const MatrixXd&, Rng& rng) override {
        auto key = std::make_pair(p.n_visible, p.n_hidden);
        auto it = embeddings.find(key);
        if (it == embeddings.end())
            it = embeddings.emplace(key, embed_rbm(p.n_visible, p.n_hidden, graph)).first;
        SamplerConfig call_cfg = cfg;
        call_cfg.seed = rng();
        return estimate_expectations_chimera(p, call_cfg, graph, it->second);
    }
    std::string name() const override { return "chimera"; }
};

}  // namespace

std::unique_ptr<Estimator> make_estimator(const std::string& kind,
                                          const SamplerConfig& cfg,
                                          const ChimeraGraph* graph) {
    if (kind == "exact") return std::make_unique<ExactEstimator>();
    if (kind == "cd1") return std::make_unique<Cd1Estimator>();
    if (kind == "gibbs")
        return std::make_unique<GibbsEstimator>(cfg.gibbs_burn, cfg.gibbs_samples);
    if (kind == "chimera") {
        if (!graph)
            throw std::invalid_argument("make_estimator: chimera backend needs a graph");
        return std::make_unique<ChimeraEstimator>(cfg, *graph);
    }
    throw std::invalid_argument("make_estimator: unknown backend '" + kind + "'");
}

}  // namespace qdbn
