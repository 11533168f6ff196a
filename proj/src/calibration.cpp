#include "qdbn/calibration.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdbn {

double vh_l1_error(const ExpectationSet& a, const ExpectationSet& b,
                   const MaskMatrix* mask) {
    if (a.vh.rows() != b.vh.rows() || a.vh.cols() != b.vh.cols())
        throw std::invalid_argument("vh_l1_error: shape mismatch");
    if (!mask) return (a.vh - b.vh).cwiseAbs().mean();
    if (mask->rows() != a.vh.rows() || mask->cols() != a.vh.cols())
        throw std::invalid_argument("vh_l1_error: mask shape mismatch");
    double acc = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < a.vh.rows(); ++i)
        for (Eigen::Index j = 0; j < a.vh.cols(); ++j) {
            if ((*mask)(i, j)) continue;
            acc += std::abs(a.vh(i, j) - b.vh(i, j));
            ++count;
        }
    if (count == 0) throw std::invalid_argument("vh_l1_error: fully masked table");
    return acc / static_cast<double>(count);
}

namespace {

RbmParams draw_test_rbm(int n, int m, double spread, Rng& rng,
                        const MaskMatrix* mask) {
    RbmParams p(n, m);
    if (mask) p.mask = *mask;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (!p.mask(i, j)) p.weights(i, j) = uniform_range(rng, -spread, spread);
    for (int i = 0; i < n; ++i) p.visible_bias[i] = uniform_range(rng, -spread, spread);
    for (int j = 0; j < m; ++j) p.hidden_bias[j] = uniform_range(rng, -spread, spread);
    return p;
}

}  // namespace

CalibrationReport calibrate_with(int n_visible, int n_hidden,
                                 const CalibrationConfig& cfg,
                                 const ExpectationFn& sampler, Rng& rng,
                                 const MaskMatrix* mask) {
    if (cfg.candidates.empty())
        throw std::invalid_argument("calibrate: empty candidate grid");
    if (cfg.repetitions < 1)
        throw std::invalid_argument("calibrate: repetitions < 1");
    if (!(cfg.spread > 0.0)) throw std::invalid_argument("calibrate: spread must be > 0");

    const bool exact_ref = n_visible + n_hidden <= cfg.reference_guard;
    const std::uint64_t base = rng();

    std::vector<double> err(cfg.candidates.size(), 0.0);
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        Rng prng = make_stream(base, static_cast<std::uint64_t>(rep), 0);
        RbmParams p = draw_test_rbm(n_visible, n_hidden, cfg.spread, prng, mask);

        ExpectationSet ref(n_visible, n_hidden);
        if (exact_ref) {
            ref = exact_expectations(p, cfg.reference_guard);
        } else {
            Rng rrng = make_stream(base, static_cast<std::uint64_t>(rep), 900);
            ref = estimate_expectations_gibbs(p, cfg.reference_burn,
                                              cfg.reference_samples, rrng);
        }

        for (std::size_t ci = 0; ci < cfg.candidates.size(); ++ci) {
            Rng srng = make_stream(base, static_cast<std::uint64_t>(rep), 1 + ci);
            ExpectationSet est = sampler(p, cfg.candidates[ci], srng);
            err[ci] += vh_l1_error(est, ref, mask);
        }
    }
    for (double& e : err) e /= cfg.repetitions;

    CalibrationReport report;
    report.n_visible = n_visible;
    report.n_hidden = n_hidden;
    report.candidates = cfg.candidates;
    report.l1_errors = err;
    report.repetitions = cfg.repetitions;
    report.reads_per_gauge = cfg.sampler.reads_per_gauge;
    report.reference = exact_ref ? "exact" : "mcmc";
    const auto best = std::min_element(err.begin(), err.end());
    report.chosen = cfg.candidates[static_cast<std::size_t>(best - err.begin())];
    return report;
}

CalibrationReport calibrate(int n_visible, int n_hidden, const CalibrationConfig& cfg,
                            const ChimeraGraph& graph, Rng& rng) {
    const Embedding emb = embed_rbm(n_visible, n_hidden, graph);
    MaskMatrix mask;
    const MaskMatrix* mask_ptr = nullptr;
    if (!emb.missing_pairs.empty()) {
        mask = missing_mask(emb, n_visible, n_hidden);
        mask_ptr = &mask;
    }
    ExpectationFn hook = [&](const RbmParams& p, double beta, Rng& r) {
        SamplerConfig sc = cfg.sampler;
        sc.beta_eff = beta;
        sc.seed = r();
        return estimate_expectations_chimera(p, sc, graph, emb);
    };
    return calibrate_with(n_visible, n_hidden, cfg, hook, rng, mask_ptr);
}

double default_beta_for(int n_visible, int n_hidden) {
    const int side = std::max(n_visible, n_hidden);
    if (side <= 8) return 4.5;
    if (side <= 16) return 3.0;
    return 2.0;
}

}  // namespace qdbn
