#include "qdbn/ising.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdbn {

QuboMatrix rbm_to_qubo(const RbmParams& p, double beta_eff) {
    if (!(beta_eff > 0.0)) throw std::invalid_argument("rbm_to_qubo: beta_eff must be > 0");
    const int n = p.n_visible, m = p.n_hidden;
    QuboMatrix q;
    q.beta_eff = beta_eff;
    q.q = MatrixXd::Zero(n + m, n + m);
    for (int i = 0; i < n; ++i) q.q(i, i) = p.visible_bias[i] / beta_eff;
    for (int j = 0; j < m; ++j) q.q(n + j, n + j) = p.hidden_bias[j] / beta_eff;
    q.q.topRightCorner(n, m) = p.weights / beta_eff;
    return q;
}

IsingModel qubo_to_ising(const QuboMatrix& q) {
    const int d = q.dim();
    IsingModel m;
    m.h = VectorXd::Zero(d);
    double c0 = 0.0;
    for (int i = 0; i < d; ++i) {
        m.h[i] += q.q(i, i) / 2.0;
        c0 += q.q(i, i) / 2.0;
    }
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            const double w = q.q(a, b);
            if (w == 0.0) continue;
            m.couplings.push_back({a, b, w / 4.0});
            m.h[a] += w / 4.0;
            m.h[b] += w / 4.0;
            c0 += w / 4.0;
        }
    m.offset = -c0;
    return m;
}

IsingModel embed_ising(const IsingModel& logical, const Embedding& emb, double j_fm) {
    if (!(j_fm > 0.0)) throw std::invalid_argument("embed_ising: j_fm must be > 0");
    const int n = emb.n_visible, m = emb.n_hidden;
    if (logical.num_nodes() != n + m)
        throw std::invalid_argument("embed_ising: logical node count mismatch");

    IsingModel hw;
    hw.h = VectorXd::Zero(emb.hardware_qubits);
    hw.offset = logical.offset;

    for (int i = 0; i < n; ++i) {
        const auto& chain = emb.visible_chains[i];
        for (int q : chain) hw.h[q] += logical.h[i] / static_cast<double>(chain.size());
    }
    for (int j = 0; j < m; ++j) {
        const auto& chain = emb.hidden_chains[j];
        for (int q : chain) hw.h[q] += logical.h[n + j] / static_cast<double>(chain.size());
    }

    for (const Coupling& c : logical.couplings) {
        if (c.a >= n || c.b < n)
            throw std::invalid_argument("embed_ising: coupling outside the bipartite block");
        const int i = c.a, j = c.b - n;
        const int qv = emb.crossing_v(i, j), qh = emb.crossing_h(i, j);
        if (qv < 0)
            throw std::invalid_argument("embed_ising: coupling on a missing pair");
        hw.couplings.push_back({std::min(qv, qh), std::max(qv, qh), c.j});
    }

    auto add_chain_links = [&](const std::vector<std::pair<int, int>>& links) {
        for (const auto& [a, b] : links)
            hw.couplings.push_back({std::min(a, b), std::max(a, b), j_fm});
    };
    for (const auto& links : emb.visible_chain_couplers) add_chain_links(links);
    for (const auto& links : emb.hidden_chain_couplers) add_chain_links(links);
    return hw;
}

std::vector<Gauge> make_gauges(const ChimeraGraph& g) {
    const int nq = g.num_qubits();
    Gauge identity{"I", std::vector<int>(nq, 1)};
    Gauge weave{"G", std::vector<int>(nq, 1)};
    for (int q = 0; q < nq; ++q) {
        QubitCoord c = g.coord_of(q);
        const bool even_cell = ((c.cell_row + c.cell_col) % 2) == 0;
        const bool flip = even_cell ? (c.side == Side::horizontal)
                                    : (c.side == Side::vertical);
        if (flip) weave.signs[q] = -1;
    }
    Gauge minus_weave{"-G", weave.signs};
    for (int& s : minus_weave.signs) s = -s;
    Gauge minus_identity{"-I", std::vector<int>(nq, -1)};
    return {identity, weave, minus_weave, minus_identity};
}

IsingModel apply_gauge(const IsingModel& m, const Gauge& g) {
    if (static_cast<int>(g.signs.size()) != m.num_nodes())
        throw std::invalid_argument("apply_gauge: sign vector size mismatch");
    IsingModel out = m;
    for (int i = 0; i < m.num_nodes(); ++i) out.h[i] *= g.signs[i];
    for (Coupling& c : out.couplings) c.j *= g.signs[c.a] * g.signs[c.b];
    return out;
}

double quantize_to_grid(double x, double lo, double hi, int bits) {
    const double levels = std::exp2(bits) - 1.0;
    const double snapped = std::round(x * levels / (hi - lo)) * (hi - lo) / levels;
    return std::clamp(snapped, lo, hi);
}

IsingModel apply_noise(const IsingModel& m, const NoiseModel& noise,
                       const HardwareRanges& ranges, Rng& rng) {
    if (!noise.enabled) return m;
    if (noise.precision_bits < 1)
        throw std::invalid_argument("apply_noise: precision_bits must be >= 1");
    if (noise.leakage_fraction < 0.0)
        throw std::invalid_argument("apply_noise: negative leakage_fraction");

    IsingModel out = m;
    for (int i = 0; i < out.num_nodes(); ++i)
        out.h[i] = quantize_to_grid(out.h[i], -ranges.h_max, ranges.h_max,
                                    noise.precision_bits);
    for (Coupling& c : out.couplings)
        c.j = quantize_to_grid(c.j, -ranges.j_max, ranges.j_max, noise.precision_bits);

    for (const Coupling& c : out.couplings) {
        out.h[c.a] += noise.leakage_fraction * c.j;
        out.h[c.b] += noise.leakage_fraction * c.j;
    }

    if (noise.jitter_sd > 0.0) {
        for (int i = 0; i < out.num_nodes(); ++i)
            out.h[i] += gaussian(rng, 0.0, noise.jitter_sd);
        for (Coupling& c : out.couplings) c.j += gaussian(rng, 0.0, noise.jitter_sd);
    }
    return out;
}

std::pair<IsingModel, double> rescale_to_hardware(const IsingModel& m,
                                                  const HardwareRanges& ranges) {
    if (!(ranges.h_max > 0.0) || !(ranges.j_max > 0.0))
        throw std::invalid_argument("rescale_to_hardware: ranges must be positive");
    double max_h = 0.0, max_j = 0.0;
    for (int i = 0; i < m.num_nodes(); ++i) max_h = std::max(max_h, std::abs(m.h[i]));
    for (const Coupling& c : m.couplings) max_j = std::max(max_j, std::abs(c.j));

    double scale = 1.0;
    if (max_h > 0.0) scale = std::min(scale, ranges.h_max / max_h);
    if (max_j > 0.0) scale = std::min(scale, ranges.j_max / max_j);

    IsingModel out = m;
    out.h *= scale;
    for (Coupling& c : out.couplings) c.j *= scale;
    return {out, scale};
}

double ising_energy(const IsingModel& m, const std::vector<int>& spins) {
    if (static_cast<int>(spins.size()) != m.num_nodes())
        throw std::invalid_argument("ising_energy: spin vector size mismatch");
    double e = 0.0;
    for (int i = 0; i < m.num_nodes(); ++i) e -= m.h[i] * spins[i];
    for (const Coupling& c : m.couplings) e -= c.j * spins[c.a] * spins[c.b];
    return e;
}

}  // namespace qdbn
