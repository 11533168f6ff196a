#include "qdbn/chimera.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qdbn {

int ChimeraGraph::qubit_id(const QubitCoord& c) const {
    if (c.cell_row < 0 || c.cell_row >= grid_rows || c.cell_col < 0 ||
        c.cell_col >= grid_cols || c.index < 0 || c.index >= k)
        throw std::invalid_argument("qubit coordinate out of range");
    return ((c.cell_row * grid_cols + c.cell_col) * 2 + static_cast<int>(c.side)) * k +
           c.index;
}

QubitCoord ChimeraGraph::coord_of(int id) const {
    if (id < 0 || id >= num_qubits()) throw std::invalid_argument("qubit id out of range");
    QubitCoord c;
    c.index = id % k;
    int rest = id / k;
    c.side = static_cast<Side>(rest % 2);
    rest /= 2;
    c.cell_col = rest % grid_cols;
    c.cell_row = rest / grid_cols;
    return c;
}

bool ChimeraGraph::has_coupler(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(couplers.begin(), couplers.end(), std::make_pair(a, b));
}

ChimeraGraph build_chimera(int grid_rows, int grid_cols, int k,
                           const std::vector<QubitCoord>& faulty_qubits,
                           const std::vector<std::pair<QubitCoord, QubitCoord>>&
                               faulty_couplers) {
    if (grid_rows < 1 || grid_cols < 1 || k < 1)
        throw std::invalid_argument("build_chimera: dimensions must be >= 1");

    ChimeraGraph g;
    g.grid_rows = grid_rows;
    g.grid_cols = grid_cols;
    g.k = k;
    g.faulty.assign(g.num_qubits(), false);

    for (const QubitCoord& c : faulty_qubits) {
        int id = g.qubit_id(c);
        if (g.faulty[id]) {
            std::ostringstream os;
            os << "build_chimera: duplicate faulty qubit " << id;
            throw std::invalid_argument(os.str());
        }
        g.faulty[id] = true;
    }

    std::set<std::pair<int, int>> dead_couplers;
    for (const auto& [ca, cb] : faulty_couplers) {
        int a = g.qubit_id(ca), b = g.qubit_id(cb);
        if (a > b) std::swap(a, b);
        if (a == b) throw std::invalid_argument("build_chimera: degenerate coupler");
        if (!dead_couplers.insert({a, b}).second)
            throw std::invalid_argument("build_chimera: duplicate faulty coupler");
    }

    auto add = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        if (g.faulty[a] || g.faulty[b]) return;
        if (dead_couplers.count({a, b})) return;
        g.couplers.emplace_back(a, b);
    };

    for (int r = 0; r < grid_rows; ++r)
        for (int c = 0; c < grid_cols; ++c) {
            for (int iv = 0; iv < k; ++iv)
                for (int ih = 0; ih < k; ++ih)
                    add(g.qubit_id({r, c, Side::vertical, iv}),
                        g.qubit_id({r, c, Side::horizontal, ih}));
            if (r + 1 < grid_rows)
                for (int i = 0; i < k; ++i)
                    add(g.qubit_id({r, c, Side::vertical, i}),
                        g.qubit_id({r + 1, c, Side::vertical, i}));
            if (c + 1 < grid_cols)
                for (int i = 0; i < k; ++i)
                    add(g.qubit_id({r, c, Side::horizontal, i}),
                        g.qubit_id({r, c + 1, Side::horizontal, i}));
        }

    std::sort(g.couplers.begin(), g.couplers.end());
    g.neighbors.assign(g.num_qubits(), {});
    for (const auto& [a, b] : g.couplers) {
        g.neighbors[a].push_back(b);
        g.neighbors[b].push_back(a);
    }
    return g;
}

Embedding embed_rbm(int n_visible, int n_hidden, const ChimeraGraph& g) {
    if (n_visible < 1 || n_hidden < 1)
        throw std::invalid_argument("embed_rbm: node counts must be positive");
    if (n_visible > g.k * g.grid_cols || n_hidden > g.k * g.grid_rows) {
        std::ostringstream os;
        os << "embed_rbm: " << n_visible << "x" << n_hidden
           << " RBM exceeds chip capacity " << g.k * g.grid_cols << "x"
           << g.k * g.grid_rows;
        throw std::invalid_argument(os.str());
    }

    Embedding e;
    e.n_visible = n_visible;
    e.n_hidden = n_hidden;
    e.hardware_qubits = g.num_qubits();
    e.crossing_v = Eigen::MatrixXi::Constant(n_visible, n_hidden, -1);
    e.crossing_h = Eigen::MatrixXi::Constant(n_visible, n_hidden, -1);

    for (int i = 0; i < n_visible; ++i) {
        std::vector<int> chain;
        std::vector<std::pair<int, int>> links;
        int prev = -1;  // usable qubit in the previous cell row, if any
        for (int r = 0; r < g.grid_rows; ++r) {
            int q = g.qubit_id({r, i / g.k, Side::vertical, i % g.k});
            if (!g.usable(q)) {
                prev = -1;
                continue;
            }
            if (prev >= 0 && g.has_coupler(prev, q)) links.emplace_back(prev, q);
            chain.push_back(q);
            prev = q;
        }
        if (chain.empty()) {
            std::ostringstream os;
            os << "embed_rbm: visible node " << i << " has no usable qubit";
            throw std::invalid_argument(os.str());
        }
        e.visible_chains.push_back(std::move(chain));
        e.visible_chain_couplers.push_back(std::move(links));
    }

    for (int j = 0; j < n_hidden; ++j) {
        std::vector<int> chain;
        std::vector<std::pair<int, int>> links;
        int prev = -1;
        for (int c = 0; c < g.grid_cols; ++c) {
            int q = g.qubit_id({j / g.k, c, Side::horizontal, j % g.k});
            if (!g.usable(q)) {
                prev = -1;
                continue;
            }
            if (prev >= 0 && g.has_coupler(prev, q)) links.emplace_back(prev, q);
            chain.push_back(q);
            prev = q;
        }
        if (chain.empty()) {
            std::ostringstream os;
            os << "embed_rbm: hidden node " << j << " has no usable qubit";
            throw std::invalid_argument(os.str());
        }
        e.hidden_chains.push_back(std::move(chain));
        e.hidden_chain_couplers.push_back(std::move(links));
    }

    for (int i = 0; i < n_visible; ++i)
        for (int j = 0; j < n_hidden; ++j) {
            int qv = g.qubit_id({j / g.k, i / g.k, Side::vertical, i % g.k});
            int qh = g.qubit_id({j / g.k, i / g.k, Side::horizontal, j % g.k});
            if (g.usable(qv) && g.usable(qh) && g.has_coupler(qv, qh)) {
                e.crossing_v(i, j) = qv;
                e.crossing_h(i, j) = qh;
            } else {
                e.missing_pairs.emplace_back(i, j);
            }
        }
    return e;
}

MaskMatrix missing_mask(const Embedding& e, int n, int m) {
    if (e.n_visible != n || e.n_hidden != m)
        throw std::invalid_argument("missing_mask: embedding size mismatch");
    MaskMatrix mask = MaskMatrix::Constant(n, m, false);
    for (const auto& [i, j] : e.missing_pairs) mask(i, j) = true;
    return mask;
}

}  // namespace qdbn
