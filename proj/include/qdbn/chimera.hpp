#pragma once

#include <utility>
#include <vector>

#include "qdbn/rbm.hpp"

namespace qdbn {

enum class Side : int { vertical = 0, horizontal = 1 };

// Qubit coordinates inside the cell lattice: cell position, which half of the
// K_{k,k} bipartition, and the position within that half.
struct QubitCoord {
    int cell_row = 0;
    int cell_col = 0;
    Side side = Side::vertical;
    int index = 0;
};

// Square lattice of K_{k,k} bipartite cells. Within a cell every vertical
// qubit couples to every horizontal qubit; vertical qubits also couple to the
// same-index vertical qubit in the cells directly above and below, and
// horizontal qubits to the same-index horizontal qubit in the cells to the
// left and right. Interior qubits have degree k+2.
struct ChimeraGraph {
    int grid_rows = 0;
    int grid_cols = 0;
    int k = 4;
    std::vector<bool> faulty;                   // indexed by qubit id
    std::vector<std::pair<int, int>> couplers;  // usable couplers, sorted, a < b
    std::vector<std::vector<int>> neighbors;    // usable adjacency per qubit

    int num_qubits() const { return grid_rows * grid_cols * 2 * k; }
    int num_couplers() const { return static_cast<int>(couplers.size()); }
    int qubit_id(const QubitCoord& c) const;
    QubitCoord coord_of(int id) const;
    bool usable(int id) const { return !faulty[static_cast<std::size_t>(id)]; }
    bool has_coupler(int a, int b) const;  // usable coupler between a and b
    int degree(int id) const { return static_cast<int>(neighbors[id].size()); }
};

// Builds the lattice. Couplers incident to a faulty qubit, or listed in
// faulty_couplers, are unusable and do not appear in couplers/neighbors.
// Throws on invalid dimensions and on duplicate or out-of-range fault entries.
ChimeraGraph build_chimera(int grid_rows, int grid_cols, int k,
                           const std::vector<QubitCoord>& faulty_qubits = {},
                           const std::vector<std::pair<QubitCoord, QubitCoord>>&
                               faulty_couplers = {});

// Chain embedding of an n x m bipartite RBM. Visible node i occupies vertical
// position i%k in every cell of cell-column i/k (one qubit per cell row);
// hidden node j occupies horizontal position j%k in every cell of cell-row
// j/k. The logical coupler for (i,j) is the intra-cell crossing in cell
// (j/k, i/k). Faulty qubits are skipped, splitting a chain into segments that
// still decode as one logical node.
struct Embedding {
    int n_visible = 0;
    int n_hidden = 0;
    int hardware_qubits = 0;
    std::vector<std::vector<int>> visible_chains;  // usable qubits, top to bottom
    std::vector<std::vector<int>> hidden_chains;   // usable qubits, left to right
    std::vector<std::vector<std::pair<int, int>>> visible_chain_couplers;
    std::vector<std::vector<std::pair<int, int>>> hidden_chain_couplers;
    Eigen::MatrixXi crossing_v;  // qubit id carrying v_i in cell (j/k, i/k); -1 if missing
    Eigen::MatrixXi crossing_h;  // qubit id carrying h_j there; -1 if missing
    std::vector<std::pair<int, int>> missing_pairs;

    int num_logical_couplers() const {
        return n_visible * n_hidden - static_cast<int>(missing_pairs.size());
    }
};

// Throws when n_visible > k*grid_cols or n_hidden > k*grid_rows, or when a
// fault pattern leaves some chain with no usable qubit at all.
Embedding embed_rbm(int n_visible, int n_hidden, const ChimeraGraph& g);

// Mask with true exactly on the missing (i,j) pairs; shape check against (n,m).
MaskMatrix missing_mask(const Embedding& e, int n, int m);

}  // namespace qdbn
