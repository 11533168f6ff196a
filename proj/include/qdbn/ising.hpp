#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qdbn/chimera.hpp"
#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"

namespace qdbn {

// Upper-triangular QUBO over the concatenated (visible, hidden) binary vector
// x, scaled so that beta_eff * x'Qx recovers the bias/coupling sums of the
// RBM energy.
struct QuboMatrix {
    MatrixXd q;
    double beta_eff = 1.0;
    int dim() const { return static_cast<int>(q.rows()); }
};

struct Coupling {
    int a = 0;
    int b = 0;
    double j = 0.0;
};

// Spin model with energy E(S) = -sum_i H_i S_i - sum_(a,b) J_ab S_a S_b.
// offset is the constant such that E(S) + offset equals the QUBO value
// -x'Qx under x = (S+1)/2.
struct IsingModel {
    VectorXd h;
    std::vector<Coupling> couplings;
    double offset = 0.0;
    int num_nodes() const { return static_cast<int>(h.size()); }
};

// Per-qubit spin relabeling; applying one twice restores the model.
struct Gauge {
    std::string name;
    std::vector<int> signs;  // +1 or -1 per node
};

// Control-error model: coefficients snap to a uniform grid with
// 2^precision_bits levels over the programming range, every coupling leaks a
// same-sign bias of leakage_fraction * J onto both endpoint qubits, and an
// optional Gaussian jitter lands on every coefficient.
struct NoiseModel {
    bool enabled = false;
    int precision_bits = 4;
    double leakage_fraction = 0.03;
    double jitter_sd = 0.0;
};

// Programming ranges in hardware units (symmetric about zero).
struct HardwareRanges {
    double h_max = 2.0;
    double j_max = 1.0;
};

// Q = (1/beta_eff) [B W; 0 C] with B, C the bias diagonals.
QuboMatrix rbm_to_qubo(const RbmParams& p, double beta_eff);

// Linear x -> S = 2x - 1 substitution. For the returned model,
// beta_eff * (E(S) + offset) equals the RBM energy of Eq-style
// (v,h) = ((S+1)/2 split) exactly, for every configuration.
IsingModel qubo_to_ising(const QuboMatrix& q);

// Spread the logical model over hardware qubits: each logical field is split
// equally over the chain's usable qubits, each logical coupling lands on its
// crossing coupler, and every chain link receives +j_fm (agreement lowers the
// energy under the sign convention above).
IsingModel embed_ising(const IsingModel& logical, const Embedding& emb, double j_fm);

// The four checkerboard gauges I, G, -G, -I. G flips horizontal qubits in
// cells with even cell_row+cell_col and vertical qubits in odd cells, which
// flips the sign of every coupler's J on a fault-free chip.
std::vector<Gauge> make_gauges(const ChimeraGraph& g);

// H_i -> s_i H_i, J_ab -> s_a s_b J_ab; offset unchanged.
IsingModel apply_gauge(const IsingModel& m, const Gauge& g);

// Snap x to the nearest multiple of (hi-lo)/(2^bits - 1), clamped to [lo,hi].
double quantize_to_grid(double x, double lo, double hi, int bits);

// Quantize -> leakage -> jitter, in hardware units. Returns the model
// unchanged when noise.enabled is false. Jitter draws H values first (node
// order), then J values (coupling order); no draws happen when jitter_sd = 0.
IsingModel apply_noise(const IsingModel& m, const NoiseModel& noise,
                       const HardwareRanges& ranges, Rng& rng);

// Scale all H and J uniformly by min(1, h_max/max|H|, j_max/max|J|) so both
// fit their programming ranges; returns the scale so the sampling temperature
// can absorb it. All-zero models scale by 1.
std::pair<IsingModel, double> rescale_to_hardware(const IsingModel& m,
                                                  const HardwareRanges& ranges);

// E(S) without the offset; spins are +1/-1.
double ising_energy(const IsingModel& m, const std::vector<int>& spins);

}  // namespace qdbn
