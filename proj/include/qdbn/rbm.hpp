#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "qdbn/rng.hpp"

namespace qdbn {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Binary RBM over n visible and m hidden units with joint distribution
// P(v,h) = exp(b.v + c.h + v'Wh) / Z. The mask marks connections that are
// physically absent; masked weights are pinned to exactly zero.
struct RbmParams {
    int n_visible = 0;
    int n_hidden = 0;
    MatrixXd weights;       // n_visible x n_hidden
    VectorXd visible_bias;  // n_visible
    VectorXd hidden_bias;   // n_hidden
    MaskMatrix mask;        // true = connection forced absent

    RbmParams() = default;
    RbmParams(int n, int m)
        : n_visible(n),
          n_hidden(m),
          weights(MatrixXd::Zero(n, m)),
          visible_bias(VectorXd::Zero(n)),
          hidden_bias(VectorXd::Zero(m)),
          mask(MaskMatrix::Constant(n, m, false)) {}

    // Throws std::invalid_argument on inconsistent shapes, non-finite
    // values, or nonzero masked weights.
    void validate() const;
    void zero_masked_weights();
};

// Pairwise and marginal expectations <v_i h_j>, <v_i>, <h_j>.
struct ExpectationSet {
    MatrixXd vh;
    VectorXd v;
    VectorXd h;

    ExpectationSet() = default;
    ExpectationSet(int n, int m)
        : vh(MatrixXd::Zero(n, m)), v(VectorXd::Zero(n)), h(VectorXd::Zero(m)) {}
};

// Momentum buffers for the gradient-ascent updates
//   buf <- momentum * buf + learning_rate * (data - model); params += buf.
struct UpdateState {
    MatrixXd w_buf;
    VectorXd b_buf;
    VectorXd c_buf;
    double learning_rate = 0.1;
    double momentum = 0.5;

    UpdateState() = default;
    explicit UpdateState(const RbmParams& p, double lr = 0.1, double alpha = 0.5)
        : w_buf(MatrixXd::Zero(p.n_visible, p.n_hidden)),
          b_buf(VectorXd::Zero(p.n_visible)),
          c_buf(VectorXd::Zero(p.n_hidden)),
          learning_rate(lr),
          momentum(alpha) {}
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Largest n_visible + n_hidden for which exact enumeration is attempted.
inline constexpr int kEnumerationGuard = 26;

// E(v,h) = -b.v - c.h - v'Wh for binary v, h.
double energy(const RbmParams& p, const VectorXd& v, const VectorXd& h);

// P(h_j = 1 | v), componentwise sigm(c_j + sum_i W_ij v_i). Accepts
// real-valued v in [0,1] (mean-field input).
VectorXd hidden_conditional(const RbmParams& p, const VectorXd& v);

// P(v_i = 1 | h), componentwise sigm(b_i + sum_j W_ij h_j).
VectorXd visible_conditional(const RbmParams& p, const VectorXd& h);

// log Z by full enumeration of all 2^(n+m) configurations (max-shifted).
double log_partition_function(const RbmParams& p, int guard = kEnumerationGuard);

// Exact model expectations by full enumeration.
ExpectationSet exact_expectations(const RbmParams& p, int guard = kEnumerationGuard);

// Data-side statistics with visible units clamped to the batch rows
// (rows x n_visible, entries in [0,1]); hidden statistics use the
// conditional probabilities, not samples.
ExpectationSet clamped_expectations(const RbmParams& p, const MatrixXd& batch);

// Reconstruction-side statistics of the single-step chain
// V0 -> H0 (Bernoulli sampled) -> V1 -> H1, where V1 and H1 are kept as
// probabilities.
ExpectationSet cd_expectations(const RbmParams& p, const MatrixXd& batch, Rng& rng);

// Momentum update; masked weights are re-forced to zero afterwards.
// Throws NumericalError if any expectation entry is NaN/Inf.
void apply_update(RbmParams& p, UpdateState& st, const ExpectationSet& data,
                  const ExpectationSet& model);

// Mean over batch rows of log P(v) = b.v + sum_j softplus(c_j + W_j.v) - log Z.
double log_likelihood(const RbmParams& p, const MatrixXd& batch,
                      int guard = kEnumerationGuard);

// Zero-mean Gaussian weights (sd), zero biases.
RbmParams random_rbm(int n, int m, Rng& rng, double weight_sd = 0.01);

// Swap roles of visible and hidden units (W transposed, b <-> c).
RbmParams transposed(const RbmParams& p);

}  // namespace qdbn
