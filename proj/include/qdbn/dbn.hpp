#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"
#include "qdbn/sampler.hpp"

namespace qdbn {

// Feature stack of RBM layers plus a linear output head. output_weights has
// one row per unit of the last hidden layer plus a final bias row.
struct DbnModel {
    std::vector<RbmParams> layers;
    MatrixXd output_weights;  // (last_hidden + 1) x n_classes

    int n_input() const { return layers.empty() ? 0 : layers.front().n_visible; }
    int n_classes() const { return static_cast<int>(output_weights.cols()); }
    std::vector<int> layer_sizes() const;
    void validate() const;  // adjacent layer dims chain; everything finite
};

struct TrainSchedule {
    int pretrain_iters = 1;      // N, full-batch generative updates per layer
    double learning_rate = 0.1;  // generative epsilon
    double momentum_early = 0.5;
    double momentum_late = 0.9;
    int momentum_switch = 5;  // iterations 1..switch use the early value
    double init_weight_sd = 0.01;

    int backprop_iters = 1000;
    int minibatch_size = 100;
    double backprop_rate = 0.1;

    void validate() const;
};

// Test hook: observes every generative update as (layer, iteration, momentum).
using PretrainObserver = std::function<void(int layer, int iteration, double momentum)>;

// Batch of per-row hidden conditional probabilities under one RBM.
MatrixXd hidden_probabilities(const RbmParams& p, const MatrixXd& batch);

// Deterministic feature pass through a layer stack.
MatrixXd propagate(const std::vector<RbmParams>& layers, const MatrixXd& data);

// Layerwise generative pretraining. sizes lists unit counts of the feature
// stack ({32, 32, 32} trains two 32/32 RBMs); data rows feed the first layer
// and must lie in [0,1]. Each layer starts from Gaussian weights and zero
// biases, runs pretrain_iters full-batch updates (clamped statistics against
// the backend's model statistics, momentum schedule as configured), then
// passes its hidden probabilities to the next layer. masks, when given,
// pins the masked weights of each layer to zero.
std::vector<RbmParams> pretrain(const std::vector<int>& sizes, const MatrixXd& data,
                                Estimator& backend, const TrainSchedule& sched, Rng& rng,
                                const std::vector<MaskMatrix>* masks = nullptr,
                                const PretrainObserver& observer = nullptr);

struct ForwardPass {
    std::vector<MatrixXd> activations;  // one per layer, rows x layer width
    MatrixXd scores;                    // rows x n_classes, linear
};

ForwardPass forward(const DbnModel& dbn, const MatrixXd& inputs);

MatrixXd one_hot(const std::vector<int>& labels, int n_classes);

// Ridge least squares from [activations, 1] to the targets; lambda = 0 uses
// the minimum-norm pseudoinverse solution instead.
MatrixXd pseudoinverse_init(const MatrixXd& activations, const MatrixXd& targets,
                            double lambda = 1e-8);

// Minibatch gradient descent on half mean squared error of the linear scores
// against one-hot targets, reshuffling each epoch. Supports running in
// segments so accuracy can be recorded at intermediate iteration counts; a
// segmented run visits exactly the same minibatches as a straight one.
class BackpropRunner {
  public:
    BackpropRunner(DbnModel model, const MatrixXd& data, const MatrixXd& targets,
                   const TrainSchedule& sched, std::uint64_t seed);

    void advance(int iterations);
    const DbnModel& model() const { return model_; }
    int iterations_done() const { return done_; }
    double last_loss() const { return last_loss_; }

  private:
    DbnModel model_;
    MatrixXd data_;
    MatrixXd targets_;
    TrainSchedule sched_;
    Rng rng_;
    std::vector<int> order_;
    std::size_t cursor_ = 0;
    int done_ = 0;
    double last_loss_ = 0.0;

    void step();
};

DbnModel backprop_finetune(const DbnModel& dbn, const MatrixXd& data,
                           const std::vector<int>& labels, const TrainSchedule& sched,
                           Rng& rng);

// Fraction of rows whose argmax score (lowest index on ties) matches the
// label.
double evaluate(const DbnModel& dbn, const MatrixXd& data, const std::vector<int>& labels);

// Versioned self-describing text checkpoints.
void save_model(const DbnModel& dbn, const std::string& path);
DbnModel load_model(const std::string& path);

}  // namespace qdbn
