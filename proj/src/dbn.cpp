#include "qdbn/dbn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qdbn/errors.hpp"

namespace qdbn {

std::vector<int> DbnModel::layer_sizes() const {
    std::vector<int> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(layers.front().n_visible);
    for (const RbmParams& p : layers) sizes.push_back(p.n_hidden);
    sizes.push_back(n_classes());
    return sizes;
}

void DbnModel::validate() const {
    if (layers.empty()) throw std::invalid_argument("dbn: no layers");
    for (std::size_t t = 0; t + 1 < layers.size(); ++t)
        if (layers[t].n_hidden != layers[t + 1].n_visible)
            throw std::invalid_argument("dbn: layer sizes do not chain");
    for (const RbmParams& p : layers) p.validate();
    if (output_weights.rows() != layers.back().n_hidden + 1)
        throw std::invalid_argument("dbn: output weight rows must be last hidden + 1");
    if (!output_weights.allFinite())
        throw std::invalid_argument("dbn: non-finite output weights");
}

void TrainSchedule::validate() const {
    if (pretrain_iters < 0) throw std::invalid_argument("schedule: negative pretrain_iters");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("schedule: learning_rate <= 0");
    if (momentum_early < 0.0 || momentum_early >= 1.0 || momentum_late < 0.0 ||
        momentum_late >= 1.0)
        throw std::invalid_argument("schedule: momentum outside [0,1)");
    if (momentum_switch < 0) throw std::invalid_argument("schedule: negative momentum_switch");
    if (!(init_weight_sd >= 0.0)) throw std::invalid_argument("schedule: negative init sd");
    if (backprop_iters < 0) throw std::invalid_argument("schedule: negative backprop_iters");
    if (minibatch_size < 1) throw std::invalid_argument("schedule: minibatch_size < 1");
    if (backprop_rate < 0.0) throw std::invalid_argument("schedule: negative backprop_rate");
}

MatrixXd hidden_probabilities(const RbmParams& p, const MatrixXd& batch) {
    if (batch.cols() != p.n_visible)
        throw std::invalid_argument("hidden_probabilities: batch width mismatch");
    MatrixXd act = (batch * p.weights).rowwise() + p.hidden_bias.transpose();
    return act.unaryExpr([](double x) { return sigmoid(x); });
}

MatrixXd propagate(const std::vector<RbmParams>& layers, const MatrixXd& data) {
    MatrixXd cur = data;
    for (const RbmParams& p : layers) cur = hidden_probabilities(p, cur);
    return cur;
}

std::vector<RbmParams> pretrain(const std::vector<int>& sizes, const MatrixXd& data,
                                Estimator& backend, const TrainSchedule& sched, Rng& rng,
                                const std::vector<MaskMatrix>* masks,
                                const PretrainObserver& observer) {
    sched.validate();
    if (sizes.size() < 2)
        throw std::invalid_argument("pretrain: need an input size and at least one hidden layer");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("pretrain: non-positive layer size");
    if (data.rows() == 0) throw std::invalid_argument("pretrain: empty data");
    if (data.cols() != sizes.front())
        throw std::invalid_argument("pretrain: data width does not match the input layer");
    if (data.minCoeff() < 0.0 || data.maxCoeff() > 1.0)
        throw std::invalid_argument("pretrain: data entries must lie in [0,1]");
    const std::size_t n_layers = sizes.size() - 1;
    if (masks && masks->size() != n_layers)
        throw std::invalid_argument("pretrain: one mask per layer required");

    // all initial draws happen before any training so the starting point
    // depends only on the stream position, not on how much randomness a
    // particular backend consumes
    std::vector<RbmParams> layers;
    layers.reserve(n_layers);
    for (std::size_t t = 0; t < n_layers; ++t) {
        RbmParams p = random_rbm(sizes[t], sizes[t + 1], rng, sched.init_weight_sd);
        if (masks) {
            p.mask = (*masks)[t];
            p.zero_masked_weights();
        }
        layers.push_back(std::move(p));
    }

    MatrixXd cur = data;
    for (std::size_t t = 0; t < n_layers; ++t) {
        RbmParams& p = layers[t];
        UpdateState state(p, sched.learning_rate, sched.momentum_early);
        for (int iter = 1; iter <= sched.pretrain_iters; ++iter) {
            state.momentum =
                iter <= sched.momentum_switch ? sched.momentum_early : sched.momentum_late;
            ExpectationSet clamped = clamped_expectations(p, cur);
            ExpectationSet model(p.n_visible, p.n_hidden);
            try {
                model = backend.estimate(p, cur, rng);
            } catch (const NumericalError& e) {
                throw NumericalError("pretrain layer " + std::to_string(t) + " iteration " +
                                     std::to_string(iter) + ": " + e.what());
            }
            apply_update(p, state, clamped, model);
            if (observer) observer(static_cast<int>(t), iter, state.momentum);
        }
        cur = hidden_probabilities(p, cur);
    }
    return layers;
}

ForwardPass forward(const DbnModel& dbn, const MatrixXd& inputs) {
    if (dbn.layers.empty()) throw std::invalid_argument("forward: no layers");
    if (inputs.cols() != dbn.n_input())
        throw std::invalid_argument("forward: input width mismatch");
    if (dbn.output_weights.rows() != dbn.layers.back().n_hidden + 1)
        throw std::invalid_argument("forward: output weight rows mismatch");

    ForwardPass pass;
    MatrixXd cur = inputs;
    for (const RbmParams& p : dbn.layers) {
        cur = hidden_probabilities(p, cur);
        pass.activations.push_back(cur);
    }
    const int h = dbn.layers.back().n_hidden;
    pass.scores = cur * dbn.output_weights.topRows(h);
    pass.scores.rowwise() += dbn.output_weights.row(h);
    return pass;
}

MatrixXd one_hot(const std::vector<int>& labels, int n_classes) {
    MatrixXd y = MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] < 0 || labels[r] >= n_classes)
            throw std::invalid_argument("one_hot: label out of range");
        y(static_cast<Eigen::Index>(r), labels[r]) = 1.0;
    }
    return y;
}

MatrixXd pseudoinverse_init(const MatrixXd& activations, const MatrixXd& targets,
                            double lambda) {
    if (activations.rows() == 0 || targets.rows() == 0)
        throw std::invalid_argument("pseudoinverse_init: empty inputs");
    if (activations.rows() != targets.rows())
        throw std::invalid_argument("pseudoinverse_init: row count mismatch");
    if (lambda < 0.0) throw std::invalid_argument("pseudoinverse_init: negative lambda");

    const Eigen::Index rows = activations.rows();
    const Eigen::Index h = activations.cols();
    MatrixXd x(rows, h + 1);
    x.leftCols(h) = activations;
    x.col(h).setOnes();

    if (lambda == 0.0)
        return x.completeOrthogonalDecomposition().solve(targets);

    MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    return gram.ldlt().solve(x.transpose() * targets);
}

BackpropRunner::BackpropRunner(DbnModel model, const MatrixXd& data,
                               const MatrixXd& targets, const TrainSchedule& sched,
                               std::uint64_t seed)
    : model_(std::move(model)), data_(data), targets_(targets), sched_(sched),
      rng_(make_stream(seed)) {
    sched_.validate();
    model_.validate();
    if (data_.rows() == 0) throw std::invalid_argument("backprop: empty data");
    if (data_.cols() != model_.n_input())
        throw std::invalid_argument("backprop: data width mismatch");
    if (targets_.rows() != data_.rows() || targets_.cols() != model_.n_classes())
        throw std::invalid_argument("backprop: target shape mismatch");
}

void BackpropRunner::step() {
    const int rows = static_cast<int>(data_.rows());
    if (cursor_ >= order_.size()) {
        order_.resize(rows);
        std::iota(order_.begin(), order_.end(), 0);
        shuffle(order_, rng_);
        cursor_ = 0;
    }
    const int take = std::min<int>(sched_.minibatch_size,
                                   static_cast<int>(order_.size() - cursor_));
    MatrixXd xb(take, data_.cols());
    MatrixXd yb(take, targets_.cols());
    for (int r = 0; r < take; ++r) {
        xb.row(r) = data_.row(order_[cursor_ + r]);
        yb.row(r) = targets_.row(order_[cursor_ + r]);
    }
    cursor_ += take;

    // forward, keeping activations
    const std::size_t n_layers = model_.layers.size();
    std::vector<MatrixXd> acts(n_layers);
    MatrixXd cur = xb;
    for (std::size_t t = 0; t < n_layers; ++t) {
        cur = hidden_probabilities(model_.layers[t], cur);
        acts[t] = cur;
    }
    const int h = model_.layers.back().n_hidden;
    MatrixXd scores = cur * model_.output_weights.topRows(h);
    scores.rowwise() += model_.output_weights.row(h);

    MatrixXd diff = scores - yb;
    last_loss_ = 0.5 * diff.squaredNorm() / take;
    if (!std::isfinite(last_loss_))
        throw NumericalError("backprop: non-finite loss at iteration " +
                             std::to_string(done_ + 1));

    const double rate = sched_.backprop_rate;
    MatrixXd dscores = diff / take;

    MatrixXd grad_out(h + 1, model_.n_classes());
    grad_out.topRows(h) = acts.back().transpose() * dscores;
    grad_out.row(h) = dscores.colwise().sum();

    MatrixXd da = dscores * model_.output_weights.topRows(h).transpose();
    model_.output_weights -= rate * grad_out;

    for (std::size_t t = n_layers; t-- > 0;) {
        RbmParams& p = model_.layers[t];
        const MatrixXd& a = acts[t];
        MatrixXd dz = da.array() * a.array() * (1.0 - a.array());
        const MatrixXd& prev = t == 0 ? xb : acts[t - 1];
        MatrixXd grad_w = prev.transpose() * dz;
        VectorXd grad_c = dz.colwise().sum();
        if (t > 0) da = dz * p.weights.transpose();
        p.weights -= rate * grad_w;
        p.zero_masked_weights();
        p.hidden_bias -= rate * grad_c;
    }
    ++done_;
}

void BackpropRunner::advance(int iterations) {
    if (iterations < 0) throw std::invalid_argument("backprop: negative iteration count");
    for (int i = 0; i < iterations; ++i) step();
}

DbnModel backprop_finetune(const DbnModel& dbn, const MatrixXd& data,
                           const std::vector<int>& labels, const TrainSchedule& sched,
                           Rng& rng) {
    BackpropRunner runner(dbn, data, one_hot(labels, dbn.n_classes()), sched, rng());
    runner.advance(sched.backprop_iters);
    return runner.model();
}

double evaluate(const DbnModel& dbn, const MatrixXd& data, const std::vector<int>& labels) {
    if (data.rows() == 0) throw std::invalid_argument("evaluate: empty data");
    if (static_cast<Eigen::Index>(labels.size()) != data.rows())
        throw std::invalid_argument("evaluate: label count mismatch");
    ForwardPass pass = forward(dbn, data);
    int correct = 0;
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        int best = 0;
        for (int c = 1; c < dbn.n_classes(); ++c)
            if (pass.scores(r, c) > pass.scores(r, best)) best = c;
        correct += best == labels[r];
    }
    return static_cast<double>(correct) / static_cast<double>(data.rows());
}

namespace {

void write_matrix(std::ofstream& out, const MatrixXd& m) {
    char buf[32];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
}

void read_matrix(std::ifstream& in, MatrixXd& m, const std::string& path) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (!(in >> m(r, c))) throw DataError("truncated model file " + path);
}

}  // namespace

void save_model(const DbnModel& dbn, const std::string& path) {
    dbn.validate();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file " + path);
    out << "qdbn-model 1\n";
    out << "layers " << dbn.layers.size() << "\n";
    for (const RbmParams& p : dbn.layers) {
        out << "layer " << p.n_visible << " " << p.n_hidden << "\n";
        write_matrix(out, p.weights);
        write_matrix(out, p.visible_bias.transpose());
        write_matrix(out, p.hidden_bias.transpose());
        out << "mask\n";
        for (int i = 0; i < p.n_visible; ++i) {
            for (int j = 0; j < p.n_hidden; ++j) out << (p.mask(i, j) ? '1' : '0');
            out << "\n";
        }
    }
    out << "output " << dbn.output_weights.rows() << " " << dbn.output_weights.cols()
        << "\n";
    write_matrix(out, dbn.output_weights);
    if (!out) throw DataError("failed writing model file " + path);
}

DbnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file " + path);
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (!in || tag != "qdbn-model" || version != 1)
        throw DataError("bad model header in " + path);

    std::size_t n_layers = 0;
    in >> tag >> n_layers;
    if (!in || tag != "layers") throw DataError("bad layer count in " + path);

    DbnModel dbn;
    for (std::size_t t = 0; t < n_layers; ++t) {
        int n = 0, m = 0;
        in >> tag >> n >> m;
        if (!in || tag != "layer" || n < 1 || m < 1)
            throw DataError("bad layer record in " + path);
        RbmParams p(n, m);
        read_matrix(in, p.weights, path);
        MatrixXd vb(1, n), hb(1, m);
        read_matrix(in, vb, path);
        read_matrix(in, hb, path);
        p.visible_bias = vb.transpose();
        p.hidden_bias = hb.transpose();
        in >> tag;
        if (!in || tag != "mask") throw DataError("bad mask record in " + path);
        for (int i = 0; i < n; ++i) {
            std::string row;
            in >> row;
            if (!in || static_cast<int>(row.size()) != m)
                throw DataError("bad mask row in " + path);
            for (int j = 0; j < m; ++j) p.mask(i, j) = row[j] == '1';
        }
        dbn.layers.push_back(std::move(p));
    }
    int orows = 0, ocols = 0;
    in >> tag >> orows >> ocols;
    if (!in || tag != "output" || orows < 1 || ocols < 1)
        throw DataError("bad output record in " + path);
    dbn.output_weights.resize(orows, ocols);
    read_matrix(in, dbn.output_weights, path);
    dbn.validate();
    return dbn;
}

}  // namespace qdbn
