#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "qdbn/dbn.hpp"
#include "qdbn/errors.hpp"
#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"
#include "qdbn/sampler.hpp"

using qdbn::DbnModel;
using qdbn::MatrixXd;
using qdbn::RbmParams;
using qdbn::Rng;
using qdbn::TrainSchedule;
using qdbn::VectorXd;

namespace {

MatrixXd random_unit_rows(int rows, int cols, Rng& rng) {
    MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = qdbn::uniform01(rng);
    return m;
}

MatrixXd random_binary_rows(int rows, int cols, Rng& rng) {
    MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = qdbn::bernoulli(rng, 0.5) ? 1.0 : 0.0;
    return m;
}

DbnModel random_model(const std::vector<int>& sizes, int n_classes, Rng& rng,
                      double sd = 0.3) {
    DbnModel dbn;
    for (std::size_t t = 0; t + 1 < sizes.size(); ++t) {
        RbmParams p = qdbn::random_rbm(sizes[t], sizes[t + 1], rng, sd);
        for (int i = 0; i < p.n_visible; ++i) p.visible_bias[i] = qdbn::gaussian(rng, 0, sd);
        for (int j = 0; j < p.n_hidden; ++j) p.hidden_bias[j] = qdbn::gaussian(rng, 0, sd);
        dbn.layers.push_back(std::move(p));
    }
    dbn.output_weights.resize(sizes.back() + 1, n_classes);
    for (Eigen::Index r = 0; r < dbn.output_weights.rows(); ++r)
        for (int c = 0; c < n_classes; ++c) dbn.output_weights(r, c) = qdbn::gaussian(rng, 0, sd);
    return dbn;
}

// two well-separated blobs in the unit cube
void make_blobs(int rows, Rng& rng, MatrixXd& x, std::vector<int>& y) {
    x.resize(rows, 4);
    y.resize(rows);
    for (int r = 0; r < rows; ++r) {
        const int cls = r % 2;
        y[r] = cls;
        const double base = cls == 0 ? 0.2 : 0.8;
        for (int c = 0; c < 4; ++c) {
            const double center = c < 2 ? base : 1.0 - base;
            x(r, c) = std::clamp(center + qdbn::uniform_range(rng, -0.1, 0.1), 0.0, 1.0);
        }
    }
}

double model_loss(const DbnModel& dbn, const MatrixXd& x, const MatrixXd& y) {
    qdbn::ForwardPass pass = qdbn::forward(dbn, x);
    return 0.5 * (pass.scores - y).squaredNorm() / x.rows();
}

}  // namespace

TEST_CASE("pretrain: N=0 leaves random initializations with chained dims") {
    qdbn::SamplerConfig cfg;
    auto backend = qdbn::make_estimator("exact", cfg);
    TrainSchedule sched;
    sched.pretrain_iters = 0;
    Rng rng = qdbn::make_stream(70);
    MatrixXd data = random_unit_rows(12, 4, rng);

    int calls = 0;
    auto layers = qdbn::pretrain({4, 3, 2}, data, *backend, sched, rng, nullptr,
                                 [&](int, int, double) { ++calls; });
    CHECK(calls == 0);
    REQUIRE(layers.size() == 2);
    CHECK(layers[0].n_visible == 4);
    CHECK(layers[0].n_hidden == 3);
    CHECK(layers[1].n_visible == 3);
    CHECK(layers[1].n_hidden == 2);
    CHECK(layers[0].visible_bias.cwiseAbs().maxCoeff() == 0.0);
    CHECK(layers[0].hidden_bias.cwiseAbs().maxCoeff() == 0.0);
    CHECK(layers[0].weights.cwiseAbs().maxCoeff() > 0.0);
    CHECK(layers[0].weights.cwiseAbs().maxCoeff() < 0.1);

    MatrixXd feats = qdbn::propagate(layers, data);
    CHECK(feats.rows() == 12);
    CHECK(feats.cols() == 2);
    CHECK(feats.minCoeff() > 0.0);
    CHECK(feats.maxCoeff() < 1.0);
}

TEST_CASE("pretrain: one iteration is exactly one momentum-free update") {
    qdbn::SamplerConfig cfg;
    auto backend = qdbn::make_estimator("exact", cfg);
    TrainSchedule sched;
    sched.pretrain_iters = 1;
    sched.learning_rate = 0.25;

    Rng data_rng = qdbn::make_stream(71);
    MatrixXd data = random_binary_rows(9, 3, data_rng);

    Rng rng = qdbn::make_stream(72);
    auto layers = qdbn::pretrain({3, 3}, data, *backend, sched, rng);

    Rng replay = qdbn::make_stream(72);
    RbmParams init = qdbn::random_rbm(3, 3, replay, sched.init_weight_sd);
    qdbn::ExpectationSet clamped = qdbn::clamped_expectations(init, data);
    qdbn::ExpectationSet model = qdbn::exact_expectations(init);

    MatrixXd expect_w = init.weights + 0.25 * (clamped.vh - model.vh);
    VectorXd expect_b = init.visible_bias + 0.25 * (clamped.v - model.v);
    VectorXd expect_c = init.hidden_bias + 0.25 * (clamped.h - model.h);
    CHECK((layers[0].weights - expect_w).cwiseAbs().maxCoeff() == 0.0);
    CHECK((layers[0].visible_bias - expect_b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((layers[0].hidden_bias - expect_c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pretrain: momentum switches after the configured iteration") {
    qdbn::SamplerConfig cfg;
    auto backend = qdbn::make_estimator("exact", cfg);
    TrainSchedule sched;
    sched.pretrain_iters = 7;
    Rng rng = qdbn::make_stream(73);
    MatrixXd data = random_binary_rows(6, 3, rng);

    std::vector<std::pair<int, double>> seen;
    qdbn::pretrain({3, 2}, data, *backend, sched, rng, nullptr,
                   [&](int, int iter, double momentum) { seen.emplace_back(iter, momentum); });
    REQUIRE(seen.size() == 7);
    for (const auto& [iter, momentum] : seen) {
        if (iter <= 5)
            CHECK(momentum == 0.5);
        else
            CHECK(momentum == 0.9);
    }
}

TEST_CASE("pretrain: raises log-likelihood on a 12/12 layer") {
    qdbn::SamplerConfig cfg;
    auto backend = qdbn::make_estimator("exact", cfg);
    TrainSchedule sched;
    sched.pretrain_iters = 50;

    int improved = 0;
    for (int trial = 0; trial < 10; ++trial) {
        Rng data_rng = qdbn::make_stream(74, trial);
        // structured data: noisy copies of four prototypes
        MatrixXd protos = random_binary_rows(4, 12, data_rng);
        MatrixXd data(24, 12);
        for (int r = 0; r < 24; ++r) {
            data.row(r) = protos.row(r % 4);
            const int flip = static_cast<int>(qdbn::uniform_below(data_rng, 12));
            data(r, flip) = 1.0 - data(r, flip);
        }

        TrainSchedule before = sched;
        before.pretrain_iters = 0;
        Rng rng_a = qdbn::make_stream(75, trial);
        auto base = qdbn::pretrain({12, 12}, data, *backend, before, rng_a);
        Rng rng_b = qdbn::make_stream(75, trial);
        auto trained = qdbn::pretrain({12, 12}, data, *backend, sched, rng_b);

        const double ll0 = qdbn::log_likelihood(base[0], data);
        const double ll1 = qdbn::log_likelihood(trained[0], data);
        improved += ll1 > ll0;
    }
    CHECK(improved >= 9);
}

TEST_CASE("pretrain: masks pin weights to zero through training") {
    qdbn::SamplerConfig cfg;
    auto backend = qdbn::make_estimator("cd1", cfg);
    TrainSchedule sched;
    sched.pretrain_iters = 6;
    Rng rng = qdbn::make_stream(76);
    MatrixXd data = random_binary_rows(20, 4, rng);

    std::vector<qdbn::MaskMatrix> masks(1);
    masks[0] = qdbn::MaskMatrix::Constant(4, 3, false);
    masks[0](0, 0) = true;
    masks[0](2, 1) = true;
    masks[0](3, 2) = true;

    auto layers = qdbn::pretrain({4, 3}, data, *backend, sched, rng, &masks);
    CHECK(layers[0].weights(0, 0) == 0.0);
    CHECK(layers[0].weights(2, 1) == 0.0);
    CHECK(layers[0].weights(3, 2) == 0.0);
    CHECK(layers[0].weights(1, 1) != 0.0);

    std::vector<qdbn::MaskMatrix> wrong(2);
    CHECK_THROWS_AS(qdbn::pretrain({4, 3}, data, *backend, sched, rng, &wrong),
                    std::invalid_argument);
}

TEST_CASE("pretrain: input validation") {
    qdbn::SamplerConfig cfg;
    auto backend = qdbn::make_estimator("exact", cfg);
    TrainSchedule sched;
    Rng rng = qdbn::make_stream(77);
    MatrixXd data = random_unit_rows(5, 4, rng);

    CHECK_THROWS_AS(qdbn::pretrain({4}, data, *backend, sched, rng), std::invalid_argument);
    CHECK_THROWS_AS(qdbn::pretrain({3, 2}, data, *backend, sched, rng),
                    std::invalid_argument);
    MatrixXd bad = data;
    bad(0, 0) = 1.5;
    CHECK_THROWS_AS(qdbn::pretrain({4, 2}, bad, *backend, sched, rng),
                    std::invalid_argument);
    MatrixXd empty(0, 4);
    CHECK_THROWS_AS(qdbn::pretrain({4, 2}, empty, *backend, sched, rng),
                    std::invalid_argument);
}

TEST_CASE("forward: zero weights, saturation, and linearity") {
    DbnModel dbn;
    dbn.layers.emplace_back(4, 3);
    dbn.output_weights = MatrixXd::Zero(4, 2);
    dbn.output_weights.row(3) << 1.5, -0.5;  // bias row only

    Rng rng = qdbn::make_stream(78);
    MatrixXd x = random_unit_rows(6, 4, rng);
    qdbn::ForwardPass pass = qdbn::forward(dbn, x);
    REQUIRE(pass.activations.size() == 1);
    CHECK((pass.activations[0].array() == 0.5).all());
    for (int r = 0; r < 6; ++r) {
        CHECK(pass.scores(r, 0) == 1.5);
        CHECK(pass.scores(r, 1) == -0.5);
    }

    // saturating identity-like layer rounds its input
    DbnModel sat;
    sat.layers.emplace_back(3, 3);
    sat.layers[0].weights = 50.0 * MatrixXd::Identity(3, 3);
    sat.layers[0].hidden_bias = VectorXd::Constant(3, -25.0);
    sat.output_weights = MatrixXd::Zero(4, 1);
    MatrixXd probe(2, 3);
    probe << 0.9, 0.1, 0.8, 0.2, 0.7, 0.3;
    qdbn::ForwardPass sp = qdbn::forward(sat, probe);
    CHECK(sp.activations[0](0, 0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sp.activations[0](0, 1) == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(sp.activations[0](1, 2) == doctest::Approx(0.0).epsilon(1e-4));

    // linearity in the output head
    DbnModel doubled = dbn;
    doubled.output_weights *= 2.0;
    qdbn::ForwardPass dp = qdbn::forward(doubled, x);
    CHECK((dp.scores - 2.0 * pass.scores).cwiseAbs().maxCoeff() < 1e-12);

    MatrixXd narrow(2, 3);
    narrow.setZero();
    CHECK_THROWS_AS(qdbn::forward(dbn, narrow), std::invalid_argument);
}

TEST_CASE("one_hot encodes and validates") {
    MatrixXd y = qdbn::one_hot({2, 0, 1}, 3);
    CHECK(y.rows() == 3);
    CHECK(y.sum() == 3.0);
    CHECK(y(0, 2) == 1.0);
    CHECK(y(1, 0) == 1.0);
    CHECK(y(2, 1) == 1.0);
    CHECK_THROWS_AS(qdbn::one_hot({3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(qdbn::one_hot({-1}, 3), std::invalid_argument);
}

TEST_CASE("pseudoinverse_init: interpolation, recovery, averaging, optimality") {
    // identity activations, no ridge: reproduces targets on those rows
    MatrixXd a = MatrixXd::Identity(4, 4);
    Rng rng = qdbn::make_stream(79);
    MatrixXd y = random_unit_rows(4, 3, rng);
    MatrixXd w = qdbn::pseudoinverse_init(a, y, 0.0);
    MatrixXd x(4, 5);
    x.leftCols(4) = a;
    x.col(4).setOnes();
    CHECK((x * w - y).cwiseAbs().maxCoeff() < 1e-10);

    // constructed solution is recovered
    MatrixXd acts = random_unit_rows(30, 6, rng);
    MatrixXd w_true = random_unit_rows(7, 4, rng);
    MatrixXd xa(30, 7);
    xa.leftCols(6) = acts;
    xa.col(6).setOnes();
    MatrixXd targets = xa * w_true;
    MatrixXd w_fit = qdbn::pseudoinverse_init(acts, targets, 1e-8);
    CHECK((xa * w_fit - targets).cwiseAbs().maxCoeff() < 1e-8);

    // conflicting duplicates: best fit is the mean of the targets
    MatrixXd dup(2, 2);
    dup << 0.3, 0.7, 0.3, 0.7;
    MatrixXd ty(2, 1);
    ty << 0.0, 1.0;
    MatrixXd wd = qdbn::pseudoinverse_init(dup, ty, 0.0);
    MatrixXd xd(2, 3);
    xd.leftCols(2) = dup;
    xd.col(2).setOnes();
    MatrixXd pred = xd * wd;
    CHECK(pred(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pred(1, 0) == doctest::Approx(0.5).epsilon(1e-9));

    // no random perturbation lowers the ridge objective
    const double lambda = 1e-4;
    MatrixXd w_r = qdbn::pseudoinverse_init(acts, targets, lambda);
    const double base_loss =
        (xa * w_r - targets).squaredNorm() + lambda * w_r.squaredNorm();
    for (int trial = 0; trial < 100; ++trial) {
        MatrixXd delta = MatrixXd::Zero(7, 4);
        for (Eigen::Index i = 0; i < 7; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) delta(i, j) = qdbn::gaussian(rng, 0, 1e-3);
        MatrixXd w_p = w_r + delta;
        const double loss =
            (xa * w_p - targets).squaredNorm() + lambda * w_p.squaredNorm();
        REQUIRE(loss >= base_loss - 1e-12);
    }

    CHECK_THROWS_AS(qdbn::pseudoinverse_init(MatrixXd(0, 3), MatrixXd(0, 2), 1e-8),
                    std::invalid_argument);
    CHECK_THROWS_AS(qdbn::pseudoinverse_init(acts, targets.topRows(10), 1e-8),
                    std::invalid_argument);
}

TEST_CASE("backprop: zero learning rate leaves the model unchanged") {
    Rng rng = qdbn::make_stream(80);
    DbnModel dbn = random_model({4, 3}, 2, rng);
    MatrixXd x = random_unit_rows(10, 4, rng);
    std::vector<int> labels(10);
    for (int r = 0; r < 10; ++r) labels[r] = r % 2;

    TrainSchedule sched;
    sched.backprop_iters = 25;
    sched.minibatch_size = 4;
    sched.backprop_rate = 0.0;
    Rng trng = qdbn::make_stream(81);
    DbnModel after = qdbn::backprop_finetune(dbn, x, labels, sched, trng);
    CHECK((after.layers[0].weights - dbn.layers[0].weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((after.output_weights - dbn.output_weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backprop: one-step update matches finite differences of the loss") {
    Rng rng = qdbn::make_stream(82);
    DbnModel dbn = random_model({4, 3, 2}, 2, rng);
    const int rows = 6;
    MatrixXd x = random_unit_rows(rows, 4, rng);
    std::vector<int> labels = {0, 1, 1, 0, 1, 0};
    MatrixXd y = qdbn::one_hot(labels, 2);

    TrainSchedule sched;
    sched.minibatch_size = rows;  // one batch covers everything
    sched.backprop_rate = 1.0;    // update equals the negative gradient
    qdbn::BackpropRunner runner(dbn, x, y, sched, 5);
    runner.advance(1);
    const DbnModel& after = runner.model();

    const double fd_eps = 1e-5;
    auto fd_check = [&](auto get_ref, double analytic) {
        DbnModel probe = dbn;
        double& slot = get_ref(probe);
        const double orig = slot;
        slot = orig + fd_eps;
        const double up = model_loss(probe, x, y);
        slot = orig - fd_eps;
        const double down = model_loss(probe, x, y);
        const double numeric = (up - down) / (2.0 * fd_eps);
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        CHECK(std::abs(numeric - analytic) / scale < 1e-5);
    };

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            fd_check([=](DbnModel& m) -> double& { return m.layers[0].weights(i, j); },
                     dbn.layers[0].weights(i, j) - after.layers[0].weights(i, j));
    for (int j = 0; j < 3; ++j)
        fd_check([=](DbnModel& m) -> double& { return m.layers[0].hidden_bias(j); },
                 dbn.layers[0].hidden_bias(j) - after.layers[0].hidden_bias(j));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            fd_check([=](DbnModel& m) -> double& { return m.layers[1].weights(i, j); },
                     dbn.layers[1].weights(i, j) - after.layers[1].weights(i, j));
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            fd_check([=](DbnModel& m) -> double& { return m.output_weights(i, j); },
                     dbn.output_weights(i, j) - after.output_weights(i, j));
    for (Eigen::Index j = 0; j < 2; ++j)
        fd_check([=](DbnModel& m) -> double& { return m.output_weights(3, j); },
                 dbn.output_weights(3, j) - after.output_weights(3, j));
}

TEST_CASE("backprop: separable blobs reach perfect training accuracy") {
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng = qdbn::make_stream(83, seed);
        MatrixXd x;
        std::vector<int> y;
        make_blobs(60, rng, x, y);

        DbnModel dbn = random_model({4, 6}, 2, rng, 1.0);
        MatrixXd targets = qdbn::one_hot(y, 2);
        const double start_loss = model_loss(dbn, x, targets);

        TrainSchedule sched;
        sched.minibatch_size = 20;
        sched.backprop_rate = 0.2;
        qdbn::BackpropRunner runner(dbn, x, targets, sched, 1000 + seed);
        runner.advance(500);

        CAPTURE(seed);
        CHECK(model_loss(runner.model(), x, targets) < start_loss);
        CHECK(qdbn::evaluate(runner.model(), x, y) == 1.0);
    }
}

TEST_CASE("backprop: segmented runs match a straight run exactly") {
    Rng rng = qdbn::make_stream(84);
    DbnModel dbn = random_model({4, 3}, 2, rng);
    MatrixXd x = random_unit_rows(17, 4, rng);
    std::vector<int> labels(17);
    for (int r = 0; r < 17; ++r) labels[r] = r % 2;
    MatrixXd y = qdbn::one_hot(labels, 2);

    TrainSchedule sched;
    sched.minibatch_size = 5;
    sched.backprop_rate = 0.2;

    qdbn::BackpropRunner straight(dbn, x, y, sched, 42);
    straight.advance(60);
    qdbn::BackpropRunner segmented(dbn, x, y, sched, 42);
    segmented.advance(13);
    segmented.advance(29);
    segmented.advance(18);
    CHECK(segmented.iterations_done() == 60);
    CHECK((straight.model().layers[0].weights - segmented.model().layers[0].weights)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((straight.model().output_weights - segmented.model().output_weights)
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("backprop: non-finite loss raises a numerical error") {
    Rng rng = qdbn::make_stream(85);
    DbnModel dbn = random_model({3, 2}, 2, rng);
    dbn.output_weights.setConstant(1e308);
    MatrixXd x = random_unit_rows(4, 3, rng);
    MatrixXd y = qdbn::one_hot({0, 1, 0, 1}, 2);
    TrainSchedule sched;
    qdbn::BackpropRunner runner(dbn, x, y, sched, 1);
    CHECK_THROWS_AS(runner.advance(3), qdbn::NumericalError);
}

TEST_CASE("evaluate: ties, chance level, scaling invariance, edge cases") {
    // constant activations and a crafted head give exact score ties
    DbnModel dbn;
    dbn.layers.emplace_back(2, 2);
    dbn.output_weights = MatrixXd::Zero(3, 3);
    dbn.output_weights.row(2) << 0.7, 0.7, 0.2;  // classes 0 and 1 tie
    MatrixXd x = MatrixXd::Constant(3, 2, 0.4);
    CHECK(qdbn::evaluate(dbn, x, {0, 0, 0}) == 1.0);  // tie goes to class 0
    CHECK(qdbn::evaluate(dbn, x, {1, 1, 1}) == 0.0);
    CHECK(qdbn::evaluate(dbn, x, {0, 1, 0}) == doctest::Approx(2.0 / 3.0));

    // chance level against a fixed predictor
    Rng rng = qdbn::make_stream(86);
    std::vector<int> random_labels(10000);
    for (auto& l : random_labels) l = static_cast<int>(qdbn::uniform_below(rng, 10));
    DbnModel fixed;
    fixed.layers.emplace_back(2, 2);
    fixed.output_weights = MatrixXd::Zero(3, 10);
    fixed.output_weights(2, 4) = 1.0;  // always predicts class 4
    MatrixXd xr = MatrixXd::Constant(10000, 2, 0.5);
    const double acc = qdbn::evaluate(fixed, xr, random_labels);
    CHECK(std::abs(acc - 0.1) < 0.02);

    // positive scaling never changes the argmax
    DbnModel scaled = fixed;
    scaled.output_weights *= 7.5;
    CHECK(qdbn::evaluate(scaled, xr, random_labels) == acc);

    MatrixXd one_row = MatrixXd::Constant(1, 2, 0.5);
    const double single = qdbn::evaluate(fixed, one_row, {4});
    CHECK(single == 1.0);
    CHECK_THROWS_AS(qdbn::evaluate(fixed, MatrixXd(0, 2), {}), std::invalid_argument);
    CHECK_THROWS_AS(qdbn::evaluate(fixed, one_row, {1, 2}), std::invalid_argument);
}

TEST_CASE("model files: round-trip and rejection") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "qdbn_model_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    Rng rng = qdbn::make_stream(87);
    DbnModel dbn = random_model({5, 4, 3}, 2, rng);
    dbn.layers[0].mask(1, 2) = true;
    dbn.layers[0].weights(1, 2) = 0.0;

    const std::string path = (dir / "model.txt").string();
    qdbn::save_model(dbn, path);
    DbnModel back = qdbn::load_model(path);
    REQUIRE(back.layers.size() == 2);
    for (std::size_t t = 0; t < 2; ++t) {
        CHECK((back.layers[t].weights - dbn.layers[t].weights).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.layers[t].visible_bias - dbn.layers[t].visible_bias).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.layers[t].hidden_bias - dbn.layers[t].hidden_bias).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(back.layers[0].mask(1, 2));
    CHECK_FALSE(back.layers[0].mask(0, 0));
    CHECK((back.output_weights - dbn.output_weights).cwiseAbs().maxCoeff() == 0.0);

    {
        std::ofstream bad(dir / "bad.txt");
        bad << "not-a-model 1\n";
    }
    CHECK_THROWS_AS(qdbn::load_model((dir / "bad.txt").string()), qdbn::DataError);
    CHECK_THROWS_AS(qdbn::load_model((dir / "missing.txt").string()), qdbn::DataError);

    DbnModel broken = dbn;
    broken.layers[1] = RbmParams(9, 3);  // does not chain
    CHECK_THROWS_AS(qdbn::save_model(broken, (dir / "x.txt").string()),
                    std::invalid_argument);
}

TEST_CASE("train schedule validation") {
    TrainSchedule s;
    CHECK_NOTHROW(s.validate());
    TrainSchedule bad = s;
    bad.pretrain_iters = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.momentum_late = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.minibatch_size = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.backprop_rate = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
