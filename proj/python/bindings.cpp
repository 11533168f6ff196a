#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>

#include "qdbn/calibration.hpp"
#include "qdbn/chimera.hpp"
#include "qdbn/dbn.hpp"
#include "qdbn/digest.hpp"
#include "qdbn/errors.hpp"
#include "qdbn/experiment.hpp"
#include "qdbn/ising.hpp"
#include "qdbn/mnist.hpp"
#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"
#include "qdbn/sampler.hpp"

namespace py = pybind11;

namespace {

qdbn::QubitCoord coord_from_tuple(const std::tuple<int, int, std::string, int>& t) {
    qdbn::QubitCoord c;
    c.cell_row = std::get<0>(t);
    c.cell_col = std::get<1>(t);
    const std::string& side = std::get<2>(t);
    if (side == "V" || side == "v")
        c.side = qdbn::Side::vertical;
    else if (side == "H" || side == "h")
        c.side = qdbn::Side::horizontal;
    else
        throw std::invalid_argument("qubit side must be 'V' or 'H', got '" + side + "'");
    c.index = std::get<3>(t);
    return c;
}

std::vector<qdbn::QubitCoord> coords_from_list(
    const std::vector<std::tuple<int, int, std::string, int>>& faults) {
    std::vector<qdbn::QubitCoord> out;
    out.reserve(faults.size());
    for (const auto& t : faults) out.push_back(coord_from_tuple(t));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deep belief network training with pluggable model-expectation backends";

    py::register_exception<qdbn::DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<qdbn::NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    // datasets
    py::class_<qdbn::CgDataset>(m, "CgDataset")
        .def(py::init<>())
        .def_readwrite("rows", &qdbn::CgDataset::rows)
        .def_readwrite("labels", &qdbn::CgDataset::labels)
        .def_readonly("images_digest", &qdbn::CgDataset::images_digest)
        .def_readonly("labels_digest", &qdbn::CgDataset::labels_digest)
        .def("count", &qdbn::CgDataset::count)
        .def("__repr__", [](const qdbn::CgDataset& d) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "CgDataset(%d rows, %d features)", d.count(),
                          static_cast<int>(d.rows.cols()));
            return std::string(buf);
        });

    m.def(
        "write_synthetic_corpus",
        [](const std::string& dir, int n_train, int n_test, std::uint64_t seed) {
            qdbn::SyntheticSpec spec;
            spec.n_train = n_train;
            spec.n_test = n_test;
            spec.seed = seed;
            qdbn::MnistPaths paths = qdbn::write_synthetic_mnist(dir, spec);
            py::dict d;
            d["train_images"] = paths.train_images;
            d["train_labels"] = paths.train_labels;
            d["test_images"] = paths.test_images;
            d["test_labels"] = paths.test_labels;
            return d;
        },
        py::arg("dir"), py::arg("n_train") = 60000, py::arg("n_test") = 10000,
        py::arg("seed") = 7,
        "Write a synthetic digit corpus in idx format; returns the four file paths.");

    m.def(
        "coarse_grain",
        [](const std::string& dir) {
            qdbn::MnistPaths paths = qdbn::locate_mnist(dir);
            qdbn::RawMnist train = qdbn::load_idx(paths.train_images, paths.train_labels);
            qdbn::RawMnist test = qdbn::load_idx(paths.test_images, paths.test_labels);
            qdbn::CgDataset tr = qdbn::coarse_grain_dataset(
                train, qdbn::file_digest_hex(paths.train_images),
                qdbn::file_digest_hex(paths.train_labels));
            qdbn::CgDataset te = qdbn::coarse_grain_dataset(
                test, qdbn::file_digest_hex(paths.test_images),
                qdbn::file_digest_hex(paths.test_labels));
            return py::make_tuple(tr, te);
        },
        py::arg("dir"),
        "Load an idx corpus from dir and coarse-grain it; returns (train, test).");

    m.def("save_dataset", &qdbn::save_cg_dataset, py::arg("dataset"), py::arg("path"));
    m.def("load_dataset", &qdbn::load_cg_dataset, py::arg("path"));
    m.def(
        "split_training_sets",
        [](const qdbn::CgDataset& d, int n_splits) {
            return qdbn::split_training_sets(d, n_splits);
        },
        py::arg("dataset"), py::arg("n_splits"));

    // rbm
    py::class_<qdbn::RbmParams>(m, "RbmParams")
        .def(py::init<int, int>(), py::arg("n_visible"), py::arg("n_hidden"))
        .def_readonly("n_visible", &qdbn::RbmParams::n_visible)
        .def_readonly("n_hidden", &qdbn::RbmParams::n_hidden)
        .def_readwrite("weights", &qdbn::RbmParams::weights)
        .def_readwrite("visible_bias", &qdbn::RbmParams::visible_bias)
        .def_readwrite("hidden_bias", &qdbn::RbmParams::hidden_bias)
        .def_property(
            "mask", [](const qdbn::RbmParams& p) { return p.mask; },
            [](qdbn::RbmParams& p, const qdbn::MaskMatrix& mask) {
                p.mask = mask;
                p.zero_masked_weights();
            });

    m.def(
        "random_rbm",
        [](int n, int m_, double weight_sd, std::uint64_t seed) {
            qdbn::Rng rng = qdbn::make_stream(seed);
            return qdbn::random_rbm(n, m_, rng, weight_sd);
        },
        py::arg("n_visible"), py::arg("n_hidden"), py::arg("weight_sd") = 0.01,
        py::arg("seed") = 0);

    py::class_<qdbn::ExpectationSet>(m, "ExpectationSet")
        .def_readonly("vh", &qdbn::ExpectationSet::vh)
        .def_readonly("v", &qdbn::ExpectationSet::v)
        .def_readonly("h", &qdbn::ExpectationSet::h);

    m.def("exact_expectations",
          [](const qdbn::RbmParams& p) { return qdbn::exact_expectations(p); },
          py::arg("rbm"));
    m.def("clamped_expectations", &qdbn::clamped_expectations, py::arg("rbm"),
          py::arg("batch"));
    m.def("hidden_probabilities", &qdbn::hidden_probabilities, py::arg("rbm"),
          py::arg("batch"));
    m.def("log_partition_function",
          [](const qdbn::RbmParams& p) { return qdbn::log_partition_function(p); },
          py::arg("rbm"));

    // hardware topology
    py::class_<qdbn::ChimeraGraph>(m, "ChimeraGraph")
        .def_readonly("grid_rows", &qdbn::ChimeraGraph::grid_rows)
        .def_readonly("grid_cols", &qdbn::ChimeraGraph::grid_cols)
        .def_readonly("k", &qdbn::ChimeraGraph::k)
        .def_readonly("couplers", &qdbn::ChimeraGraph::couplers)
        .def("num_qubits", &qdbn::ChimeraGraph::num_qubits)
        .def("num_couplers", &qdbn::ChimeraGraph::num_couplers)
        .def("usable", &qdbn::ChimeraGraph::usable, py::arg("id"))
        .def("degree", &qdbn::ChimeraGraph::degree, py::arg("id"));

    m.def(
        "build_chimera",
        [](int rows, int cols, int k,
           const std::vector<std::tuple<int, int, std::string, int>>& faults) {
            return qdbn::build_chimera(rows, cols, k, coords_from_list(faults));
        },
        py::arg("grid_rows") = 8, py::arg("grid_cols") = 8, py::arg("k") = 4,
        py::arg("faulty_qubits") = std::vector<std::tuple<int, int, std::string, int>>{},
        "Chimera lattice; faults are (cell_row, cell_col, 'V'|'H', index) tuples.");

    m.def(
        "missing_masks",
        [](const std::vector<int>& sizes, const qdbn::ChimeraGraph& g) {
            std::vector<qdbn::MaskMatrix> masks;
            for (std::size_t t = 0; t + 1 < sizes.size(); ++t) {
                qdbn::Embedding e = qdbn::embed_rbm(sizes[t], sizes[t + 1], g);
                masks.push_back(qdbn::missing_mask(e, sizes[t], sizes[t + 1]));
            }
            return masks;
        },
        py::arg("sizes"), py::arg("graph"),
        "Per-layer boolean masks of RBM connections lost to faulty hardware.");

    // sampling backends
    py::class_<qdbn::NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_readwrite("enabled", &qdbn::NoiseModel::enabled)
        .def_readwrite("precision_bits", &qdbn::NoiseModel::precision_bits)
        .def_readwrite("leakage_fraction", &qdbn::NoiseModel::leakage_fraction)
        .def_readwrite("jitter_sd", &qdbn::NoiseModel::jitter_sd);

    py::class_<qdbn::HardwareRanges>(m, "HardwareRanges")
        .def(py::init<>())
        .def_readwrite("h_max", &qdbn::HardwareRanges::h_max)
        .def_readwrite("j_max", &qdbn::HardwareRanges::j_max);

    py::class_<qdbn::SamplerConfig>(m, "SamplerConfig")
        .def(py::init<>())
        .def_readwrite("beta_eff", &qdbn::SamplerConfig::beta_eff)
        .def_readwrite("reads_per_gauge", &qdbn::SamplerConfig::reads_per_gauge)
        .def_readwrite("gauges", &qdbn::SamplerConfig::gauges)
        .def_readwrite("voting_threshold", &qdbn::SamplerConfig::voting_threshold)
        .def_readwrite("j_fm", &qdbn::SamplerConfig::j_fm)
        .def_readwrite("noise", &qdbn::SamplerConfig::noise)
        .def_readwrite("ranges", &qdbn::SamplerConfig::ranges)
        .def_readwrite("mcmc_sweeps", &qdbn::SamplerConfig::mcmc_sweeps)
        .def_readwrite("gibbs_burn", &qdbn::SamplerConfig::gibbs_burn)
        .def_readwrite("gibbs_samples", &qdbn::SamplerConfig::gibbs_samples)
        .def_readwrite("seed", &qdbn::SamplerConfig::seed);

    py::class_<qdbn::Estimator>(m, "Estimator")
        .def("name", &qdbn::Estimator::name)
        .def(
            "estimate",
            [](qdbn::Estimator& est, const qdbn::RbmParams& p, const qdbn::MatrixXd& batch,
               std::uint64_t seed) {
                qdbn::Rng rng = qdbn::make_stream(seed);
                return est.estimate(p, batch, rng);
            },
            py::arg("rbm"), py::arg("batch"), py::arg("seed") = 0);

    m.def(
        "make_estimator",
        [](const std::string& kind, const qdbn::SamplerConfig& cfg,
           const qdbn::ChimeraGraph* graph) { return qdbn::make_estimator(kind, cfg, graph); },
        py::arg("kind"), py::arg("config") = qdbn::SamplerConfig{},
        py::arg("graph") = nullptr, py::keep_alive<0, 3>(),
        "Model-expectation backend: 'exact', 'cd1', 'gibbs', or 'chimera'.");

    // calibration
    py::class_<qdbn::CalibrationConfig>(m, "CalibrationConfig")
        .def(py::init<>())
        .def_readwrite("candidates", &qdbn::CalibrationConfig::candidates)
        .def_readwrite("repetitions", &qdbn::CalibrationConfig::repetitions)
        .def_readwrite("spread", &qdbn::CalibrationConfig::spread)
        .def_readwrite("sampler", &qdbn::CalibrationConfig::sampler)
        .def_readwrite("reference_burn", &qdbn::CalibrationConfig::reference_burn)
        .def_readwrite("reference_samples", &qdbn::CalibrationConfig::reference_samples);

    py::class_<qdbn::CalibrationReport>(m, "CalibrationReport")
        .def_readonly("n_visible", &qdbn::CalibrationReport::n_visible)
        .def_readonly("n_hidden", &qdbn::CalibrationReport::n_hidden)
        .def_readonly("candidates", &qdbn::CalibrationReport::candidates)
        .def_readonly("l1_errors", &qdbn::CalibrationReport::l1_errors)
        .def_readonly("chosen", &qdbn::CalibrationReport::chosen)
        .def_readonly("repetitions", &qdbn::CalibrationReport::repetitions)
        .def_readonly("reference", &qdbn::CalibrationReport::reference);

    m.def(
        "calibrate",
        [](int n_visible, int n_hidden, const qdbn::CalibrationConfig& cfg,
           const qdbn::ChimeraGraph& graph, std::uint64_t seed) {
            qdbn::Rng rng = qdbn::make_stream(seed);
            py::gil_scoped_release release;
            return qdbn::calibrate(n_visible, n_hidden, cfg, graph, rng);
        },
        py::arg("n_visible"), py::arg("n_hidden"), py::arg("config"), py::arg("graph"),
        py::arg("seed") = 0,
        "Grid-search the effective inverse temperature against a reference.");

    m.def("default_beta_for", &qdbn::default_beta_for, py::arg("n_visible"),
          py::arg("n_hidden"));

    // dbn
    py::class_<qdbn::TrainSchedule>(m, "TrainSchedule")
        .def(py::init<>())
        .def_readwrite("pretrain_iters", &qdbn::TrainSchedule::pretrain_iters)
        .def_readwrite("learning_rate", &qdbn::TrainSchedule::learning_rate)
        .def_readwrite("momentum_early", &qdbn::TrainSchedule::momentum_early)
        .def_readwrite("momentum_late", &qdbn::TrainSchedule::momentum_late)
        .def_readwrite("momentum_switch", &qdbn::TrainSchedule::momentum_switch)
        .def_readwrite("init_weight_sd", &qdbn::TrainSchedule::init_weight_sd)
        .def_readwrite("backprop_iters", &qdbn::TrainSchedule::backprop_iters)
        .def_readwrite("minibatch_size", &qdbn::TrainSchedule::minibatch_size)
        .def_readwrite("backprop_rate", &qdbn::TrainSchedule::backprop_rate);

    py::class_<qdbn::DbnModel>(m, "DbnModel")
        .def(py::init([](const std::vector<qdbn::RbmParams>& layers, int n_classes) {
                 if (layers.empty()) throw std::invalid_argument("DbnModel needs layers");
                 qdbn::DbnModel dbn;
                 dbn.layers = layers;
                 dbn.output_weights =
                     qdbn::MatrixXd::Zero(layers.back().n_hidden + 1, n_classes);
                 dbn.validate();
                 return dbn;
             }),
             py::arg("layers"), py::arg("n_classes"))
        .def_readwrite("layers", &qdbn::DbnModel::layers)
        .def_readwrite("output_weights", &qdbn::DbnModel::output_weights)
        .def("n_input", &qdbn::DbnModel::n_input)
        .def("n_classes", &qdbn::DbnModel::n_classes)
        .def("layer_sizes", &qdbn::DbnModel::layer_sizes);

    m.def(
        "pretrain",
        [](const std::vector<int>& sizes, const qdbn::MatrixXd& data, qdbn::Estimator& backend,
           const qdbn::TrainSchedule& sched, std::uint64_t seed,
           const std::optional<std::vector<qdbn::MaskMatrix>>& masks) {
            qdbn::Rng rng = qdbn::make_stream(seed);
            py::gil_scoped_release release;
            return qdbn::pretrain(sizes, data, backend, sched, rng,
                                  masks ? &*masks : nullptr);
        },
        py::arg("sizes"), py::arg("data"), py::arg("backend"), py::arg("schedule"),
        py::arg("seed") = 0, py::arg("masks") = std::nullopt,
        "Layerwise generative pretraining; returns the trained RBM stack.");

    m.def("propagate", &qdbn::propagate, py::arg("layers"), py::arg("data"));
    m.def(
        "forward",
        [](const qdbn::DbnModel& dbn, const qdbn::MatrixXd& inputs) {
            return qdbn::forward(dbn, inputs).scores;
        },
        py::arg("model"), py::arg("inputs"), "Linear class scores, one row per input row.");
    m.def("one_hot", &qdbn::one_hot, py::arg("labels"), py::arg("n_classes"));
    m.def("pseudoinverse_init", &qdbn::pseudoinverse_init, py::arg("activations"),
          py::arg("targets"), py::arg("ridge") = 1e-8);

    m.def(
        "backprop_finetune",
        [](const qdbn::DbnModel& dbn, const qdbn::MatrixXd& data,
           const std::vector<int>& labels, const qdbn::TrainSchedule& sched,
           std::uint64_t seed) {
            qdbn::Rng rng = qdbn::make_stream(seed);
            py::gil_scoped_release release;
            return qdbn::backprop_finetune(dbn, data, labels, sched, rng);
        },
        py::arg("model"), py::arg("data"), py::arg("labels"), py::arg("schedule"),
        py::arg("seed") = 0);

    m.def("evaluate", &qdbn::evaluate, py::arg("model"), py::arg("data"), py::arg("labels"));
    m.def("save_model", &qdbn::save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &qdbn::load_model, py::arg("path"));

    // experiment driver
    py::class_<qdbn::ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("train_path", &qdbn::ExperimentConfig::train_path)
        .def_readwrite("test_path", &qdbn::ExperimentConfig::test_path)
        .def_readwrite("layer_sizes", &qdbn::ExperimentConfig::layer_sizes)
        .def_readwrite("n_classes", &qdbn::ExperimentConfig::n_classes)
        .def_readwrite("arms", &qdbn::ExperimentConfig::arms)
        .def_readwrite("sweep", &qdbn::ExperimentConfig::sweep)
        .def_readwrite("checkpoints", &qdbn::ExperimentConfig::checkpoints)
        .def_readwrite("trials", &qdbn::ExperimentConfig::trials)
        .def_readwrite("sampler", &qdbn::ExperimentConfig::sampler)
        .def_readwrite("schedule", &qdbn::ExperimentConfig::schedule)
        .def_readwrite("seed", &qdbn::ExperimentConfig::seed)
        .def_readwrite("out_dir", &qdbn::ExperimentConfig::out_dir)
        .def_readwrite("head_ridge", &qdbn::ExperimentConfig::head_ridge);

    m.def("load_config", &qdbn::load_config, py::arg("path"));
    m.def("save_config", &qdbn::save_config, py::arg("config"), py::arg("path"));
    m.def("config_digest", &qdbn::config_digest, py::arg("config"));

    py::class_<qdbn::ResultRecord>(m, "ResultRecord")
        .def_readonly("arm", &qdbn::ResultRecord::arm)
        .def_readonly("n_pretrain", &qdbn::ResultRecord::n_pretrain)
        .def_readonly("checkpoint", &qdbn::ResultRecord::checkpoint)
        .def_readonly("trial", &qdbn::ResultRecord::trial)
        .def_readonly("train_accuracy", &qdbn::ResultRecord::train_accuracy)
        .def_readonly("test_accuracy", &qdbn::ResultRecord::test_accuracy)
        .def_readonly("wall_time_s", &qdbn::ResultRecord::wall_time_s)
        .def_readonly("seed", &qdbn::ResultRecord::seed)
        .def_readonly("config_digest", &qdbn::ResultRecord::config_digest);

    py::class_<qdbn::SummaryRow>(m, "SummaryRow")
        .def_readonly("arm", &qdbn::SummaryRow::arm)
        .def_readonly("n_pretrain", &qdbn::SummaryRow::n_pretrain)
        .def_readonly("checkpoint", &qdbn::SummaryRow::checkpoint)
        .def_readonly("n_trials", &qdbn::SummaryRow::n_trials)
        .def_readonly("train_mean", &qdbn::SummaryRow::train_mean)
        .def_readonly("train_sd", &qdbn::SummaryRow::train_sd)
        .def_readonly("test_mean", &qdbn::SummaryRow::test_mean)
        .def_readonly("test_sd", &qdbn::SummaryRow::test_sd);

    m.def(
        "run_comparison",
        [](const qdbn::ExperimentConfig& cfg) {
            py::gil_scoped_release release;
            return qdbn::run_comparison(cfg);
        },
        py::arg("config"),
        "Run the classical-vs-hardware training comparison; appends to out_dir.");

    m.def("load_results", &qdbn::load_results, py::arg("path"));
    m.def("summarize", &qdbn::summarize, py::arg("records"));
    m.def("write_summary", &qdbn::write_summary, py::arg("rows"), py::arg("path"));
    m.def("write_plot_script", &qdbn::write_plot_script, py::arg("script_path"),
          py::arg("summary_csv"));
}
