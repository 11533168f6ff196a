#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdbn/calibration.hpp"
#include "qdbn/dbn.hpp"
#include "qdbn/digest.hpp"
#include "qdbn/errors.hpp"
#include "qdbn/experiment.hpp"
#include "qdbn/mnist.hpp"
#include "qdbn/sampler.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_out_dir(const char* fallback) {
    const char* env = std::getenv("QDBN_OUT_DIR");
    return env && *env ? env : fallback;
}

qdbn::ChimeraGraph graph_from(int rows, int cols, int k,
                              const std::vector<std::string>& fault_specs) {
    std::vector<qdbn::QubitCoord> faults;
    for (const std::string& s : fault_specs) {
        int r, c, i;
        char side;
        if (std::sscanf(s.c_str(), "%d,%d,%c,%d", &r, &c, &side, &i) != 4 ||
            (side != 'V' && side != 'H'))
            throw CLI::ValidationError("--fault", "expected row,col,V|H,index: " + s);
        faults.push_back({r, c, side == 'V' ? qdbn::Side::vertical : qdbn::Side::horizontal, i});
    }
    return qdbn::build_chimera(rows, cols, k, faults);
}

void add_sampler_flags(CLI::App* cmd, qdbn::SamplerConfig& sc) {
    cmd->add_option("--beta", sc.beta_eff, "effective inverse temperature");
    cmd->add_option("--reads", sc.reads_per_gauge, "reads per gauge");
    cmd->add_option("--voting", sc.voting_threshold, "chain voting threshold r");
    cmd->add_option("--j-fm", sc.j_fm, "ferromagnetic chain coupling");
    cmd->add_option("--sweeps", sc.mcmc_sweeps, "equilibration sweeps per read");
    cmd->add_flag("--noise", sc.noise.enabled, "enable the control-error model");
    cmd->add_option("--sampler-seed", sc.seed, "sampler seed");
}

int run(int argc, char** argv) {
    CLI::App app{"deep belief network training with annealer-simulated sampling"};
    app.require_subcommand(1);

    // prepare-data
    auto* prep = app.add_subcommand("prepare-data",
                                    "coarse-grain a raw digit corpus into cg files");
    std::string prep_out = default_out_dir("data");
    std::string mnist_dir;
    bool synthetic = false;
    int n_train = 60000, n_test = 10000;
    std::uint64_t prep_seed = 7;
    prep->add_option("--out", prep_out, "output directory");
    prep->add_option("--mnist-dir", mnist_dir, "directory with idx image/label files");
    prep->add_flag("--synthetic", synthetic, "generate the deterministic stand-in corpus");
    prep->add_option("--train-count", n_train, "synthetic training images");
    prep->add_option("--test-count", n_test, "synthetic test images");
    prep->add_option("--seed", prep_seed, "synthetic corpus seed");

    // calibrate-beta
    auto* cal = app.add_subcommand("calibrate-beta",
                                   "grid-search beta_eff against a reference sampler");
    int cal_n = 32, cal_m = 32;
    int cal_rows = 8, cal_cols = 8, cal_k = 4;
    std::vector<std::string> cal_faults;
    qdbn::CalibrationConfig cal_cfg;
    std::uint64_t cal_seed = 1;
    cal->add_option("--visible", cal_n, "visible units");
    cal->add_option("--hidden", cal_m, "hidden units");
    cal->add_option("--candidates", cal_cfg.candidates, "beta grid")->delimiter(',');
    cal->add_option("--repetitions", cal_cfg.repetitions, "test instances");
    cal->add_option("--spread", cal_cfg.spread, "test parameter range");
    cal->add_option("--rows", cal_rows, "lattice cell rows");
    cal->add_option("--cols", cal_cols, "lattice cell cols");
    cal->add_option("--cell-size", cal_k, "qubits per cell half");
    cal->add_option("--fault", cal_faults, "faulty qubit row,col,V|H,index")
        ->take_all();
    cal->add_option("--seed", cal_seed, "rng seed");
    add_sampler_flags(cal, cal_cfg.sampler);

    // pretrain
    auto* pre = app.add_subcommand("pretrain", "layerwise generative pretraining");
    std::string pre_data, pre_model_out;
    std::vector<int> pre_sizes = {32, 32, 32};
    int pre_classes = 10;
    std::string pre_backend = "cd1";
    int pre_iters = 1;
    std::uint64_t pre_seed = 1;
    int pre_rows = 8, pre_cols = 8, pre_k = 4;
    std::vector<std::string> pre_faults;
    qdbn::SamplerConfig pre_sc;
    pre->add_option("--data", pre_data, "training cg file")->required();
    pre->add_option("--model-out", pre_model_out, "model file to write")->required();
    pre->add_option("--sizes", pre_sizes, "layer sizes, input first")->delimiter(',');
    pre->add_option("--classes", pre_classes, "output classes");
    pre->add_option("--backend", pre_backend, "exact|cd1|gibbs|chimera");
    pre->add_option("-N,--iters", pre_iters, "pretraining iterations per layer");
    pre->add_option("--seed", pre_seed, "rng seed");
    pre->add_option("--rows", pre_rows, "lattice cell rows");
    pre->add_option("--cols", pre_cols, "lattice cell cols");
    pre->add_option("--cell-size", pre_k, "qubits per cell half");
    pre->add_option("--fault", pre_faults, "faulty qubit row,col,V|H,index")->take_all();
    add_sampler_flags(pre, pre_sc);

    // finetune
    auto* fine = app.add_subcommand("finetune", "supervised backprop on a saved model");
    std::string fine_data, fine_model, fine_model_out;
    int fine_iters = 1000, fine_minibatch = 100;
    double fine_rate = 0.1, fine_ridge = 1e-6;
    std::uint64_t fine_seed = 1;
    fine->add_option("--data", fine_data, "training cg file")->required();
    fine->add_option("--model", fine_model, "model file to read")->required();
    fine->add_option("--model-out", fine_model_out, "model file to write")->required();
    fine->add_option("--iters", fine_iters, "backprop iterations");
    fine->add_option("--minibatch", fine_minibatch, "minibatch size");
    fine->add_option("--rate", fine_rate, "backprop learning rate");
    fine->add_option("--head-ridge", fine_ridge, "ridge for the head least squares");
    fine->add_option("--seed", fine_seed, "rng seed");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "classification accuracy of a saved model");
    std::string ev_data, ev_model;
    ev->add_option("--data", ev_data, "cg file")->required();
    ev->add_option("--model", ev_model, "model file")->required();

    // compare
    auto* cmp = app.add_subcommand("compare",
                                   "train every configured arm across the sweep");
    std::string cmp_config;
    bool print_config = false;
    std::string cmp_out;
    std::uint64_t cmp_seed = 0;
    bool cmp_seed_set = false, cmp_out_set = false;
    cmp->add_option("--config", cmp_config, "experiment config JSON")->required();
    cmp->add_flag("--print-config", print_config, "echo the effective config and exit");
    cmp->add_option("--out", cmp_out, "override the output directory")
        ->each([&](const std::string&) { cmp_out_set = true; });
    cmp->add_option("--seed", cmp_seed, "override the seed")
        ->each([&](const std::string&) { cmp_seed_set = true; });

    // summarize
    auto* summ = app.add_subcommand("summarize", "aggregate a results table");
    std::string summ_dir = default_out_dir("results");
    summ->add_option("--out", summ_dir, "directory holding results.csv");

    // topology dump
    auto* topo = app.add_subcommand("topology", "lattice inspection");
    auto* topo_dump = topo->add_subcommand("dump", "print qubits and couplers");
    int topo_rows = 8, topo_cols = 8, topo_k = 4;
    std::vector<std::string> topo_faults;
    topo_dump->add_option("--rows", topo_rows, "cell rows");
    topo_dump->add_option("--cols", topo_cols, "cell cols");
    topo_dump->add_option("--cell-size", topo_k, "qubits per cell half");
    topo_dump->add_option("--fault", topo_faults, "faulty qubit row,col,V|H,index")
        ->take_all();
    topo->require_subcommand(1);

    // ising dump
    auto* ising = app.add_subcommand("ising", "embedded problem inspection");
    auto* ising_dump =
        ising->add_subcommand("dump", "print the hardware Ising model for a random case");
    int is_n = 4, is_m = 4;
    int is_rows = 2, is_cols = 2, is_k = 4;
    double is_beta = 2.0, is_jfm = 1.0;
    std::uint64_t is_seed = 1;
    ising_dump->add_option("--visible", is_n, "visible units");
    ising_dump->add_option("--hidden", is_m, "hidden units");
    ising_dump->add_option("--rows", is_rows, "cell rows");
    ising_dump->add_option("--cols", is_cols, "cell cols");
    ising_dump->add_option("--cell-size", is_k, "qubits per cell half");
    ising_dump->add_option("--beta", is_beta, "effective inverse temperature");
    ising_dump->add_option("--j-fm", is_jfm, "chain coupling");
    ising_dump->add_option("--seed", is_seed, "rng seed for the random parameters");
    ising->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (prep->parsed()) {
        if (synthetic && !mnist_dir.empty())
            throw CLI::ValidationError("prepare-data",
                                       "pass either --synthetic or --mnist-dir");
        if (!synthetic && mnist_dir.empty())
            throw CLI::ValidationError("prepare-data",
                                       "pass --synthetic or --mnist-dir");
        fs::create_directories(prep_out);
        qdbn::MnistPaths paths;
        if (synthetic) {
            qdbn::SyntheticSpec spec;
            spec.n_train = n_train;
            spec.n_test = n_test;
            spec.seed = prep_seed;
            paths = qdbn::write_synthetic_mnist(prep_out, spec);
            std::cout << "wrote synthetic corpus (" << n_train << " train, " << n_test
                      << " test)\n";
        } else {
            paths = qdbn::locate_mnist(mnist_dir);
        }
        qdbn::RawMnist train = qdbn::load_idx(paths.train_images, paths.train_labels);
        qdbn::RawMnist test = qdbn::load_idx(paths.test_images, paths.test_labels);
        qdbn::CgDataset train_cg = qdbn::coarse_grain_dataset(
            train, qdbn::file_digest_hex(paths.train_images),
            qdbn::file_digest_hex(paths.train_labels));
        qdbn::CgDataset test_cg = qdbn::coarse_grain_dataset(
            test, qdbn::file_digest_hex(paths.test_images),
            qdbn::file_digest_hex(paths.test_labels));
        const std::string train_path = (fs::path(prep_out) / "train.cg").string();
        const std::string test_path = (fs::path(prep_out) / "test.cg").string();
        qdbn::save_cg_dataset(train_cg, train_path);
        qdbn::save_cg_dataset(test_cg, test_path);
        std::cout << "wrote " << train_path << " (" << train_cg.count() << " rows)\n"
                  << "wrote " << test_path << " (" << test_cg.count() << " rows)\n";
        return 0;
    }

    if (cal->parsed()) {
        qdbn::ChimeraGraph g = graph_from(cal_rows, cal_cols, cal_k, cal_faults);
        qdbn::Rng rng = qdbn::make_stream(cal_seed);
        qdbn::CalibrationReport rep = qdbn::calibrate(cal_n, cal_m, cal_cfg, g, rng);
        std::cout << "candidates:";
        for (std::size_t i = 0; i < rep.candidates.size(); ++i)
            std::cout << ' ' << rep.candidates[i] << " (L1 " << rep.l1_errors[i] << ")";
        std::cout << "\nreference: " << rep.reference << "\nchosen beta_eff: " << rep.chosen
                  << "\n";
        return 0;
    }

    if (pre->parsed()) {
        qdbn::CgDataset data = qdbn::load_cg_dataset(pre_data);
        qdbn::ChimeraGraph g;
        std::unique_ptr<qdbn::Estimator> backend;
        if (pre_backend == "chimera") {
            g = graph_from(pre_rows, pre_cols, pre_k, pre_faults);
            backend = qdbn::make_estimator(pre_backend, pre_sc, &g);
        } else {
            backend = qdbn::make_estimator(pre_backend, pre_sc);
        }
        qdbn::TrainSchedule sched;
        sched.pretrain_iters = pre_iters;
        qdbn::Rng rng = qdbn::make_stream(pre_seed);

        std::vector<qdbn::MaskMatrix> masks;
        const std::vector<qdbn::MaskMatrix>* masks_ptr = nullptr;
        if (pre_backend == "chimera" && !pre_faults.empty()) {
            for (std::size_t t = 0; t + 1 < pre_sizes.size(); ++t) {
                qdbn::Embedding emb =
                    qdbn::embed_rbm(pre_sizes[t], pre_sizes[t + 1], g);
                masks.push_back(qdbn::missing_mask(emb, pre_sizes[t], pre_sizes[t + 1]));
            }
            masks_ptr = &masks;
        }

        qdbn::DbnModel dbn;
        dbn.layers = qdbn::pretrain(pre_sizes, data.rows, *backend, sched, rng, masks_ptr);
        dbn.output_weights =
            qdbn::MatrixXd::Zero(dbn.layers.back().n_hidden + 1, pre_classes);
        qdbn::save_model(dbn, pre_model_out);
        std::cout << "wrote " << pre_model_out << " (" << dbn.layers.size()
                  << " layers, head untrained)\n";
        return 0;
    }

    if (fine->parsed()) {
        qdbn::DbnModel dbn = qdbn::load_model(fine_model);
        qdbn::CgDataset data = qdbn::load_cg_dataset(fine_data);
        const int classes = static_cast<int>(dbn.output_weights.cols());
        qdbn::MatrixXd targets = qdbn::one_hot(data.labels, classes);
        if (dbn.output_weights.cwiseAbs().maxCoeff() == 0.0) {
            dbn.output_weights = qdbn::pseudoinverse_init(
                qdbn::propagate(dbn.layers, data.rows), targets, fine_ridge);
            std::cout << "head initialized by least squares\n";
        }
        qdbn::TrainSchedule sched;
        sched.backprop_iters = fine_iters;
        sched.minibatch_size = fine_minibatch;
        sched.backprop_rate = fine_rate;
        qdbn::Rng rng = qdbn::make_stream(fine_seed);
        dbn = qdbn::backprop_finetune(dbn, data.rows, data.labels, sched, rng);
        qdbn::save_model(dbn, fine_model_out);
        std::cout << "wrote " << fine_model_out << " after " << fine_iters
                  << " iterations (train accuracy "
                  << qdbn::evaluate(dbn, data.rows, data.labels) << ")\n";
        return 0;
    }

    if (ev->parsed()) {
        qdbn::DbnModel dbn = qdbn::load_model(ev_model);
        qdbn::CgDataset data = qdbn::load_cg_dataset(ev_data);
        std::cout << "accuracy: " << qdbn::evaluate(dbn, data.rows, data.labels) << " on "
                  << data.count() << " rows\n";
        return 0;
    }

    if (cmp->parsed()) {
        qdbn::ExperimentConfig cfg = qdbn::load_config(cmp_config);
        if (cmp_out_set) cfg.out_dir = cmp_out;
        if (cmp_seed_set) cfg.seed = cmp_seed;
        if (!cmp_out_set && cfg.out_dir.empty()) cfg.out_dir = default_out_dir("results");
        if (print_config) {
            std::cout << qdbn::config_to_json(cfg) << "\n";
            return 0;
        }
        qdbn::RunProgress prog;
        std::vector<qdbn::ResultRecord> table = qdbn::run_comparison(
            cfg, &prog, [](const std::string& line) { std::cout << line << "\n"; });
        std::cout << "jobs: " << prog.jobs_done << " run, " << prog.jobs_skipped
                  << " already present, " << prog.jobs_failed << " failed\n"
                  << "records: " << table.size() << " in "
                  << (fs::path(cfg.out_dir) / "results.csv").string() << "\n";
        return 0;
    }

    if (summ->parsed()) {
        const std::string results = (fs::path(summ_dir) / "results.csv").string();
        std::vector<qdbn::ResultRecord> table = qdbn::load_results(results);
        if (table.empty()) throw qdbn::DataError("no records in " + results);
        std::vector<qdbn::SummaryRow> rows = qdbn::summarize(table);
        const std::string summary = (fs::path(summ_dir) / "summary.csv").string();
        const std::string script = (fs::path(summ_dir) / "plot_results.py").string();
        qdbn::write_summary(rows, summary);
        qdbn::write_plot_script(script, summary);
        for (const qdbn::SummaryRow& r : rows)
            std::cout << r.arm << " N=" << r.n_pretrain << " cp=" << r.checkpoint
                      << ": test " << r.test_mean << " +- " << r.test_sd << " (train "
                      << r.train_mean << ", " << r.n_trials << " trials)\n";
        std::cout << "wrote " << summary << " and " << script << "\n";
        return 0;
    }

    if (topo->parsed()) {
        qdbn::ChimeraGraph g = graph_from(topo_rows, topo_cols, topo_k, topo_faults);
        int usable = 0;
        for (int q = 0; q < g.num_qubits(); ++q) usable += g.usable(q);
        std::cout << "qubits: " << g.num_qubits() << " (" << usable << " usable)\n"
                  << "couplers: " << g.couplers.size() << "\n";
        for (const auto& [a, b] : g.couplers) std::cout << a << " " << b << "\n";
        return 0;
    }

    if (ising->parsed()) {
        qdbn::ChimeraGraph g = qdbn::build_chimera(is_rows, is_cols, is_k);
        qdbn::Embedding emb = qdbn::embed_rbm(is_n, is_m, g);
        qdbn::Rng rng = qdbn::make_stream(is_seed);
        qdbn::RbmParams p = qdbn::random_rbm(is_n, is_m, rng, 0.5);
        qdbn::IsingModel logical = qdbn::qubo_to_ising(qdbn::rbm_to_qubo(p, is_beta));
        qdbn::IsingModel hw = qdbn::embed_ising(logical, emb, is_jfm);
        std::cout << "logical nodes: " << logical.h.size() << ", offset " << logical.offset
                  << "\nhardware qubits: " << hw.h.size() << "\n";
        for (Eigen::Index i = 0; i < hw.h.size(); ++i)
            if (hw.h[i] != 0.0) std::cout << "h " << i << " " << hw.h[i] << "\n";
        for (const qdbn::Coupling& c : hw.couplings)
            std::cout << "J " << c.a << " " << c.b << " " << c.j << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const qdbn::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const qdbn::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
