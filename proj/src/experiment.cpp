#include "qdbn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "qdbn/digest.hpp"
#include "qdbn/errors.hpp"
#include "qdbn/mnist.hpp"

namespace qdbn {

namespace {

using nlohmann::json;

constexpr const char* kResultsMagic = "# qdbn-results 1";
constexpr const char* kResultsHeader =
    "arm,n_pretrain,checkpoint,trial,train_accuracy,test_accuracy,wall_time_s,seed,"
    "config_digest";
constexpr const char* kErrorsMagic = "# qdbn-errors 1";
constexpr const char* kErrorsHeader = "arm,n_pretrain,trial,message,config_digest";
constexpr const char* kInitsMagic = "# qdbn-inits 1";
constexpr const char* kInitsHeader = "arm,n_pretrain,trial,init_digest,config_digest";

std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["train_path"] = c.train_path;
    j["test_path"] = c.test_path;
    j["layer_sizes"] = c.layer_sizes;
    j["n_classes"] = c.n_classes;
    j["arms"] = c.arms;
    j["sweep"] = c.sweep;
    j["checkpoints"] = c.checkpoints;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["head_ridge"] = c.head_ridge;
    json ch;
    ch["rows"] = c.chimera_rows;
    ch["cols"] = c.chimera_cols;
    ch["k"] = c.chimera_k;
    json faults = json::array();
    for (const QubitCoord& q : c.faulty_qubits)
        faults.push_back({q.cell_row, q.cell_col,
                          q.side == Side::vertical ? "V" : "H", q.index});
    ch["faulty_qubits"] = faults;
    j["chimera"] = ch;
    json sp;
    sp["beta_eff"] = c.sampler.beta_eff;
    sp["reads_per_gauge"] = c.sampler.reads_per_gauge;
    sp["gauges"] = c.sampler.gauges;
    sp["voting_threshold"] = c.sampler.voting_threshold;
    sp["j_fm"] = c.sampler.j_fm;
    sp["mcmc_sweeps"] = c.sampler.mcmc_sweeps;
    sp["gibbs_burn"] = c.sampler.gibbs_burn;
    sp["gibbs_samples"] = c.sampler.gibbs_samples;
    sp["seed"] = c.sampler.seed;
    sp["noise"] = {{"enabled", c.sampler.noise.enabled},
                   {"precision_bits", c.sampler.noise.precision_bits},
                   {"leakage_fraction", c.sampler.noise.leakage_fraction},
                   {"jitter_sd", c.sampler.noise.jitter_sd}};
    sp["ranges"] = {{"h_max", c.sampler.ranges.h_max}, {"j_max", c.sampler.ranges.j_max}};
    j["sampler"] = sp;
    json sc;
    sc["pretrain_iters"] = c.schedule.pretrain_iters;
    sc["learning_rate"] = c.schedule.learning_rate;
    sc["momentum_early"] = c.schedule.momentum_early;
    sc["momentum_late"] = c.schedule.momentum_late;
    sc["momentum_switch"] = c.schedule.momentum_switch;
    sc["init_weight_sd"] = c.schedule.init_weight_sd;
    sc["backprop_iters"] = c.schedule.backprop_iters;
    sc["minibatch_size"] = c.schedule.minibatch_size;
    sc["backprop_rate"] = c.schedule.backprop_rate;
    j["schedule"] = sc;
    return j;
}

void config_from_json(const json& j, ExperimentConfig& c) {
    c.train_path = j.value("train_path", c.train_path);
    c.test_path = j.value("test_path", c.test_path);
    if (j.contains("layer_sizes")) c.layer_sizes = j["layer_sizes"].get<std::vector<int>>();
    c.n_classes = j.value("n_classes", c.n_classes);
    if (j.contains("arms")) c.arms = j["arms"].get<std::vector<std::string>>();
    if (j.contains("sweep")) c.sweep = j["sweep"].get<std::vector<int>>();
    if (j.contains("checkpoints")) c.checkpoints = j["checkpoints"].get<std::vector<int>>();
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.head_ridge = j.value("head_ridge", c.head_ridge);
    if (j.contains("chimera")) {
        const json& ch = j["chimera"];
        c.chimera_rows = ch.value("rows", c.chimera_rows);
        c.chimera_cols = ch.value("cols", c.chimera_cols);
        c.chimera_k = ch.value("k", c.chimera_k);
        if (ch.contains("faulty_qubits")) {
            c.faulty_qubits.clear();
            for (const json& f : ch["faulty_qubits"]) {
                if (!f.is_array() || f.size() != 4)
                    throw DataError("config: faulty qubit entries need [row,col,side,index]");
                QubitCoord q;
                q.cell_row = f[0].get<int>();
                q.cell_col = f[1].get<int>();
                const std::string side = f[2].get<std::string>();
                if (side != "V" && side != "H")
                    throw DataError("config: qubit side must be V or H");
                q.side = side == "V" ? Side::vertical : Side::horizontal;
                q.index = f[3].get<int>();
                c.faulty_qubits.push_back(q);
            }
        }
    }
    if (j.contains("sampler")) {
        const json& sp = j["sampler"];
        SamplerConfig& s = c.sampler;
        s.beta_eff = sp.value("beta_eff", s.beta_eff);
        s.reads_per_gauge = sp.value("reads_per_gauge", s.reads_per_gauge);
        if (sp.contains("gauges")) s.gauges = sp["gauges"].get<std::vector<std::string>>();
        s.voting_threshold = sp.value("voting_threshold", s.voting_threshold);
        s.j_fm = sp.value("j_fm", s.j_fm);
        s.mcmc_sweeps = sp.value("mcmc_sweeps", s.mcmc_sweeps);
        s.gibbs_burn = sp.value("gibbs_burn", s.gibbs_burn);
        s.gibbs_samples = sp.value("gibbs_samples", s.gibbs_samples);
        s.seed = sp.value("seed", s.seed);
        if (sp.contains("noise")) {
            const json& nz = sp["noise"];
            s.noise.enabled = nz.value("enabled", s.noise.enabled);
            s.noise.precision_bits = nz.value("precision_bits", s.noise.precision_bits);
            s.noise.leakage_fraction = nz.value("leakage_fraction", s.noise.leakage_fraction);
            s.noise.jitter_sd = nz.value("jitter_sd", s.noise.jitter_sd);
        }
        if (sp.contains("ranges")) {
            s.ranges.h_max = sp["ranges"].value("h_max", s.ranges.h_max);
            s.ranges.j_max = sp["ranges"].value("j_max", s.ranges.j_max);
        }
    }
    if (j.contains("schedule")) {
        const json& sc = j["schedule"];
        TrainSchedule& s = c.schedule;
        s.pretrain_iters = sc.value("pretrain_iters", s.pretrain_iters);
        s.learning_rate = sc.value("learning_rate", s.learning_rate);
        s.momentum_early = sc.value("momentum_early", s.momentum_early);
        s.momentum_late = sc.value("momentum_late", s.momentum_late);
        s.momentum_switch = sc.value("momentum_switch", s.momentum_switch);
        s.init_weight_sd = sc.value("init_weight_sd", s.init_weight_sd);
        s.backprop_iters = sc.value("backprop_iters", s.backprop_iters);
        s.minibatch_size = sc.value("minibatch_size", s.minibatch_size);
        s.backprop_rate = sc.value("backprop_rate", s.backprop_rate);
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string sanitize_field(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

// replays the draws pretrain makes before any training starts
std::string initial_weights_digest(const std::vector<int>& sizes, double init_sd, Rng rng,
                                   const std::vector<MaskMatrix>* masks) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t t = 0; t + 1 < sizes.size(); ++t) {
        RbmParams p = random_rbm(sizes[t], sizes[t + 1], rng, init_sd);
        if (masks) {
            p.mask = (*masks)[t];
            p.zero_masked_weights();
        }
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(p.weights.data()),
                                   sizeof(double) * static_cast<std::size_t>(p.weights.size())),
                  h);
    }
    return hex64(h);
}

struct JobKey {
    std::string arm;
    int n_pretrain;
    int trial;

    bool operator<(const JobKey& o) const {
        return std::tie(arm, n_pretrain, trial) < std::tie(o.arm, o.n_pretrain, o.trial);
    }
};

void ensure_file_header(const std::string& path, const char* magic, const char* header) {
    namespace fs = std::filesystem;
    if (fs::exists(path) && fs::file_size(path) > 0) return;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << magic << "\n" << header << "\n";
}

}  // namespace

void ExperimentConfig::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("config: layer_sizes needs input plus one hidden layer");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("config: non-positive layer size");
    if (n_classes < 2) throw std::invalid_argument("config: n_classes < 2");
    if (arms.empty()) throw std::invalid_argument("config: no arms");
    for (const std::string& a : arms)
        if (a != "exact" && a != "cd1" && a != "gibbs" && a != "chimera")
            throw std::invalid_argument("config: unknown arm '" + a + "'");
    if (std::set<std::string>(arms.begin(), arms.end()).size() != arms.size())
        throw std::invalid_argument("config: duplicate arm");
    if (sweep.empty()) throw std::invalid_argument("config: empty sweep");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (sweep[i] < 0) throw std::invalid_argument("config: negative sweep value");
        if (i > 0 && sweep[i] <= sweep[i - 1])
            throw std::invalid_argument("config: sweep values must ascend");
    }
    if (checkpoints.empty()) throw std::invalid_argument("config: empty checkpoints");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 0) throw std::invalid_argument("config: negative checkpoint");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw std::invalid_argument("config: checkpoints must ascend");
    }
    if (trials < 1) throw std::invalid_argument("config: trials < 1");
    sampler.validate();
    schedule.validate();
    if (chimera_rows < 1 || chimera_cols < 1 || chimera_k < 1)
        throw std::invalid_argument("config: bad lattice dimensions");
    if (!(head_ridge >= 0.0)) throw std::invalid_argument("config: negative head_ridge");
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("config file is not valid JSON: " + path);
    ExperimentConfig cfg;
    try {
        config_from_json(j, cfg);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << config_to_json(cfg) << "\n";
}

std::string config_digest(const ExperimentConfig& cfg) {
    json j = config_json(cfg);
    j.erase("out_dir");
    return digest_hex(j.dump());
}

std::vector<ResultRecord> load_results(const std::string& csv_path) {
    std::vector<ResultRecord> out;
    std::ifstream in(csv_path);
    if (!in) return out;
    std::string line;
    if (!std::getline(in, line) || line != kResultsMagic)
        throw DataError("results file has a bad magic line: " + csv_path);
    if (!std::getline(in, line) || line != kResultsHeader)
        throw DataError("results file has a bad header: " + csv_path);
    int lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 9)
            throw DataError("results line " + std::to_string(lineno) + ": want 9 fields");
        ResultRecord r;
        try {
            r.arm = f[0];
            r.n_pretrain = std::stoi(f[1]);
            r.checkpoint = std::stoi(f[2]);
            r.trial = std::stoi(f[3]);
            r.train_accuracy = std::stod(f[4]);
            r.test_accuracy = std::stod(f[5]);
            r.wall_time_s = std::stod(f[6]);
            r.seed = std::stoull(f[7]);
            r.config_digest = f[8];
        } catch (const std::exception&) {
            throw DataError("results line " + std::to_string(lineno) + ": unparseable field");
        }
        if (r.train_accuracy < 0.0 || r.train_accuracy > 1.0 || r.test_accuracy < 0.0 ||
            r.test_accuracy > 1.0)
            throw DataError("results line " + std::to_string(lineno) +
                            ": accuracy outside [0,1]");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ResultRecord> run_comparison(const ExperimentConfig& cfg, RunProgress* progress,
                                         const LogFn& log) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    cfg.validate();
    auto say = [&](const std::string& s) {
        if (log) log(s);
    };

    CgDataset train = load_cg_dataset(cfg.train_path);
    CgDataset test = load_cg_dataset(cfg.test_path);
    if (train.rows.cols() != cfg.layer_sizes.front())
        throw DataError("training features do not match the input layer width");
    if (test.rows.cols() != cfg.layer_sizes.front())
        throw DataError("test features do not match the input layer width");
    for (int l : train.labels)
        if (l >= cfg.n_classes) throw DataError("training label outside n_classes");
    for (int l : test.labels)
        if (l >= cfg.n_classes) throw DataError("test label outside n_classes");
    if (train.count() < cfg.trials)
        throw DataError("fewer training rows than requested trials");
    std::vector<CgDataset> splits = split_training_sets(train, cfg.trials);

    fs::create_directories(cfg.out_dir);
    const std::string results_path = (fs::path(cfg.out_dir) / "results.csv").string();
    const std::string errors_path = (fs::path(cfg.out_dir) / "errors.csv").string();
    const std::string inits_path = (fs::path(cfg.out_dir) / "init_digests.csv").string();
    const std::string digest = config_digest(cfg);

    // completed jobs carry one record per checkpoint under this config digest
    std::map<JobKey, std::size_t> seen;
    bool foreign = false;
    for (const ResultRecord& r : load_results(results_path)) {
        if (r.config_digest != digest) {
            foreign = true;
            continue;
        }
        ++seen[JobKey{r.arm, r.n_pretrain, r.trial}];
    }
    if (foreign) say("results.csv holds records from other configurations; leaving them alone");
    std::set<JobKey> done_jobs, failed_jobs;
    for (const auto& [key, count] : seen)
        if (count >= cfg.checkpoints.size()) done_jobs.insert(key);
    {
        std::ifstream in(errors_path);
        std::string line;
        int row = 0;
        while (in && std::getline(in, line)) {
            ++row;
            if (row <= 2 || line.empty()) continue;
            std::vector<std::string> f = split_csv_line(line);
            if (f.size() == 5 && f[4] == digest)
                failed_jobs.insert(JobKey{f[0], std::stoi(f[1]), std::stoi(f[2])});
        }
    }

    const bool wants_chimera =
        std::find(cfg.arms.begin(), cfg.arms.end(), "chimera") != cfg.arms.end();
    ChimeraGraph graph;
    std::vector<MaskMatrix> masks;
    bool use_masks = false;
    if (wants_chimera) {
        graph = build_chimera(cfg.chimera_rows, cfg.chimera_cols, cfg.chimera_k,
                              cfg.faulty_qubits);
        for (std::size_t t = 0; t + 1 < cfg.layer_sizes.size(); ++t) {
            Embedding emb =
                embed_rbm(cfg.layer_sizes[t], cfg.layer_sizes[t + 1], graph);
            masks.push_back(missing_mask(emb, cfg.layer_sizes[t], cfg.layer_sizes[t + 1]));
        }
        use_masks = !cfg.faulty_qubits.empty();
    }

    ensure_file_header(results_path, kResultsMagic, kResultsHeader);
    ensure_file_header(errors_path, kErrorsMagic, kErrorsHeader);
    ensure_file_header(inits_path, kInitsMagic, kInitsHeader);
    std::ofstream results_out(results_path, std::ios::app);
    std::ofstream errors_out(errors_path, std::ios::app);
    std::ofstream inits_out(inits_path, std::ios::app);
    if (!results_out || !errors_out || !inits_out)
        throw DataError("cannot append to output files in " + cfg.out_dir);

    RunProgress local;
    RunProgress& prog = progress ? *progress : local;

    for (const std::string& arm : cfg.arms) {
        const std::vector<MaskMatrix>* arm_masks =
            (arm == "chimera" && use_masks) ? &masks : nullptr;
        std::unique_ptr<Estimator> backend =
            make_estimator(arm, cfg.sampler, arm == "chimera" ? &graph : nullptr);
        for (int n_pre : cfg.sweep) {
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const JobKey key{arm, n_pre, trial};
                if (done_jobs.count(key) || failed_jobs.count(key)) {
                    ++prog.jobs_skipped;
                    continue;
                }
                const CgDataset& part = splits[static_cast<std::size_t>(trial)];
                Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(n_pre),
                                      static_cast<std::uint64_t>(trial));
                TrainSchedule sched = cfg.schedule;
                sched.pretrain_iters = n_pre;

                inits_out << arm << ',' << n_pre << ',' << trial << ','
                          << initial_weights_digest(cfg.layer_sizes, sched.init_weight_sd,
                                                    rng, arm_masks)
                          << ',' << digest << '\n';
                inits_out.flush();

                const auto t0 = clock::now();
                try {
                    std::vector<RbmParams> layers = pretrain(
                        cfg.layer_sizes, part.rows, *backend, sched, rng, arm_masks);
                    DbnModel dbn;
                    dbn.layers = std::move(layers);
                    MatrixXd targets = one_hot(part.labels, cfg.n_classes);
                    dbn.output_weights = pseudoinverse_init(
                        propagate(dbn.layers, part.rows), targets, cfg.head_ridge);
                    BackpropRunner runner(dbn, part.rows, targets, sched, rng());

                    std::ostringstream rows;
                    int prev = 0;
                    for (int cp : cfg.checkpoints) {
                        runner.advance(cp - prev);
                        prev = cp;
                        const double train_acc =
                            evaluate(runner.model(), part.rows, part.labels);
                        const double test_acc =
                            evaluate(runner.model(), test.rows, test.labels);
                        const double wall =
                            std::chrono::duration<double>(clock::now() - t0).count();
                        rows << arm << ',' << n_pre << ',' << cp << ',' << trial << ','
                             << fmt_g17(train_acc) << ',' << fmt_g17(test_acc) << ','
                             << fmt_g17(wall) << ',' << cfg.seed << ',' << digest << '\n';
                    }
                    results_out << rows.str();
                    results_out.flush();
                    ++prog.jobs_done;
                    say("done " + arm + " N=" + std::to_string(n_pre) + " trial " +
                        std::to_string(trial));
                } catch (const NumericalError& e) {
                    errors_out << arm << ',' << n_pre << ',' << trial << ','
                               << sanitize_field(e.what()) << ',' << digest << '\n';
                    errors_out.flush();
                    ++prog.jobs_failed;
                    say("failed " + arm + " N=" + std::to_string(n_pre) + " trial " +
                        std::to_string(trial) + ": " + e.what());
                }
            }
        }
    }

    // last write wins so a re-run after an interrupted partial job is clean
    std::map<std::tuple<std::string, int, int, int>, ResultRecord> dedup;
    std::vector<std::tuple<std::string, int, int, int>> order;
    for (ResultRecord& r : load_results(results_path)) {
        if (r.config_digest != digest) continue;
        auto k = std::make_tuple(r.arm, r.n_pretrain, r.checkpoint, r.trial);
        if (!dedup.count(k)) order.push_back(k);
        dedup[k] = std::move(r);
    }
    std::vector<ResultRecord> table;
    table.reserve(order.size());
    for (const auto& k : order) table.push_back(dedup[k]);
    return table;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
    if (records.empty()) throw std::invalid_argument("summarize: empty table");
    std::map<std::tuple<std::string, int, int>, std::vector<const ResultRecord*>> groups;
    for (const ResultRecord& r : records)
        groups[std::make_tuple(r.arm, r.n_pretrain, r.checkpoint)].push_back(&r);

    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        SummaryRow row;
        row.arm = std::get<0>(key);
        row.n_pretrain = std::get<1>(key);
        row.checkpoint = std::get<2>(key);
        row.n_trials = static_cast<int>(members.size());
        double tr = 0, te = 0;
        for (const ResultRecord* r : members) {
            tr += r->train_accuracy;
            te += r->test_accuracy;
        }
        row.train_mean = tr / row.n_trials;
        row.test_mean = te / row.n_trials;
        if (row.n_trials > 1) {
            // anchored at the first member so identical values give exactly 0
            auto sample_sd = [&](auto field) {
                const double base = members.front()->*field;
                double shift = 0;
                for (const ResultRecord* r : members) shift += r->*field - base;
                shift /= row.n_trials;
                double acc = 0;
                for (const ResultRecord* r : members) {
                    const double d = (r->*field - base) - shift;
                    acc += d * d;
                }
                return std::sqrt(acc / (row.n_trials - 1));
            };
            row.train_sd = sample_sd(&ResultRecord::train_accuracy);
            row.test_sd = sample_sd(&ResultRecord::test_accuracy);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_summary(const std::vector<SummaryRow>& rows, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot open " + csv_path + " for writing");
    out << "# qdbn-summary 1\n";
    out << "arm,n_pretrain,checkpoint,n_trials,train_mean,train_sd,test_mean,test_sd\n";
    for (const SummaryRow& r : rows)
        out << r.arm << ',' << r.n_pretrain << ',' << r.checkpoint << ',' << r.n_trials
            << ',' << fmt_g17(r.train_mean) << ',' << fmt_g17(r.train_sd) << ','
            << fmt_g17(r.test_mean) << ',' << fmt_g17(r.test_sd) << '\n';
}

void write_plot_script(const std::string& script_path, const std::string& summary_csv) {
    std::ofstream out(script_path);
    if (!out) throw DataError("cannot open " + script_path + " for writing");
    out << R"(#!/usr/bin/env python3
"""Accuracy curves per backprop checkpoint from a summary CSV."""
import csv
import sys
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

SUMMARY = ")" << summary_csv << R"("

summary_path = sys.argv[1] if len(sys.argv) > 1 else SUMMARY
rows = []
with open(summary_path) as fh:
    for line in fh:
        if line.startswith("#"):
            continue
        rows.append(line)
records = list(csv.DictReader(rows))
for r in records:
    for k in ("n_pretrain", "checkpoint", "n_trials"):
        r[k] = int(r[k])
    for k in ("train_mean", "train_sd", "test_mean", "test_sd"):
        r[k] = float(r[k])

checkpoints = sorted({r["checkpoint"] for r in records})
arms = sorted({r["arm"] for r in records})
colors = {arm: c for arm, c in zip(arms, ("tab:blue", "tab:red", "tab:green", "tab:orange"))}

fig, axes = plt.subplots(1, len(checkpoints), figsize=(4 * len(checkpoints), 3.5),
                         squeeze=False, sharey=True)
for ax, cp in zip(axes[0], checkpoints):
    for arm in arms:
        pts = sorted((r["n_pretrain"], r) for r in records
                     if r["arm"] == arm and r["checkpoint"] == cp)
        ns = [n for n, _ in pts]
        for field, style in (("test", "-"), ("train", "--")):
            means = [r[f"{field}_mean"] for _, r in pts]
            sds = [r[f"{field}_sd"] for _, r in pts]
            ax.errorbar(ns, means, yerr=sds, color=colors[arm], linestyle=style,
                        marker="o", markersize=3, capsize=2,
                        label=f"{arm} {field}")
    ax.set_title(f"{cp} backprop iterations")
    ax.set_xlabel("pretraining iterations N")
    ax.grid(alpha=0.3)
axes[0][0].set_ylabel("accuracy")
axes[0][-1].legend(fontsize=8)
fig.tight_layout()
out = os.path.join(os.path.dirname(summary_path), "accuracy_curves.png")
fig.savefig(out, dpi=150)
print("wrote " + out)
)";
}

}  // namespace qdbn
