#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qdbn/chimera.hpp"
#include "qdbn/dbn.hpp"
#include "qdbn/sampler.hpp"

namespace qdbn {

// One sweep of the classical-vs-annealer comparison. Arms name estimator
// backends ("cd1", "chimera", "exact", "gibbs"); every arm sees the same data
// splits and the same initial weights per (N, trial).
struct ExperimentConfig {
    std::string train_path;
    std::string test_path;
    std::vector<int> layer_sizes{32, 32, 32};
    int n_classes = 10;
    std::vector<std::string> arms{"cd1", "chimera"};
    std::vector<int> sweep{1, 5, 10, 20};     // pretraining iteration counts
    std::vector<int> checkpoints{100, 200, 400, 800, 1000};
    int trials = 10;                          // one per training split
    SamplerConfig sampler;
    TrainSchedule schedule;
    std::uint64_t seed = 12345;
    std::string out_dir = "results";
    int chimera_rows = 8;
    int chimera_cols = 8;
    int chimera_k = 4;
    std::vector<QubitCoord> faulty_qubits;
    double head_ridge = 1e-6;  // ridge used for the linear-head least squares

    void validate() const;
};

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

// Stable digest of everything that affects the numbers. The output directory
// is excluded so moving a run does not change its identity.
std::string config_digest(const ExperimentConfig& cfg);

struct ResultRecord {
    std::string arm;
    int n_pretrain = 0;
    int checkpoint = 0;
    int trial = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    std::string config_digest;
};

// results.csv accessors. load_results returns an empty table for a missing
// file and throws DataError on a malformed one.
std::vector<ResultRecord> load_results(const std::string& csv_path);

struct RunProgress {
    int jobs_done = 0;
    int jobs_skipped = 0;
    int jobs_failed = 0;
};

using LogFn = std::function<void(const std::string&)>;

// Runs every (arm, N, trial) job that is not already present in
// <out_dir>/results.csv, appending complete jobs atomically so an interrupted
// sweep resumes where it stopped. Estimator failures are appended to
// <out_dir>/errors.csv and do not abort the sweep. Returns the full table,
// previously existing records included.
std::vector<ResultRecord> run_comparison(const ExperimentConfig& cfg,
                                         RunProgress* progress = nullptr,
                                         const LogFn& log = nullptr);

struct SummaryRow {
    std::string arm;
    int n_pretrain = 0;
    int checkpoint = 0;
    int n_trials = 0;
    double train_mean = 0.0;
    double train_sd = 0.0;
    double test_mean = 0.0;
    double test_sd = 0.0;
};

// Grouped means and sample standard deviations per (arm, N, checkpoint),
// sorted by arm, then N, then checkpoint. Single-record groups report sd 0;
// n_trials flags them.
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

void write_summary(const std::vector<SummaryRow>& rows, const std::string& csv_path);

// Emits a matplotlib script that renders one panel per checkpoint from the
// summary CSV (test accuracy solid, train dashed, one color per arm).
void write_plot_script(const std::string& script_path, const std::string& summary_csv);

}  // namespace qdbn
