#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"

namespace qdbn {

// Raw 28x28 byte images, flattened row-major.
struct RawMnist {
    int count = 0;
    std::vector<std::uint8_t> pixels;  // count * 784
    std::vector<int> labels;

    const std::uint8_t* image(int idx) const { return pixels.data() + idx * 784; }
};

// Parses the big-endian IDX pair (image magic 0x00000803 with 28x28 dims,
// label magic 0x00000801) and cross-checks the counts. Throws DataError with
// a distinct message for open failures, bad magic, bad dims, truncation, and
// count mismatch.
RawMnist load_idx(const std::string& images_path, const std::string& labels_path);

// Averages of the 36 non-overlapping 4x4 blocks of the centre 24x24 crop,
// row-major, normalized to [0,1].
VectorXd block_averages(const std::uint8_t* image);

// The 32-feature encoding: block averages minus the four corner blocks
// (0,0), (0,5), (5,0), (5,5) of the 6x6 block grid, row-major order.
VectorXd coarse_grain(const std::uint8_t* image);

struct CgDataset {
    MatrixXd rows;  // R x 32, entries in [0,1]
    std::vector<int> labels;
    std::string images_digest;
    std::string labels_digest;
    int version = 1;

    int count() const { return static_cast<int>(rows.rows()); }
};

CgDataset coarse_grain_dataset(const RawMnist& raw, const std::string& images_digest = "",
                               const std::string& labels_digest = "");

// Contiguous partition; the last split absorbs the remainder. Pass an rng to
// shuffle the row order before partitioning.
std::vector<CgDataset> split_training_sets(const CgDataset& d, int n_splits,
                                           Rng* rng = nullptr);

// Text format: "cgmnist <version> <features> <rows>" header, then one line
// per row ("<label> <f0> ... <f31>", full double precision). A sidecar
// <path>.meta JSON records the source digests.
void save_cg_dataset(const CgDataset& d, const std::string& path);
CgDataset load_cg_dataset(const std::string& path);

// Deterministic stand-in corpus in the exact IDX byte format, for machines
// without the real files: glyph-rendered digits with per-instance intensity,
// shift, and pixel noise. The first training label is 5 and labels are drawn
// uniformly otherwise.
struct SyntheticSpec {
    int n_train = 60000;
    int n_test = 10000;
    std::uint64_t seed = 7;
};

struct MnistPaths {
    std::string train_images;
    std::string train_labels;
    std::string test_images;
    std::string test_labels;
};

MnistPaths write_synthetic_mnist(const std::string& dir, const SyntheticSpec& spec = {});

// Looks for the standard file names under dir; returns paths or throws
// DataError naming what is missing.
MnistPaths locate_mnist(const std::string& dir);

}  // namespace qdbn
