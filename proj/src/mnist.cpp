#include "qdbn/mnist.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "qdbn/digest.hpp"
#include "qdbn/errors.hpp"

namespace qdbn {

namespace {

std::uint32_t read_u32be(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DataError("truncated IDX header in " + path);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void write_u32be(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

RawMnist load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream im(images_path, std::ios::binary);
    if (!im) throw DataError("cannot open image file " + images_path);
    if (read_u32be(im, images_path) != 0x00000803u)
        throw DataError("bad image magic in " + images_path);
    const std::uint32_t n_images = read_u32be(im, images_path);
    const std::uint32_t rows = read_u32be(im, images_path);
    const std::uint32_t cols = read_u32be(im, images_path);
    if (rows != 28 || cols != 28)
        throw DataError("unexpected image dimensions in " + images_path);

    RawMnist raw;
    raw.count = static_cast<int>(n_images);
    raw.pixels.resize(std::size_t{n_images} * 784);
    im.read(reinterpret_cast<char*>(raw.pixels.data()),
            static_cast<std::streamsize>(raw.pixels.size()));
    if (im.gcount() != static_cast<std::streamsize>(raw.pixels.size()))
        throw DataError("truncated image data in " + images_path);

    std::ifstream lb(labels_path, std::ios::binary);
    if (!lb) throw DataError("cannot open label file " + labels_path);
    if (read_u32be(lb, labels_path) != 0x00000801u)
        throw DataError("bad label magic in " + labels_path);
    const std::uint32_t n_labels = read_u32be(lb, labels_path);
    if (n_labels != n_images)
        throw DataError("image/label count mismatch: " + std::to_string(n_images) +
                        " images vs " + std::to_string(n_labels) + " labels");
    std::vector<std::uint8_t> bytes(n_labels);
    lb.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (lb.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw DataError("truncated label data in " + labels_path);
    raw.labels.reserve(n_labels);
    for (std::uint8_t b : bytes) {
        if (b > 9) throw DataError("label out of range in " + labels_path);
        raw.labels.push_back(b);
    }
    return raw;
}

VectorXd block_averages(const std::uint8_t* image) {
    VectorXd out(36);
    for (int br = 0; br < 6; ++br)
        for (int bc = 0; bc < 6; ++bc) {
            double acc = 0.0;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    acc += image[(2 + 4 * br + r) * 28 + (2 + 4 * bc + c)];
            out[br * 6 + bc] = acc / (16.0 * 255.0);
        }
    return out;
}

VectorXd coarse_grain(const std::uint8_t* image) {
    const VectorXd blocks = block_averages(image);
    VectorXd out(32);
    int k = 0;
    for (int br = 0; br < 6; ++br)
        for (int bc = 0; bc < 6; ++bc) {
            const bool corner = (br == 0 || br == 5) && (bc == 0 || bc == 5);
            if (!corner) out[k++] = blocks[br * 6 + bc];
        }
    return out;
}

CgDataset coarse_grain_dataset(const RawMnist& raw, const std::string& images_digest,
                               const std::string& labels_digest) {
    if (raw.count != static_cast<int>(raw.labels.size()))
        throw DataError("image/label count mismatch in raw data");
    CgDataset d;
    d.rows.resize(raw.count, 32);
    d.labels = raw.labels;
    d.images_digest = images_digest;
    d.labels_digest = labels_digest;
    for (int i = 0; i < raw.count; ++i) d.rows.row(i) = coarse_grain(raw.image(i));
    return d;
}

std::vector<CgDataset> split_training_sets(const CgDataset& d, int n_splits, Rng* rng) {
    if (n_splits < 1) throw std::invalid_argument("split_training_sets: n_splits < 1");
    const int total = d.count();
    if (n_splits > total)
        throw std::invalid_argument("split_training_sets: more splits than rows");

    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    if (rng) shuffle(order, *rng);

    const int base = total / n_splits;
    std::vector<CgDataset> out;
    out.reserve(n_splits);
    int at = 0;
    for (int s = 0; s < n_splits; ++s) {
        const int size = s + 1 == n_splits ? total - at : base;
        CgDataset part;
        part.rows.resize(size, d.rows.cols());
        part.labels.resize(size);
        part.images_digest = d.images_digest;
        part.labels_digest = d.labels_digest;
        for (int r = 0; r < size; ++r) {
            part.rows.row(r) = d.rows.row(order[at + r]);
            part.labels[r] = d.labels[order[at + r]];
        }
        at += size;
        out.push_back(std::move(part));
    }
    return out;
}

void save_cg_dataset(const CgDataset& d, const std::string& path) {
    const int features = static_cast<int>(d.rows.cols());
    if (d.labels.size() != static_cast<std::size_t>(d.count()))
        throw std::invalid_argument("save_cg_dataset: label count mismatch");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file " + path);
    out << "cgmnist " << d.version << ' ' << features << ' ' << d.count() << "\n";
    char buf[32];
    for (int r = 0; r < d.count(); ++r) {
        out << d.labels[r];
        for (int c = 0; c < features; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", d.rows(r, c));
            out << ' ' << buf;
        }
        out << "\n";
    }
    if (!out) throw DataError("failed writing dataset file " + path);
    out.close();

    nlohmann::json meta;
    meta["format"] = "cgmnist";
    meta["version"] = d.version;
    meta["rows"] = d.count();
    meta["features"] = features;
    meta["images_digest"] = d.images_digest;
    meta["labels_digest"] = d.labels_digest;
    std::ofstream ms(path + ".meta");
    if (!ms) throw DataError("cannot write sidecar " + path + ".meta");
    ms << meta.dump(2) << "\n";
}

CgDataset load_cg_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file " + path);
    std::string tag;
    int version = 0, features = 0, rows = 0;
    in >> tag >> version >> features >> rows;
    if (!in || tag != "cgmnist") throw DataError("bad dataset header in " + path);
    if (features < 1) throw DataError("unexpected feature count in " + path);
    if (rows < 0) throw DataError("bad row count in " + path);

    CgDataset d;
    d.version = version;
    d.rows.resize(rows, features);
    d.labels.resize(rows);
    for (int r = 0; r < rows; ++r) {
        in >> d.labels[r];
        for (int c = 0; c < features; ++c) in >> d.rows(r, c);
        if (!in) throw DataError("truncated dataset file " + path);
        if (d.labels[r] < 0 || d.labels[r] > 9)
            throw DataError("label out of range in " + path);
    }

    const std::string meta_path = path + ".meta";
    if (std::filesystem::exists(meta_path)) {
        std::ifstream ms(meta_path);
        nlohmann::json meta = nlohmann::json::parse(ms, nullptr, false);
        if (!meta.is_discarded()) {
            d.images_digest = meta.value("images_digest", "");
            d.labels_digest = meta.value("labels_digest", "");
        }
    }
    return d;
}

namespace {

// 3x5 digit stencils, one row per scanline, bits left to right
constexpr std::uint8_t kFont[10][5] = {
    {0b111, 0b101, 0b101, 0b101, 0b111},  // 0
    {0b010, 0b110, 0b010, 0b010, 0b111},  // 1
    {0b111, 0b001, 0b111, 0b100, 0b111},  // 2
    {0b111, 0b001, 0b111, 0b001, 0b111},  // 3
    {0b101, 0b101, 0b111, 0b001, 0b001},  // 4
    {0b111, 0b100, 0b111, 0b001, 0b111},  // 5
    {0b111, 0b100, 0b111, 0b101, 0b111},  // 6
    {0b111, 0b001, 0b010, 0b010, 0b010},  // 7
    {0b111, 0b101, 0b111, 0b101, 0b111},  // 8
    {0b111, 0b101, 0b111, 0b001, 0b111},  // 9
};

void render_digit(int digit, Rng& rng, std::uint8_t* out) {
    std::memset(out, 0, 784);
    const int base = 150 + static_cast<int>(uniform_below(rng, 80));
    const int dr = static_cast<int>(uniform_below(rng, 3)) - 1;
    const int dc = static_cast<int>(uniform_below(rng, 3)) - 1;
    for (int gr = 0; gr < 5; ++gr)
        for (int gc = 0; gc < 3; ++gc) {
            if (!((kFont[digit][gr] >> (2 - gc)) & 1)) continue;
            // stencil cell (gr, gc) fills the 4x4 pixel block of grid cell
            // (gr, gc + 1) in the trimmed 24x24 frame
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) {
                    const int pr = 2 + 4 * gr + r + dr;
                    const int pc = 2 + 4 * (gc + 1) + c + dc;
                    const double v = base + gaussian(rng, 0.0, 12.0);
                    out[pr * 28 + pc] =
                        static_cast<std::uint8_t>(std::clamp(v, 40.0, 255.0));
                }
        }
    for (int p = 0; p < 784; ++p)
        if (out[p] == 0 && bernoulli(rng, 0.02))
            out[p] = static_cast<std::uint8_t>(1 + uniform_below(rng, 24));
}

void write_idx_pair(const std::string& images_path, const std::string& labels_path,
                    int count, int first_label, Rng& rng) {
    std::ofstream im(images_path, std::ios::binary);
    std::ofstream lb(labels_path, std::ios::binary);
    if (!im || !lb) throw DataError("cannot create synthetic files in target directory");
    write_u32be(im, 0x00000803u);
    write_u32be(im, static_cast<std::uint32_t>(count));
    write_u32be(im, 28);
    write_u32be(im, 28);
    write_u32be(lb, 0x00000801u);
    write_u32be(lb, static_cast<std::uint32_t>(count));

    std::uint8_t img[784];
    for (int i = 0; i < count; ++i) {
        const int label =
            i == 0 && first_label >= 0 ? first_label
                                       : static_cast<int>(uniform_below(rng, 10));
        render_digit(label, rng, img);
        im.write(reinterpret_cast<char*>(img), 784);
        lb.put(static_cast<char>(label));
    }
    if (!im || !lb) throw DataError("failed writing synthetic corpus");
}

}  // namespace

MnistPaths write_synthetic_mnist(const std::string& dir, const SyntheticSpec& spec) {
    std::filesystem::create_directories(dir);
    MnistPaths p;
    p.train_images = dir + "/train-images-idx3-ubyte";
    p.train_labels = dir + "/train-labels-idx1-ubyte";
    p.test_images = dir + "/t10k-images-idx3-ubyte";
    p.test_labels = dir + "/t10k-labels-idx1-ubyte";
    Rng train_rng = make_stream(spec.seed, 1);
    write_idx_pair(p.train_images, p.train_labels, spec.n_train, 5, train_rng);
    Rng test_rng = make_stream(spec.seed, 2);
    write_idx_pair(p.test_images, p.test_labels, spec.n_test, -1, test_rng);
    return p;
}

MnistPaths locate_mnist(const std::string& dir) {
    MnistPaths p;
    p.train_images = dir + "/train-images-idx3-ubyte";
    p.train_labels = dir + "/train-labels-idx1-ubyte";
    p.test_images = dir + "/t10k-images-idx3-ubyte";
    p.test_labels = dir + "/t10k-labels-idx1-ubyte";
    for (const std::string& path :
         {p.train_images, p.train_labels, p.test_images, p.test_labels})
        if (!std::filesystem::exists(path)) throw DataError("missing MNIST file " + path);
    return p;
}

}  // namespace qdbn
