#include "hfl/data_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

namespace hfl {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("idx: cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset,
                        const std::string& path) {
    if (offset + 4 > buf.size())
        throw std::runtime_error("idx: '" + path + "' truncated at byte offset " +
                                 std::to_string(offset));
    return (static_cast<std::uint32_t>(buf[offset]) << 24) |
           (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
           static_cast<std::uint32_t>(buf[offset + 3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);

    const std::uint32_t img_magic = read_be32(img, 0, images_path);
    if (img_magic != kImageMagic)
        throw std::runtime_error("idx: bad image magic in '" + images_path + "' at byte offset 0");
    const std::uint32_t lab_magic = read_be32(lab, 0, labels_path);
    if (lab_magic != kLabelMagic)
        throw std::runtime_error("idx: bad label magic in '" + labels_path + "' at byte offset 0");

    const std::uint32_t count = read_be32(img, 4, images_path);
    const std::uint32_t rows = read_be32(img, 8, images_path);
    const std::uint32_t cols = read_be32(img, 12, images_path);
    const std::uint32_t lab_count = read_be32(lab, 4, labels_path);
    if (count != lab_count)
        throw std::runtime_error("idx: image count " + std::to_string(count) +
                                 " does not match label count " + std::to_string(lab_count));

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    const std::size_t need_img = 16 + static_cast<std::size_t>(count) * pixels;
    if (img.size() < need_img)
        throw std::runtime_error("idx: '" + images_path + "' truncated at byte offset " +
                                 std::to_string(img.size()) + " (need " +
                                 std::to_string(need_img) + ")");
    const std::size_t need_lab = 8 + count;
    if (lab.size() < need_lab)
        throw std::runtime_error("idx: '" + labels_path + "' truncated at byte offset " +
                                 std::to_string(lab.size()) + " (need " +
                                 std::to_string(need_lab) + ")");

    Dataset d;
    int max_label = 0;
    d.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Sample s;
        s.features.resize(pixels);
        const std::size_t base = 16 + static_cast<std::size_t>(i) * pixels;
        for (std::size_t p = 0; p < pixels; ++p)
            s.features[p] = static_cast<double>(img[base + p]) / 255.0;
        s.label = static_cast<int>(lab[8 + i]);
        max_label = std::max(max_label, s.label);
        d.samples.push_back(std::move(s));
    }
    d.num_classes = max_label + 1;
    return d;
}

std::pair<Dataset, Dataset> synth_split(int classes, int dim, int per_class_train,
                                        int per_class_test, double separation,
                                        std::uint64_t seed) {
    const Dataset all =
        synth_dataset(classes, dim, per_class_train + per_class_test, separation, seed);
    Dataset train, test;
    train.num_classes = classes;
    test.num_classes = classes;
    const int per_class = per_class_train + per_class_test;
    for (int c = 0; c < classes; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * per_class;
        for (int i = 0; i < per_class_train; ++i)
            train.samples.push_back(all.samples[base + static_cast<std::size_t>(i)]);
        for (int i = 0; i < per_class_test; ++i)
            test.samples.push_back(
                all.samples[base + static_cast<std::size_t>(per_class_train + i)]);
    }
    return {std::move(train), std::move(test)};
}

Dataset synth_dataset(int classes, int dim, int per_class, double separation, std::uint64_t seed) {
    if (classes < 1 || dim < 1 || per_class < 1)
        throw std::domain_error("synth_dataset: classes, dim, per_class must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<std::vector<double>> centers(static_cast<std::size_t>(classes));
    for (auto& c : centers) {
        c.resize(static_cast<std::size_t>(dim));
        double norm = 0.0;
        for (double& v : c) {
            v = normal(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) norm = 1.0;
        for (double& v : c) v *= separation / norm;
    }

    Dataset d;
    d.num_classes = classes;
    d.samples.reserve(static_cast<std::size_t>(classes) * per_class);
    for (int c = 0; c < classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            Sample s;
            s.label = c;
            s.features.resize(static_cast<std::size_t>(dim));
            for (std::size_t j = 0; j < s.features.size(); ++j)
                s.features[j] = centers[static_cast<std::size_t>(c)][j] + normal(rng);
            d.samples.push_back(std::move(s));
        }
    }
    return d;
}

}  // namespace hfl
