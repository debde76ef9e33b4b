#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "hfl/dataset.hpp"

namespace hfl {

/// Reads an IDX image/label file pair (big-endian magic 0x00000803 for
/// images, 0x00000801 for labels). Pixels are scaled to [0, 1]. Format
/// errors report the offending byte offset; an image/label count mismatch is
/// an error. num_classes is set to 1 + max label.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Seeded Gaussian blobs, one cluster per class: center = separation * (unit
/// random direction), unit covariance. per_class samples per class.
Dataset synth_dataset(int classes, int dim, int per_class, double separation, std::uint64_t seed);

/// Train/test pair drawn from the same clusters: one generation of
/// per_class_train + per_class_test samples per class, sliced per class.
std::pair<Dataset, Dataset> synth_split(int classes, int dim, int per_class_train,
                                        int per_class_test, double separation,
                                        std::uint64_t seed);

}  // namespace hfl
