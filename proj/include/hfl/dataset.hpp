#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hfl {

struct Sample {
    std::vector<double> features;
    int label = 0;
};

struct Dataset {
    std::vector<Sample> samples;
    int num_classes = 0;

    std::size_t size() const { return samples.size(); }
    int feature_dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().features.size()); }

    /// Throws std::invalid_argument on empty data, ragged features, or
    /// out-of-range labels.
    void validate() const;
};

enum class PartitionMode { Iid, LabelSkew };

/// Splits a dataset into n_parts disjoint parts whose union is the input.
/// Iid: seeded shuffle, then contiguous near-equal chunks (sizes differ by <= 1).
/// LabelSkew: sort by label, cut into n_parts * shards_per_device contiguous
/// shards, shuffle the shard order, deal shards_per_device shards per part.
std::vector<Dataset> partition(const Dataset& data, int n_parts, PartitionMode mode,
                               int shards_per_device, std::uint64_t seed);

}  // namespace hfl
