#include "hfl/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hfl {

void Dataset::validate() const {
    if (samples.empty()) throw std::invalid_argument("Dataset: must contain at least one sample");
    const std::size_t dim = samples.front().features.size();
    for (const auto& s : samples) {
        if (s.features.size() != dim)
            throw std::invalid_argument("Dataset: ragged feature vectors");
        if (s.label < 0 || s.label >= num_classes)
            throw std::invalid_argument("Dataset: label out of [0, num_classes)");
    }
}

std::vector<Dataset> partition(const Dataset& data, int n_parts, PartitionMode mode,
                               int shards_per_device, std::uint64_t seed) {
    if (n_parts < 1) throw std::domain_error("partition: n_parts must be >= 1");
    const std::size_t n = data.size();
    if (static_cast<std::size_t>(n_parts) > n)
        throw std::domain_error("partition: n_parts exceeds dataset size");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<Dataset> parts(n_parts);
    for (auto& p : parts) p.num_classes = data.num_classes;

    if (mode == PartitionMode::Iid) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int i = 0; i < n_parts; ++i) {
            const std::size_t lo = n * static_cast<std::size_t>(i) / n_parts;
            const std::size_t hi = n * (static_cast<std::size_t>(i) + 1) / n_parts;
            for (std::size_t k = lo; k < hi; ++k) parts[i].samples.push_back(data.samples[order[k]]);
        }
        return parts;
    }

    if (shards_per_device < 1) throw std::domain_error("partition: shards_per_device must be >= 1");
    const std::size_t num_shards = static_cast<std::size_t>(n_parts) * shards_per_device;
    if (num_shards > n) throw std::domain_error("partition: more shards than samples");

    // Stable label sort keeps the split deterministic for tied labels.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.samples[a].label < data.samples[b].label;
    });

    std::vector<std::size_t> shard_ids(num_shards);
    std::iota(shard_ids.begin(), shard_ids.end(), std::size_t{0});
    std::shuffle(shard_ids.begin(), shard_ids.end(), rng);

    for (int i = 0; i < n_parts; ++i) {
        for (int s = 0; s < shards_per_device; ++s) {
            const std::size_t shard = shard_ids[static_cast<std::size_t>(i) * shards_per_device + s];
            const std::size_t lo = n * shard / num_shards;
            const std::size_t hi = n * (shard + 1) / num_shards;
            for (std::size_t k = lo; k < hi; ++k) parts[i].samples.push_back(data.samples[order[k]]);
        }
    }
    return parts;
}

}  // namespace hfl
