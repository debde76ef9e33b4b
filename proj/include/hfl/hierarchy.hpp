#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hfl/allocator.hpp"
#include "hfl/dataset.hpp"
#include "hfl/model.hpp"
#include "hfl/network.hpp"
#include "hfl/trainer.hpp"
#include "hfl/wireless.hpp"

namespace hfl {

struct Device {
    DeviceProfile profile;
    Dataset data;
};

/// Device-edge-cloud layout: edge k serves the device ids in edges[k].
/// Device ids are disjoint across edges and cover every registered device.
struct Topology {
    std::vector<std::vector<int>> edges;
    std::vector<Device> devices;

    void validate() const;
};

enum class Scheme { Optimal, EqualBandwidth, NoPruning, FixedRatio };

/// Seed-stream tags. run() derives every RNG from cfg.seed as
///   init:     derive_seed(seed, {kSeedStreamInit})
///   channel:  derive_seed(seed, {kSeedStreamChannel, q, e, k, device_id})
///   training: derive_seed(seed, {kSeedStreamTrain, q, e, k, device_id})
/// making trajectories reproducible and comparable against reference loops.
inline constexpr std::uint64_t kSeedStreamInit = 0x01;
inline constexpr std::uint64_t kSeedStreamChannel = 0x02;
inline constexpr std::uint64_t kSeedStreamTrain = 0x03;

struct SimConfig {
    int global_rounds = 10;       // Q
    int edge_rounds = 5;          // E
    Scheme scheme = Scheme::Optimal;
    double fixed_ratio = 0.0;     // used by Scheme::FixedRatio
    double latency_threshold_s = 0.030;
    TrainConfig train;            // rng_seed is ignored; per-device seeds are derived
    double bandwidth_hz = 20e6;
    double noise_power_w = 1e-14;
    int quantization_bits = 64;
    ChannelModel channel;
    std::uint64_t seed = 1;
};

/// One record per (global round, edge round, edge server).
struct RoundMetrics {
    int global_round = 0;  // q, 1-based
    int edge_round = 0;    // e, 1-based
    int edge_server = 0;   // k, 0-based
    double lambda = 0.0;
    std::vector<int> device_ids;
    std::vector<double> gains;
    std::vector<double> bandwidth;
    std::vector<double> ratios;
    std::vector<bool> straggler;
    std::vector<LatencyBreakdown> latency;
    double edge_latency_s = 0.0;       // max of member totals
    long long uploaded_weights = 0;    // kept mask bits summed over devices
    double uploaded_bits = 0.0;        // quantization bits * uploaded weights
    double cum_uploaded_bits = 0.0;    // running total over the whole run
    int min_gamma = 0;                 // min positive per-weight occurrence this round
    double test_loss = 0.0;            // NaN except after cloud aggregation
    double test_accuracy = 0.0;        // NaN except after cloud aggregation
};

struct RunResult {
    ModelWeights final_weights;
    std::vector<RoundMetrics> rounds;
    int min_gamma = 0;  // over the whole run, 0 if no rounds ran
};

/// Masked per-weight mean: positions are averaged over the devices whose mask
/// keeps them; positions kept by nobody retain the previous edge value.
ModelWeights edge_aggregate(const std::vector<ModelWeights>& locals,
                            const std::vector<PruningMask>& masks,
                            const ModelWeights& previous_edge);

/// Unweighted mean of the edge models.
ModelWeights cloud_aggregate(const std::vector<ModelWeights>& edges);

/// Executes the full pruned-HFL schedule: Q global rounds of E edge rounds of
/// T masked local iterations, with per-edge-round channel sampling, bandwidth
/// and pruning-ratio allocation per the configured scheme, mask generation
/// from the previous round's weight change (magnitude fallback on the first),
/// and mask-aware aggregation. Fully deterministic given cfg.seed.
RunResult run(const Network& net, const Topology& topo, const Dataset& test_set,
              const SimConfig& cfg, std::optional<ModelWeights> initial = std::nullopt);

}  // namespace hfl
