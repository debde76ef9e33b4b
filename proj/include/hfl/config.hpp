#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfl/dataset.hpp"
#include "hfl/hierarchy.hpp"
#include "hfl/network.hpp"

namespace hfl {

/// Experiment description, loadable from a sectioned key=value file.
/// Defaults reproduce the reference simulation parameters.
struct ExperimentConfig {
    // [topology]
    int num_edge_servers = 5;
    int devices_per_edge = 5;

    // [radio]
    double tx_power_dbm = 28.0;
    double bandwidth_hz = 20e6;
    double noise_dbm = -110.0;
    int quantization_bits = 64;
    std::string channel_model = "rayleigh";  // static | rayleigh
    double channel_gain = 1e-12;             // static gain, or Rayleigh path loss

    // [compute]
    double cpu_freq_hz = 3e9;
    double cycles_per_weight = 60000.0;

    // [training]
    double learning_rate = 0.001;
    int batch_size = 128;
    int local_epochs = 2;
    int local_iterations = 0;  // 0 = local_epochs * batches per epoch
    std::string loss = "cross_entropy";  // cross_entropy | mse
    int global_rounds = 10;
    int edge_rounds = 5;

    // [model]
    int input_dim = 16;
    int feature_width = 8;
    std::vector<int> fc_widths = {32, 10};  // last entry = classes

    // [data]
    std::string source = "synthetic";  // synthetic | idx
    int classes = 10;
    int per_class = 60;
    int per_class_test = 20;
    double separation = 3.0;
    std::uint64_t data_seed = 13;
    std::string partition_mode = "iid";  // iid | label_skew
    int shards_per_device = 2;
    std::string idx_train_images;
    std::string idx_train_labels;
    std::string idx_test_images;
    std::string idx_test_labels;
    int train_subset = 0;  // 0 = all samples
    int test_subset = 0;

    // [run]
    std::string scheme = "optimal";  // optimal | equal | no_pruning | fixed
    double fixed_ratio = 0.0;
    double latency_threshold_s = 0.030;
    std::uint64_t seed = 1;

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

/// Parses a sectioned key=value file. Unknown sections or keys are errors;
/// missing keys keep their defaults, so an empty file yields the default
/// config. Throws std::invalid_argument / std::runtime_error with the key or
/// file named.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// Canonical serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// Wiring from a validated config to the simulator's inputs.
Network make_network(const ExperimentConfig& cfg);
Dataset make_train_dataset(const ExperimentConfig& cfg);
Dataset make_test_dataset(const ExperimentConfig& cfg);
Topology make_topology(const ExperimentConfig& cfg, const Dataset& train);
SimConfig make_sim_config(const ExperimentConfig& cfg, const Topology& topo);

}  // namespace hfl
