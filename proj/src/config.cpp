#include "hfl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hfl/data_io.hpp"

namespace hfl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid numeric value for key '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid integer value for key '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid unsigned value for key '" + key + "': " + v);
    }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config: empty entry in list for key '" + key + "'");
        out.push_back(parse_int(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for key '" + key + "'");
    return out;
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_int_list(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: key '" + key + "' " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
    require(num_edge_servers >= 1, "topology.num_edge_servers", "must be >= 1");
    require(devices_per_edge >= 1, "topology.devices_per_edge", "must be >= 1");
    require(bandwidth_hz > 0, "radio.bandwidth_hz", "must be positive");
    require(quantization_bits >= 1, "radio.quantization_bits", "must be >= 1");
    require(channel_model == "static" || channel_model == "rayleigh", "radio.channel_model",
            "must be 'static' or 'rayleigh'");
    require(channel_gain > 0, "radio.channel_gain", "must be positive");
    require(cpu_freq_hz > 0, "compute.cpu_freq_hz", "must be positive");
    require(cycles_per_weight > 0, "compute.cycles_per_weight", "must be positive");
    require(learning_rate > 0, "training.learning_rate", "must be positive");
    require(batch_size >= 1, "training.batch_size", "must be >= 1");
    require(local_epochs >= 1, "training.local_epochs", "must be >= 1");
    require(local_iterations >= 0, "training.local_iterations", "must be >= 0");
    require(loss == "cross_entropy" || loss == "mse", "training.loss",
            "must be 'cross_entropy' or 'mse'");
    require(global_rounds >= 0, "training.global_rounds", "must be >= 0");
    require(edge_rounds >= 1, "training.edge_rounds", "must be >= 1");
    require(input_dim >= 1, "model.input_dim", "must be >= 1");
    require(feature_width >= 1, "model.feature_width", "must be >= 1");
    require(!fc_widths.empty(), "model.fc_widths", "must be nonempty");
    for (int w : fc_widths) require(w >= 1, "model.fc_widths", "entries must be >= 1");
    require(source == "synthetic" || source == "idx", "data.source",
            "must be 'synthetic' or 'idx'");
    require(classes >= 1, "data.classes", "must be >= 1");
    require(per_class >= 1, "data.per_class", "must be >= 1");
    require(per_class_test >= 1, "data.per_class_test", "must be >= 1");
    require(separation >= 0, "data.separation", "must be nonnegative");
    require(partition_mode == "iid" || partition_mode == "label_skew", "data.partition_mode",
            "must be 'iid' or 'label_skew'");
    require(shards_per_device >= 1, "data.shards_per_device", "must be >= 1");
    require(train_subset >= 0, "data.train_subset", "must be >= 0");
    require(test_subset >= 0, "data.test_subset", "must be >= 0");
    require(scheme == "optimal" || scheme == "equal" || scheme == "no_pruning" ||
                scheme == "fixed",
            "run.scheme", "must be one of optimal|equal|no_pruning|fixed");
    require(fixed_ratio >= 0 && fixed_ratio <= 1, "run.fixed_ratio", "must be in [0, 1]");
    require(latency_threshold_s > 0, "run.latency_threshold_s", "must be positive");
    if (source == "synthetic") {
        require(classes == fc_widths.back(), "data.classes",
                "must equal the last entry of model.fc_widths");
        require(input_dim > 0, "model.input_dim", "must match the synthetic feature dim");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"topology.num_edge_servers", [&](const std::string& k, const std::string& v) { cfg.num_edge_servers = parse_int(k, v); }},
        {"topology.devices_per_edge", [&](const std::string& k, const std::string& v) { cfg.devices_per_edge = parse_int(k, v); }},
        {"radio.tx_power_dbm", [&](const std::string& k, const std::string& v) { cfg.tx_power_dbm = parse_double(k, v); }},
        {"radio.bandwidth_hz", [&](const std::string& k, const std::string& v) { cfg.bandwidth_hz = parse_double(k, v); }},
        {"radio.noise_dbm", [&](const std::string& k, const std::string& v) { cfg.noise_dbm = parse_double(k, v); }},
        {"radio.quantization_bits", [&](const std::string& k, const std::string& v) { cfg.quantization_bits = parse_int(k, v); }},
        {"radio.channel_model", [&](const std::string&, const std::string& v) { cfg.channel_model = v; }},
        {"radio.channel_gain", [&](const std::string& k, const std::string& v) { cfg.channel_gain = parse_double(k, v); }},
        {"compute.cpu_freq_hz", [&](const std::string& k, const std::string& v) { cfg.cpu_freq_hz = parse_double(k, v); }},
        {"compute.cycles_per_weight", [&](const std::string& k, const std::string& v) { cfg.cycles_per_weight = parse_double(k, v); }},
        {"training.learning_rate", [&](const std::string& k, const std::string& v) { cfg.learning_rate = parse_double(k, v); }},
        {"training.batch_size", [&](const std::string& k, const std::string& v) { cfg.batch_size = parse_int(k, v); }},
        {"training.local_epochs", [&](const std::string& k, const std::string& v) { cfg.local_epochs = parse_int(k, v); }},
        {"training.local_iterations", [&](const std::string& k, const std::string& v) { cfg.local_iterations = parse_int(k, v); }},
        {"training.loss", [&](const std::string&, const std::string& v) { cfg.loss = v; }},
        {"training.global_rounds", [&](const std::string& k, const std::string& v) { cfg.global_rounds = parse_int(k, v); }},
        {"training.edge_rounds", [&](const std::string& k, const std::string& v) { cfg.edge_rounds = parse_int(k, v); }},
        {"model.input_dim", [&](const std::string& k, const std::string& v) { cfg.input_dim = parse_int(k, v); }},
        {"model.feature_width", [&](const std::string& k, const std::string& v) { cfg.feature_width = parse_int(k, v); }},
        {"model.fc_widths", [&](const std::string& k, const std::string& v) { cfg.fc_widths = parse_int_list(k, v); }},
        {"data.source", [&](const std::string&, const std::string& v) { cfg.source = v; }},
        {"data.classes", [&](const std::string& k, const std::string& v) { cfg.classes = parse_int(k, v); }},
        {"data.per_class", [&](const std::string& k, const std::string& v) { cfg.per_class = parse_int(k, v); }},
        {"data.per_class_test", [&](const std::string& k, const std::string& v) { cfg.per_class_test = parse_int(k, v); }},
        {"data.separation", [&](const std::string& k, const std::string& v) { cfg.separation = parse_double(k, v); }},
        {"data.data_seed", [&](const std::string& k, const std::string& v) { cfg.data_seed = parse_u64(k, v); }},
        {"data.partition_mode", [&](const std::string&, const std::string& v) { cfg.partition_mode = v; }},
        {"data.shards_per_device", [&](const std::string& k, const std::string& v) { cfg.shards_per_device = parse_int(k, v); }},
        {"data.idx_train_images", [&](const std::string&, const std::string& v) { cfg.idx_train_images = v; }},
        {"data.idx_train_labels", [&](const std::string&, const std::string& v) { cfg.idx_train_labels = v; }},
        {"data.idx_test_images", [&](const std::string&, const std::string& v) { cfg.idx_test_images = v; }},
        {"data.idx_test_labels", [&](const std::string&, const std::string& v) { cfg.idx_test_labels = v; }},
        {"data.train_subset", [&](const std::string& k, const std::string& v) { cfg.train_subset = parse_int(k, v); }},
        {"data.test_subset", [&](const std::string& k, const std::string& v) { cfg.test_subset = parse_int(k, v); }},
        {"run.scheme", [&](const std::string&, const std::string& v) { cfg.scheme = v; }},
        {"run.fixed_ratio", [&](const std::string& k, const std::string& v) { cfg.fixed_ratio = parse_double(k, v); }},
        {"run.latency_threshold_s", [&](const std::string& k, const std::string& v) { cfg.latency_threshold_s = parse_double(k, v); }},
        {"run.seed", [&](const std::string& k, const std::string& v) { cfg.seed = parse_u64(k, v); }},
    };

    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value' at line " +
                                        std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end())
            throw std::invalid_argument("config: unknown key '" + full + "' at line " +
                                        std::to_string(line_no));
        it->second(full, value);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[topology]\n";
    out << "num_edge_servers = " << cfg.num_edge_servers << "\n";
    out << "devices_per_edge = " << cfg.devices_per_edge << "\n";
    out << "\n[radio]\n";
    out << "tx_power_dbm = " << fmt_double(cfg.tx_power_dbm) << "\n";
    out << "bandwidth_hz = " << fmt_double(cfg.bandwidth_hz) << "\n";
    out << "noise_dbm = " << fmt_double(cfg.noise_dbm) << "\n";
    out << "quantization_bits = " << cfg.quantization_bits << "\n";
    out << "channel_model = " << cfg.channel_model << "\n";
    out << "channel_gain = " << fmt_double(cfg.channel_gain) << "\n";
    out << "\n[compute]\n";
    out << "cpu_freq_hz = " << fmt_double(cfg.cpu_freq_hz) << "\n";
    out << "cycles_per_weight = " << fmt_double(cfg.cycles_per_weight) << "\n";
    out << "\n[training]\n";
    out << "learning_rate = " << fmt_double(cfg.learning_rate) << "\n";
    out << "batch_size = " << cfg.batch_size << "\n";
    out << "local_epochs = " << cfg.local_epochs << "\n";
    out << "local_iterations = " << cfg.local_iterations << "\n";
    out << "loss = " << cfg.loss << "\n";
    out << "global_rounds = " << cfg.global_rounds << "\n";
    out << "edge_rounds = " << cfg.edge_rounds << "\n";
    out << "\n[model]\n";
    out << "input_dim = " << cfg.input_dim << "\n";
    out << "feature_width = " << cfg.feature_width << "\n";
    out << "fc_widths = " << fmt_int_list(cfg.fc_widths) << "\n";
    out << "\n[data]\n";
    out << "source = " << cfg.source << "\n";
    out << "classes = " << cfg.classes << "\n";
    out << "per_class = " << cfg.per_class << "\n";
    out << "per_class_test = " << cfg.per_class_test << "\n";
    out << "separation = " << fmt_double(cfg.separation) << "\n";
    out << "data_seed = " << cfg.data_seed << "\n";
    out << "partition_mode = " << cfg.partition_mode << "\n";
    out << "shards_per_device = " << cfg.shards_per_device << "\n";
    if (!cfg.idx_train_images.empty()) out << "idx_train_images = " << cfg.idx_train_images << "\n";
    if (!cfg.idx_train_labels.empty()) out << "idx_train_labels = " << cfg.idx_train_labels << "\n";
    if (!cfg.idx_test_images.empty()) out << "idx_test_images = " << cfg.idx_test_images << "\n";
    if (!cfg.idx_test_labels.empty()) out << "idx_test_labels = " << cfg.idx_test_labels << "\n";
    out << "train_subset = " << cfg.train_subset << "\n";
    out << "test_subset = " << cfg.test_subset << "\n";
    out << "\n[run]\n";
    out << "scheme = " << cfg.scheme << "\n";
    out << "fixed_ratio = " << fmt_double(cfg.fixed_ratio) << "\n";
    out << "latency_threshold_s = " << fmt_double(cfg.latency_threshold_s) << "\n";
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

Network make_network(const ExperimentConfig& cfg) {
    return Network(cfg.input_dim, cfg.feature_width, cfg.fc_widths);
}

Dataset make_train_dataset(const ExperimentConfig& cfg) {
    Dataset d;
    if (cfg.source == "synthetic") {
        d = synth_split(cfg.classes, cfg.input_dim, cfg.per_class, cfg.per_class_test,
                        cfg.separation, cfg.data_seed)
                .first;
    } else {
        d = load_idx(cfg.idx_train_images, cfg.idx_train_labels);
        d.num_classes = cfg.fc_widths.back();
    }
    if (cfg.train_subset > 0 && static_cast<std::size_t>(cfg.train_subset) < d.size())
        d.samples.resize(static_cast<std::size_t>(cfg.train_subset));
    d.validate();
    return d;
}

Dataset make_test_dataset(const ExperimentConfig& cfg) {
    Dataset d;
    if (cfg.source == "synthetic") {
        d = synth_split(cfg.classes, cfg.input_dim, cfg.per_class, cfg.per_class_test,
                        cfg.separation, cfg.data_seed)
                .second;
    } else {
        d = load_idx(cfg.idx_test_images, cfg.idx_test_labels);
        d.num_classes = cfg.fc_widths.back();
    }
    if (cfg.test_subset > 0 && static_cast<std::size_t>(cfg.test_subset) < d.size())
        d.samples.resize(static_cast<std::size_t>(cfg.test_subset));
    d.validate();
    return d;
}

Topology make_topology(const ExperimentConfig& cfg, const Dataset& train) {
    const int n_devices = cfg.num_edge_servers * cfg.devices_per_edge;
    const PartitionMode mode =
        cfg.partition_mode == "iid" ? PartitionMode::Iid : PartitionMode::LabelSkew;
    std::vector<Dataset> parts =
        partition(train, n_devices, mode, cfg.shards_per_device, cfg.data_seed + 0x9a97ULL);

    DeviceProfile profile;
    profile.cpu_freq_hz = cfg.cpu_freq_hz;
    profile.cycles_per_weight = cfg.cycles_per_weight;
    profile.tx_power_w = dbm_to_watts(cfg.tx_power_dbm);
    profile.cpu_freq_min_hz = cfg.cpu_freq_hz;
    profile.cpu_freq_max_hz = cfg.cpu_freq_hz;
    profile.validate();

    Topology topo;
    for (int i = 0; i < n_devices; ++i)
        topo.devices.push_back({profile, std::move(parts[static_cast<std::size_t>(i)])});
    for (int k = 0; k < cfg.num_edge_servers; ++k) {
        std::vector<int> members;
        for (int j = 0; j < cfg.devices_per_edge; ++j) members.push_back(k * cfg.devices_per_edge + j);
        topo.edges.push_back(std::move(members));
    }
    topo.validate();
    return topo;
}

SimConfig make_sim_config(const ExperimentConfig& cfg, const Topology& topo) {
    SimConfig sim;
    sim.global_rounds = cfg.global_rounds;
    sim.edge_rounds = cfg.edge_rounds;
    if (cfg.scheme == "optimal") sim.scheme = Scheme::Optimal;
    else if (cfg.scheme == "equal") sim.scheme = Scheme::EqualBandwidth;
    else if (cfg.scheme == "no_pruning") sim.scheme = Scheme::NoPruning;
    else sim.scheme = Scheme::FixedRatio;
    sim.fixed_ratio = cfg.fixed_ratio;
    sim.latency_threshold_s = cfg.latency_threshold_s;

    sim.train.learning_rate = cfg.learning_rate;
    sim.train.batch_size = cfg.batch_size;
    sim.train.loss = cfg.loss == "mse" ? LossKind::MeanSquare : LossKind::CrossEntropy;
    if (cfg.local_iterations > 0) {
        sim.train.local_iterations = cfg.local_iterations;
    } else {
        std::size_t max_part = 1;
        for (const auto& dev : topo.devices) max_part = std::max(max_part, dev.data.size());
        const auto batches = static_cast<int>(
            (max_part + static_cast<std::size_t>(cfg.batch_size) - 1) /
            static_cast<std::size_t>(cfg.batch_size));
        sim.train.local_iterations = cfg.local_epochs * std::max(1, batches);
    }

    sim.bandwidth_hz = cfg.bandwidth_hz;
    sim.noise_power_w = dbm_to_watts(cfg.noise_dbm);
    sim.quantization_bits = cfg.quantization_bits;
    sim.channel.kind = cfg.channel_model == "static" ? ChannelModel::Kind::Static
                                                     : ChannelModel::Kind::Rayleigh;
    sim.channel.gain = cfg.channel_gain;
    sim.seed = cfg.seed;
    return sim;
}

}  // namespace hfl
