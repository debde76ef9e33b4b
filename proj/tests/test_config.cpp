#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hfl/config.hpp"
#include "hfl/csv.hpp"
#include "hfl/data_io.hpp"
#include "hfl/trainer.hpp"

using namespace hfl;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& bytes)
        : path("/tmp/hfl_test_" + name) {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    ~TempFile() { std::remove(path.c_str()); }
};

void push_be32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>((v >> 24) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>(v & 0xff));
}

// 4 two-by-two "images" with labels 0..3.
std::string fixture_images() {
    std::string s;
    push_be32(s, 0x00000803);
    push_be32(s, 4);
    push_be32(s, 2);
    push_be32(s, 2);
    for (int i = 0; i < 16; ++i) s.push_back(static_cast<char>(i * 16));
    return s;
}

std::string fixture_labels(std::uint32_t count = 4) {
    std::string s;
    push_be32(s, 0x00000801);
    push_be32(s, count);
    for (std::uint32_t i = 0; i < count; ++i) s.push_back(static_cast<char>(i));
    return s;
}

}  // namespace

TEST_CASE("empty config yields the reference simulation defaults") {
    const ExperimentConfig cfg = parse_config("");
    CHECK(cfg.tx_power_dbm == 28.0);
    CHECK(cfg.bandwidth_hz == 20e6);
    CHECK(cfg.cpu_freq_hz == 3e9);
    CHECK(cfg.learning_rate == 0.001);
    CHECK(cfg.noise_dbm == -110.0);
    CHECK(cfg.batch_size == 128);
    CHECK(cfg.quantization_bits == 64);
    CHECK(cfg.num_edge_servers == 5);
    CHECK(cfg.devices_per_edge == 5);
    CHECK(cfg.global_rounds == 10);
    CHECK(cfg.edge_rounds == 5);
    CHECK(cfg.local_epochs == 2);
    CHECK(cfg == ExperimentConfig{});
}

TEST_CASE("invalid values are rejected with the key named") {
    try {
        parse_config("[radio]\nbandwidth_hz = -1\n");
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bandwidth_hz") != std::string::npos);
    }

    try {
        parse_config("[radio]\nbandwidth_hz = not_a_number\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bandwidth_hz") != std::string::npos);
    }
}

TEST_CASE("unknown keys and sections are strict errors") {
    CHECK_THROWS_AS(parse_config("[radio]\nbandwidht_hz = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[radoi]\nbandwidth_hz = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("stray_line\n"), std::invalid_argument);
}

TEST_CASE("config round-trips through serialization losslessly") {
    ExperimentConfig cfg;
    cfg.tx_power_dbm = 23.456789012345678;
    cfg.bandwidth_hz = 1.23e7;
    cfg.channel_model = "static";
    cfg.channel_gain = 3.7e-13;
    cfg.learning_rate = 0.007;
    cfg.fc_widths = {17, 5, 3};
    cfg.classes = 3;
    cfg.scheme = "equal";
    cfg.seed = 18446744073709551615ULL;  // max u64 survives
    cfg.latency_threshold_s = 0.0275;
    cfg.partition_mode = "label_skew";

    const std::string text = serialize_config(cfg);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == cfg);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("comments and blank lines are tolerated") {
    const ExperimentConfig cfg = parse_config(
        "# comment\n\n[training]\n; another\nbatch_size = 32\n\n[run]\nseed = 9\n");
    CHECK(cfg.batch_size == 32);
    CHECK(cfg.seed == 9);
}

TEST_CASE("load_config reports missing files") {
    CHECK_THROWS_AS(load_config("/nonexistent/nowhere.cfg"), std::runtime_error);
}

TEST_CASE("idx loader parses a hand-built fixture") {
    TempFile img("img", fixture_images());
    TempFile lab("lab", fixture_labels());
    const Dataset d = load_idx(img.path, lab.path);
    REQUIRE(d.size() == 4);
    CHECK(d.feature_dim() == 4);
    CHECK(d.num_classes == 4);
    for (int i = 0; i < 4; ++i) CHECK(d.samples[static_cast<std::size_t>(i)].label == i);
    CHECK(d.samples[0].features[0] == doctest::Approx(0.0));
    CHECK(d.samples[0].features[1] == doctest::Approx(16.0 / 255.0));
    CHECK(d.samples[3].features[3] == doctest::Approx(240.0 / 255.0));
}

TEST_CASE("idx loader rejects bad magic, truncation, count mismatch") {
    SUBCASE("wrong image magic") {
        std::string bad = fixture_images();
        bad[3] = 0x01;
        TempFile img("img_badmagic", bad);
        TempFile lab("lab_ok", fixture_labels());
        try {
            load_idx(img.path, lab.path);
            FAIL("expected magic error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
        }
    }
    SUBCASE("truncated pixel data") {
        std::string cut = fixture_images();
        cut.resize(cut.size() - 3);
        TempFile img("img_cut", cut);
        TempFile lab("lab_ok2", fixture_labels());
        try {
            load_idx(img.path, lab.path);
            FAIL("expected truncation error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("truncated") != std::string::npos);
            CHECK(std::string(e.what()).find("offset") != std::string::npos);
        }
    }
    SUBCASE("label file shorter than image file") {
        TempFile img("img_ok", fixture_images());
        TempFile lab("lab_short", fixture_labels(3));
        try {
            load_idx(img.path, lab.path);
            FAIL("expected count mismatch");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("match") != std::string::npos);
        }
    }
}

TEST_CASE("synthetic blobs are deterministic and class-complete") {
    const Dataset a = synth_dataset(4, 6, 25, 2.5, 77);
    const Dataset b = synth_dataset(4, 6, 25, 2.5, 77);
    REQUIRE(a.size() == 100);
    CHECK(a.feature_dim() == 6);
    std::set<int> labels;
    for (const auto& s : a.samples) labels.insert(s.label);
    CHECK(labels.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].label == b.samples[i].label);
        for (std::size_t j = 0; j < a.samples[i].features.size(); ++j)
            CHECK(a.samples[i].features[j] == b.samples[i].features[j]);
    }
    const Dataset c = synth_dataset(4, 6, 25, 2.5, 78);
    CHECK(a.samples[0].features[0] != c.samples[0].features[0]);
}

TEST_CASE("separation controls attainable accuracy") {
    const Network net(4, 6, {3});
    TrainConfig tc;
    tc.learning_rate = 0.1;
    tc.batch_size = 30;
    tc.local_iterations = 150;
    tc.rng_seed = 5;
    const PruningMask ones = PruningMask::all_ones(net.arch());

    SUBCASE("zero separation stays near chance") {
        const Dataset train = synth_dataset(3, 4, 60, 0.0, 21);
        const Dataset test = synth_dataset(3, 4, 60, 0.0, 22);
        const ModelWeights w = local_update(net, init_weights(net, 6), ones, train, tc);
        const EvalResult r = evaluate(net, w, test);
        CHECK(r.accuracy < 1.0 / 3.0 + 0.15);
    }
    SUBCASE("wide separation is trainable to high accuracy") {
        const Dataset train = synth_dataset(3, 4, 60, 6.0, 23);
        const Dataset test = synth_dataset(3, 4, 60, 6.0, 23);  // same blobs
        const ModelWeights w = local_update(net, init_weights(net, 6), ones, train, tc);
        const EvalResult r = evaluate(net, w, test);
        CHECK(r.accuracy > 0.95);
    }
}

TEST_CASE("csv schema is stable and fully determined by the run") {
    CHECK(csv_header() ==
          "global_round,edge_round,edge_server,lambda,edge_latency_s,min_gamma,"
          "uploaded_weights,uploaded_bits,cum_uploaded_bits,test_loss,test_accuracy,"
          "device_ids,gains,bandwidth,ratios,stragglers,device_latency_s");

    ExperimentConfig cfg;
    cfg.num_edge_servers = 2;
    cfg.devices_per_edge = 2;
    cfg.global_rounds = 1;
    cfg.edge_rounds = 2;
    cfg.classes = 3;
    cfg.fc_widths = {6, 3};
    cfg.input_dim = 4;
    cfg.per_class = 12;
    cfg.per_class_test = 6;
    cfg.batch_size = 8;
    cfg.validate();

    const Network net = make_network(cfg);
    const Dataset train = make_train_dataset(cfg);
    const Dataset test = make_test_dataset(cfg);
    const Topology topo = make_topology(cfg, train);
    const SimConfig sim = make_sim_config(cfg, topo);

    std::ostringstream a, b;
    write_csv(a, run(net, topo, test, sim).rounds);
    write_csv(b, run(net, topo, test, sim).rounds);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("nan") != std::string::npos);  // non-final edge rounds

    // 9 significant digits on floats.
    RoundMetrics row;
    row.global_round = 1;
    row.edge_round = 1;
    row.edge_server = 0;
    row.lambda = 1.0 / 3.0;
    const std::string line = csv_row(row);
    CHECK(line.find("0.333333333") != std::string::npos);
}

TEST_CASE("experiment wiring honors the topology and derives iterations") {
    ExperimentConfig cfg;
    cfg.num_edge_servers = 3;
    cfg.devices_per_edge = 2;
    cfg.classes = 2;
    cfg.fc_widths = {4, 2};
    cfg.input_dim = 3;
    cfg.per_class = 30;  // 60 samples over 6 devices = 10 each
    cfg.batch_size = 4;
    cfg.local_epochs = 2;
    cfg.validate();

    const Dataset train = make_train_dataset(cfg);
    const Topology topo = make_topology(cfg, train);
    CHECK(topo.edges.size() == 3);
    CHECK(topo.devices.size() == 6);
    std::size_t total = 0;
    for (const auto& d : topo.devices) total += d.data.size();
    CHECK(total == train.size());

    const SimConfig sim = make_sim_config(cfg, topo);
    // 10 samples / batch 4 -> 3 batches per epoch, times 2 epochs.
    CHECK(sim.train.local_iterations == 6);
    CHECK(sim.noise_power_w == doctest::Approx(1e-14));

    cfg.local_iterations = 11;
    const SimConfig sim2 = make_sim_config(cfg, topo);
    CHECK(sim2.train.local_iterations == 11);
}
