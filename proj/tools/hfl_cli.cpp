// Command-line front end: run simulations, inspect allocations, sweep
// thresholds or fixed pruning ratios, and evaluate the convergence bound.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfl/allocator.hpp"
#include "hfl/bound.hpp"
#include "hfl/config.hpp"
#include "hfl/csv.hpp"
#include "hfl/data_io.hpp"
#include "hfl/hierarchy.hpp"
#include "hfl/rng.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme;
    std::optional<double> latency_ms;
    std::string out_path;
};

hfl::ExperimentConfig load_with_overrides(const CommonFlags& f) {
    hfl::ExperimentConfig cfg =
        f.config_path.empty() ? hfl::ExperimentConfig{} : hfl::load_config(f.config_path);
    if (f.seed) cfg.seed = *f.seed;
    if (f.scheme) cfg.scheme = *f.scheme;
    if (f.latency_ms) cfg.latency_threshold_s = *f.latency_ms / 1000.0;
    cfg.validate();
    return cfg;
}

struct RunSummary {
    double final_accuracy = std::nan("");
    double final_loss = std::nan("");
    double mean_edge_latency_s = 0.0;
    double mean_ratio = 0.0;
    double total_bits = 0.0;
    int straggler_rounds = 0;  // edge rounds containing at least one straggler
};

RunSummary summarize(const hfl::RunResult& result) {
    RunSummary s;
    if (result.rounds.empty()) return s;
    double lat = 0.0, ratio = 0.0;
    std::size_t ratio_count = 0;
    for (const auto& row : result.rounds) {
        lat += row.edge_latency_s;
        bool any = false;
        for (bool straggler : row.straggler) any = any || straggler;
        if (any) ++s.straggler_rounds;
        for (double r : row.ratios) {
            ratio += r;
            ++ratio_count;
        }
        if (!std::isnan(row.test_accuracy)) {
            s.final_accuracy = row.test_accuracy;
            s.final_loss = row.test_loss;
        }
    }
    s.mean_edge_latency_s = lat / static_cast<double>(result.rounds.size());
    s.mean_ratio = ratio_count ? ratio / static_cast<double>(ratio_count) : 0.0;
    s.total_bits = result.rounds.back().cum_uploaded_bits;
    return s;
}

hfl::RunResult run_experiment(const hfl::ExperimentConfig& cfg) {
    const hfl::Network net = hfl::make_network(cfg);
    const hfl::Dataset train = hfl::make_train_dataset(cfg);
    const hfl::Dataset test = hfl::make_test_dataset(cfg);
    const hfl::Topology topo = hfl::make_topology(cfg, train);
    const hfl::SimConfig sim = hfl::make_sim_config(cfg, topo);
    return hfl::run(net, topo, test, sim);
}

int cmd_run(const CommonFlags& flags) {
    const hfl::ExperimentConfig cfg = load_with_overrides(flags);
    const hfl::RunResult result = run_experiment(cfg);

    if (!flags.out_path.empty()) {
        std::ofstream out(flags.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file '" + flags.out_path + "'");
        hfl::write_csv(out, result.rounds);
    } else {
        hfl::write_csv(std::cout, result.rounds);
    }

    const RunSummary s = summarize(result);
    std::cerr << "scheme=" << cfg.scheme << " seed=" << cfg.seed
              << " rounds=" << result.rounds.size() << "\n"
              << "final_accuracy=" << s.final_accuracy << " final_loss=" << s.final_loss << "\n"
              << "mean_edge_latency_s=" << s.mean_edge_latency_s << "\n"
              << "mean_pruning_ratio=" << s.mean_ratio << "\n"
              << "total_uploaded_bits=" << s.total_bits << "\n"
              << "straggler_rounds=" << s.straggler_rounds << " (infinite latency when a straggler"
              << " gets no bandwidth)\n"
              << "min_gamma=" << result.min_gamma << "\n";
    return 0;
}

int cmd_allocate(const CommonFlags& flags) {
    const hfl::ExperimentConfig cfg = load_with_overrides(flags);
    const hfl::Network net = hfl::make_network(cfg);
    const hfl::Dataset train = hfl::make_train_dataset(cfg);
    const hfl::Topology topo = hfl::make_topology(cfg, train);
    const hfl::SimConfig sim = hfl::make_sim_config(cfg, topo);

    // Inputs for edge server 0 in the first edge round, with the same channel
    // draws `run` would use there.
    const auto& arch = net.arch();
    const double conv = static_cast<double>(arch.conv_weight_count);
    const double fully = static_cast<double>(arch.fc_weight_count());
    const auto iters = static_cast<double>(sim.train.local_iterations);

    std::vector<hfl::alloc::DeviceInputs> inputs;
    std::vector<double> gains;
    for (int id : topo.edges.front()) {
        const auto& profile = topo.devices[static_cast<std::size_t>(id)].profile;
        std::mt19937_64 rng(hfl::derive_seed(
            sim.seed, {hfl::kSeedStreamChannel, 1, 1, 0, static_cast<std::uint64_t>(id)}));
        hfl::ChannelState ch;
        ch.gain = hfl::sample_channel(rng, sim.channel);
        ch.noise_power_w = sim.noise_power_w;
        ch.bandwidth_hz = sim.bandwidth_hz;
        ch.quantization_bits = sim.quantization_bits;
        gains.push_back(ch.gain);

        hfl::alloc::DeviceInputs in;
        in.slack_s = sim.latency_threshold_s -
                     hfl::compute_latency(iters, profile.cycles_per_weight, conv, profile.cpu_freq_hz);
        in.conv_bits = static_cast<double>(sim.quantization_bits) * conv;
        in.fc_compute_s =
            hfl::compute_latency(iters, profile.cycles_per_weight, fully, profile.cpu_freq_hz);
        in.fc_bits = static_cast<double>(sim.quantization_bits) * fully;
        in.full_rate_bps = ch.snr_term(profile.tx_power_w);
        inputs.push_back(in);
    }

    const hfl::alloc::AllocationPlan plan = hfl::alloc::solve_allocation(inputs);
    std::cout << "latency_threshold_s=" << sim.latency_threshold_s
              << " local_iterations=" << sim.train.local_iterations << " lambda=" << plan.lambda
              << " objective=" << hfl::alloc::objective(plan, inputs) << "\n";
    std::cout << "device gain bandwidth ratio straggler\n";
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        std::cout << topo.edges.front()[n] << ' ' << gains[n] << ' ' << plan.bandwidth[n] << ' '
                  << plan.ratios[n] << ' ' << (plan.straggler[n] ? 1 : 0) << "\n";
    }
    return 0;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

int cmd_sweep(const CommonFlags& flags, const std::string& thresholds_ms,
              const std::string& ratios) {
    if (thresholds_ms.empty() == ratios.empty())
        throw std::runtime_error("sweep: pass exactly one of --thresholds-ms or --ratios");

    const bool by_threshold = !thresholds_ms.empty();
    const std::vector<double> grid = parse_list(by_threshold ? thresholds_ms : ratios);
    if (grid.empty()) throw std::runtime_error("sweep: empty grid");

    std::ostringstream table;
    table << (by_threshold ? "latency_threshold_ms" : "fixed_ratio")
          << ",mean_ratio,final_accuracy,mean_edge_latency_s,total_uploaded_bits\n";

    for (double point : grid) {
        hfl::ExperimentConfig cfg = load_with_overrides(flags);
        if (by_threshold) {
            cfg.latency_threshold_s = point / 1000.0;
        } else {
            cfg.scheme = "fixed";
            cfg.fixed_ratio = point;
        }
        cfg.validate();
        const RunSummary s = summarize(run_experiment(cfg));
        table << point << ',' << s.mean_ratio << ',' << s.final_accuracy << ','
              << s.mean_edge_latency_s << ',' << s.total_bits << "\n";
    }

    if (!flags.out_path.empty()) {
        std::ofstream out(flags.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file '" + flags.out_path + "'");
        out << table.str();
    }
    std::cout << table.str();
    return 0;
}

int cmd_bound(hfl::bound::BoundParams p, double rho_sum) {
    std::cout << "first_term=" << hfl::bound::first_term(p) << "\n"
              << "h1=" << hfl::bound::h1(p) << "\n"
              << "h2=" << hfl::bound::h2(p) << "\n"
              << "rho_sum=" << rho_sum << "\n"
              << "pruning_term=" << hfl::bound::h2(p) * rho_sum << "\n"
              << "bound=" << hfl::bound::bound_value(p, rho_sum) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical federated learning with adaptive pruning: simulator and solvers"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "Path to a sectioned key=value config file");
        sub->add_option("--seed", flags.seed, "Override run.seed");
        sub->add_option("--scheme", flags.scheme, "Override run.scheme")
            ->check(CLI::IsMember({"optimal", "equal", "no_pruning", "fixed"}));
        sub->add_option("--latency-ms", flags.latency_ms, "Override latency threshold, in ms");
        sub->add_option("--out", flags.out_path, "Write CSV output to this path");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment, emit metrics CSV");
    add_common(run_cmd);

    CLI::App* alloc_cmd =
        app.add_subcommand("allocate", "Print one bandwidth/pruning allocation for edge 0");
    add_common(alloc_cmd);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Grid over latency thresholds or fixed pruning ratios");
    add_common(sweep_cmd);
    std::string thresholds_ms, ratio_list;
    sweep_cmd->add_option("--thresholds-ms", thresholds_ms,
                          "Comma-separated latency thresholds in ms");
    sweep_cmd->add_option("--ratios", ratio_list, "Comma-separated fixed pruning ratios");

    CLI::App* bound_cmd = app.add_subcommand("bound", "Evaluate the convergence-bound terms");
    hfl::bound::BoundParams params;
    double rho_sum = 0.0;
    bound_cmd->add_option("--smoothness", params.smoothness, "L");
    bound_cmd->add_option("--pruning-noise", params.pruning_noise, "D");
    bound_cmd->add_option("--grad-bound", params.grad_bound, "phi");
    bound_cmd->add_option("--grad-noise", params.grad_noise, "sigma_hat");
    bound_cmd->add_option("--min-occurrence", params.min_occurrence, "Gamma*");
    bound_cmd->add_option("--learning-rate", params.learning_rate, "eta");
    bound_cmd->add_option("--global-rounds", params.global_rounds, "Q");
    bound_cmd->add_option("--edge-rounds", params.edge_rounds, "E");
    bound_cmd->add_option("--local-iters", params.local_iters, "T");
    bound_cmd->add_option("--devices", params.num_devices, "N");
    bound_cmd->add_option("--weights", params.num_weights, "W");
    bound_cmd->add_option("--initial-gap", params.initial_gap, "E[F(w0) - F(w*)]");
    bound_cmd->add_option("--rho-sum", rho_sum, "Sum of pruning ratios over rounds and devices");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(flags);
        if (alloc_cmd->parsed()) return cmd_allocate(flags);
        if (sweep_cmd->parsed()) return cmd_sweep(flags, thresholds_ms, ratio_list);
        if (bound_cmd->parsed()) return cmd_bound(params, rho_sum);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
