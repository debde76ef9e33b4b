#include "hfl/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hfl/rng.hpp"

namespace hfl {

namespace {

alloc::DeviceInputs make_inputs(const DeviceProfile& dev, const ChannelState& ch,
                                const ModelArch& arch, double t_th, double iterations) {
    alloc::DeviceInputs in;
    const auto conv = static_cast<double>(arch.conv_weight_count);
    const auto fully = static_cast<double>(arch.fc_weight_count());
    in.slack_s = t_th - compute_latency(iterations, dev.cycles_per_weight, conv, dev.cpu_freq_hz);
    in.conv_bits = static_cast<double>(ch.quantization_bits) * conv;
    in.fc_compute_s = compute_latency(iterations, dev.cycles_per_weight, fully, dev.cpu_freq_hz);
    in.fc_bits = static_cast<double>(ch.quantization_bits) * fully;
    in.full_rate_bps = ch.snr_term(dev.tx_power_w);
    return in;
}

alloc::AllocationPlan plan_for_scheme(const std::vector<alloc::DeviceInputs>& inputs,
                                      const SimConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::Optimal:
            return alloc::solve_allocation(inputs);
        case Scheme::EqualBandwidth:
            return alloc::baseline_equal(inputs);
        case Scheme::NoPruning:
            return alloc::baseline_no_pruning(inputs);
        case Scheme::FixedRatio: {
            alloc::AllocationPlan plan = alloc::baseline_no_pruning(inputs);
            std::fill(plan.ratios.begin(), plan.ratios.end(), cfg.fixed_ratio);
            std::fill(plan.straggler.begin(), plan.straggler.end(), false);
            return plan;
        }
    }
    throw std::logic_error("plan_for_scheme: unknown scheme");
}

int round_min_gamma(const std::vector<PruningMask>& masks) {
    if (masks.empty()) return 0;
    const std::size_t len = masks.front().bits.size();
    int best = std::numeric_limits<int>::max();
    bool seen = false;
    for (std::size_t j = 0; j < len; ++j) {
        int occ = 0;
        for (const auto& m : masks) occ += m.bits[j];
        if (occ > 0) {
            best = std::min(best, occ);
            seen = true;
        }
    }
    return seen ? best : 0;
}

}  // namespace

void Topology::validate() const {
    if (edges.empty()) throw std::invalid_argument("Topology: need at least one edge server");
    std::vector<int> seen(devices.size(), 0);
    for (const auto& members : edges) {
        if (members.empty())
            throw std::invalid_argument("Topology: every edge server needs at least one device");
        for (int id : members) {
            if (id < 0 || static_cast<std::size_t>(id) >= devices.size())
                throw std::invalid_argument("Topology: device id out of range");
            if (seen[static_cast<std::size_t>(id)]++)
                throw std::invalid_argument("Topology: device assigned to multiple edges");
        }
    }
    for (int count : seen) {
        if (count != 1) throw std::invalid_argument("Topology: every device must appear exactly once");
    }
}

ModelWeights edge_aggregate(const std::vector<ModelWeights>& locals,
                            const std::vector<PruningMask>& masks,
                            const ModelWeights& previous_edge) {
    if (locals.empty()) throw std::invalid_argument("edge_aggregate: empty device list");
    if (locals.size() != masks.size())
        throw std::invalid_argument("edge_aggregate: locals/masks count mismatch");
    const std::size_t len = previous_edge.values.size();
    for (std::size_t n = 0; n < locals.size(); ++n) {
        if (locals[n].arch != previous_edge.arch)
            throw std::invalid_argument("edge_aggregate: arch mismatch");
        if (masks[n].bits.size() != len)
            throw std::invalid_argument("edge_aggregate: mask length mismatch");
    }

    ModelWeights out = previous_edge;
    for (std::size_t j = 0; j < len; ++j) {
        double sum = 0.0;
        int occ = 0;
        for (std::size_t n = 0; n < locals.size(); ++n) {
            if (masks[n].bits[j]) {
                sum += locals[n].values[j];
                ++occ;
            }
        }
        if (occ > 0) out.values[j] = sum / static_cast<double>(occ);
    }
    return out;
}

ModelWeights cloud_aggregate(const std::vector<ModelWeights>& edges) {
    if (edges.empty()) throw std::invalid_argument("cloud_aggregate: empty edge list");
    ModelWeights out = edges.front();
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (edges[k].arch != out.arch)
            throw std::invalid_argument("cloud_aggregate: arch mismatch");
        for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += edges[k].values[j];
    }
    const double inv = 1.0 / static_cast<double>(edges.size());
    for (double& v : out.values) v *= inv;
    return out;
}

RunResult run(const Network& net, const Topology& topo, const Dataset& test_set,
              const SimConfig& cfg, std::optional<ModelWeights> initial) {
    topo.validate();
    if (cfg.global_rounds < 0 || cfg.edge_rounds < 1)
        throw std::domain_error("run: need global_rounds >= 0 and edge_rounds >= 1");

    const ModelArch& arch = net.arch();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    RunResult result;
    result.final_weights =
        initial ? std::move(*initial) : init_weights(net, derive_seed(cfg.seed, {kSeedStreamInit}));
    if (result.final_weights.arch != arch)
        throw std::invalid_argument("run: initial weights do not match the network");
    result.min_gamma = 0;

    ModelWeights global = result.final_weights;
    const std::size_t num_edges = topo.edges.size();

    // Per-device importance memory from the previous (received, updated) pair.
    std::vector<std::optional<ImportanceVector>> memory(topo.devices.size());

    double cum_bits = 0.0;
    int overall_gamma = std::numeric_limits<int>::max();
    bool any_gamma = false;

    for (int q = 1; q <= cfg.global_rounds; ++q) {
        std::vector<ModelWeights> edge_models(num_edges, global);

        for (int e = 1; e <= cfg.edge_rounds; ++e) {
            for (std::size_t k = 0; k < num_edges; ++k) {
                const auto& members = topo.edges[k];
                const auto uq = static_cast<std::uint64_t>(q);
                const auto ue = static_cast<std::uint64_t>(e);
                const auto uk = static_cast<std::uint64_t>(k);

                RoundMetrics row;
                row.global_round = q;
                row.edge_round = e;
                row.edge_server = static_cast<int>(k);
                row.device_ids = members;
                row.test_loss = nan;
                row.test_accuracy = nan;

                // Channel sampling and allocation inputs.
                std::vector<ChannelState> channels;
                std::vector<alloc::DeviceInputs> inputs;
                channels.reserve(members.size());
                inputs.reserve(members.size());
                for (int id : members) {
                    std::mt19937_64 ch_rng(derive_seed(
                        cfg.seed, {kSeedStreamChannel, uq, ue, uk, static_cast<std::uint64_t>(id)}));
                    ChannelState ch;
                    ch.gain = sample_channel(ch_rng, cfg.channel);
                    ch.noise_power_w = cfg.noise_power_w;
                    ch.bandwidth_hz = cfg.bandwidth_hz;
                    ch.quantization_bits = cfg.quantization_bits;
                    ch.validate();
                    row.gains.push_back(ch.gain);
                    channels.push_back(ch);
                    inputs.push_back(make_inputs(topo.devices[static_cast<std::size_t>(id)].profile,
                                                 ch, arch, cfg.latency_threshold_s,
                                                 static_cast<double>(cfg.train.local_iterations)));
                }

                const alloc::AllocationPlan plan = plan_for_scheme(inputs, cfg);
                row.lambda = plan.lambda;
                row.bandwidth = plan.bandwidth;
                row.ratios = plan.ratios;
                row.straggler.assign(plan.straggler.begin(), plan.straggler.end());

                // Local updates.
                std::vector<ModelWeights> locals;
                std::vector<PruningMask> masks;
                std::vector<double> totals;
                locals.reserve(members.size());
                masks.reserve(members.size());
                for (std::size_t i = 0; i < members.size(); ++i) {
                    const int id = members[i];
                    const Device& dev = topo.devices[static_cast<std::size_t>(id)];

                    ImportanceVector scores;
                    if (memory[static_cast<std::size_t>(id)]) {
                        scores = *memory[static_cast<std::size_t>(id)];
                    } else {
                        const auto fc = edge_models[k].fc_span();
                        scores.scores.assign(fc.begin(), fc.end());
                        for (double& s : scores.scores) s = std::abs(s);
                    }
                    PruningMask mask = build_mask(scores, plan.ratios[i], arch);

                    TrainConfig tc = cfg.train;
                    tc.rng_seed = derive_seed(
                        cfg.seed, {kSeedStreamTrain, uq, ue, uk, static_cast<std::uint64_t>(id)});
                    ModelWeights updated = local_update(net, edge_models[k], mask, dev.data, tc);
                    memory[static_cast<std::size_t>(id)] =
                        importance(edge_models[k], updated);

                    const LatencyBreakdown lb =
                        device_latency(dev.profile, channels[i], plan.bandwidth[i], arch,
                                       plan.ratios[i], static_cast<double>(cfg.train.local_iterations));
                    row.latency.push_back(lb);
                    totals.push_back(lb.total);
                    row.uploaded_weights += static_cast<long long>(mask.kept_count());

                    locals.push_back(std::move(updated));
                    masks.push_back(std::move(mask));
                }

                edge_models[k] = edge_aggregate(locals, masks, edge_models[k]);

                row.edge_latency_s = edge_round_latency(totals);
                row.uploaded_bits =
                    static_cast<double>(cfg.quantization_bits) * static_cast<double>(row.uploaded_weights);
                cum_bits += row.uploaded_bits;
                row.cum_uploaded_bits = cum_bits;
                row.min_gamma = round_min_gamma(masks);
                if (row.min_gamma > 0) {
                    overall_gamma = std::min(overall_gamma, row.min_gamma);
                    any_gamma = true;
                }

                result.rounds.push_back(std::move(row));
            }
        }

        global = cloud_aggregate(edge_models);

        const EvalResult ev = evaluate(net, global, test_set, cfg.train.loss);
        for (auto& row : result.rounds) {
            if (row.global_round == q && row.edge_round == cfg.edge_rounds) {
                row.test_loss = ev.loss;
                row.test_accuracy = ev.accuracy;
            }
        }
    }

    result.final_weights = std::move(global);
    result.min_gamma = any_gamma ? overall_gamma : 0;
    return result;
}

}  // namespace hfl
