// Test-only oracles: independent reimplementations used to cross-check the
// library. Nothing here may call back into the code path it verifies.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <vector>

#include "hfl/allocator.hpp"
#include "hfl/dataset.hpp"
#include "hfl/hierarchy.hpp"
#include "hfl/model.hpp"
#include "hfl/network.hpp"
#include "hfl/rng.hpp"
#include "hfl/trainer.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Straight-loop forward pass + loss, written against the documented weight
// layout rather than the Network internals.
// ---------------------------------------------------------------------------

inline std::vector<double> loop_forward(const hfl::Network& net, const hfl::ModelWeights& w,
                                         const std::vector<double>& x) {
    const auto& arch = net.arch();
    const int in_dim = net.input_dim();
    const int feat = net.feature_dim();

    std::vector<double> a(static_cast<std::size_t>(feat), 0.0);
    for (int j = 0; j < feat; ++j) {
        double z = 0.0;
        for (int i = 0; i < in_dim; ++i)
            z += x[static_cast<std::size_t>(i)] *
                 w.values[static_cast<std::size_t>(i) * feat + j];
        a[static_cast<std::size_t>(j)] = std::tanh(z);
    }

    std::size_t off = arch.conv_weight_count;
    for (std::size_t l = 0; l < arch.fc_layers.size(); ++l) {
        const auto [ni, no] = arch.fc_layers[l];
        std::vector<double> z(static_cast<std::size_t>(no), 0.0);
        for (int j = 0; j < no; ++j) {
            double s = 0.0;
            for (int i = 0; i < ni; ++i)
                s += a[static_cast<std::size_t>(i)] *
                     w.values[off + static_cast<std::size_t>(i) * no + j];
            z[static_cast<std::size_t>(j)] = s;
        }
        off += static_cast<std::size_t>(ni) * no;
        if (l + 1 < arch.fc_layers.size())
            for (double& v : z) v = std::tanh(v);
        a = std::move(z);
    }
    return a;
}

inline double loop_mean_loss(const hfl::Network& net, const hfl::ModelWeights& w,
                             const hfl::Dataset& data) {
    double total = 0.0;
    for (const auto& s : data.samples) {
        const std::vector<double> logits = loop_forward(net, w, s.features);
        double denom = 0.0;
        for (double v : logits) denom += std::exp(v);
        total += -std::log(std::exp(logits[static_cast<std::size_t>(s.label)]) / denom);
    }
    return total / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Central finite-difference gradient of the mean batch loss.
// ---------------------------------------------------------------------------

inline std::vector<double> finite_difference_gradient(const hfl::Network& net,
                                                      const hfl::ModelWeights& w,
                                                      const hfl::Dataset& data,
                                                      const std::vector<int>& batch,
                                                      hfl::LossKind loss, double h = 1e-6) {
    auto batch_loss = [&](const hfl::ModelWeights& weights) {
        double total = 0.0;
        for (int idx : batch)
            total += net.sample_loss(weights, data.samples[static_cast<std::size_t>(idx)], loss);
        return total / static_cast<double>(batch.size());
    };
    std::vector<double> grad(w.values.size());
    for (std::size_t j = 0; j < w.values.size(); ++j) {
        hfl::ModelWeights wp = w, wm = w;
        wp.values[j] += h;
        wm.values[j] -= h;
        grad[j] = (batch_loss(wp) - batch_loss(wm)) / (2.0 * h);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Eq.-1-style importance: squared loss change when a single fc weight is
// removed. Test oracle only; the production scorer uses weight deltas.
// ---------------------------------------------------------------------------

inline double removal_importance(const hfl::Network& net, const hfl::ModelWeights& w,
                                 const hfl::Dataset& data, std::size_t fc_position,
                                 hfl::LossKind loss) {
    if (data.samples.empty()) throw std::domain_error("removal_importance: empty dataset");
    const double base = hfl::local_loss(net, w, data, loss);
    hfl::ModelWeights zeroed = w;
    zeroed.values.at(w.arch.conv_weight_count + fc_position) = 0.0;
    const double removed = hfl::local_loss(net, zeroed, data, loss);
    const double diff = base - removed;
    return diff * diff;
}

// ---------------------------------------------------------------------------
// Spearman rank correlation (average ranks on ties).
// ---------------------------------------------------------------------------

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

// ---------------------------------------------------------------------------
// Brute-force per-weight aggregation oracle.
// ---------------------------------------------------------------------------

inline hfl::ModelWeights brute_edge_aggregate(const std::vector<hfl::ModelWeights>& locals,
                                              const std::vector<hfl::PruningMask>& masks,
                                              const hfl::ModelWeights& previous) {
    hfl::ModelWeights out = previous;
    for (std::size_t j = 0; j < previous.values.size(); ++j) {
        std::vector<double> present;
        for (std::size_t n = 0; n < locals.size(); ++n)
            if (masks[n].bits[j]) present.push_back(locals[n].values[j]);
        if (!present.empty())
            out.values[j] = std::accumulate(present.begin(), present.end(), 0.0) /
                            static_cast<double>(present.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference flat FedAvg loop (one server, plain SGD, no masks), sharing only
// the public seed-derivation contract with the simulator.
// ---------------------------------------------------------------------------

inline std::vector<hfl::ModelWeights> reference_fedavg(const hfl::Network& net,
                                                       const std::vector<hfl::Dataset>& devices,
                                                       const hfl::ModelWeights& initial,
                                                       const hfl::TrainConfig& base_cfg, int rounds,
                                                       std::uint64_t seed) {
    std::vector<hfl::ModelWeights> per_round;
    hfl::ModelWeights global = initial;
    const hfl::PruningMask ones = hfl::PruningMask::all_ones(net.arch());
    for (int q = 1; q <= rounds; ++q) {
        std::vector<hfl::ModelWeights> locals;
        for (std::size_t id = 0; id < devices.size(); ++id) {
            hfl::TrainConfig tc = base_cfg;
            tc.rng_seed = hfl::derive_seed(
                seed, {hfl::kSeedStreamTrain, static_cast<std::uint64_t>(q), 1, 0,
                       static_cast<std::uint64_t>(id)});
            locals.push_back(hfl::local_update(net, global, ones, devices[id], tc));
        }
        for (std::size_t j = 0; j < global.values.size(); ++j) {
            double sum = 0.0;
            for (const auto& l : locals) sum += l.values[j];
            global.values[j] = sum / static_cast<double>(locals.size());
        }
        per_round.push_back(global);
    }
    return per_round;
}

// ---------------------------------------------------------------------------
// 1-D golden-section minimizer for two-device bandwidth splits.
// ---------------------------------------------------------------------------

template <typename F>
double golden_section_min(F f, double lo, double hi, double tol = 1e-12) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Random allocation instances at desk-scale physical magnitudes.
// ---------------------------------------------------------------------------

inline hfl::alloc::DeviceInputs random_device_inputs(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> slack(0.005, 0.05);
    std::uniform_real_distribution<double> conv_bits(1e3, 1e5);
    std::uniform_real_distribution<double> fc_cmp(1e-4, 5e-3);
    std::uniform_real_distribution<double> fc_bits(1e4, 1e6);
    std::uniform_real_distribution<double> log_rate(std::log(1e6), std::log(1e8));
    hfl::alloc::DeviceInputs in;
    in.slack_s = slack(rng);
    in.conv_bits = conv_bits(rng);
    in.fc_compute_s = fc_cmp(rng);
    in.fc_bits = fc_bits(rng);
    in.full_rate_bps = std::exp(log_rate(rng));
    return in;
}

inline std::vector<hfl::alloc::DeviceInputs> random_instance(std::mt19937_64& rng, int n) {
    std::vector<hfl::alloc::DeviceInputs> devices;
    for (int i = 0; i < n; ++i) devices.push_back(random_device_inputs(rng));
    return devices;
}

inline bool bitwise_equal(const hfl::ModelWeights& a, const hfl::ModelWeights& b) {
    return a.values.size() == b.values.size() &&
           std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

}  // namespace oracles
