#include "hfl/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hfl/trainer.hpp"

namespace hfl::bound {

double h1(const BoundParams& p) {
    const double L = p.smoothness, eta = p.learning_rate, T = p.local_iters, E = p.edge_rounds;
    const double W = p.num_weights, phi = p.grad_bound, N = p.num_devices, sig = p.grad_noise;
    const double head = 3.0 * L * eta * T * E * W * phi * phi;
    const double tail = phi * phi * N * eta * eta * T * T * L * L * L +
                        3.0 * L * W * eta * E * T * N * sig * sig +
                        3.0 * W * E * L * L * L * T * T * T * eta * eta * eta * phi * phi * N;
    return head + tail / p.min_occurrence;
}

double h2(const BoundParams& p) {
    const double L = p.smoothness;
    return (2.0 * p.edge_rounds * L * L +
            6.0 * p.num_weights * p.learning_rate * L * L * L * p.pruning_noise * p.pruning_noise *
                p.local_iters) /
           p.min_occurrence;
}

double first_term(const BoundParams& p) {
    return 2.0 * p.initial_gap /
           (p.global_rounds * p.num_weights * p.learning_rate * p.edge_rounds * p.local_iters);
}

double bound_value(const BoundParams& p, double rho_sums) {
    if (rho_sums < 0.0) throw std::domain_error("bound_value: rho sums must be nonnegative");
    return first_term(p) + h1(p) + h2(p) * rho_sums;
}

int gamma_star(const std::vector<std::vector<PruningMask>>& masks_per_round) {
    int best = std::numeric_limits<int>::max();
    bool seen = false;
    for (const auto& round : masks_per_round) {
        if (round.empty()) continue;
        const std::size_t len = round.front().bits.size();
        for (std::size_t j = 0; j < len; ++j) {
            int occ = 0;
            for (const auto& m : round) {
                if (m.bits.size() != len)
                    throw std::invalid_argument("gamma_star: masks in a round differ in length");
                occ += m.bits[j];
            }
            if (occ > 0) {
                best = std::min(best, occ);
                seen = true;
            }
        }
    }
    return seen ? best : 0;
}

namespace {

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<int> draw_batch(std::mt19937_64& rng, std::size_t n, int batch_size) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<int> idx(static_cast<std::size_t>(batch_size));
    for (auto& i : idx) i = static_cast<int>(pick(rng));
    return idx;
}

}  // namespace

double estimate_smoothness(const Network& net, const Dataset& data, const ModelWeights& w,
                           LossKind loss, int pairs, std::uint64_t seed) {
    if (pairs < 1) throw std::domain_error("estimate_smoothness: pairs must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.05);
    std::vector<int> all(data.size());
    std::iota(all.begin(), all.end(), 0);

    double best = 0.0;
    for (int k = 0; k < pairs; ++k) {
        ModelWeights w1 = w, w2 = w;
        for (auto& v : w1.values) v += jitter(rng);
        for (auto& v : w2.values) v += jitter(rng);
        auto g1 = batch_gradient(net, w1, data, all, loss);
        auto g2 = batch_gradient(net, w2, data, all, loss);
        double gd = 0.0, wd = 0.0;
        for (std::size_t j = 0; j < g1.size(); ++j) {
            gd += (g1[j] - g2[j]) * (g1[j] - g2[j]);
            wd += (w1.values[j] - w2.values[j]) * (w1.values[j] - w2.values[j]);
        }
        if (wd > 0.0) best = std::max(best, std::sqrt(gd / wd));
    }
    return best;
}

double estimate_grad_bound(const Network& net, const Dataset& data, const ModelWeights& w,
                           LossKind loss, int batches, int batch_size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int k = 0; k < batches; ++k) {
        auto idx = draw_batch(rng, data.size(), batch_size);
        best = std::max(best, l2_norm(batch_gradient(net, w, data, idx, loss)));
    }
    return best;
}

double estimate_grad_noise(const Network& net, const Dataset& data, const ModelWeights& w,
                           LossKind loss, int batches, int batch_size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    const auto full = batch_gradient(net, w, data, all, loss);

    double best = 0.0;
    for (int k = 0; k < batches; ++k) {
        auto idx = draw_batch(rng, data.size(), batch_size);
        auto g = batch_gradient(net, w, data, idx, loss);
        for (std::size_t j = 0; j < g.size(); ++j) g[j] -= full[j];
        best = std::max(best, l2_norm(g));
    }
    return best;
}

double estimate_pruning_noise(const ModelWeights& w, const std::vector<double>& ratios) {
    // Magnitude masks at each ratio; D^2 bounds ||w - w.m||^2 / rho.
    ImportanceVector mag;
    const auto fc = w.fc_span();
    mag.scores.assign(fc.begin(), fc.end());
    for (double& s : mag.scores) s = std::abs(s);

    double best = 0.0;
    for (double rho : ratios) {
        if (rho <= 0.0) continue;
        const PruningMask m = build_mask(mag, rho, w.arch);
        const ModelWeights masked = apply_mask(w, m);
        double err = 0.0;
        for (std::size_t j = 0; j < w.values.size(); ++j) {
            const double d = w.values[j] - masked.values[j];
            err += d * d;
        }
        best = std::max(best, err / rho);
    }
    return std::sqrt(best);
}

}  // namespace hfl::bound
