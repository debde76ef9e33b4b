#include "hfl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hfl {

double local_loss(const Network& net, const ModelWeights& w, const Dataset& data, LossKind loss) {
    if (data.samples.empty()) throw std::domain_error("local_loss: empty dataset");
    double total = 0.0;
    for (const auto& s : data.samples) total += net.sample_loss(w, s, loss);
    return total / static_cast<double>(data.size());
}

std::vector<double> batch_gradient(const Network& net, const ModelWeights& w, const Dataset& data,
                                   std::span<const int> batch_idx, LossKind loss) {
    if (batch_idx.empty()) throw std::domain_error("batch_gradient: empty batch");
    std::vector<double> grad(w.values.size(), 0.0);
    for (int idx : batch_idx) {
        net.accumulate_gradient(w, data.samples.at(static_cast<std::size_t>(idx)), loss, grad);
    }
    const double inv = 1.0 / static_cast<double>(batch_idx.size());
    for (double& g : grad) g *= inv;
    return grad;
}

ModelWeights sgd_step(const Network& net, const ModelWeights& w, const PruningMask& m,
                      const Dataset& data, std::span<const int> batch_idx, double learning_rate,
                      LossKind loss) {
    if (m.bits.size() != w.values.size())
        throw std::invalid_argument("sgd_step: mask length does not match weights");
    std::vector<double> grad = batch_gradient(net, w, data, batch_idx, loss);
    for (double g : grad) {
        if (!std::isfinite(g))
            throw std::runtime_error("sgd_step: non-finite gradient (check learning rate and data scaling)");
    }
    ModelWeights out = w;
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        if (m.bits[j]) out.values[j] -= learning_rate * grad[j];
    }
    return out;
}

ModelWeights local_update(const Network& net, const ModelWeights& w0, const PruningMask& m,
                          const Dataset& data, const TrainConfig& cfg) {
    if (cfg.local_iterations < 1)
        throw std::domain_error("local_update: local_iterations must be >= 1");
    if (cfg.learning_rate < 0.0)
        throw std::domain_error("local_update: learning rate must be nonnegative");
    if (data.samples.empty()) throw std::domain_error("local_update: empty dataset");

    const std::size_t n = data.size();
    const std::size_t batch = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::max(1, cfg.batch_size)));

    ModelWeights w = apply_mask(w0, m);
    std::mt19937_64 rng(cfg.rng_seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t pos = n;  // forces a shuffle before the first batch

    for (int t = 0; t < cfg.local_iterations; ++t) {
        if (pos >= n) {
            std::shuffle(order.begin(), order.end(), rng);
            pos = 0;
        }
        const std::size_t take = std::min(batch, n - pos);
        std::span<const int> batch_idx(order.data() + pos, take);
        pos += take;
        w = sgd_step(net, w, m, data, batch_idx, cfg.learning_rate, cfg.loss);
    }
    return w;
}

EvalResult evaluate(const Network& net, const ModelWeights& w, const Dataset& test, LossKind loss) {
    if (test.samples.empty()) throw std::domain_error("evaluate: empty dataset");
    EvalResult r;
    std::size_t correct = 0;
    for (const auto& s : test.samples) {
        std::vector<double> logits = net.forward(w, s.features);
        r.loss += net.loss_from_logits(logits, s.label, loss);
        const auto pred = static_cast<int>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (pred == s.label) ++correct;
    }
    r.loss /= static_cast<double>(test.size());
    r.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return r;
}

}  // namespace hfl
