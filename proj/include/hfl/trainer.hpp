#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hfl/dataset.hpp"
#include "hfl/model.hpp"
#include "hfl/network.hpp"

namespace hfl {

struct TrainConfig {
    double learning_rate = 0.001;
    int batch_size = 128;
    int local_iterations = 1;
    std::uint64_t rng_seed = 0;
    LossKind loss = LossKind::CrossEntropy;
};

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Mean loss over the whole dataset (Eq. of the local empirical risk).
/// Throws std::domain_error on an empty dataset.
double local_loss(const Network& net, const ModelWeights& w, const Dataset& data,
                  LossKind loss = LossKind::CrossEntropy);

/// Mean gradient of the loss over the given samples.
std::vector<double> batch_gradient(const Network& net, const ModelWeights& w, const Dataset& data,
                                   std::span<const int> batch_idx, LossKind loss);

/// One masked SGD step: w' = w - lr * (mean batch gradient) ⊙ m.
/// Masked positions of a mask-consistent w remain exactly zero.
/// Throws std::runtime_error if the gradient is non-finite.
ModelWeights sgd_step(const Network& net, const ModelWeights& w, const PruningMask& m,
                      const Dataset& data, std::span<const int> batch_idx, double learning_rate,
                      LossKind loss = LossKind::CrossEntropy);

/// Applies the mask to w0, then runs cfg.local_iterations SGD steps on
/// minibatches drawn without replacement within an epoch (reshuffled per
/// epoch) by an RNG seeded with cfg.rng_seed. Deterministic given the seed.
ModelWeights local_update(const Network& net, const ModelWeights& w0, const PruningMask& m,
                          const Dataset& data, const TrainConfig& cfg);

/// Mean loss plus argmax accuracy on a held-out set.
EvalResult evaluate(const Network& net, const ModelWeights& w, const Dataset& test,
                    LossKind loss = LossKind::CrossEntropy);

}  // namespace hfl
