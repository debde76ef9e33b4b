#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hfl/dataset.hpp"
#include "hfl/model.hpp"

namespace hfl {

enum class LossKind { CrossEntropy, MeanSquare };

/// Fixed feed-forward classifier whose parameters live in a flat ModelWeights.
/// The leading dense layer (input_dim x feature_dim, tanh) realizes the
/// unprunable conv segment; the trailing fc layers (tanh between, linear out)
/// map onto arch.fc_layers. No bias terms, so every parameter is maskable.
class Network {
  public:
    /// fc_out_widths lists the output width of each fc layer; the last entry
    /// is the number of classes.
    Network(int input_dim, int feature_dim, std::vector<int> fc_out_widths);

    const ModelArch& arch() const { return arch_; }
    int input_dim() const { return input_dim_; }
    int feature_dim() const { return feature_dim_; }
    int num_classes() const { return fc_out_widths_.back(); }

    std::vector<double> forward(const ModelWeights& w, std::span<const double> x) const;

    double sample_loss(const ModelWeights& w, const Sample& s, LossKind loss) const;

    double loss_from_logits(std::span<const double> logits, int label, LossKind loss) const;

    /// Adds d(sample_loss)/dw into grad (length = total weight count).
    void accumulate_gradient(const ModelWeights& w, const Sample& s, LossKind loss,
                             std::span<double> grad) const;

  private:
    void check_weights(const ModelWeights& w) const;

    int input_dim_;
    int feature_dim_;
    std::vector<int> fc_out_widths_;
    ModelArch arch_;
};

/// Seeded layerwise-uniform init in [-a, a] with a = 1/sqrt(fan_in).
ModelWeights init_weights(const Network& net, std::uint64_t seed);

}  // namespace hfl
