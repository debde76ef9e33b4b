#include "hfl/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hfl {

namespace {

// z = W^T a for a row-major (in, out) matrix.
void dense_forward(std::span<const double> weights, std::span<const double> in,
                   std::span<double> out) {
    const std::size_t ni = in.size();
    const std::size_t no = out.size();
    for (std::size_t j = 0; j < no; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
        const double a = in[i];
        if (a == 0.0) continue;
        const double* row = weights.data() + i * no;
        for (std::size_t j = 0; j < no; ++j) out[j] += a * row[j];
    }
}

void softmax_inplace(std::vector<double>& z) {
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

}  // namespace

Network::Network(int input_dim, int feature_dim, std::vector<int> fc_out_widths)
    : input_dim_(input_dim), feature_dim_(feature_dim), fc_out_widths_(std::move(fc_out_widths)) {
    if (input_dim_ < 1 || feature_dim_ < 1 || fc_out_widths_.empty())
        throw std::invalid_argument("Network: dimensions must be >= 1 and fc_out_widths nonempty");
    arch_.conv_weight_count =
        static_cast<std::size_t>(input_dim_) * static_cast<std::size_t>(feature_dim_);
    int in = feature_dim_;
    for (int out : fc_out_widths_) {
        if (out < 1) throw std::invalid_argument("Network: fc widths must be >= 1");
        arch_.fc_layers.emplace_back(in, out);
        in = out;
    }
    arch_.validate();
}

void Network::check_weights(const ModelWeights& w) const {
    if (w.arch != arch_ || w.values.size() != arch_.total_weight_count())
        throw std::invalid_argument("Network: weights do not match this architecture");
}

std::vector<double> Network::forward(const ModelWeights& w, std::span<const double> x) const {
    check_weights(w);
    if (x.size() != static_cast<std::size_t>(input_dim_))
        throw std::invalid_argument("Network: input dimension mismatch");

    std::vector<double> act(static_cast<std::size_t>(feature_dim_));
    dense_forward(w.conv_span(), x, act);
    for (double& v : act) v = std::tanh(v);

    std::size_t offset = arch_.conv_weight_count;
    for (std::size_t l = 0; l < arch_.fc_layers.size(); ++l) {
        const auto [ni, no] = arch_.fc_layers[l];
        std::vector<double> next(static_cast<std::size_t>(no));
        dense_forward({w.values.data() + offset, static_cast<std::size_t>(ni) * no}, act, next);
        offset += static_cast<std::size_t>(ni) * no;
        const bool last = (l + 1 == arch_.fc_layers.size());
        if (!last)
            for (double& v : next) v = std::tanh(v);
        act = std::move(next);
    }
    return act;
}

double Network::sample_loss(const ModelWeights& w, const Sample& s, LossKind loss) const {
    return loss_from_logits(forward(w, s.features), s.label, loss);
}

double Network::loss_from_logits(std::span<const double> logits, int label, LossKind loss) const {
    if (label < 0 || label >= num_classes())
        throw std::invalid_argument("Network: label out of range");
    if (loss == LossKind::CrossEntropy) {
        std::vector<double> p(logits.begin(), logits.end());
        softmax_inplace(p);
        return -std::log(std::max(p[static_cast<std::size_t>(label)], 1e-300));
    }
    double acc = 0.0;
    for (int c = 0; c < num_classes(); ++c) {
        const double target = (c == label) ? 1.0 : 0.0;
        const double d = logits[static_cast<std::size_t>(c)] - target;
        acc += 0.5 * d * d;
    }
    return acc;
}

void Network::accumulate_gradient(const ModelWeights& w, const Sample& s, LossKind loss,
                                  std::span<double> grad) const {
    check_weights(w);
    if (grad.size() != w.values.size())
        throw std::invalid_argument("Network: gradient buffer size mismatch");

    // Forward pass, keeping post-activation values per layer.
    std::vector<std::vector<double>> acts;
    acts.reserve(arch_.fc_layers.size() + 1);
    {
        std::vector<double> a0(static_cast<std::size_t>(feature_dim_));
        dense_forward(w.conv_span(), s.features, a0);
        for (double& v : a0) v = std::tanh(v);
        acts.push_back(std::move(a0));
    }
    std::vector<std::size_t> offsets;
    std::size_t offset = arch_.conv_weight_count;
    for (std::size_t l = 0; l < arch_.fc_layers.size(); ++l) {
        const auto [ni, no] = arch_.fc_layers[l];
        offsets.push_back(offset);
        std::vector<double> next(static_cast<std::size_t>(no));
        dense_forward({w.values.data() + offset, static_cast<std::size_t>(ni) * no}, acts.back(),
                      next);
        offset += static_cast<std::size_t>(ni) * no;
        const bool last = (l + 1 == arch_.fc_layers.size());
        if (!last)
            for (double& v : next) v = std::tanh(v);
        acts.push_back(std::move(next));
    }

    // dL/dlogits.
    std::vector<double> delta = acts.back();
    if (loss == LossKind::CrossEntropy) {
        softmax_inplace(delta);
        delta[static_cast<std::size_t>(s.label)] -= 1.0;
    } else {
        delta[static_cast<std::size_t>(s.label)] -= 1.0;
    }

    // Backward through fc layers.
    for (std::size_t li = arch_.fc_layers.size(); li-- > 0;) {
        const auto [ni, no] = arch_.fc_layers[li];
        const std::size_t off = offsets[li];
        const std::vector<double>& in_act = acts[li];
        std::vector<double> din(static_cast<std::size_t>(ni), 0.0);
        for (int i = 0; i < ni; ++i) {
            const double a = in_act[static_cast<std::size_t>(i)];
            const double* row = w.values.data() + off + static_cast<std::size_t>(i) * no;
            double* grow = grad.data() + off + static_cast<std::size_t>(i) * no;
            double d = 0.0;
            for (int j = 0; j < no; ++j) {
                grow[j] += a * delta[static_cast<std::size_t>(j)];
                d += row[j] * delta[static_cast<std::size_t>(j)];
            }
            din[static_cast<std::size_t>(i)] = d;
        }
        // All non-final layer inputs are tanh outputs; li == 0 input is the
        // extractor output, also tanh.
        for (int i = 0; i < ni; ++i) {
            const double a = in_act[static_cast<std::size_t>(i)];
            din[static_cast<std::size_t>(i)] *= (1.0 - a * a);
        }
        delta = std::move(din);
    }

    // Extractor layer.
    for (int i = 0; i < input_dim_; ++i) {
        const double xi = s.features[static_cast<std::size_t>(i)];
        if (xi == 0.0) continue;
        double* grow = grad.data() + static_cast<std::size_t>(i) * feature_dim_;
        for (int j = 0; j < feature_dim_; ++j) grow[j] += xi * delta[static_cast<std::size_t>(j)];
    }
}

ModelWeights init_weights(const Network& net, std::uint64_t seed) {
    const ModelArch& arch = net.arch();
    ModelWeights w = ModelWeights::zeros(arch);
    std::mt19937_64 rng(seed);

    auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
        const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-a, a);
        for (std::size_t k = 0; k < count; ++k) w.values[offset + k] = dist(rng);
    };

    fill(0, arch.conv_weight_count, net.input_dim());
    std::size_t offset = arch.conv_weight_count;
    for (const auto& [ni, no] : arch.fc_layers) {
        const std::size_t count = static_cast<std::size_t>(ni) * no;
        fill(offset, count, ni);
        offset += count;
    }
    return w;
}

}  // namespace hfl
