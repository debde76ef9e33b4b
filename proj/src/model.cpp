#include "hfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hfl {

std::size_t ModelArch::fc_weight_count() const {
    std::size_t n = 0;
    for (const auto& [in, out] : fc_layers) n += static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    return n;
}

void ModelArch::validate() const {
    for (const auto& [in, out] : fc_layers) {
        if (in < 1 || out < 1) throw std::invalid_argument("ModelArch: fc layer widths must be >= 1");
    }
}

ModelWeights ModelWeights::zeros(const ModelArch& arch) {
    ModelWeights w;
    w.arch = arch;
    w.values.assign(arch.total_weight_count(), 0.0);
    return w;
}

std::span<const double> ModelWeights::conv_span() const {
    return {values.data(), arch.conv_weight_count};
}

std::span<const double> ModelWeights::fc_span() const {
    return {values.data() + arch.conv_weight_count, arch.fc_weight_count()};
}

std::span<double> ModelWeights::fc_span() {
    return {values.data() + arch.conv_weight_count, arch.fc_weight_count()};
}

PruningMask PruningMask::all_ones(const ModelArch& arch) {
    PruningMask m;
    m.bits.assign(arch.total_weight_count(), 1);
    m.ratio = 0.0;
    return m;
}

std::size_t PruningMask::kept_count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::size_t PruningMask::fc_zero_count(const ModelArch& arch) const {
    std::size_t zeros = 0;
    for (std::size_t j = arch.conv_weight_count; j < bits.size(); ++j)
        if (bits[j] == 0) ++zeros;
    return zeros;
}

double pruned_weight_count(const ModelArch& arch, double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::domain_error("pruned_weight_count: ratio must be in [0, 1]");
    return static_cast<double>(arch.conv_weight_count) +
           (1.0 - ratio) * static_cast<double>(arch.fc_weight_count());
}

std::size_t pruned_weight_count_int(const ModelArch& arch, double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::domain_error("pruned_weight_count_int: ratio must be in [0, 1]");
    const std::size_t fc = arch.fc_weight_count();
    const auto pruned = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(fc)));
    return arch.conv_weight_count + fc - std::min(pruned, fc);
}

ImportanceVector importance(const ModelWeights& before, const ModelWeights& after) {
    if (before.arch != after.arch)
        throw std::invalid_argument("importance: weight vectors have different archs");
    const auto b = before.fc_span();
    const auto a = after.fc_span();
    ImportanceVector iv;
    iv.scores.resize(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) iv.scores[j] = std::abs(b[j] - a[j]);
    return iv;
}

PruningMask build_mask(const ImportanceVector& scores, double ratio, const ModelArch& arch) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::domain_error("build_mask: ratio must be in [0, 1]");
    const std::size_t fc = arch.fc_weight_count();
    if (scores.scores.size() != fc)
        throw std::invalid_argument("build_mask: score vector does not match fc segment");

    PruningMask m = PruningMask::all_ones(arch);
    m.ratio = ratio;
    const auto to_prune = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(fc)));
    if (to_prune == 0) return m;

    std::vector<std::size_t> order(fc);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (scores.scores[i] != scores.scores[j]) return scores.scores[i] < scores.scores[j];
        return i < j;
    });
    for (std::size_t r = 0; r < to_prune; ++r) m.bits[arch.conv_weight_count + order[r]] = 0;
    return m;
}

ModelWeights apply_mask(const ModelWeights& w, const PruningMask& m) {
    if (m.bits.size() != w.values.size())
        throw std::invalid_argument("apply_mask: mask length does not match weights");
    ModelWeights out = w;
    for (std::size_t j = 0; j < out.values.size(); ++j)
        out.values[j] = m.bits[j] ? out.values[j] : 0.0;
    return out;
}

}  // namespace hfl
