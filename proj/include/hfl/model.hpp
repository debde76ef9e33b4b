#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hfl {

/// Shape of a model: an unprunable "conv" segment (realized as a dense
/// feature extractor) followed by prunable fully-connected layers.
struct ModelArch {
    std::size_t conv_weight_count = 0;
    std::vector<std::pair<int, int>> fc_layers;  // (in_width, out_width)

    std::size_t fc_weight_count() const;
    std::size_t total_weight_count() const { return conv_weight_count + fc_weight_count(); }

    /// Throws std::invalid_argument if any layer width is < 1.
    void validate() const;

    bool operator==(const ModelArch&) const = default;
};

/// Flat parameter vector. Layout: [conv segment | fc layer 0 | fc layer 1 | ...],
/// each layer matrix row-major with shape (in_width, out_width).
struct ModelWeights {
    ModelArch arch;
    std::vector<double> values;

    static ModelWeights zeros(const ModelArch& arch);

    std::span<const double> conv_span() const;
    std::span<const double> fc_span() const;
    std::span<double> fc_span();
};

/// Binary keep/drop vector aligned with ModelWeights. Conv positions are
/// always kept; `ratio` is the pruned fraction of fc weights that produced it.
struct PruningMask {
    std::vector<std::uint8_t> bits;
    double ratio = 0.0;

    static PruningMask all_ones(const ModelArch& arch);

    std::size_t kept_count() const;
    std::size_t fc_zero_count(const ModelArch& arch) const;
};

/// Per-weight importance scores over the fully-connected segment only.
struct ImportanceVector {
    std::vector<double> scores;
};

/// Model size under pruned fraction `ratio`, real-valued for latency formulas:
/// conv + (1 - ratio) * fc. Throws std::domain_error if ratio is outside [0, 1].
double pruned_weight_count(const ModelArch& arch, double ratio);

/// Integer companion of pruned_weight_count: kept-weight count of the mask
/// build_mask would produce, i.e. conv + fc - floor(ratio * fc).
std::size_t pruned_weight_count_int(const ModelArch& arch, double ratio);

/// Importance of each fc weight as |before_j - after_j|.
/// Throws std::invalid_argument on arch mismatch.
ImportanceVector importance(const ModelWeights& before, const ModelWeights& after);

/// Builds a mask zeroing exactly floor(ratio * fc_count) fc positions with the
/// lowest scores. Ties are broken by pruning the lower index first, so the
/// result is deterministic. Conv positions are always ones.
PruningMask build_mask(const ImportanceVector& scores, double ratio, const ModelArch& arch);

/// Elementwise w * m; masked positions become exactly zero.
ModelWeights apply_mask(const ModelWeights& w, const PruningMask& m);

}  // namespace hfl
