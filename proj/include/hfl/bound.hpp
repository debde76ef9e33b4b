#pragma once

#include <cstdint>
#include <vector>

#include "hfl/dataset.hpp"
#include "hfl/model.hpp"
#include "hfl/network.hpp"

namespace hfl::bound {

/// Constants of the convergence bound. The analytic constants (smoothness L,
/// pruning-noise D, gradient bound phi, gradient noise sigma_hat) are
/// user-supplied or rough-estimated; the rest come from the run setup.
struct BoundParams {
    double smoothness = 1.0;      // L
    double pruning_noise = 1.0;   // D
    double grad_bound = 1.0;      // phi
    double grad_noise = 1.0;      // sigma_hat
    double min_occurrence = 1.0;  // Gamma*
    double learning_rate = 1.0;   // eta
    double global_rounds = 1.0;   // Q
    double edge_rounds = 1.0;     // E
    double local_iters = 1.0;     // T
    double num_devices = 1.0;     // N
    double num_weights = 1.0;     // W
    double initial_gap = 1.0;     // E[F(w0) - F(w*)]
};

double h1(const BoundParams& p);
double h2(const BoundParams& p);

/// 2 * initial_gap / (Q W eta E T), the pruning-independent bound term.
double first_term(const BoundParams& p);

/// Right-hand side of the convergence bound for the accumulated pruning
/// ratios rho_sums = sum over edge rounds and devices of rho.
double bound_value(const BoundParams& p, double rho_sums);

/// Exact minimum per-weight occurrence over a set of round masks, counting
/// only weights that occur at least once. Returns 0 for an empty set.
int gamma_star(const std::vector<std::vector<PruningMask>>& masks_per_round);

// Diagnostic-only estimators of the analytic constants from data. Rough
// probes for reporting; the bound treats the constants as given.
double estimate_smoothness(const Network& net, const Dataset& data, const ModelWeights& w,
                           LossKind loss, int pairs, std::uint64_t seed);
double estimate_grad_bound(const Network& net, const Dataset& data, const ModelWeights& w,
                           LossKind loss, int batches, int batch_size, std::uint64_t seed);
double estimate_grad_noise(const Network& net, const Dataset& data, const ModelWeights& w,
                           LossKind loss, int batches, int batch_size, std::uint64_t seed);
double estimate_pruning_noise(const ModelWeights& w, const std::vector<double>& ratios);

}  // namespace hfl::bound
