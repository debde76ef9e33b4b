#pragma once

#include <cstddef>
#include <vector>

namespace hfl::alloc {

/// Per-device coefficients of the bandwidth/pruning problem for one edge
/// round. All derived from the latency model at the config boundary:
///   slack_s       = latency threshold minus conv compute latency (may be
///                   negative for hopeless devices)
///   conv_bits     = quantization bits * conv weight count
///   fc_compute_s  = fc compute latency at the device's CPU frequency
///   fc_bits       = quantization bits * fc weight count
///   full_rate_bps = rate at bandwidth fraction 1
struct DeviceInputs {
    double slack_s = 0.0;      // V1
    double conv_bits = 0.0;    // V2
    double fc_compute_s = 0.0; // V3
    double fc_bits = 0.0;      // V4
    double full_rate_bps = 0.0;

    void validate() const;
};

struct AllocationPlan {
    std::vector<double> bandwidth;  // fraction per device
    std::vector<double> ratios;     // pruning ratio per device, clamped to [0, 1]
    double lambda = 0.0;            // multiplier that produced the bandwidths
    std::vector<bool> straggler;    // true where even full pruning misses the threshold
};

/// Smallest pruning ratio meeting the latency threshold at bandwidth
/// fraction b (the (.)+ of the closed-form bound). May exceed 1, which
/// signals infeasibility; b = 0 returns the rate->0 limit 1 + V2/V4 > 1.
double min_pruning_ratio(const DeviceInputs& d, double bandwidth_fraction);

/// Stationarity solution of the per-device bandwidth given multiplier
/// lambda, clamped to [0, 1]. Throws std::domain_error for lambda <= 0.
double bandwidth_given_lambda(const DeviceInputs& d, double lambda);

/// Objective term for one device at bandwidth fraction b: the raw (unclamped)
/// pruning-ratio bound 1 - (r*V1 - V2)/(r*V3 + V4) with r = b * full rate.
double objective_term(const DeviceInputs& d, double bandwidth_fraction);

/// Sum of objective terms over all devices for the plan's bandwidths.
double objective(const AllocationPlan& plan, const std::vector<DeviceInputs>& devices);

/// Second derivative of the scalar objective f(x) = 1 - (x*V1 - V2)/(x*V3 + V4);
/// nonnegative for positive coefficients, which is what makes the problem convex.
double objective_second_derivative(double x, double v1, double v2, double v3, double v4);

/// Sum of bandwidth_given_lambda over devices; continuous and non-increasing
/// in lambda, which is what makes the bisection below correct.
double total_bandwidth_at_lambda(const std::vector<DeviceInputs>& devices, double lambda);

/// KKT solution: bisection on lambda drives the total bandwidth to 1
/// (complementary slackness), then each ratio is the clamped closed-form
/// bound at the allocated bandwidth. Deterministic. Devices that cannot meet
/// the threshold even fully pruned are flagged (and participate with ratio 1).
AllocationPlan solve_allocation(const std::vector<DeviceInputs>& devices,
                                double sum_tolerance = 1e-12, int max_iterations = 200);

struct OracleSettings {
    int max_iterations = 200000;
    double residual_tolerance = 1e-9;  // projected-gradient residual in b-space
    double stall_tolerance = 1e-5;     // acceptable residual once f hits machine precision
};

/// Verification oracle: minimizes the objective over the simplex
/// {b >= 0, sum b = 1} by projected gradient descent (Armijo backtracking,
/// shrinking steps). Intended for small device counts in tests. Throws
/// std::runtime_error if the residual tolerance is not reached in time.
AllocationPlan oracle_allocation(const std::vector<DeviceInputs>& devices,
                                 const OracleSettings& settings = {});

/// Baseline: equal bandwidth split, ratios still optimized per device.
AllocationPlan baseline_equal(const std::vector<DeviceInputs>& devices);

/// Baseline: equal bandwidth split, no pruning; the latency constraint is
/// reported but not enforced.
AllocationPlan baseline_no_pruning(const std::vector<DeviceInputs>& devices);

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
std::vector<double> project_to_simplex(std::vector<double> x);

}  // namespace hfl::alloc
