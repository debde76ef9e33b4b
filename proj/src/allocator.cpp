#include "hfl/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hfl::alloc {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// V1*V4 + V2*V3: the numerator of the stationarity condition. Nonpositive
// means the objective is non-decreasing in b, so the device gets nothing.
double stationarity_coeff(const DeviceInputs& d) {
    return d.slack_s * d.fc_bits + d.conv_bits * d.fc_compute_s;
}

}  // namespace

void DeviceInputs::validate() const {
    if (conv_bits <= 0 || fc_compute_s <= 0 || fc_bits <= 0 || full_rate_bps <= 0)
        throw std::domain_error("DeviceInputs: V2, V3, V4 and the rate term must be positive");
}

double min_pruning_ratio(const DeviceInputs& d, double bandwidth_fraction) {
    if (!(bandwidth_fraction >= 0.0 && bandwidth_fraction <= 1.0))
        throw std::domain_error("min_pruning_ratio: bandwidth fraction must be in [0, 1]");
    const double rate = bandwidth_fraction * d.full_rate_bps;
    if (rate <= 0.0) return 1.0 + d.conv_bits / d.fc_bits;  // rate -> 0 limit, always > 1
    const double raw = 1.0 - (rate * d.slack_s - d.conv_bits) / (rate * d.fc_compute_s + d.fc_bits);
    return std::max(raw, 0.0);
}

double bandwidth_given_lambda(const DeviceInputs& d, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("bandwidth_given_lambda: lambda must be > 0");
    const double coeff = stationarity_coeff(d);
    if (coeff <= 0.0) return 0.0;  // objective non-decreasing in b
    const double s = d.full_rate_bps;
    const double b = (std::sqrt(coeff * s / lambda) - d.fc_bits) / (d.fc_compute_s * s);
    return clamp01(b);
}

double objective_term(const DeviceInputs& d, double bandwidth_fraction) {
    const double rate = bandwidth_fraction * d.full_rate_bps;
    return 1.0 - (rate * d.slack_s - d.conv_bits) / (rate * d.fc_compute_s + d.fc_bits);
}

double objective(const AllocationPlan& plan, const std::vector<DeviceInputs>& devices) {
    if (plan.bandwidth.size() != devices.size())
        throw std::invalid_argument("objective: plan/device count mismatch");
    double sum = 0.0;
    for (std::size_t n = 0; n < devices.size(); ++n)
        sum += objective_term(devices[n], plan.bandwidth[n]);
    return sum;
}

double objective_second_derivative(double x, double v1, double v2, double v3, double v4) {
    const double den = v3 * x + v4;
    return 2.0 * v3 * (v1 * v4 + v2 * v3) * den / (den * den * den * den);
}

double total_bandwidth_at_lambda(const std::vector<DeviceInputs>& devices, double lambda) {
    double sum = 0.0;
    for (const auto& d : devices) sum += bandwidth_given_lambda(d, lambda);
    return sum;
}

namespace {

AllocationPlan finish_plan(const std::vector<DeviceInputs>& devices, std::vector<double> bandwidth,
                           double lambda) {
    AllocationPlan plan;
    plan.bandwidth = std::move(bandwidth);
    plan.lambda = lambda;
    plan.ratios.resize(devices.size());
    plan.straggler.resize(devices.size());
    for (std::size_t n = 0; n < devices.size(); ++n) {
        const double bound = min_pruning_ratio(devices[n], plan.bandwidth[n]);
        plan.straggler[n] = bound > 1.0;
        plan.ratios[n] = clamp01(bound);
    }
    return plan;
}

}  // namespace

AllocationPlan solve_allocation(const std::vector<DeviceInputs>& devices, double sum_tolerance,
                                int max_iterations) {
    if (devices.empty()) throw std::domain_error("solve_allocation: need at least one device");
    for (const auto& d : devices) d.validate();
    const auto n = devices.size();

    // Nobody profits from bandwidth: leave the budget unused (sum b < 1 is
    // feasible, complementary slackness then allows lambda = 0).
    if (std::all_of(devices.begin(), devices.end(),
                    [](const DeviceInputs& d) { return stationarity_coeff(d) <= 0.0; })) {
        return finish_plan(devices, std::vector<double>(n, 0.0), 0.0);
    }

    // Bracket lambda*: grow hi until demand falls below 1, shrink lo until
    // demand reaches 1 (it does, since every b clamps to 1 as lambda -> 0).
    double lo = 1e-30;
    double hi = 1.0;
    while (total_bandwidth_at_lambda(devices, hi) >= 1.0) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::runtime_error("solve_allocation: lambda bracket blew up");
    }
    while (total_bandwidth_at_lambda(devices, lo) < 1.0) {
        lo *= 0.5;
        if (lo < 1e-300) break;  // demand < 1 everywhere; degenerate but harmless
    }

    double lambda = 0.5 * (lo + hi);
    for (int it = 0; it < max_iterations; ++it) {
        lambda = 0.5 * (lo + hi);
        const double sum = total_bandwidth_at_lambda(devices, lambda);
        if (std::abs(sum - 1.0) <= sum_tolerance) break;
        if (sum > 1.0)
            lo = lambda;
        else
            hi = lambda;
    }

    std::vector<double> bandwidth(n);
    for (std::size_t i = 0; i < n; ++i) bandwidth[i] = bandwidth_given_lambda(devices[i], lambda);
    return finish_plan(devices, std::move(bandwidth), lambda);
}

std::vector<double> project_to_simplex(std::vector<double> x) {
    // Held-style projection: find the threshold tau with sum(max(x - tau, 0)) = 1.
    std::vector<double> u = x;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (t < u[i]) tau = t;
    }
    for (double& v : x) v = std::max(v - tau, 0.0);
    return x;
}

AllocationPlan oracle_allocation(const std::vector<DeviceInputs>& devices,
                                 const OracleSettings& settings) {
    if (devices.empty()) throw std::domain_error("oracle_allocation: need at least one device");
    for (const auto& d : devices) d.validate();
    const auto n = devices.size();

    auto value = [&](const std::vector<double>& b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += objective_term(devices[i], b[i]);
        return sum;
    };
    auto gradient = [&](const std::vector<double>& b, std::vector<double>& g) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& d = devices[i];
            const double den = b[i] * d.full_rate_bps * d.fc_compute_s + d.fc_bits;
            g[i] = -stationarity_coeff(d) * d.full_rate_bps / (den * den);
        }
    };

    std::vector<double> b(n, 1.0 / static_cast<double>(n));
    b = project_to_simplex(std::move(b));
    std::vector<double> grad(n), trial(n);
    double fb = value(b);
    double eta = 1.0;  // adapts: doubles on acceptance, halves on rejection

    for (int it = 0; it < settings.max_iterations; ++it) {
        gradient(b, grad);

        // Projected-gradient residual at the current step scale. The optimum
        // is a fixed point of the projected step for every positive step.
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) trial[i] = b[i] - eta * grad[i];
        trial = project_to_simplex(std::move(trial));
        for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(trial[i] - b[i]));
        if (residual <= settings.residual_tolerance) {
            return finish_plan(devices, std::move(b), 0.0);
        }

        // Armijo line search starting one doubling above the last success.
        double try_eta = eta * 2.0;
        bool accepted = false;
        for (int back = 0; back < 100; ++back) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = b[i] - try_eta * grad[i];
            trial = project_to_simplex(std::move(trial));
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double diff = b[i] - trial[i];
                decrease += diff * diff;
            }
            const double ft = value(trial);
            if (ft <= fb - 1e-4 * decrease / std::max(try_eta, 1e-300)) {
                b = trial;
                fb = ft;
                eta = try_eta;
                accepted = true;
                break;
            }
            try_eta *= 0.5;
        }
        if (!accepted) {
            // f can no longer decrease in double precision. The curvature
            // bound makes the remaining objective error O(curv * residual^2),
            // so a small b-space residual is full convergence here.
            if (residual <= settings.stall_tolerance) return finish_plan(devices, std::move(b), 0.0);
            throw std::runtime_error("oracle_allocation: line search stalled, residual " +
                                     std::to_string(residual));
        }
    }
    throw std::runtime_error("oracle_allocation: no convergence within iteration cap");
}

AllocationPlan baseline_equal(const std::vector<DeviceInputs>& devices) {
    if (devices.empty()) throw std::domain_error("baseline_equal: need at least one device");
    for (const auto& d : devices) d.validate();
    const double b = 1.0 / static_cast<double>(devices.size());
    return finish_plan(devices, std::vector<double>(devices.size(), b), 0.0);
}

AllocationPlan baseline_no_pruning(const std::vector<DeviceInputs>& devices) {
    AllocationPlan plan = baseline_equal(devices);
    std::fill(plan.ratios.begin(), plan.ratios.end(), 0.0);
    return plan;
}

}  // namespace hfl::alloc
