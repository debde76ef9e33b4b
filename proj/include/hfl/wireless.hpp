#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "hfl/model.hpp"

namespace hfl {

/// Per-device compute and radio constants. All SI units.
struct DeviceProfile {
    double cpu_freq_hz = 3e9;
    double cycles_per_weight = 20.0;
    double tx_power_w = 0.631;  // 28 dBm
    double cpu_freq_min_hz = 1e8;
    double cpu_freq_max_hz = 1e10;

    void validate() const;
};

/// Shared radio parameters plus the sampled channel power gain for one link.
struct ChannelState {
    double gain = 1.0;             // linear power gain
    double noise_power_w = 1e-14;  // -110 dBm
    double bandwidth_hz = 20e6;
    int quantization_bits = 64;

    void validate() const;

    /// B * log2(1 + g*p/sigma^2), the rate at full bandwidth (b = 1).
    double snr_term(double tx_power_w) const;
};

/// Latency components in seconds. cmp_fully/com_fully hold the *full* fc
/// terms; total = cmp_conv + com_conv + (1 - rho) * (cmp_fully + com_fully).
struct LatencyBreakdown {
    double cmp_conv = 0.0;
    double com_conv = 0.0;
    double cmp_fully = 0.0;
    double com_fully = 0.0;
    double total = 0.0;
};

/// dBm -> W, done once at the config boundary.
double dbm_to_watts(double dbm);

/// Achievable uplink rate for bandwidth fraction b in [0, 1], bits/s.
double uplink_rate(double bandwidth_fraction, const ChannelState& ch, double tx_power_w);

/// Local computation latency: iterations * cycles_per_weight * weights / freq.
double compute_latency(double iterations, double cycles_per_weight, double weights,
                       double cpu_freq_hz);

/// Uplink latency: bits_per_weight * weights / rate. A zero rate with weights
/// to send yields +infinity (the device cannot transmit this round).
double uplink_latency(double bits_per_weight, double weights, double rate_bps);

/// Full per-device latency decomposition for one edge round.
LatencyBreakdown device_latency(const DeviceProfile& dev, const ChannelState& ch,
                                double bandwidth_fraction, const ModelArch& arch, double ratio,
                                double iterations);

/// Synchronous edge-round latency: max over the member devices' totals.
double edge_round_latency(std::span<const double> device_totals);

/// Channel gain generator: a fixed gain, or Rayleigh fading around a path
/// loss (gain = pathloss * |h|^2 with h complex standard normal).
struct ChannelModel {
    enum class Kind { Static, Rayleigh };
    Kind kind = Kind::Static;
    double gain = 1.0;  // static gain, or the Rayleigh path loss
};

double sample_channel(std::mt19937_64& rng, const ChannelModel& model);

}  // namespace hfl
