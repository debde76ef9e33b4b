#include "hfl/wireless.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hfl {

void DeviceProfile::validate() const {
    if (cpu_freq_hz <= 0 || cycles_per_weight <= 0 || tx_power_w <= 0)
        throw std::domain_error("DeviceProfile: all constants must be positive");
    if (!(cpu_freq_min_hz <= cpu_freq_hz && cpu_freq_hz <= cpu_freq_max_hz))
        throw std::domain_error("DeviceProfile: cpu_freq outside [min, max]");
}

void ChannelState::validate() const {
    if (gain <= 0 || noise_power_w <= 0 || bandwidth_hz <= 0 || quantization_bits < 1)
        throw std::domain_error("ChannelState: invalid radio parameters");
}

double ChannelState::snr_term(double tx_power_w) const {
    return bandwidth_hz * std::log2(1.0 + gain * tx_power_w / noise_power_w);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double uplink_rate(double bandwidth_fraction, const ChannelState& ch, double tx_power_w) {
    if (!(bandwidth_fraction >= 0.0 && bandwidth_fraction <= 1.0))
        throw std::domain_error("uplink_rate: bandwidth fraction must be in [0, 1]");
    return bandwidth_fraction * ch.snr_term(tx_power_w);
}

double compute_latency(double iterations, double cycles_per_weight, double weights,
                       double cpu_freq_hz) {
    if (cpu_freq_hz <= 0.0) throw std::domain_error("compute_latency: cpu frequency must be > 0");
    return iterations * cycles_per_weight * weights / cpu_freq_hz;
}

double uplink_latency(double bits_per_weight, double weights, double rate_bps) {
    if (weights == 0.0) return 0.0;
    if (rate_bps <= 0.0) return std::numeric_limits<double>::infinity();
    return bits_per_weight * weights / rate_bps;
}

LatencyBreakdown device_latency(const DeviceProfile& dev, const ChannelState& ch,
                                double bandwidth_fraction, const ModelArch& arch, double ratio,
                                double iterations) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::domain_error("device_latency: ratio must be in [0, 1]");
    const double rate = uplink_rate(bandwidth_fraction, ch, dev.tx_power_w);
    const auto conv = static_cast<double>(arch.conv_weight_count);
    const auto fully = static_cast<double>(arch.fc_weight_count());
    const double bits = static_cast<double>(ch.quantization_bits);

    LatencyBreakdown lb;
    lb.cmp_conv = compute_latency(iterations, dev.cycles_per_weight, conv, dev.cpu_freq_hz);
    lb.com_conv = uplink_latency(bits, conv, rate);
    lb.cmp_fully = compute_latency(iterations, dev.cycles_per_weight, fully, dev.cpu_freq_hz);
    lb.com_fully = uplink_latency(bits, fully, rate);
    // Guard 0 * inf when everything fc is pruned and the rate is zero.
    const double fc_part = (ratio == 1.0) ? 0.0 : (1.0 - ratio) * (lb.cmp_fully + lb.com_fully);
    lb.total = lb.cmp_conv + lb.com_conv + fc_part;
    return lb;
}

double edge_round_latency(std::span<const double> device_totals) {
    if (device_totals.empty())
        throw std::domain_error("edge_round_latency: no devices in the edge set");
    double mx = device_totals[0];
    for (double t : device_totals) mx = std::max(mx, t);
    return mx;
}

double sample_channel(std::mt19937_64& rng, const ChannelModel& model) {
    if (model.kind == ChannelModel::Kind::Static) return model.gain;
    // |h|^2 for complex standard normal h: h = (x + iy)/sqrt(2), x,y ~ N(0,1).
    std::normal_distribution<double> normal(0.0, 1.0);
    const double x = normal(rng);
    const double y = normal(rng);
    return model.gain * 0.5 * (x * x + y * y);
}

}  // namespace hfl
