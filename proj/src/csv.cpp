#include "hfl/csv.hpp"

#include <cstdio>
#include <sstream>

namespace hfl {

namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ";";
        out += fmt(v[i]);
    }
    return out;
}

std::string join_int(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ";";
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_bool(const std::vector<bool>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ";";
        out += v[i] ? "1" : "0";
    }
    return out;
}

}  // namespace

std::string csv_header() {
    return "global_round,edge_round,edge_server,lambda,edge_latency_s,min_gamma,"
           "uploaded_weights,uploaded_bits,cum_uploaded_bits,test_loss,test_accuracy,"
           "device_ids,gains,bandwidth,ratios,stragglers,device_latency_s";
}

std::string csv_row(const RoundMetrics& row) {
    std::vector<double> totals;
    totals.reserve(row.latency.size());
    for (const auto& lb : row.latency) totals.push_back(lb.total);

    std::ostringstream out;
    out << row.global_round << ',' << row.edge_round << ',' << row.edge_server << ','
        << fmt(row.lambda) << ',' << fmt(row.edge_latency_s) << ',' << row.min_gamma << ','
        << row.uploaded_weights << ',' << fmt(row.uploaded_bits) << ','
        << fmt(row.cum_uploaded_bits) << ',' << fmt(row.test_loss) << ','
        << fmt(row.test_accuracy) << ',' << join_int(row.device_ids) << ',' << join(row.gains)
        << ',' << join(row.bandwidth) << ',' << join(row.ratios) << ',' << join_bool(row.straggler)
        << ',' << join(totals);
    return out.str();
}

void write_csv(std::ostream& out, const std::vector<RoundMetrics>& rows) {
    out << csv_header() << '\n';
    for (const auto& row : rows) out << csv_row(row) << '\n';
}

}  // namespace hfl
