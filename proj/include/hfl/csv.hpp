#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hfl/hierarchy.hpp"

namespace hfl {

/// Fixed metrics CSV schema; floats printed with 9 significant digits,
/// per-device vectors semicolon-joined within a field.
std::string csv_header();
std::string csv_row(const RoundMetrics& row);

void write_csv(std::ostream& out, const std::vector<RoundMetrics>& rows);

}  // namespace hfl
