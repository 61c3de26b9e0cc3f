#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bebsim/demand.hpp"

namespace bebsim {

// Fixed-point decimal formatting; all CSV output goes through this so the
// dialect ("." decimal separator, no exponent) stays pinned.
std::string fmt_fixed(double value, int decimals);

// Writes via a temp file and rename so readers never observe partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view text);

// passengers.csv: id,arrival_minute,origin,direction,destination
std::string passengers_to_csv(const PassengerSet& set);
PassengerSet passengers_from_csv(const std::string& text);

} // namespace bebsim
