#pragma once

#include <string>
#include <vector>

namespace adaptrack {

// Shortest representation that round-trips a double (17 significant digits,
// '.' decimal point).
std::string g17(double value);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace adaptrack
