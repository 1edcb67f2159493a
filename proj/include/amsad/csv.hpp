#pragma once

// Minimal CSV helpers for the plain numeric tables this project emits.
// Fields never contain commas or quotes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace amsad::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws Error(input) when absent.
    std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view line);

/// Shortest representation that parses back to the same double; locale independent.
std::string number(double v);

double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace amsad::csv
