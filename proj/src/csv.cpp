#include "amsad/csv.hpp"

#include "amsad/error.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

namespace amsad::csv {

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorKind::input, fmt::format("missing CSV column '{}'", name), std::string(name));
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    Table table;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (first) {
            table.header = std::move(fields);
            first = false;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw Error(ErrorKind::input, fmt::format("{}:{}: expected {} fields, got {}", path.string(),
                                                      line_no, table.header.size(), fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (first) throw Error(ErrorKind::input, path.string() + ": empty CSV file");
    return table;
}

std::string number(double v) {
    return fmt::format("{}", v);
}

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorKind::input, fmt::format("cannot parse '{}' as a number for {}", text, what),
                    std::string(what));
    }
    return value;
}

long long parse_int(std::string_view text, std::string_view what) {
    long long value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorKind::input, fmt::format("cannot parse '{}' as an integer for {}", text, what),
                    std::string(what));
    }
    return value;
}

}  // namespace amsad::csv
