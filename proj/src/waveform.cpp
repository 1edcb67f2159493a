#include "amsad/waveform.hpp"

#include "amsad/csv.hpp"
#include "amsad/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace amsad {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::input: return "input";
    case ErrorKind::index: return "index";
    case ErrorKind::injection: return "injection";
    case ErrorKind::window: return "window";
    case ErrorKind::fit: return "fit";
    case ErrorKind::stats: return "stats";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::refit: return "refit";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

Waveform::Waveform(std::vector<double> samples, double sample_period, std::string name)
    : samples_(std::move(samples)), sample_period_(sample_period), name_(std::move(name)) {
    if (samples_.empty()) {
        throw Error(ErrorKind::input, "waveform '" + name_ + "' has no samples");
    }
    if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_)) {
        throw Error(ErrorKind::config, "waveform sample period must be positive", "sample_period");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            throw Error(ErrorKind::input,
                        fmt::format("waveform '{}' has a non-finite sample at index {}", name_, i));
        }
    }
}

double Waveform::max_value() const {
    return *std::max_element(samples_.begin(), samples_.end());
}

double Waveform::max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::fabs(v));
    return m;
}

Waveform Waveform::with_samples(std::vector<double> samples) const {
    return Waveform(std::move(samples), sample_period_, name_);
}

void write_waveform_csv(const Waveform& w, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << "t,value\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        out << fmt::format("{},{}\n", csv::number(w.time_at(i)), csv::number(w[i]));
    }
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

Waveform read_waveform_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.header != std::vector<std::string>{"t", "value"}) {
        throw Error(ErrorKind::input, path.string() + ": expected header 't,value'");
    }
    if (table.rows.empty()) throw Error(ErrorKind::input, path.string() + ": no samples");
    std::vector<double> t;
    std::vector<double> v;
    t.reserve(table.rows.size());
    v.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        t.push_back(csv::parse_double(row.at(0), "t"));
        v.push_back(csv::parse_double(row.at(1), "value"));
    }
    // Sample period from the overall span; uniform sampling is assumed.
    double period = 1.0;
    if (t.size() > 1) {
        period = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    }
    return Waveform(std::move(v), period, path.stem().string());
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    std::uint64_t z = parent + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace amsad
