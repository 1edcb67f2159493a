#include "amsad/features.hpp"

#include "amsad/csv.hpp"
#include "amsad/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace amsad {

std::string_view to_string(Feature f) {
    switch (f) {
    case Feature::mean: return "mean";
    case Feature::variance: return "variance";
    case Feature::slope: return "slope";
    }
    return "?";
}

Feature parse_feature(std::string_view text) {
    if (text == "mean") return Feature::mean;
    if (text == "variance") return Feature::variance;
    if (text == "slope") return Feature::slope;
    throw Error(ErrorKind::config, fmt::format("unknown feature '{}'", text), "features");
}

FeatureSelection::FeatureSelection(std::vector<Feature> features) : features_(std::move(features)) {
    if (features_.empty()) throw Error(ErrorKind::config, "feature selection is empty", "features");
    for (std::size_t i = 0; i < features_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (features_[i] == features_[j]) {
                throw Error(ErrorKind::config, "feature selection has duplicates", "features");
            }
        }
    }
}

FeatureSelection FeatureSelection::parse(std::string_view comma_separated) {
    std::vector<Feature> out;
    for (const auto& part : csv::split(comma_separated)) {
        if (part == "agg" || part == "all") {
            return all();
        }
        out.push_back(parse_feature(part));
    }
    return FeatureSelection(std::move(out));
}

bool FeatureSelection::contains(Feature f) const {
    return std::find(features_.begin(), features_.end(), f) != features_.end();
}

std::string FeatureSelection::label() const {
    std::string out;
    for (Feature f : features_) {
        if (!out.empty()) out += '+';
        out += to_string(f);
    }
    return out;
}

std::vector<double> extract_features(std::span<const double> samples, const FeatureSelection& selection) {
    if (selection.empty()) throw Error(ErrorKind::config, "feature selection is empty", "features");
    const std::size_t n = samples.size();
    if (n == 0) throw Error(ErrorKind::input, "cannot extract features from an empty signal");
    if (selection.contains(Feature::slope) && n < 2) {
        throw Error(ErrorKind::input, "slope needs at least two samples");
    }

    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / nd;

    std::vector<double> out;
    out.reserve(selection.size());
    for (Feature f : selection.features()) {
        switch (f) {
        case Feature::mean: out.push_back(mean); break;
        case Feature::variance: {
            double acc = 0.0;
            for (double v : samples) acc += (v - mean) * (v - mean);
            out.push_back(acc / nd);
            break;
        }
        case Feature::slope: {
            // Centered index keeps the normal equations well conditioned.
            const double t_mean = (nd - 1.0) / 2.0;
            double sxy = 0.0;
            double sxx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dt = static_cast<double>(i) - t_mean;
                sxy += dt * (samples[i] - mean);
                sxx += dt * dt;
            }
            out.push_back(sxy / sxx);
            break;
        }
        }
    }
    return out;
}

std::vector<double> extract_features(const Waveform& w, const FeatureSelection& selection) {
    return extract_features(w.samples(), selection);
}

std::vector<std::vector<double>> windowed_features(const Waveform& w, std::size_t k,
                                                   const FeatureSelection& selection) {
    if (k == 0) throw Error(ErrorKind::window, "window count must be at least 1", "window_k");
    const std::size_t n = w.size();
    if (n % k != 0) {
        throw Error(ErrorKind::window, fmt::format("{} samples are not divisible into {} windows", n, k),
                    "window_k");
    }
    const std::size_t width = n / k;
    std::vector<std::vector<double>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(extract_features(w.samples().subspan(i * width, width), selection));
    }
    return out;
}

std::vector<double> aggregate_multisignal(std::span<const std::vector<double>> per_signal) {
    if (per_signal.empty()) throw Error(ErrorKind::input, "no signals to aggregate");
    std::vector<double> out;
    for (const auto& v : per_signal) out.insert(out.end(), v.begin(), v.end());
    return out;
}

NormalizationParams::NormalizationParams(std::vector<double> min, std::vector<double> max)
    : min_(std::move(min)), max_(std::move(max)) {
    if (min_.size() != max_.size()) throw Error(ErrorKind::input, "normalization bounds differ in size");
    for (std::size_t d = 0; d < min_.size(); ++d) {
        if (!(max_[d] >= min_[d])) throw Error(ErrorKind::input, "normalization max below min");
    }
}

std::vector<double> NormalizationParams::apply(std::span<const double> values) const {
    if (values.size() != min_.size()) {
        throw Error(ErrorKind::input, fmt::format("expected {} feature dimensions, got {}", min_.size(),
                                                  values.size()));
    }
    std::vector<double> out(values.size());
    for (std::size_t d = 0; d < values.size(); ++d) {
        const double range = max_[d] - min_[d];
        out[d] = range > 0.0 ? (values[d] - min_[d]) / range : 0.5;
    }
    return out;
}

std::pair<std::vector<FeatureRow>, NormalizationParams> normalize_dataset(std::span<const FeatureRow> rows) {
    if (rows.size() < 2) throw Error(ErrorKind::input, "normalization needs at least two rows");
    const std::size_t dims = rows.front().values.size();
    if (dims == 0) throw Error(ErrorKind::input, "rows have no feature values");
    std::vector<double> lo(rows.front().values);
    std::vector<double> hi(rows.front().values);
    for (const auto& row : rows) {
        if (row.values.size() != dims) throw Error(ErrorKind::input, "rows differ in dimensionality");
        for (std::size_t d = 0; d < dims; ++d) {
            lo[d] = std::min(lo[d], row.values[d]);
            hi[d] = std::max(hi[d], row.values[d]);
        }
    }
    NormalizationParams params(std::move(lo), std::move(hi));
    std::vector<FeatureRow> out(rows.begin(), rows.end());
    for (auto& row : out) row.values = params.apply(row.values);
    return {std::move(out), std::move(params)};
}

void write_dataset_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    const std::size_t dims = rows.empty() ? 0 : rows.front().values.size();
    out << "sample_id,label,window_index";
    for (std::size_t d = 0; d < dims; ++d) out << ",f" << (d + 1);
    out << '\n';
    for (const auto& row : rows) {
        if (row.values.size() != dims) throw Error(ErrorKind::input, "rows differ in dimensionality");
        out << row.sample_id << ',' << static_cast<int>(row.label) << ',' << row.window_index;
        for (double v : row.values) out << ',' << csv::number(v);
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::vector<FeatureRow> read_dataset_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.header.size() < 4 || table.header[0] != "sample_id" || table.header[1] != "label" ||
        table.header[2] != "window_index") {
        throw Error(ErrorKind::input, path.string() + ": expected header 'sample_id,label,window_index,f1,...'");
    }
    const std::size_t dims = table.header.size() - 3;
    std::vector<FeatureRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& fields : table.rows) {
        FeatureRow row;
        row.sample_id = fields[0];
        const long long label = csv::parse_int(fields[1], "label");
        if (label != 0 && label != 1) throw Error(ErrorKind::input, "label must be 0 or 1", "label");
        row.label = label == 1 ? Label::anomalous : Label::normal;
        const long long window = csv::parse_int(fields[2], "window_index");
        if (window < 0) throw Error(ErrorKind::input, "window_index must be non-negative", "window_index");
        row.window_index = static_cast<std::size_t>(window);
        row.values.reserve(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            const double v = csv::parse_double(fields[3 + d], table.header[3 + d]);
            if (!std::isfinite(v)) throw Error(ErrorKind::input, "non-finite feature value");
            row.values.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void sort_rows(std::vector<FeatureRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
        if (a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
        return a.window_index < b.window_index;
    });
}

}  // namespace amsad
