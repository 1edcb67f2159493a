#pragma once

#include "amsad/waveform.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amsad {

enum class Feature { mean, variance, slope };

std::string_view to_string(Feature f);
Feature parse_feature(std::string_view text);

/// Ordered, duplicate-free, non-empty list of features.
class FeatureSelection {
public:
    FeatureSelection() = default;
    explicit FeatureSelection(std::vector<Feature> features);

    static FeatureSelection all() { return FeatureSelection({Feature::mean, Feature::variance, Feature::slope}); }
    static FeatureSelection parse(std::string_view comma_separated);

    std::span<const Feature> features() const noexcept { return features_; }
    std::size_t size() const noexcept { return features_.size(); }
    bool empty() const noexcept { return features_.empty(); }
    bool contains(Feature f) const;

    /// "mean", "mean+variance", ...
    std::string label() const;

    friend bool operator==(const FeatureSelection&, const FeatureSelection&) = default;

private:
    std::vector<Feature> features_;
};

enum class Label { normal = 0, anomalous = 1 };

struct FeatureRow {
    std::vector<double> values;
    std::size_t window_index = 0;
    Label label = Label::normal;  // evaluation only, never read by fitting
    std::string sample_id;
};

/// Arithmetic mean, population variance, least-squares slope per sample index.
/// Slope needs at least two samples.
std::vector<double> extract_features(std::span<const double> samples, const FeatureSelection& selection);
std::vector<double> extract_features(const Waveform& w, const FeatureSelection& selection);

/// k contiguous windows of N/k samples; N must be divisible by k.
std::vector<std::vector<double>> windowed_features(const Waveform& w, std::size_t k,
                                                   const FeatureSelection& selection);

/// Concatenates per-signal vectors in the given order.
std::vector<double> aggregate_multisignal(std::span<const std::vector<double>> per_signal);

class NormalizationParams {
public:
    NormalizationParams() = default;
    NormalizationParams(std::vector<double> min, std::vector<double> max);

    std::size_t dims() const noexcept { return min_.size(); }
    std::span<const double> min() const noexcept { return min_; }
    std::span<const double> max() const noexcept { return max_; }

    /// Min-max to [0, 1]; constant dimensions map to 0.5. Unseen values may
    /// fall outside [0, 1].
    std::vector<double> apply(std::span<const double> values) const;

    friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

/// Requires at least two rows of equal dimensionality.
std::pair<std::vector<FeatureRow>, NormalizationParams> normalize_dataset(std::span<const FeatureRow> rows);

/// Dataset CSV: `sample_id,label,window_index,f1,...,fD`.
void write_dataset_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_dataset_csv(const std::filesystem::path& path);

/// Rows sorted by (sample_id, window_index); stable for equal keys.
void sort_rows(std::vector<FeatureRow>& rows);

}  // namespace amsad
