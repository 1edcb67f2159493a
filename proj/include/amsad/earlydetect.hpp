#pragma once

// Windowed detection: a signal is scored window by window and is anomalous as
// soon as any window lands in the model's anomalous cluster.

#include "amsad/cluster.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amsad {

struct WindowGeometry {
    std::size_t n_samples = 0;
    std::size_t k = 1;
    double sample_period = 0.0;  // seconds

    std::size_t width() const { return n_samples / k; }
    void validate() const;
};

struct DetectionResult {
    std::string sample_id;
    std::vector<int> per_window_assignment;
    std::optional<std::size_t> first_anomalous_window;  // 0-based
    std::size_t windows_consumed = 0;
    std::size_t detection_window = 0;  // m, 1-based; k when nothing was detected
    double latency_seconds = 0.0;      // m * (N/k) * sample_period
    double speedup = 1.0;              // k / m

    bool anomalous() const { return first_anomalous_window.has_value(); }
};

/// Windows are assigned in order; with `stop_early` assignment halts at the
/// first anomalous window. Throws Error(input) on empty input or a dimension
/// mismatch and Error(window) on inconsistent geometry.
DetectionResult detect_windowed(const ClusterModel& model, std::span<const std::vector<double>> window_features,
                                const WindowGeometry& geometry, bool stop_early);

struct LatencySummary {
    double mean_latency_seconds = 0.0;
    double mean_speedup = 0.0;
    double detection_rate = 0.0;
    std::size_t count = 0;
};

/// Throws Error(input) on an empty list.
LatencySummary latency_report(std::span<const DetectionResult> results);

/// `sample_id,first_window,m,latency_s,speedup`; first_window is 1-based, empty when clean.
void write_detection_csv(std::span<const DetectionResult> results, const std::filesystem::path& path);

}  // namespace amsad
