#include "amsad/earlydetect.hpp"

#include "amsad/csv.hpp"
#include "amsad/error.hpp"

#include <fstream>

#include <fmt/format.h>

namespace amsad {

void WindowGeometry::validate() const {
    if (k == 0) throw Error(ErrorKind::window, "window count must be at least 1", "window_k");
    if (n_samples == 0 || n_samples % k != 0) {
        throw Error(ErrorKind::window, fmt::format("{} samples are not divisible into {} windows", n_samples, k),
                    "window_k");
    }
    if (!(sample_period > 0.0)) throw Error(ErrorKind::config, "sample period must be positive", "sample_period");
}

DetectionResult detect_windowed(const ClusterModel& model, std::span<const std::vector<double>> window_features,
                                const WindowGeometry& geometry, bool stop_early) {
    geometry.validate();
    if (window_features.empty()) throw Error(ErrorKind::input, "no windows to score");
    if (window_features.size() != geometry.k) {
        throw Error(ErrorKind::window,
                    fmt::format("got {} windows but geometry has {}", window_features.size(), geometry.k), "window_k");
    }
    DetectionResult r;
    for (std::size_t w = 0; w < window_features.size(); ++w) {
        const int c = assign(model, window_features[w]);
        r.per_window_assignment.push_back(c);
        if (c == model.anomalous_cluster && !r.first_anomalous_window) {
            r.first_anomalous_window = w;
            if (stop_early) break;
        }
    }
    r.windows_consumed = r.per_window_assignment.size();
    r.detection_window = r.first_anomalous_window ? *r.first_anomalous_window + 1 : geometry.k;
    r.latency_seconds = static_cast<double>(r.detection_window * geometry.width()) * geometry.sample_period;
    r.speedup = static_cast<double>(geometry.k) / static_cast<double>(r.detection_window);
    return r;
}

LatencySummary latency_report(std::span<const DetectionResult> results) {
    if (results.empty()) throw Error(ErrorKind::input, "no detection results to summarize");
    LatencySummary s;
    s.count = results.size();
    std::size_t detected = 0;
    for (const auto& r : results) {
        s.mean_latency_seconds += r.latency_seconds;
        s.mean_speedup += r.speedup;
        if (r.anomalous()) ++detected;
    }
    const double n = static_cast<double>(results.size());
    s.mean_latency_seconds /= n;
    s.mean_speedup /= n;
    s.detection_rate = static_cast<double>(detected) / n;
    return s;
}

void write_detection_csv(std::span<const DetectionResult> results, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << "sample_id,first_window,m,latency_s,speedup\n";
    for (const auto& r : results) {
        out << r.sample_id << ',';
        if (r.first_anomalous_window) out << (*r.first_anomalous_window + 1);
        out << ',' << r.detection_window << ',' << csv::number(r.latency_seconds) << ',' << csv::number(r.speedup)
            << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

}  // namespace amsad
