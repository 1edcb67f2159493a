#include "amsad/bench.hpp"
#include "amsad/earlydetect.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace amsad;
using fixtures::error_kind;

namespace {

// One-dimensional model: values below 0.5 are normal (cluster 0), above anomalous (cluster 1).
ClusterModel threshold_model() {
    ClusterModel m;
    m.algorithm = Algorithm::kmeans;
    m.dims = 1;
    Matrix c(2, 1);
    c(0, 0) = 0.0;
    c(1, 0) = 1.0;
    m.state = KMeansState{c};
    return m;
}

std::vector<std::vector<double>> windows(std::initializer_list<double> v) {
    std::vector<std::vector<double>> out;
    for (double x : v) out.push_back({x});
    return out;
}

const WindowGeometry kGeom{1500, 5, 20e-6 / 1500.0};

}  // namespace

TEST_CASE("window-1 anomaly: 4 us latency and 5x speedup") {
    const auto r = detect_windowed(threshold_model(), windows({0.9, 0.1, 0.1, 0.1, 0.1}), kGeom, true);
    CHECK(r.anomalous());
    CHECK(*r.first_anomalous_window == 0);
    CHECK(r.detection_window == 1);
    CHECK(r.windows_consumed == 1);
    CHECK(r.latency_seconds == 4e-6);
    CHECK(r.speedup == 5.0);
}

TEST_CASE("clean signal consumes every window") {
    const auto r = detect_windowed(threshold_model(), windows({0.1, 0.1, 0.2, 0.1, 0.3}), kGeom, true);
    CHECK_FALSE(r.anomalous());
    CHECK(r.windows_consumed == 5);
    CHECK(r.detection_window == 5);
    CHECK(r.speedup == 1.0);
    CHECK(r.latency_seconds == 20e-6);
}

TEST_CASE("without early stop every window is assigned") {
    const auto r = detect_windowed(threshold_model(), windows({0.1, 0.1, 0.9, 0.1, 0.9}), kGeom, false);
    CHECK(r.per_window_assignment == std::vector<int>{0, 0, 1, 0, 1});
    CHECK(r.detection_window == 3);
    CHECK(r.speedup == 5.0 / 3.0);
    const auto e = detect_windowed(threshold_model(), windows({0.1, 0.1, 0.9, 0.1, 0.9}), kGeom, true);
    CHECK(e.per_window_assignment == std::vector<int>{0, 0, 1});
    CHECK(e.latency_seconds == r.latency_seconds);
}

TEST_CASE("anomalous cluster mapping is honored") {
    auto m = threshold_model();
    m.anomalous_cluster = 0;
    const auto r = detect_windowed(m, windows({0.9, 0.1, 0.9, 0.9, 0.9}), kGeom, true);
    CHECK(r.detection_window == 2);
}

TEST_CASE("detection input errors") {
    const auto m = threshold_model();
    CHECK(error_kind([&] { detect_windowed(m, windows({0.1, 0.2}), kGeom, true); }) == ErrorKind::window);
    const std::vector<std::vector<double>> wide(5, std::vector<double>{0.1, 0.2});
    CHECK(error_kind([&] { detect_windowed(m, wide, kGeom, true); }) == ErrorKind::input);
    CHECK(error_kind([] { WindowGeometry{1500, 7, 1e-9}.validate(); }) == ErrorKind::window);
    CHECK(error_kind([] { latency_report({}); }) == ErrorKind::input);
}

TEST_CASE("latency summary") {
    const auto m = threshold_model();
    const auto hit = detect_windowed(m, windows({0.9, 0.1, 0.1, 0.1, 0.1}), kGeom, true);
    const auto miss = detect_windowed(m, windows({0.1, 0.1, 0.1, 0.1, 0.1}), kGeom, true);
    const std::vector<DetectionResult> two_hits{hit, hit};
    CHECK(latency_report(two_hits).mean_speedup == 5.0);
    const std::vector<DetectionResult> mixed{hit, miss};
    CHECK(latency_report(mixed).detection_rate == 0.5);
    const std::vector<DetectionResult> one{miss};
    const auto s = latency_report(one);
    CHECK(s.mean_latency_seconds == miss.latency_seconds);
    CHECK(s.mean_speedup == miss.speedup);
    CHECK(s.count == 1);
}

TEST_CASE("window-confined anomaly is never flagged early") {
    // Noisy sinusoids; anomalous ones carry spikes inside window 3 only.
    const std::size_t n = 1500, k = 5, j = 3;
    const FeatureSelection sel = FeatureSelection::parse("variance");
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<Waveform> signals;
    for (int s = 0; s < 40; ++s) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(2 * std::numbers::pi * 5.0 * i / n) + noise(rng);
        if (s >= 20) {
            for (std::size_t i = j * 300 + 10; i < (j + 1) * 300; i += 25) v[i] += 4.0;
        }
        signals.emplace_back(v, 20e-6 / n);
    }
    std::vector<FeatureRow> rows;
    for (int s = 0; s < 40; ++s) {
        const auto w = windowed_features(signals[s], k, sel);
        for (std::size_t i = 0; i < k; ++i) rows.push_back(FeatureRow{w[i], i, s >= 20 ? Label::anomalous : Label::normal, std::to_string(s)});
    }
    const auto [norm, params] = normalize_dataset(rows);
    const Matrix x = Matrix::from_feature_rows(norm);
    auto model = fit_kmeans(x, KMeansOptions{.seed = 1});
    model.anomalous_cluster = score_rows(norm, assign_all(model, x), k).anomalous_cluster;
    for (int s = 0; s < 40; ++s) {
        auto w = windowed_features(signals[s], k, sel);
        for (auto& r : w) r = params.apply(r);
        const auto r = detect_windowed(model, w, WindowGeometry{n, k, 20e-6 / n}, true);
        if (s >= 20) {
            REQUIRE(r.anomalous());
            CHECK(*r.first_anomalous_window == j);
        } else {
            CHECK_FALSE(r.anomalous());
        }
    }
}
