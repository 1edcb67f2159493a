#include "amsad/inject.hpp"
#include "amsad/vref.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace amsad;
using fixtures::error_kind;

namespace {

Waveform sine(std::size_t n, double periods = 5.0) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(2.0 * std::numbers::pi * periods * i / static_cast<double>(n));
    return Waveform(v, 20e-6 / static_cast<double>(n), "s");
}

}  // namespace

TEST_CASE("random anomaly counts round half up") {
    CHECK(random_anomaly_count(0.5, 1500) == 8);
    CHECK(random_anomaly_count(0.1, 1500) == 2);
    CHECK(random_anomaly_count(0.2, 1500) == 3);
    CHECK(random_anomaly_count(0.01, 100) == 1);
}

TEST_CASE("random injection contract") {
    const Waveform w = sine(1500);
    const double peak = w.max_abs();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto [out, rec] = inject_point_random(w, 0.5, 2.0, 5.0, seed);
        REQUIRE(rec.size() == 8);
        std::set<std::size_t> pos(rec.positions.begin(), rec.positions.end());
        CHECK(pos.size() == 8);
        for (std::size_t i = 1; i < rec.size(); ++i) CHECK(rec.positions[i - 1] < rec.positions[i]);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (pos.count(i)) {
                const double m = std::abs(out[i]);
                CHECK(m >= 2.0 * peak);
                CHECK(m <= 5.0 * peak);
            } else {
                CHECK(out[i] == w[i]);
            }
        }
        for (std::size_t j = 0; j < rec.size(); ++j) {
            CHECK(rec.original_values[j] == w[rec.positions[j]]);
            CHECK(rec.injected_values[j] == out[rec.positions[j]]);
        }
    }
}

TEST_CASE("random injection is seeded") {
    const Waveform w = sine(1500);
    CHECK(inject_point_random(w, 0.5, 2, 5, 3).first == inject_point_random(w, 0.5, 2, 5, 3).first);
    CHECK_FALSE(inject_point_random(w, 0.5, 2, 5, 3).second.positions ==
                inject_point_random(w, 0.5, 2, 5, 4).second.positions);
}

TEST_CASE("random injection rejects rates covering the signal") {
    const Waveform w = sine(10);
    CHECK(error_kind([&] { inject_point_random(w, 100.0, 2, 5, 1); }) == ErrorKind::injection);
    CHECK(error_kind([&] { inject_point_random(w, 0.0, 2, 5, 1); }) == ErrorKind::config);
    CHECK(error_kind([&] { inject_point_random(w, 1.0, 5, 2, 1); }) == ErrorKind::config);
}

TEST_CASE("periodic injection raises near-peak samples by the maximum") {
    const Waveform w = sine(1500);
    const double mx = w.max_value();
    const auto [out, rec] = inject_point_periodic(w, 0.9, 1.0);
    CHECK(rec.size() > 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= 0.9 * mx) CHECK(out[i] == w[i] + mx);
        else CHECK(out[i] == w[i]);
    }
    for (auto p : rec.positions) CHECK(w[p] > 0.0);
}

TEST_CASE("periodic injection with zero delta is the identity") {
    const Waveform w = sine(300);
    CHECK(inject_point_periodic(w, 0.1, 0.0).first == w);
}

TEST_CASE("periodic injection errors") {
    const Waveform neg(std::vector<double>(20, -1.0), 1.0);
    CHECK(error_kind([&] { inject_point_periodic(neg, 0.9, 1.0); }) == ErrorKind::injection);
    CHECK(error_kind([&] { inject_point_periodic(sine(100), 0.0, 1.0); }) == ErrorKind::config);
}

TEST_CASE("multipoint injection propagates downstream") {
    const VrefConfig cfg;
    const auto clean = simulate_vref(cfg, 1500, 20e-6, 11);
    const std::vector<AnomalySpec> specs{{PointPeriodic{0.9, 0.1}, BlockLocation::input_a, 0},
                                         {PointPeriodic{0.9, 0.1}, BlockLocation::pll_b, 0}};
    const auto [out, records] = inject_multipoint(cfg, clean, specs);
    REQUIRE(records.size() == 2);
    CHECK(records[0].size() > 0);
    CHECK(records[1].size() > 0);
    CHECK_FALSE(out.input == clean.input);
    CHECK_FALSE(out.pll_intensity == clean.pll_intensity);
    CHECK_FALSE(out.trig == clean.trig);
    CHECK_FALSE(out.output == clean.output);
}

TEST_CASE("multipoint with zero deltas leaves the chain unchanged") {
    const VrefConfig cfg;
    const auto clean = simulate_vref(cfg, 600, 20e-6, 2);
    const std::vector<AnomalySpec> specs{{PointPeriodic{0.9, 0.0}, BlockLocation::input_a, 0},
                                         {PointPeriodic{0.9, 0.0}, BlockLocation::trig_c, 0}};
    CHECK(inject_multipoint(cfg, clean, specs).first == clean);
}

TEST_CASE("multipoint rejects duplicate locations") {
    const VrefConfig cfg;
    const auto clean = simulate_vref(cfg, 300, 20e-6, 2);
    const std::vector<AnomalySpec> specs{{PointPeriodic{}, BlockLocation::pll_b, 0},
                                         {PointRandom{}, BlockLocation::pll_b, 1}};
    CHECK(error_kind([&] { inject_multipoint(cfg, clean, specs); }) == ErrorKind::config);
}

TEST_CASE("block location and fault names parse") {
    CHECK(parse_block_location(to_string(BlockLocation::trig_c)) == BlockLocation::trig_c);
    CHECK(parse_fault_kind(to_string(FaultKind::om_nfet)) == FaultKind::om_nfet);
    CHECK(error_kind([] { parse_fault_kind("melted"); }) == ErrorKind::config);
}
