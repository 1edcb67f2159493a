#include "amsad/error.hpp"
#include "amsad/inject.hpp"
#include "amsad/kstage.hpp"
#include "amsad/opamp.hpp"
#include "amsad/vref.hpp"
#include "amsad/waveform.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace amsad;
using fixtures::error_kind;

TEST_CASE("waveform rejects empty, non-finite and bad periods") {
    CHECK(error_kind([] { Waveform({}, 1.0); }) == ErrorKind::input);
    CHECK(error_kind([] { Waveform({1.0, NAN}, 1.0); }) == ErrorKind::input);
    CHECK(error_kind([] { Waveform({1.0}, 0.0); }) == ErrorKind::config);
}

TEST_CASE("waveform csv round-trips exactly") {
    const Waveform w({0.1, -1.0 / 3.0, 1e-300, 12345.678901234567}, 1.0 / 75e6, "x");
    const auto path = std::filesystem::temp_directory_path() / "amsad_wave_rt.csv";
    write_waveform_csv(w, path);
    const Waveform r = read_waveform_csv(path);
    CHECK(r.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(r[i] == w[i]);
    CHECK(std::abs(r.sample_period() - w.sample_period()) < 1e-24);
    std::filesystem::remove(path);
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}

TEST_CASE("vref chain geometry, determinism and amplitude") {
    const VrefConfig cfg;
    const auto s = simulate_vref(cfg, 1500, 20e-6, 7);
    for (const Waveform* w : {&s.input, &s.pll_frequency, &s.pll_intensity, &s.trig, &s.output}) {
        CHECK(w->size() == 1500);
        CHECK(w->sample_period() == doctest::Approx(20e-6 / 1500).epsilon(1e-12));
    }
    CHECK(s == simulate_vref(cfg, 1500, 20e-6, 7));
    CHECK_FALSE(s.input == simulate_vref(VrefConfig{.phase_jitter = 0.5}, 1500, 20e-6, 8).input);

    // 1500 samples over 5 periods hit the peak exactly.
    CHECK(s.input.max_abs() == doctest::Approx(cfg.amplitude).epsilon(1e-12));
}

TEST_CASE("vref chain settles to the nominal output level") {
    const auto s = simulate_vref(VrefConfig{}, 1500, 20e-6, 1);
    double tail = 0.0;
    for (std::size_t i = 1200; i < 1500; ++i) tail += s.output[i];
    tail /= 300.0;
    CHECK(tail == doctest::Approx(1.2).epsilon(0.06));
}

TEST_CASE("vref config validation names the key") {
    CHECK(fixtures::error_key([] { simulate_vref(VrefConfig{.frequency = 0.0}, 100, 1e-6, 1); }) == "frequency");
    CHECK(fixtures::error_key([] { simulate_vref(VrefConfig{.amplitude = -1.0}, 100, 1e-6, 1); }) == "amplitude");
    CHECK(error_kind([] { simulate_vref(VrefConfig{}, 5, 1e-6, 1); }) == ErrorKind::config);
}

TEST_CASE("opamp dc sweep clips at the rails") {
    OpampModel m;
    const Waveform out = simulate_opamp(m, DcInputSweep{SweepSpec{-1.0, 1.0, 201}});
    const auto x = sweep_points(SweepSpec{-1.0, 1.0, 201});
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < m.rail_low / m.open_loop_gain) CHECK(out[i] == m.rail_low);
        if (x[i] > m.rail_high / m.open_loop_gain) CHECK(out[i] == m.rail_high);
    }
    CHECK(out[100] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("opamp temperature sweep has no drift at the nominal temperature") {
    OpampModel m;
    const Waveform out = simulate_opamp(m, DcTempSweep{SweepSpec{m.nominal_temp, m.nominal_temp, 1}, 0.05});
    CHECK(out[0] == doctest::Approx(m.dc_transfer(0.05, m.nominal_temp)));
    CHECK(out[0] == doctest::Approx(m.open_loop_gain * 0.05));
}

TEST_CASE("opamp rejects an empty transient stimulus") {
    CHECK(error_kind([] { simulate_opamp(OpampModel{}, TransientAnalysis{Waveform{}}); }) == ErrorKind::input);
}

TEST_CASE("open fault collapses toward the high rail") {
    const OpampModel m = apply_component_fault(OpampModel{}, ComponentFault{FaultKind::open});
    std::vector<double> v(400, 0.01);
    const Waveform out = simulate_opamp(m, TransientAnalysis{Waveform(v, 1e-8)});
    CHECK(std::abs(out[399] - m.rail_high) < 0.01 * m.rail_span());
}

TEST_CASE("fault transformations are idempotent") {
    const OpampModel base;
    for (FaultKind k : {FaultKind::om_both, FaultKind::om_pfet, FaultKind::om_nfet, FaultKind::short_circuit,
                        FaultKind::open}) {
        const auto once = apply_component_fault(base, ComponentFault{k});
        CHECK(apply_component_fault(once, ComponentFault{k}) == once);
        CHECK_FALSE(once == base);
    }
    CHECK(error_kind([] { ComponentFault{FaultKind::parametric, 100.0}.validate(); }) == ErrorKind::config);
    CHECK_NOTHROW(ComponentFault{FaultKind::parametric, 150.0}.validate());
}

TEST_CASE("om-both opamp is separable by its dc sweep mean") {
    const auto sweep = DcInputSweep{SweepSpec{0.0, 0.2, 101}};
    auto mean = [&](const OpampModel& m) {
        const Waveform w = simulate_opamp(m, sweep);
        double s = 0.0;
        for (double v : w.samples()) s += v;
        return s / static_cast<double>(w.size());
    };
    const double clean = mean(OpampModel{});
    const double faulty = mean(apply_component_fault(OpampModel{}, ComponentFault{FaultKind::om_both}));
    CHECK(std::abs(clean - faulty) > 0.1);
}

TEST_CASE("kstage construction") {
    const OpampModel base = ideal_opamp();
    const auto clean = build_kstage(base, 3, {2, 2, 2}, {}, std::nullopt);
    CHECK(clean.k() == 3);
    for (const auto& s : clean.stages) CHECK(s.opamp == base);

    const auto one = build_kstage(base, 3, {2, 2, 2}, {1}, ComponentFault{FaultKind::om_both});
    int differing = 0;
    for (const auto& s : one.stages) differing += s.opamp == base ? 0 : 1;
    CHECK(differing == 1);
    CHECK_FALSE(one.stages[1].opamp == base);

    CHECK(error_kind([&] { build_kstage(base, 3, {2, 2, 2}, {3}, ComponentFault{}); }) == ErrorKind::index);
    CHECK(error_kind([&] { build_kstage(base, 0, {}, {}, std::nullopt); }) == ErrorKind::config);
    CHECK(error_kind([&] { build_kstage(base, 2, {2}, {}, std::nullopt); }) == ErrorKind::config);
}

TEST_CASE("kstage gain is the product of stage gains") {
    const auto amp = build_kstage(ideal_opamp(), 2, {2, 3}, {}, std::nullopt);
    const Waveform out = simulate_kstage(amp, Waveform(std::vector<double>(50, 0.1), 1e-8));
    for (double v : out.samples()) CHECK(v == doctest::Approx(0.6).epsilon(1e-9));

    const Waveform zero = simulate_kstage(amp, Waveform(std::vector<double>(50, 0.0), 1e-8));
    for (double v : zero.samples()) CHECK(v == 0.0);
}

TEST_CASE("anomalous middle stage changes the tri-stage output") {
    std::vector<double> v(300);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.05 * std::sin(2.0 * std::numbers::pi * i / 100.0);
    const Waveform in(v, 1e-8);
    const auto a = simulate_kstage(build_kstage(OpampModel{}, 3, {2, 2, 2}, {}, std::nullopt), in);
    const auto b = simulate_kstage(build_kstage(OpampModel{}, 3, {2, 2, 2}, {1}, ComponentFault{}), in);
    double diff = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    CHECK(diff > 0.0);
}
