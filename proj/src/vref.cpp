#include "amsad/vref.hpp"

#include "amsad/error.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace amsad {

namespace {

void require_positive(double value, const char* key) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::config, std::string("vref parameter '") + key + "' must be positive", key);
    }
}

void require_non_negative(double value, const char* key) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::config, std::string("vref parameter '") + key + "' must be non-negative",
                    key);
    }
}

}  // namespace

void VrefConfig::validate() const {
    require_positive(amplitude, "amplitude");
    require_positive(frequency, "frequency");
    require_non_negative(noise_std, "noise_std");
    require_non_negative(amplitude_jitter, "amplitude_jitter");
    require_non_negative(phase_jitter, "phase_jitter");
    require_positive(pll_multiplier, "pll_multiplier");
    require_positive(pll_free_running_ratio, "pll_free_running_ratio");
    require_positive(pll_bandwidth_ratio, "pll_bandwidth_ratio");
    require_positive(pll_damping, "pll_damping");
    require_positive(pll_lock_tau, "pll_lock_tau");
    require_positive(pll_trace_tau, "pll_trace_tau");
    require_positive(trig_gain, "trig_gain");
    require_non_negative(output_nominal, "output_nominal");
    require_non_negative(output_scale, "output_scale");
    require_positive(output_tau, "output_tau");
}

Waveform simulate_input(const VrefConfig& config, std::size_t n_samples, double duration,
                        std::uint64_t seed) {
    config.validate();
    if (n_samples < 10) throw Error(ErrorKind::config, "n_samples must be at least 10", "n_samples");
    if (!(duration > 0.0)) throw Error(ErrorKind::config, "duration must be positive", "duration");

    const double dt = duration / static_cast<double>(n_samples);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    double amplitude = config.amplitude;
    if (config.amplitude_jitter > 0.0) amplitude *= 1.0 + config.amplitude_jitter * unit(rng);
    double phase = 0.0;
    if (config.phase_jitter > 0.0) phase = config.phase_jitter * unit(rng);

    const double omega = 2.0 * std::numbers::pi * config.frequency;
    std::vector<double> samples(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = dt * static_cast<double>(i);
        samples[i] = amplitude * std::sin(omega * t + phase);
    }
    if (config.noise_std > 0.0) {
        for (double& s : samples) s += config.noise_std * unit(rng);
    }
    return Waveform(std::move(samples), dt, "input");
}

PllOutputs simulate_pll(const VrefConfig& config, const Waveform& input) {
    config.validate();
    const std::size_t n = input.size();
    const double dt = input.sample_period();
    const double two_pi = 2.0 * std::numbers::pi;

    // Mixer gain for a unit sinusoid against cos(theta) is 1/2.
    constexpr double detector_gain = 0.5;
    const double natural = two_pi * config.frequency * config.pll_bandwidth_ratio;
    const double kp = 2.0 * config.pll_damping * natural / detector_gain;
    const double ki = natural * natural / detector_gain;
    const double free_running = two_pi * config.frequency * config.pll_free_running_ratio;

    const double trace_alpha = 1.0 - std::exp(-dt / config.pll_trace_tau);

    std::vector<double> frequency(n);
    std::vector<double> intensity(n);
    double theta = 0.0;
    double integrator = 0.0;
    double trace = config.pll_multiplier * free_running / two_pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = input[i] / config.amplitude;
        const double detector = u * std::cos(theta);
        integrator += ki * detector * dt;
        const double omega = free_running + kp * detector + integrator;

        trace += trace_alpha * (config.pll_multiplier * omega / two_pi - trace);
        frequency[i] = trace;

        const double t = dt * static_cast<double>(i);
        const double envelope = 1.0 - std::exp(-t / config.pll_lock_tau);
        intensity[i] = envelope * std::sin(config.pll_multiplier * theta);

        theta += omega * dt;
    }
    return {Waveform(std::move(frequency), dt, "pll_frequency"),
            Waveform(std::move(intensity), dt, "pll_intensity")};
}

Waveform simulate_trig(const VrefConfig& config, const Waveform& pll_intensity) {
    config.validate();
    std::vector<double> out(pll_intensity.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::sin(config.trig_gain * pll_intensity[i]);
    }
    return Waveform(std::move(out), pll_intensity.sample_period(), "trig");
}

Waveform simulate_output(const VrefConfig& config, const Waveform& trig) {
    config.validate();
    const double alpha = 1.0 - std::exp(-trig.sample_period() / config.output_tau);
    std::vector<double> out(trig.size());
    double state = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double target = config.output_nominal + config.output_scale * trig[i];
        state += alpha * (target - state);
        out[i] = state;
    }
    return Waveform(std::move(out), trig.sample_period(), "output");
}

VrefBlockSignals simulate_vref(const VrefConfig& config, std::size_t n_samples, double duration,
                               std::uint64_t seed) {
    Waveform input = simulate_input(config, n_samples, duration, seed);
    PllOutputs pll = simulate_pll(config, input);
    Waveform trig = simulate_trig(config, pll.intensity);
    Waveform output = simulate_output(config, trig);
    return {std::move(input), std::move(pll.frequency), std::move(pll.intensity), std::move(trig),
            std::move(output)};
}

}  // namespace amsad
