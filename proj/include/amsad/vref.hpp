#pragma once

// Behavioral four-block voltage-reference chain:
//
//   Input (A) -> PLL (B) -> Trig Fun (C) -> Output (D)
//
// Every block after the input is a pure function of its predecessor's
// output and the block parameters, so a perturbation injected into one
// block propagates downstream when the chain is re-simulated.

#include "amsad/waveform.hpp"

#include <cstddef>
#include <cstdint>
#include <numbers>

namespace amsad {

struct VrefConfig {
    double amplitude = 1.0;         // V, input sinusoid amplitude
    double frequency = 250e3;       // Hz, input frequency
    double noise_std = 0.0;         // V, additive Gaussian noise on the input (0 = off)
    double amplitude_jitter = 0.0;  // relative std of the per-signal amplitude
    double phase_jitter = 0.0;      // rad, std of the per-signal initial phase

    double pll_multiplier = 2.0;          // VCO output = multiplier x input frequency
    double pll_free_running_ratio = 0.9;  // VCO free-running frequency / input frequency
    double pll_bandwidth_ratio = 0.25;    // loop natural frequency / input frequency
    double pll_damping = 0.707;
    double pll_lock_tau = 2e-6;   // s, intensity envelope lock transient
    double pll_trace_tau = 2e-6;  // s, smoothing applied to the reported frequency trace

    double trig_gain = std::numbers::pi / 2.0;  // rad per unit PLL intensity
    double output_nominal = 1.2;                // V, settled reference level
    double output_scale = 0.05;                 // V of ripple per unit trig output
    double output_tau = 1e-6;                   // s, output low-pass time constant

    /// Throws Error(config) naming the first invalid field.
    void validate() const;
};

struct VrefBlockSignals {
    Waveform input;
    Waveform pll_frequency;
    Waveform pll_intensity;
    Waveform trig;
    Waveform output;

    friend bool operator==(const VrefBlockSignals&, const VrefBlockSignals&) = default;
};

struct PllOutputs {
    Waveform frequency;  // Hz
    Waveform intensity;  // unit-amplitude sinusoid at multiplier x f
};

/// Input block: A(1+e)·sin(2πft + φ) + noise, with e, φ and noise drawn from `seed`.
Waveform simulate_input(const VrefConfig& config, std::size_t n_samples, double duration,
                        std::uint64_t seed);

/// Type-2 digital PLL tracking the input phase. The input is normalized by
/// the nominal amplitude before the mixer phase detector.
PllOutputs simulate_pll(const VrefConfig& config, const Waveform& input);

/// sin(trig_gain · intensity)
Waveform simulate_trig(const VrefConfig& config, const Waveform& pll_intensity);

/// First-order low-pass from 0 V toward output_nominal + output_scale · trig.
Waveform simulate_output(const VrefConfig& config, const Waveform& trig);

/// Full chain. Requires n_samples >= 10 and duration > 0.
VrefBlockSignals simulate_vref(const VrefConfig& config, std::size_t n_samples, double duration,
                               std::uint64_t seed);

}  // namespace amsad
