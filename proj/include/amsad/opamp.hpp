#pragma once

// Behavioral operational amplifier.
//
//   V_out = clip(gain · (V_in − offset) + temp_coeff · (T − nominal_temp), rails)
//
// with slew limiting in transient analysis. Fault transformations (see
// inject.hpp) act on these parameters; an open fault replaces the transfer
// by a first-order collapse toward rail_high.

#include "amsad/waveform.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace amsad {

struct OpampModel {
    double open_loop_gain = 20.0;  // dimensionless
    double rail_low = -2.5;        // V
    double rail_high = 2.5;        // V
    double offset = 0.0;           // V, input-referred
    double slew_rate = 1e7;        // V/s
    double temp_coeff = 2e-3;      // V/°C, output-referred drift
    double nominal_temp = 27.0;    // °C
    double operating_temp = 27.0;  // °C, temperature the model is evaluated at

    // Applied fault markers; fault transformations are idempotent through these.
    bool om_pfet = false;
    bool om_nfet = false;
    bool short_fault = false;
    bool open_fault = false;
    double open_tau_samples = 10.0;  // settling time constant of the open-fault collapse

    /// Throws Error(config) naming the first invalid field.
    void validate() const;

    double rail_span() const noexcept { return rail_high - rail_low; }

    /// Steady-state transfer at the given temperature.
    double dc_transfer(double v_in, double temperature) const;

    friend bool operator==(const OpampModel&, const OpampModel&) = default;
};

/// An opamp whose gain is large enough to make closed-loop stages exact to
/// about 1e-11 relative.
OpampModel ideal_opamp();

struct SweepSpec {
    double start = 0.0;
    double stop = 1.0;
    std::size_t n_points = 101;
};

struct TransientAnalysis {
    Waveform stimulus;
};

struct DcInputSweep {
    SweepSpec sweep;  // V_in values, evaluated at the model's operating temperature
};

struct DcTempSweep {
    SweepSpec sweep;        // ambient temperatures in °C
    double input = 0.0;     // V, fixed input voltage
};

using OpampAnalysis = std::variant<TransientAnalysis, DcInputSweep, DcTempSweep>;

/// Sweep outputs are returned as Waveforms whose sample period is the sweep
/// step (volts or °C); a single-point sweep uses a unit step.
///
/// In a temperature sweep the model's operating_temp − nominal_temp is
/// added to every ambient point, so a parametric fault shifts the sweep.
Waveform simulate_opamp(const OpampModel& model, const OpampAnalysis& analysis);

/// Sweep axis values.
std::vector<double> sweep_points(const SweepSpec& sweep);

/// Component-level voltage reference: a bandgap core voltage buffered by a
/// non-inverting stage built from `amp`. Faults are applied to `amp`.
struct VrefComponentModel {
    OpampModel amp{.open_loop_gain = 20.0, .rail_low = 0.0, .rail_high = 3.3};
    double closed_loop_gain = 1.5;
    double core_voltage = 0.86;  // V; with the defaults the output settles near 1.2 V
    double ripple = 0.01;        // V, supply ripple amplitude on the core
    double ripple_frequency = 250e3;

    void validate() const;

    friend bool operator==(const VrefComponentModel&, const VrefComponentModel&) = default;
};

/// Effective gain of a non-inverting stage with finite open-loop gain A and
/// ideal closed-loop gain G: A·G / (A + G).
double closed_loop_effective_gain(double open_loop_gain, double closed_loop_gain);

/// The stage as a plain opamp whose gain is the effective closed-loop gain.
OpampModel as_closed_loop(const OpampModel& amp, double closed_loop_gain);

Waveform simulate_vref_component(const VrefComponentModel& model, const OpampAnalysis& analysis);

/// Core voltage waveform (bandgap plus ripple) for a transient run.
Waveform vref_core_stimulus(const VrefComponentModel& model, std::size_t n_samples, double duration);

}  // namespace amsad
