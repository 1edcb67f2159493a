#include "amsad/opamp.hpp"

#include "amsad/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace amsad {

void OpampModel::validate() const {
    if (!(open_loop_gain > 0.0)) {
        throw Error(ErrorKind::config, "opamp open_loop_gain must be positive", "open_loop_gain");
    }
    if (!(rail_low < rail_high)) {
        throw Error(ErrorKind::config, "opamp rail_low must be below rail_high", "rail_low");
    }
    if (!(slew_rate > 0.0)) throw Error(ErrorKind::config, "opamp slew_rate must be positive", "slew_rate");
    if (!(open_tau_samples > 0.0)) {
        throw Error(ErrorKind::config, "opamp open_tau_samples must be positive", "open_tau_samples");
    }
    if (!std::isfinite(offset) || !std::isfinite(temp_coeff) || !std::isfinite(nominal_temp) ||
        !std::isfinite(operating_temp)) {
        throw Error(ErrorKind::config, "opamp parameters must be finite");
    }
}

double OpampModel::dc_transfer(double v_in, double temperature) const {
    if (open_fault) return rail_high;
    const double v = open_loop_gain * (v_in - offset) + temp_coeff * (temperature - nominal_temp);
    return std::clamp(v, rail_low, rail_high);
}

OpampModel ideal_opamp() {
    OpampModel m;
    m.open_loop_gain = 1e12;
    m.rail_low = -15.0;
    m.rail_high = 15.0;
    m.slew_rate = 1e15;
    m.temp_coeff = 0.0;
    return m;
}

std::vector<double> sweep_points(const SweepSpec& sweep) {
    if (sweep.n_points == 0) throw Error(ErrorKind::input, "sweep has no points", "n_points");
    if (!std::isfinite(sweep.start) || !std::isfinite(sweep.stop)) {
        throw Error(ErrorKind::input, "sweep bounds must be finite");
    }
    std::vector<double> points(sweep.n_points);
    if (sweep.n_points == 1) {
        points[0] = sweep.start;
        return points;
    }
    const double step = (sweep.stop - sweep.start) / static_cast<double>(sweep.n_points - 1);
    for (std::size_t i = 0; i < sweep.n_points; ++i) {
        points[i] = sweep.start + step * static_cast<double>(i);
    }
    points.back() = sweep.stop;
    return points;
}

namespace {

double sweep_step(const SweepSpec& sweep) {
    if (sweep.n_points < 2) return 1.0;
    const double step = std::fabs(sweep.stop - sweep.start) / static_cast<double>(sweep.n_points - 1);
    return step > 0.0 ? step : 1.0;
}

Waveform run_transient(const OpampModel& model, const Waveform& stimulus) {
    const double dt = stimulus.sample_period();
    const double max_step = model.slew_rate * dt;
    std::vector<double> out(stimulus.size());

    if (model.open_fault) {
        // Starts from the healthy operating point, then collapses to the rail.
        OpampModel healthy = model;
        healthy.open_fault = false;
        const double alpha = 1.0 - std::exp(-1.0 / model.open_tau_samples);
        double y = healthy.dc_transfer(stimulus[0], model.operating_temp);
        out[0] = y;
        for (std::size_t i = 1; i < out.size(); ++i) {
            const double delta = alpha * (model.rail_high - y);
            y += std::clamp(delta, -max_step, max_step);
            out[i] = y;
        }
        return Waveform(std::move(out), dt, "opamp_transient");
    }

    double y = model.dc_transfer(stimulus[0], model.operating_temp);
    out[0] = y;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double target = model.dc_transfer(stimulus[i], model.operating_temp);
        y += std::clamp(target - y, -max_step, max_step);
        out[i] = y;
    }
    return Waveform(std::move(out), dt, "opamp_transient");
}

}  // namespace

Waveform simulate_opamp(const OpampModel& model, const OpampAnalysis& analysis) {
    model.validate();
    return std::visit(
        [&](const auto& a) -> Waveform {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, TransientAnalysis>) {
                if (a.stimulus.size() == 0) throw Error(ErrorKind::input, "empty transient stimulus");
                return run_transient(model, a.stimulus);
            } else if constexpr (std::is_same_v<T, DcInputSweep>) {
                const auto points = sweep_points(a.sweep);
                std::vector<double> out(points.size());
                for (std::size_t i = 0; i < points.size(); ++i) {
                    out[i] = model.dc_transfer(points[i], model.operating_temp);
                }
                return Waveform(std::move(out), sweep_step(a.sweep), "opamp_dc_input");
            } else {
                const auto points = sweep_points(a.sweep);
                const double shift = model.operating_temp - model.nominal_temp;
                std::vector<double> out(points.size());
                for (std::size_t i = 0; i < points.size(); ++i) {
                    out[i] = model.dc_transfer(a.input, points[i] + shift);
                }
                return Waveform(std::move(out), sweep_step(a.sweep), "opamp_dc_temp");
            }
        },
        analysis);
}

void VrefComponentModel::validate() const {
    amp.validate();
    if (!(closed_loop_gain >= 1.0)) {
        throw Error(ErrorKind::config, "closed_loop_gain must be at least 1", "closed_loop_gain");
    }
    if (!(ripple >= 0.0)) throw Error(ErrorKind::config, "ripple must be non-negative", "ripple");
    if (!(ripple_frequency > 0.0)) {
        throw Error(ErrorKind::config, "ripple_frequency must be positive", "ripple_frequency");
    }
}

double closed_loop_effective_gain(double open_loop_gain, double closed_loop_gain) {
    return open_loop_gain * closed_loop_gain / (open_loop_gain + closed_loop_gain);
}

OpampModel as_closed_loop(const OpampModel& amp, double closed_loop_gain) {
    OpampModel stage = amp;
    stage.open_loop_gain = closed_loop_effective_gain(amp.open_loop_gain, closed_loop_gain);
    return stage;
}

Waveform vref_core_stimulus(const VrefComponentModel& model, std::size_t n_samples, double duration) {
    if (n_samples == 0) throw Error(ErrorKind::input, "empty stimulus", "n_samples");
    if (!(duration > 0.0)) throw Error(ErrorKind::config, "duration must be positive", "duration");
    const double dt = duration / static_cast<double>(n_samples);
    const double omega = 2.0 * std::numbers::pi * model.ripple_frequency;
    std::vector<double> v(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        v[i] = model.core_voltage + model.ripple * std::sin(omega * dt * static_cast<double>(i));
    }
    return Waveform(std::move(v), dt, "vref_core");
}

Waveform simulate_vref_component(const VrefComponentModel& model, const OpampAnalysis& analysis) {
    model.validate();
    Waveform out = simulate_opamp(as_closed_loop(model.amp, model.closed_loop_gain), analysis);
    out.set_name("vref_output");
    return out;
}

}  // namespace amsad
