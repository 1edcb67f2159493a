#include "amsad/kstage.hpp"

#include "amsad/error.hpp"

#include <fmt/format.h>

namespace amsad {

void KStageAmplifier::validate() const {
    if (stages.empty()) throw Error(ErrorKind::config, "k-stage amplifier needs at least one stage", "k");
    for (const auto& stage : stages) {
        stage.opamp.validate();
        if (!(stage.closed_loop_gain >= 1.0)) {
            throw Error(ErrorKind::config, "non-inverting stage gain must be at least 1", "gains");
        }
    }
    for (std::size_t idx : anomalous_stages) {
        if (idx >= stages.size()) {
            throw Error(ErrorKind::index, fmt::format("anomalous stage {} out of range for k={}", idx, stages.size()),
                        "anomalous_stages");
        }
    }
}

KStageAmplifier build_kstage(const OpampModel& base, std::size_t k, const std::vector<double>& gains,
                             const std::set<std::size_t>& anomalous_stages,
                             const std::optional<ComponentFault>& anomaly) {
    if (k == 0) throw Error(ErrorKind::config, "k must be at least 1", "k");
    if (gains.size() != k) {
        throw Error(ErrorKind::config, fmt::format("expected {} stage gains, got {}", k, gains.size()), "gains");
    }
    for (std::size_t idx : anomalous_stages) {
        if (idx >= k) {
            throw Error(ErrorKind::index, fmt::format("anomalous stage {} out of range for k={}", idx, k),
                        "anomalous_stages");
        }
    }
    base.validate();

    // Symbol and its anomalous counterpart are built once and replicated.
    const OpampModel anomalous_symbol = anomaly ? apply_component_fault(base, *anomaly) : base;

    KStageAmplifier amp;
    amp.anomalous_stages = anomalous_stages;
    amp.stages.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const bool faulty = anomalous_stages.contains(i);
        amp.stages.push_back({faulty ? anomalous_symbol : base, gains[i]});
    }
    amp.validate();
    return amp;
}

Waveform simulate_kstage(const KStageAmplifier& amp, const Waveform& input) {
    amp.validate();
    if (input.size() == 0) throw Error(ErrorKind::input, "empty k-stage input");
    Waveform signal = input;
    for (const auto& stage : amp.stages) {
        signal = simulate_opamp(as_closed_loop(stage.opamp, stage.closed_loop_gain),
                                TransientAnalysis{std::move(signal)});
    }
    signal.set_name("kstage_output");
    return signal;
}

}  // namespace amsad
