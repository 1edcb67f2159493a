#pragma once

// k-stage non-inverting amplifiers built by replicating a base opamp symbol.
// The fault-free chain is kStAmp; chains with the fault-transformed symbol
// at one or more stage positions are the kStAmpAN variants.

#include "amsad/inject.hpp"
#include "amsad/opamp.hpp"
#include "amsad/waveform.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

namespace amsad {

struct AmplifierStage {
    OpampModel opamp;
    double closed_loop_gain = 2.0;

    friend bool operator==(const AmplifierStage&, const AmplifierStage&) = default;
};

struct KStageAmplifier {
    std::vector<AmplifierStage> stages;
    std::set<std::size_t> anomalous_stages;

    std::size_t k() const noexcept { return stages.size(); }
    void validate() const;
};

/// Throws Error(config) when k == 0 or |gains| != k, Error(index) when an
/// anomalous stage index is >= k.
KStageAmplifier build_kstage(const OpampModel& base, std::size_t k, const std::vector<double>& gains,
                             const std::set<std::size_t>& anomalous_stages,
                             const std::optional<ComponentFault>& anomaly);

/// Applies the stages in order; each stage is simulated in transient mode as
/// as_closed_loop(stage.opamp, stage.closed_loop_gain).
Waveform simulate_kstage(const KStageAmplifier& amp, const Waveform& input);

}  // namespace amsad
