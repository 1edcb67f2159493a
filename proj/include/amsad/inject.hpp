#pragma once

#include "amsad/opamp.hpp"
#include "amsad/vref.hpp"
#include "amsad/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace amsad {

/// Random point anomalies: round(rate_pct/100 · N) positions (round half up,
/// at least one), each replaced by ±u·max|w| with u ~ U[amp_mult_low, amp_mult_high].
struct PointRandom {
    double rate_pct = 0.5;
    double amp_mult_low = 2.0;
    double amp_mult_high = 5.0;
};

/// Periodic point anomalies: every sample with w[i] >= threshold_frac · max(w)
/// is raised by delta_frac · max(w).
struct PointPeriodic {
    double threshold_frac = 0.9;
    double delta_frac = 1.0;
};

using AnomalyKind = std::variant<PointRandom, PointPeriodic>;

enum class BlockLocation { input_a, pll_b, trig_c };

std::string_view to_string(BlockLocation loc);
BlockLocation parse_block_location(std::string_view text);

struct AnomalySpec {
    AnomalyKind kind;
    BlockLocation location = BlockLocation::input_a;
    std::uint64_t seed = 0;  // only used by PointRandom
};

struct InjectionRecord {
    std::vector<std::size_t> positions;  // strictly increasing
    std::vector<double> original_values;
    std::vector<double> injected_values;

    std::size_t size() const noexcept { return positions.size(); }
};

/// Number of random anomaly positions for a rate over n samples.
std::size_t random_anomaly_count(double rate_pct, std::size_t n);

std::pair<Waveform, InjectionRecord> inject_point_random(const Waveform& w, double rate_pct,
                                                         double amp_low, double amp_high,
                                                         std::uint64_t seed);

std::pair<Waveform, InjectionRecord> inject_point_periodic(const Waveform& w, double threshold_frac,
                                                           double delta_frac);

/// Applies one spec to a waveform, dispatching on its kind.
std::pair<Waveform, InjectionRecord> inject(const Waveform& w, const AnomalySpec& spec);

/// Injects into the VRef chain in block order A, B, C; blocks downstream of
/// each injection are re-simulated from the perturbed signal. Records are
/// returned in the order of `specs`.
std::pair<VrefBlockSignals, std::vector<InjectionRecord>> inject_multipoint(
    const VrefConfig& config, const VrefBlockSignals& signals, std::span<const AnomalySpec> specs);

void write_injection_csv(const InjectionRecord& record, const std::filesystem::path& path);

// Component-level faults -----------------------------------------------------

enum class FaultKind { om_both, om_pfet, om_nfet, parametric, open, short_circuit };

std::string_view to_string(FaultKind kind);
FaultKind parse_fault_kind(std::string_view text);

struct ComponentFault {
    FaultKind kind = FaultKind::om_both;
    double temperature = 150.0;  // °C, parametric faults only

    /// Parametric faults must lie outside the legal [-40, 125] °C range.
    void validate() const;
};

inline constexpr double kLegalTempLow = -40.0;
inline constexpr double kLegalTempHigh = 125.0;

/// Behavioral fault mapping:
///   OmPfet  gain x0.4, offset +5 % of rail span
///   OmNfet  gain x0.6, offset -5 % of rail span
///   OmBoth  both of the above
///   Short   gain x0.25
///   Open    output collapses to rail_high (tau = open_tau_samples)
///   Parametric  operating temperature set to the fault temperature
/// Each transformation is applied at most once per model.
OpampModel apply_component_fault(const OpampModel& model, const ComponentFault& fault);
VrefComponentModel apply_component_fault(const VrefComponentModel& model, const ComponentFault& fault);

}  // namespace amsad
