#include "amsad/inject.hpp"

#include "amsad/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "amsad/csv.hpp"

namespace amsad {

std::string_view to_string(BlockLocation loc) {
    switch (loc) {
    case BlockLocation::input_a: return "A";
    case BlockLocation::pll_b: return "B";
    case BlockLocation::trig_c: return "C";
    }
    return "?";
}

BlockLocation parse_block_location(std::string_view text) {
    if (text == "A" || text == "input") return BlockLocation::input_a;
    if (text == "B" || text == "pll") return BlockLocation::pll_b;
    if (text == "C" || text == "trig") return BlockLocation::trig_c;
    throw Error(ErrorKind::config, fmt::format("unknown block location '{}'", text), "location");
}

std::size_t random_anomaly_count(double rate_pct, std::size_t n) {
    if (!(rate_pct > 0.0 && rate_pct <= 100.0)) {
        throw Error(ErrorKind::config, "rate_pct must lie in (0, 100]", "rate_pct");
    }
    // rate·n/100 keeps exact halves exact (0.5 % of 1500 = 7.5).
    const double expected = rate_pct * static_cast<double>(n) / 100.0;
    const auto rounded = static_cast<std::size_t>(std::floor(expected + 0.5));
    return std::max<std::size_t>(1, rounded);
}

std::pair<Waveform, InjectionRecord> inject_point_random(const Waveform& w, double rate_pct,
                                                         double amp_low, double amp_high,
                                                         std::uint64_t seed) {
    if (!(amp_low > 0.0 && amp_low <= amp_high)) {
        throw Error(ErrorKind::config, "amplitude multipliers need 0 < low <= high", "amp_mult_low");
    }
    const std::size_t n = w.size();
    const std::size_t count = random_anomaly_count(rate_pct, n);
    if (count >= n) {
        throw Error(ErrorKind::injection,
                    fmt::format("rate {}% selects {} of {} samples", rate_pct, count, n), "rate_pct");
    }
    const double peak = w.max_abs();
    if (peak == 0.0) throw Error(ErrorKind::injection, "cannot scale anomalies on an all-zero waveform");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    InjectionRecord record;
    record.positions.reserve(count);
    std::sample(all.begin(), all.end(), std::back_inserter(record.positions), count, rng);

    std::uniform_real_distribution<double> mult(amp_low, amp_high);
    std::vector<double> samples(w.samples().begin(), w.samples().end());
    record.original_values.reserve(count);
    record.injected_values.reserve(count);
    for (std::size_t pos : record.positions) {
        const double original = samples[pos];
        const double sign = original < 0.0 ? -1.0 : 1.0;
        // uniform_real_distribution is half-open; clamp keeps amp_low == amp_high exact.
        const double u = std::clamp(mult(rng), amp_low, amp_high);
        samples[pos] = sign * u * peak;
        record.original_values.push_back(original);
        record.injected_values.push_back(samples[pos]);
    }
    return {w.with_samples(std::move(samples)), std::move(record)};
}

std::pair<Waveform, InjectionRecord> inject_point_periodic(const Waveform& w, double threshold_frac,
                                                           double delta_frac) {
    if (!(threshold_frac > 0.0 && threshold_frac <= 1.0)) {
        throw Error(ErrorKind::config, "threshold_frac must lie in (0, 1]", "threshold_frac");
    }
    if (!(delta_frac >= 0.0) || !std::isfinite(delta_frac)) {
        throw Error(ErrorKind::config, "delta_frac must be non-negative", "delta_frac");
    }
    const double peak = w.max_value();
    const double threshold = threshold_frac * peak;
    const double delta = delta_frac * peak;

    std::vector<double> samples(w.samples().begin(), w.samples().end());
    InjectionRecord record;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] >= threshold) {
            record.positions.push_back(i);
            record.original_values.push_back(samples[i]);
            samples[i] += delta;
            record.injected_values.push_back(samples[i]);
        }
    }
    if (record.positions.empty()) {
        throw Error(ErrorKind::injection, "no sample reaches the periodic injection threshold",
                    "threshold_frac");
    }
    return {w.with_samples(std::move(samples)), std::move(record)};
}

std::pair<Waveform, InjectionRecord> inject(const Waveform& w, const AnomalySpec& spec) {
    return std::visit(
        [&](const auto& kind) {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, PointRandom>) {
                return inject_point_random(w, kind.rate_pct, kind.amp_mult_low, kind.amp_mult_high,
                                           spec.seed);
            } else {
                return inject_point_periodic(w, kind.threshold_frac, kind.delta_frac);
            }
        },
        spec.kind);
}

std::pair<VrefBlockSignals, std::vector<InjectionRecord>> inject_multipoint(
    const VrefConfig& config, const VrefBlockSignals& signals, std::span<const AnomalySpec> specs) {
    if (specs.empty()) throw Error(ErrorKind::config, "multipoint injection needs at least one spec");

    std::array<const AnomalySpec*, 3> by_location{};
    std::array<std::size_t, 3> spec_index{};
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto slot = static_cast<std::size_t>(specs[i].location);
        if (by_location[slot] != nullptr) {
            throw Error(ErrorKind::config,
                        fmt::format("duplicate injection at block {}", to_string(specs[i].location)),
                        "location");
        }
        by_location[slot] = &specs[i];
        spec_index[slot] = i;
    }

    VrefBlockSignals out = signals;
    std::vector<InjectionRecord> records(specs.size());

    if (const AnomalySpec* a = by_location[0]) {
        auto [input, rec] = inject(out.input, *a);
        out.input = std::move(input);
        records[spec_index[0]] = std::move(rec);
        PllOutputs pll = simulate_pll(config, out.input);
        out.pll_frequency = std::move(pll.frequency);
        out.pll_intensity = std::move(pll.intensity);
        out.trig = simulate_trig(config, out.pll_intensity);
        out.output = simulate_output(config, out.trig);
    }
    if (const AnomalySpec* b = by_location[1]) {
        auto [intensity, rec] = inject(out.pll_intensity, *b);
        out.pll_intensity = std::move(intensity);
        records[spec_index[1]] = std::move(rec);
        out.trig = simulate_trig(config, out.pll_intensity);
        out.output = simulate_output(config, out.trig);
    }
    if (const AnomalySpec* c = by_location[2]) {
        auto [trig, rec] = inject(out.trig, *c);
        out.trig = std::move(trig);
        records[spec_index[2]] = std::move(rec);
        out.output = simulate_output(config, out.trig);
    }
    return {std::move(out), std::move(records)};
}

void write_injection_csv(const InjectionRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << "index,original,injected\n";
    for (std::size_t i = 0; i < record.size(); ++i) {
        out << record.positions[i] << ',' << csv::number(record.original_values[i]) << ','
            << csv::number(record.injected_values[i]) << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::string_view to_string(FaultKind kind) {
    switch (kind) {
    case FaultKind::om_both: return "OmBoth";
    case FaultKind::om_pfet: return "OmPfet";
    case FaultKind::om_nfet: return "OmNfet";
    case FaultKind::parametric: return "ParFault";
    case FaultKind::open: return "Open";
    case FaultKind::short_circuit: return "Short";
    }
    return "?";
}

FaultKind parse_fault_kind(std::string_view text) {
    if (text == "OmBoth") return FaultKind::om_both;
    if (text == "OmPfet") return FaultKind::om_pfet;
    if (text == "OmNfet") return FaultKind::om_nfet;
    if (text == "ParFault" || text == "Parametric") return FaultKind::parametric;
    if (text == "Open") return FaultKind::open;
    if (text == "Short") return FaultKind::short_circuit;
    throw Error(ErrorKind::config, fmt::format("unknown component fault '{}'", text), "fault");
}

void ComponentFault::validate() const {
    if (kind == FaultKind::parametric &&
        (!std::isfinite(temperature) || (temperature >= kLegalTempLow && temperature <= kLegalTempHigh))) {
        throw Error(ErrorKind::config,
                    fmt::format("parametric fault temperature {} C lies inside the legal range", temperature),
                    "temperature");
    }
}

namespace {

void apply_om_pfet(OpampModel& m) {
    if (m.om_pfet) return;
    m.open_loop_gain *= 0.4;
    m.offset += 0.05 * m.rail_span();
    m.om_pfet = true;
}

void apply_om_nfet(OpampModel& m) {
    if (m.om_nfet) return;
    m.open_loop_gain *= 0.6;
    m.offset -= 0.05 * m.rail_span();
    m.om_nfet = true;
}

}  // namespace

OpampModel apply_component_fault(const OpampModel& model, const ComponentFault& fault) {
    fault.validate();
    OpampModel m = model;
    switch (fault.kind) {
    case FaultKind::om_pfet: apply_om_pfet(m); break;
    case FaultKind::om_nfet: apply_om_nfet(m); break;
    case FaultKind::om_both:
        apply_om_pfet(m);
        apply_om_nfet(m);
        break;
    case FaultKind::parametric: m.operating_temp = fault.temperature; break;
    case FaultKind::open: m.open_fault = true; break;
    case FaultKind::short_circuit:
        if (!m.short_fault) {
            m.open_loop_gain *= 0.25;
            m.short_fault = true;
        }
        break;
    }
    return m;
}

VrefComponentModel apply_component_fault(const VrefComponentModel& model, const ComponentFault& fault) {
    VrefComponentModel m = model;
    m.amp = apply_component_fault(model.amp, fault);
    return m;
}

}  // namespace amsad
