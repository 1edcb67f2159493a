#include "amsad/bench.hpp"

#include "amsad/error.hpp"
#include "amsad/kstage.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace amsad {

namespace {

// Sub-stream indices under a sample seed.
enum Stream : std::uint64_t {
    kChain = 0,
    kVariation = 1,
    kObservation = 2,
    kStagePick = 3,
    kInjectBase = 16,
};

template <typename T>
const T& pick(const std::vector<T>& options, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
    return options[d(rng)];
}

Waveform sine_stimulus(const ExperimentConfig& c) {
    const double dt = c.duration / static_cast<double>(c.n_samples);
    std::vector<double> v(c.n_samples);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = dt * static_cast<double>(i);
        v[i] = c.stimulus_bias + c.stimulus_amplitude * std::sin(2.0 * std::numbers::pi * c.vref.frequency * t);
    }
    return Waveform(std::move(v), dt, "stimulus");
}

OpampModel vary(OpampModel m, const ExperimentConfig& c, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    m.open_loop_gain *= 1.0 + c.gain_rel_std * z(rng);
    m.offset += c.offset_std * z(rng);
    return m;
}

OpampAnalysis component_analysis(const ExperimentConfig& c, double sweep_high, double dc_input, Waveform stimulus) {
    switch (c.analysis) {
    case AnalysisKind::dc_input: return DcInputSweep{SweepSpec{0.0, sweep_high, c.n_samples}};
    case AnalysisKind::dc_temp: return DcTempSweep{SweepSpec{kLegalTempLow, kLegalTempHigh, c.n_samples}, dc_input};
    case AnalysisKind::transient: break;
    }
    return TransientAnalysis{std::move(stimulus)};
}

ComponentFault experiment_fault(const ExperimentConfig& c) {
    ComponentFault f;
    f.temperature = c.fault_temperature;
    switch (c.experiment) {
    case Experiment::om_both: f.kind = FaultKind::om_both; break;
    case Experiment::om_pfet: f.kind = FaultKind::om_pfet; break;
    case Experiment::om_nfet: f.kind = FaultKind::om_nfet; break;
    case Experiment::par_fault: f.kind = FaultKind::parametric; break;
    case Experiment::open: f.kind = FaultKind::open; break;
    case Experiment::short_circuit: f.kind = FaultKind::short_circuit; break;
    default: f.kind = c.kstage_fault; break;
    }
    return f;
}

const Waveform& chain_signal(const VrefBlockSignals& s, const std::string& name) {
    if (name == "input") return s.input;
    if (name == "pll_frequency") return s.pll_frequency;
    if (name == "pll_intensity") return s.pll_intensity;
    if (name == "trig") return s.trig;
    if (name == "output") return s.output;
    throw Error(ErrorKind::config, fmt::format("unknown signal '{}'", name), "observed_signals");
}

}  // namespace

std::vector<std::string> circuit_signals(Circuit c) {
    if (c == Circuit::vref_blocks) return {"input", "pll_frequency", "pll_intensity", "trig", "output"};
    return {"output"};
}

std::vector<Waveform> simulate_sample(const ExperimentConfig& c, std::uint64_t seed, bool anomalous) {
    const auto names = c.resolved_signals();
    std::vector<Waveform> out;
    std::mt19937_64 vrng(derive_seed(seed, kVariation));

    switch (c.circuit) {
    case Circuit::vref_blocks: {
        VrefBlockSignals s = simulate_vref(c.vref, c.n_samples, c.duration, derive_seed(seed, kChain));
        if (anomalous) {
            std::vector<AnomalySpec> specs;
            const auto locs = c.locations();
            const auto type = c.resolved_anomaly_type();
            const auto thresholds = c.resolved_thresholds();
            const auto deltas = c.resolved_deltas();
            for (std::size_t i = 0; i < locs.size(); ++i) {
                AnomalySpec spec;
                spec.location = locs[i];
                spec.seed = derive_seed(seed, kInjectBase + i);
                if (type == AnomalyType::random) {
                    spec.kind = PointRandom{pick(c.rates_pct, vrng), c.amp_low, c.amp_high};
                } else {
                    spec.kind = PointPeriodic{pick(thresholds, vrng), pick(deltas, vrng)};
                }
                specs.push_back(spec);
            }
            s = inject_multipoint(c.vref, s, specs).first;
        }
        for (const auto& n : names) out.push_back(chain_signal(s, n));
        break;
    }
    case Circuit::vref_components: {
        VrefComponentModel m;
        m.amp = vary(m.amp, c, vrng);
        if (anomalous) m = apply_component_fault(m, experiment_fault(c));
        const auto analysis = component_analysis(c, m.core_voltage * 1.5, m.core_voltage,
                                                 vref_core_stimulus(m, c.n_samples, c.duration));
        out.push_back(simulate_vref_component(m, analysis));
        break;
    }
    case Circuit::opamp: {
        OpampModel m = vary(OpampModel{}, c, vrng);
        if (anomalous) m = apply_component_fault(m, experiment_fault(c));
        out.push_back(simulate_opamp(m, component_analysis(c, 0.2, c.stimulus_bias, sine_stimulus(c))));
        break;
    }
    case Circuit::kstage: {
        const OpampModel base = vary(OpampModel{}, c, vrng);
        std::set<std::size_t> stages;
        std::optional<ComponentFault> fault;
        if (anomalous) {
            stages = c.anomalous_stages;
            if (stages.empty()) {
                std::mt19937_64 srng(derive_seed(seed, kStagePick));
                std::uniform_int_distribution<std::size_t> d(0, c.stages - 1);
                stages.insert(d(srng));
            }
            fault = experiment_fault(c);
        }
        const auto amp = build_kstage(base, c.stages, std::vector<double>(c.stages, c.stage_gain), stages, fault);
        out.push_back(simulate_kstage(amp, sine_stimulus(c)));
        break;
    }
    }

    if (c.noise_std > 0.0 || c.observation_offset_std > 0.0) {
        std::mt19937_64 orng(derive_seed(seed, kObservation));
        std::normal_distribution<double> z(0.0, 1.0);
        for (auto& w : out) {
            const double offset = c.observation_offset_std * z(orng);
            std::vector<double> v(w.samples().begin(), w.samples().end());
            for (double& x : v) x += offset + c.noise_std * z(orng);
            w = w.with_samples(std::move(v));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].set_name(names[i]);
    return out;
}

SignalSet generate_signals(const ExperimentConfig& config) {
    config.validate();
    SignalSet set;
    set.names = config.resolved_signals();
    const std::size_t total = 2 * config.n_samples_per_class;
    set.samples.resize(total);
    std::vector<std::exception_ptr> failures(total);

    const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            auto& s = set.samples[idx];
            const bool anomalous = idx >= config.n_samples_per_class;
            s.label = anomalous ? Label::anomalous : Label::normal;
            s.id = fmt::format("s{:05d}", idx);
            s.signals = simulate_sample(config, derive_seed(config.seed, idx), anomalous);
        } catch (...) {
            failures[idx] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return set;
}

std::vector<FeatureRow> featurize(const SignalSet& set, const std::vector<std::string>& signals,
                                  const FeatureSelection& selection, std::optional<std::size_t> window_k) {
    if (signals.empty()) throw Error(ErrorKind::config, "no signals selected", "observed_signals");
    std::vector<std::size_t> idx;
    for (const auto& name : signals) {
        const auto it = std::find(set.names.begin(), set.names.end(), name);
        if (it == set.names.end()) {
            throw Error(ErrorKind::config, fmt::format("signal '{}' was not generated", name), "observed_signals");
        }
        idx.push_back(static_cast<std::size_t>(it - set.names.begin()));
    }

    std::vector<FeatureRow> rows;
    const std::size_t k = window_k.value_or(1);
    rows.reserve(set.samples.size() * k);
    for (const auto& s : set.samples) {
        if (window_k) {
            std::vector<std::vector<std::vector<double>>> per_signal;
            for (auto i : idx) per_signal.push_back(windowed_features(s.signals[i], k, selection));
            for (std::size_t w = 0; w < k; ++w) {
                std::vector<std::vector<double>> parts;
                for (const auto& ps : per_signal) parts.push_back(ps[w]);
                rows.push_back(FeatureRow{aggregate_multisignal(parts), w, s.label, s.id});
            }
        } else {
            std::vector<std::vector<double>> parts;
            for (auto i : idx) parts.push_back(extract_features(s.signals[i], selection));
            rows.push_back(FeatureRow{aggregate_multisignal(parts), 0, s.label, s.id});
        }
    }
    return rows;
}

std::vector<FeatureRow> generate_dataset(const ExperimentConfig& config) {
    const SignalSet set = generate_signals(config);
    return featurize(set, set.names, config.features, config.window_k);
}

}  // namespace amsad
