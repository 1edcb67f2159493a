#pragma once

// Experiment harness: balanced dataset generation, clustering evaluation,
// suites and reports.

#include "amsad/centroid.hpp"
#include "amsad/cluster.hpp"
#include "amsad/features.hpp"
#include "amsad/inject.hpp"
#include "amsad/opamp.hpp"
#include "amsad/vref.hpp"
#include "amsad/waveform.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace amsad {

enum class Circuit { vref_blocks, vref_components, opamp, kstage };

enum class Experiment {
    ia, pa, ta,                // single block
    ppa, pra,                  // PLL only, periodic / random
    ippa, itpa, ptpa, iptpa,   // multipoint periodic
    ipra, itra, ptra, iptra,   // multipoint random
    om_both, om_pfet, om_nfet, par_fault, open, short_circuit,
    kstage,
};

std::string_view to_string(Circuit c);
std::string_view to_string(Experiment e);

enum class AnomalyType { random, periodic };
enum class AnalysisKind { transient, dc_input, dc_temp };

struct ExperimentConfig {
    std::string name;  // free label; defaults to the experiment code
    Circuit circuit = Circuit::vref_blocks;
    std::size_t stages = 1;  // kstage(k) only
    Experiment experiment = Experiment::ia;
    std::set<std::size_t> anomalous_stages;  // KStage(...); empty = one random stage per signal
    std::vector<std::string> observed_signals;  // empty = experiment default
    bool multisignal = false;  // also evaluate the concatenation of all observed signals
    FeatureSelection features = FeatureSelection::all();
    bool per_feature = true;  // evaluate each selected feature alone as well as the aggregate
    std::optional<std::size_t> window_k;
    Algorithm algorithm = Algorithm::gmm;
    bool centroid_select = false;
    IntervalSigma interval_sigma = IntervalSigma::global;
    std::size_t n_samples_per_class = 100;
    std::uint64_t seed = 1;

    // Signal geometry.
    std::size_t n_samples = 1500;
    double duration = 20e-6;  // s

    // Injection.
    std::optional<AnomalyType> anomaly_type;  // empty = experiment default
    std::vector<double> rates_pct{0.1, 0.2, 0.3, 0.4, 0.5};
    double amp_low = 2.0;
    double amp_high = 5.0;
    std::vector<double> thresholds;  // fractions of max; empty = experiment default
    std::vector<double> deltas;      // fractions of max; empty = experiment default

    // Component faults.
    double fault_temperature = 150.0;  // °C
    FaultKind kstage_fault = FaultKind::om_both;
    AnalysisKind analysis = AnalysisKind::transient;
    double stimulus_amplitude = 0.05;  // V, opamp transient / kstage ripple
    double stimulus_bias = 0.0;        // V, kstage uses 0.1
    double stage_gain = 2.0;

    // Spread between signals of one class.
    VrefConfig vref{.noise_std = 0.01, .amplitude_jitter = 0.02, .phase_jitter = 0.1};
    double gain_rel_std = 0.02;          // per-signal opamp gain variation
    double offset_std = 1e-3;            // V, per-signal opamp offset variation
    double noise_std = 1e-3;             // V, additive sample noise on observed component signals
    double observation_offset_std = 0.0; // V, per-signal constant offset on observed signals

    // Algorithm options.
    KMeansOptions kmeans;
    GmmOptions gmm;
    BirchOptions birch;
    SpectralOptions spectral;

    /// Throws Error(config) naming the offending key.
    void validate() const;
    /// Observed signals after applying experiment defaults.
    std::vector<std::string> resolved_signals() const;
    AnomalyType resolved_anomaly_type() const;
    std::vector<double> resolved_thresholds() const;
    std::vector<double> resolved_deltas() const;
    /// Injection sites of a VRef-chain experiment in block order.
    std::vector<BlockLocation> locations() const;
    std::string label() const;
};

/// Reads YAML mapping keys (nested maps flatten to dotted keys) into `config`.
/// Throws Error(config) naming any unknown or malformed key.
void apply_config_yaml(ExperimentConfig& config, const std::string& yaml_text);
/// `key=value` with a YAML scalar or flow value.
void apply_override(ExperimentConfig& config, std::string_view assignment);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Datasets --------------------------------------------------------------------

struct SignalSample {
    std::string id;
    Label label = Label::normal;
    std::vector<Waveform> signals;  // parallel to SignalSet::names
};

struct SignalSet {
    std::vector<std::string> names;
    std::vector<SignalSample> samples;  // normal first, then anomalous
};

/// Names of the observable signals of a circuit.
std::vector<std::string> circuit_signals(Circuit c);

/// One signal instance per resolved observed signal, with per-signal
/// variation and, when `anomalous`, the configured injection or fault.
std::vector<Waveform> simulate_sample(const ExperimentConfig& config, std::uint64_t seed, bool anomalous);

/// n_samples_per_class clean and anomalous signals; sample i is simulated
/// from derive_seed(config.seed, i).
SignalSet generate_signals(const ExperimentConfig& config);

/// Rows over the chosen signal names (concatenated in order). With a window
/// count every sample yields that many rows.
std::vector<FeatureRow> featurize(const SignalSet& set, const std::vector<std::string>& signals,
                                  const FeatureSelection& selection, std::optional<std::size_t> window_k);

/// generate_signals followed by featurize over all observed signals.
std::vector<FeatureRow> generate_dataset(const ExperimentConfig& config);

// Evaluation ------------------------------------------------------------------

/// Best of the two label/cluster mappings, in percent.
double permutation_accuracy(std::span<const Label> labels, std::span<const int> assignments);

struct Confusion {
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t true_negative = 0;
    std::size_t false_negative = 0;
    std::size_t total() const { return true_positive + false_positive + true_negative + false_negative; }
};

/// Report grouping: single, pll, multi_periodic, multi_random, component, kstage, other.
std::string_view experiment_family(Experiment e);
Experiment parse_experiment(std::string_view code, std::set<std::size_t>* stages = nullptr);
Circuit parse_circuit(std::string_view text, std::size_t* stages = nullptr);

struct UnitResult {
    std::string family;
    std::string experiment;
    std::string circuit;
    std::string algorithm;
    std::string features;
    std::string signals;
    std::size_t window_k = 0;  // 0 = whole signal
    bool centroid_select = false;
    double accuracy_pct = 0.0;
    Confusion confusion;
    double detect_rate = 0.0;   // detected fraction of truly anomalous signals
    double mean_speedup = 1.0;  // over truly anomalous signals
    std::uint64_t seed = 0;
    int anomalous_cluster = 1;  // cluster mapped to the anomalous label
    std::size_t centroid_fallbacks = 0;
    std::string error;          // non-empty when the unit failed
};

struct EvaluationReport {
    ExperimentConfig config;
    std::vector<UnitResult> units;
};

/// Algorithm options from the config, seeded from a fit sub-stream of config.seed.
FitOptions fit_options(const ExperimentConfig& config);

/// Labels never reach the fit; they only score the assignments. Fit and
/// scoring use the same generated set.
EvaluationReport evaluate(const ExperimentConfig& config);
/// Same as evaluate, reusing already generated signals.
EvaluationReport evaluate(const ExperimentConfig& config, const SignalSet& set);

/// Scores rows grouped by sample id. A sample is flagged when any of its
/// windows lands in the anomalous cluster; whether detection stopped early
/// does not change that verdict. Both cluster mappings are tried and the
/// better one kept.
struct ScoredUnit {
    double accuracy_pct = 0.0;
    Confusion confusion;
    double detect_rate = 0.0;
    double mean_speedup = 1.0;
    int anomalous_cluster = 1;
};
ScoredUnit score_rows(std::span<const FeatureRow> rows, std::span<const int> assignments,
                      std::optional<std::size_t> window_k);

// Suites ----------------------------------------------------------------------

/// YAML: optional `defaults` map and an `experiments` list of maps. An entry
/// may carry `algorithms` and `centroid_select` lists, which expand into one
/// config per combination.
std::vector<ExperimentConfig> parse_suite(const std::string& yaml_text,
                                          const std::vector<std::string>& overrides = {});
std::vector<ExperimentConfig> load_suite(const std::filesystem::path& path,
                                         const std::vector<std::string>& overrides = {});

/// Entries run concurrently; results keep suite order. Failures are recorded
/// per unit and never stop the suite.
std::vector<EvaluationReport> run_suite(const std::vector<ExperimentConfig>& configs);

inline constexpr std::string_view kReportHeader =
    "experiment,circuit,algorithm,features,signals,windowed,centroid_select,accuracy_pct,detect_rate,mean_speedup,seed";

void write_report_csv(std::span<const EvaluationReport> reports, const std::filesystem::path& path);
std::string report_csv(std::span<const EvaluationReport> reports);
std::vector<UnitResult> read_report_csv(const std::filesystem::path& path);
/// Human-readable table grouped by experiment family.
std::string format_report_table(std::span<const UnitResult> units);

}  // namespace amsad
