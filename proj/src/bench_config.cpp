#include "amsad/bench.hpp"

#include "amsad/csv.hpp"
#include "amsad/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace amsad {

namespace {

struct Code {
    std::string_view text;
    Experiment e;
};

constexpr Code kCodes[] = {
    {"IA", Experiment::ia},        {"PA", Experiment::pa},         {"TA", Experiment::ta},
    {"PPA", Experiment::ppa},      {"PRA", Experiment::pra},       {"IPPA", Experiment::ippa},
    {"ITPA", Experiment::itpa},    {"PTPA", Experiment::ptpa},     {"IPTPA", Experiment::iptpa},
    {"IPRA", Experiment::ipra},    {"ITRA", Experiment::itra},     {"PTRA", Experiment::ptra},
    {"IPTRA", Experiment::iptra},  {"OmBoth", Experiment::om_both}, {"OmPfet", Experiment::om_pfet},
    {"OmNfet", Experiment::om_nfet}, {"ParFault", Experiment::par_fault}, {"Open", Experiment::open},
    {"Short", Experiment::short_circuit}, {"KStage", Experiment::kstage},
};

bool is_vref_chain(Experiment e) { return e <= Experiment::iptra; }
bool is_component(Experiment e) { return e >= Experiment::om_both && e <= Experiment::short_circuit; }

[[noreturn]] void bad(const std::string& key, const std::string& message) {
    throw Error(ErrorKind::config, fmt::format("{}: {}", key, message), key);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    if (!node.IsScalar()) bad(key, "expected a single value");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        bad(key, fmt::format("cannot interpret '{}'", node.Scalar()));
    }
}

std::uint64_t unsigned_value(const YAML::Node& node, const std::string& key) {
    const auto text = scalar<std::string>(node, key);
    const long long v = [&] {
        try {
            return csv::parse_int(text, key);
        } catch (const Error&) {
            bad(key, fmt::format("'{}' is not an integer", text));
        }
    }();
    if (v < 0) bad(key, "must be non-negative");
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& key) {
    std::vector<std::string> out;
    if (node.IsSequence()) {
        for (const auto& item : node) out.push_back(scalar<std::string>(item, key));
    } else {
        for (auto& part : csv::split(scalar<std::string>(node, key))) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

std::vector<double> number_list(const YAML::Node& node, const std::string& key) {
    std::vector<double> out;
    if (node.IsSequence()) {
        for (const auto& item : node) out.push_back(scalar<double>(item, key));
    } else {
        out.push_back(scalar<double>(node, key));
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const YAML::Node&, const std::string&)>;

template <typename Member>
Setter number_of(Member member) {
    return [member](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
        std::invoke(member, c) = scalar<double>(n, k);
    };
}

template <typename Member>
Setter count_of(Member member) {
    return [member](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
        std::invoke(member, c) = static_cast<std::size_t>(unsigned_value(n, k));
    };
}

template <typename Member>
Setter flag_of(Member member) {
    return [member](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
        std::invoke(member, c) = scalar<bool>(n, k);
    };
}

Setter vref_number(double VrefConfig::*member) {
    return [member](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
        c.vref.*member = scalar<double>(n, k);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["name"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.name = scalar<std::string>(n, k);
        };
        t["circuit"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            try {
                std::size_t stages = c.stages;
                c.circuit = parse_circuit(scalar<std::string>(n, k), &stages);
                c.stages = stages;
            } catch (const Error& e) {
                bad(k, e.what());
            }
        };
        t["stages"] = count_of(&ExperimentConfig::stages);
        t["experiment"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            try {
                std::set<std::size_t> stages;
                c.experiment = parse_experiment(scalar<std::string>(n, k), &stages);
                c.anomalous_stages = std::move(stages);
            } catch (const Error& e) {
                bad(k, e.what());
            }
        };
        t["observed_signals"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.observed_signals = string_list(n, k);
        };
        t["multisignal"] = flag_of(&ExperimentConfig::multisignal);
        t["features"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            std::string joined;
            for (const auto& f : string_list(n, k)) joined += (joined.empty() ? "" : ",") + f;
            try {
                c.features = FeatureSelection::parse(joined);
            } catch (const Error& e) {
                bad(k, e.what());
            }
        };
        t["per_feature"] = flag_of(&ExperimentConfig::per_feature);
        t["window_k"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            if (n.IsNull() || (n.IsScalar() && (n.Scalar() == "none" || n.Scalar() == "0"))) {
                c.window_k.reset();
            } else {
                c.window_k = static_cast<std::size_t>(unsigned_value(n, k));
            }
        };
        t["algorithm"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            const auto a = [&] {
                try {
                    return parse_algorithm(scalar<std::string>(n, k));
                } catch (const Error& e) {
                    bad(k, e.what());
                }
            }();
            if (a == Algorithm::centroid) bad(k, "use centroid_select to enable centroid selection");
            c.algorithm = a;
        };
        t["centroid_select"] = flag_of(&ExperimentConfig::centroid_select);
        t["interval_sigma"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            const auto v = scalar<std::string>(n, k);
            if (v == "global") c.interval_sigma = IntervalSigma::global;
            else if (v == "cluster") c.interval_sigma = IntervalSigma::cluster;
            else bad(k, "expected 'global' or 'cluster'");
        };
        t["n_samples_per_class"] = count_of(&ExperimentConfig::n_samples_per_class);
        t["seed"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) { c.seed = unsigned_value(n, k); };
        t["n_samples"] = count_of(&ExperimentConfig::n_samples);
        t["duration"] = number_of(&ExperimentConfig::duration);

        t["anomaly.type"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            const auto v = scalar<std::string>(n, k);
            if (v == "random") c.anomaly_type = AnomalyType::random;
            else if (v == "periodic") c.anomaly_type = AnomalyType::periodic;
            else if (v == "default") c.anomaly_type.reset();
            else bad(k, "expected 'random', 'periodic' or 'default'");
        };
        t["anomaly.rates_pct"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.rates_pct = number_list(n, k);
        };
        t["anomaly.amp_low"] = number_of(&ExperimentConfig::amp_low);
        t["anomaly.amp_high"] = number_of(&ExperimentConfig::amp_high);
        t["anomaly.thresholds"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.thresholds = number_list(n, k);
        };
        t["anomaly.deltas"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.deltas = number_list(n, k);
        };

        t["fault.temperature"] = number_of(&ExperimentConfig::fault_temperature);
        t["fault.kind"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            try {
                c.kstage_fault = parse_fault_kind(scalar<std::string>(n, k));
            } catch (const Error& e) {
                bad(k, e.what());
            }
        };
        t["analysis"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            const auto v = scalar<std::string>(n, k);
            if (v == "transient") c.analysis = AnalysisKind::transient;
            else if (v == "dc_input") c.analysis = AnalysisKind::dc_input;
            else if (v == "dc_temp") c.analysis = AnalysisKind::dc_temp;
            else bad(k, "expected 'transient', 'dc_input' or 'dc_temp'");
        };
        t["stimulus.amplitude"] = number_of(&ExperimentConfig::stimulus_amplitude);
        t["stimulus.bias"] = number_of(&ExperimentConfig::stimulus_bias);
        t["stage_gain"] = number_of(&ExperimentConfig::stage_gain);

        t["vref.amplitude"] = vref_number(&VrefConfig::amplitude);
        t["vref.frequency"] = vref_number(&VrefConfig::frequency);
        t["vref.noise_std"] = vref_number(&VrefConfig::noise_std);
        t["vref.amplitude_jitter"] = vref_number(&VrefConfig::amplitude_jitter);
        t["vref.phase_jitter"] = vref_number(&VrefConfig::phase_jitter);
        t["vref.pll_multiplier"] = vref_number(&VrefConfig::pll_multiplier);
        t["vref.pll_free_running_ratio"] = vref_number(&VrefConfig::pll_free_running_ratio);
        t["vref.pll_bandwidth_ratio"] = vref_number(&VrefConfig::pll_bandwidth_ratio);
        t["vref.pll_damping"] = vref_number(&VrefConfig::pll_damping);
        t["vref.pll_lock_tau"] = vref_number(&VrefConfig::pll_lock_tau);
        t["vref.pll_trace_tau"] = vref_number(&VrefConfig::pll_trace_tau);
        t["vref.trig_gain"] = vref_number(&VrefConfig::trig_gain);
        t["vref.output_nominal"] = vref_number(&VrefConfig::output_nominal);
        t["vref.output_scale"] = vref_number(&VrefConfig::output_scale);
        t["vref.output_tau"] = vref_number(&VrefConfig::output_tau);

        t["variation.gain_rel_std"] = number_of(&ExperimentConfig::gain_rel_std);
        t["variation.offset_std"] = number_of(&ExperimentConfig::offset_std);
        t["noise_std"] = number_of(&ExperimentConfig::noise_std);
        t["observation_offset_std"] = number_of(&ExperimentConfig::observation_offset_std);

        t["kmeans.max_iter"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.kmeans.max_iter = static_cast<std::size_t>(unsigned_value(n, k));
        };
        t["kmeans.tol"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.kmeans.tol = scalar<double>(n, k);
        };
        t["kmeans.init"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            const auto v = scalar<std::string>(n, k);
            if (v == "plus_plus") c.kmeans.init = KMeansInit::plus_plus;
            else if (v == "extremes") c.kmeans.init = KMeansInit::extremes;
            else bad(k, "expected 'plus_plus' or 'extremes'");
        };
        t["gmm.max_iter"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.gmm.max_iter = static_cast<std::size_t>(unsigned_value(n, k));
        };
        t["gmm.tol"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.gmm.tol = scalar<double>(n, k);
        };
        t["gmm.variance_floor"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.gmm.variance_floor = scalar<double>(n, k);
        };
        t["birch.threshold"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.birch.threshold = scalar<double>(n, k);
        };
        t["birch.branching"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.birch.branching = static_cast<std::size_t>(unsigned_value(n, k));
        };
        t["spectral.sigma"] = [](ExperimentConfig& c, const YAML::Node& n, const std::string& k) {
            c.spectral.sigma = scalar<double>(n, k);
        };
        return t;
    }();
    return table;
}

void flatten(const YAML::Node& node, const std::string& prefix, std::vector<std::pair<std::string, YAML::Node>>& out) {
    for (const auto& kv : node) {
        const std::string key = prefix + kv.first.as<std::string>();
        if (kv.second.IsMap()) {
            flatten(kv.second, key + ".", out);
        } else {
            out.emplace_back(key, kv.second);
        }
    }
}

void apply_node(ExperimentConfig& config, const YAML::Node& root) {
    if (!root || root.IsNull()) return;
    if (!root.IsMap()) throw Error(ErrorKind::config, "configuration must be a mapping of keys", "config");
    std::vector<std::pair<std::string, YAML::Node>> entries;
    flatten(root, "", entries);
    // `circuit` may reset the stage count, so it goes before `stages`. Nodes
    // are never reordered: YAML::Node assignment writes through to the target.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& [key, value] : entries) {
            if ((key == "circuit") != (pass == 0)) continue;
            const auto it = setters().find(key);
            if (it == setters().end()) bad(key, "unknown configuration key");
            it->second(config, value, key);
        }
    }
}

YAML::Node load_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorKind::config, fmt::format("malformed YAML: {}", e.what()), "config");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string(), "config");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(Circuit c) {
    switch (c) {
    case Circuit::vref_blocks: return "vref_blocks";
    case Circuit::vref_components: return "vref_components";
    case Circuit::opamp: return "opamp";
    case Circuit::kstage: return "kstage";
    }
    return "?";
}

std::string_view to_string(Experiment e) {
    for (const auto& c : kCodes) {
        if (c.e == e) return c.text;
    }
    return "?";
}

std::string_view experiment_family(Experiment e) {
    switch (e) {
    case Experiment::ia:
    case Experiment::pa:
    case Experiment::ta: return "single";
    case Experiment::ppa:
    case Experiment::pra: return "pll";
    case Experiment::ippa:
    case Experiment::itpa:
    case Experiment::ptpa:
    case Experiment::iptpa: return "multi_periodic";
    case Experiment::ipra:
    case Experiment::itra:
    case Experiment::ptra:
    case Experiment::iptra: return "multi_random";
    case Experiment::kstage: return "kstage";
    default: return "component";
    }
}

Experiment parse_experiment(std::string_view code, std::set<std::size_t>* stages) {
    std::string_view head = code;
    std::string_view args;
    if (const auto open = code.find('('); open != std::string_view::npos) {
        if (code.back() != ')') throw Error(ErrorKind::config, fmt::format("malformed experiment '{}'", code), "experiment");
        head = code.substr(0, open);
        args = code.substr(open + 1, code.size() - open - 2);
    }
    for (const auto& c : kCodes) {
        if (c.text != head) continue;
        if (!args.empty()) {
            if (c.e != Experiment::kstage) {
                throw Error(ErrorKind::config, fmt::format("'{}' takes no stage list", head), "experiment");
            }
            for (const auto& part : csv::split(args)) {
                const long long s = csv::parse_int(part, "experiment");
                if (s < 1) throw Error(ErrorKind::config, "stage positions are 1-based", "experiment");
                if (stages) stages->insert(static_cast<std::size_t>(s - 1));
            }
        }
        return c.e;
    }
    throw Error(ErrorKind::config, fmt::format("unknown experiment '{}'", code), "experiment");
}

Circuit parse_circuit(std::string_view text, std::size_t* stages) {
    if (text == "vref_blocks") return Circuit::vref_blocks;
    if (text == "vref_components") return Circuit::vref_components;
    if (text == "opamp") return Circuit::opamp;
    if (text == "kstage") return Circuit::kstage;
    if (text.starts_with("kstage(") && text.ends_with(")")) {
        const long long k = csv::parse_int(text.substr(7, text.size() - 8), "circuit");
        if (k < 1) throw Error(ErrorKind::config, "kstage needs at least one stage", "circuit");
        if (stages) *stages = static_cast<std::size_t>(k);
        return Circuit::kstage;
    }
    throw Error(ErrorKind::config, fmt::format("unknown circuit '{}'", text), "circuit");
}

std::vector<std::string> ExperimentConfig::resolved_signals() const {
    if (!observed_signals.empty()) return observed_signals;
    if (circuit != Circuit::vref_blocks) return {"output"};
    switch (experiment) {
    case Experiment::ia: return {"pll_intensity"};
    case Experiment::pa: return {"trig"};
    default: return {"output"};
    }
}

AnomalyType ExperimentConfig::resolved_anomaly_type() const {
    if (anomaly_type) return *anomaly_type;
    switch (experiment) {
    case Experiment::ia:
    case Experiment::pra:
    case Experiment::ipra:
    case Experiment::itra:
    case Experiment::ptra:
    case Experiment::iptra: return AnomalyType::random;
    default: return AnomalyType::periodic;
    }
}

std::vector<double> ExperimentConfig::resolved_thresholds() const {
    if (!thresholds.empty()) return thresholds;
    const auto fam = experiment_family(experiment);
    if (fam == "multi_periodic" || fam == "pll") return {0.1, 0.9};
    return {0.9};
}

std::vector<double> ExperimentConfig::resolved_deltas() const {
    if (!deltas.empty()) return deltas;
    const auto fam = experiment_family(experiment);
    if (fam == "multi_periodic" || fam == "pll") return {0.05, 0.10};
    return {1.0};
}

std::vector<BlockLocation> ExperimentConfig::locations() const {
    using B = BlockLocation;
    switch (experiment) {
    case Experiment::ia: return {B::input_a};
    case Experiment::pa:
    case Experiment::ppa:
    case Experiment::pra: return {B::pll_b};
    case Experiment::ta: return {B::trig_c};
    case Experiment::ippa:
    case Experiment::ipra: return {B::input_a, B::pll_b};
    case Experiment::itpa:
    case Experiment::itra: return {B::input_a, B::trig_c};
    case Experiment::ptpa:
    case Experiment::ptra: return {B::pll_b, B::trig_c};
    case Experiment::iptpa:
    case Experiment::iptra: return {B::input_a, B::pll_b, B::trig_c};
    default: return {};
    }
}

std::string ExperimentConfig::label() const {
    if (!name.empty()) return name;
    std::string code(to_string(experiment));
    if (experiment == Experiment::kstage && !anomalous_stages.empty()) {
        code += '(';
        bool first = true;
        for (auto s : anomalous_stages) {
            code += fmt::format("{}{}", first ? "" : ",", s + 1);
            first = false;
        }
        code += ')';
    }
    return code;
}

void ExperimentConfig::validate() const {
    if (n_samples_per_class < 10) bad("n_samples_per_class", "must be at least 10");
    if (n_samples < 10) bad("n_samples", "must be at least 10");
    if (!(duration > 0.0) || !std::isfinite(duration)) bad("duration", "must be positive");
    if (window_k) {
        if (*window_k == 0) bad("window_k", "must be at least 1");
        if (n_samples % *window_k != 0) {
            bad("window_k", fmt::format("{} samples are not divisible into {} windows", n_samples, *window_k));
        }
    }
    if (features.empty()) bad("features", "must select at least one feature");

    const bool chain = is_vref_chain(experiment);
    if (chain != (circuit == Circuit::vref_blocks)) {
        bad("experiment", fmt::format("'{}' is not valid for circuit '{}'", to_string(experiment), to_string(circuit)));
    }
    if (is_component(experiment) && circuit != Circuit::vref_components && circuit != Circuit::opamp) {
        bad("experiment", fmt::format("'{}' needs a component-level circuit", to_string(experiment)));
    }
    if ((experiment == Experiment::kstage) != (circuit == Circuit::kstage)) {
        bad("experiment", "KStage experiments run on the kstage circuit only");
    }
    if (circuit == Circuit::kstage) {
        if (stages == 0) bad("stages", "must be at least 1");
        for (auto s : anomalous_stages) {
            if (s >= stages) bad("experiment", fmt::format("stage {} exceeds the {}-stage chain", s + 1, stages));
        }
        if (!(stage_gain >= 1.0)) bad("stage_gain", "must be at least 1");
    }
    if (experiment == Experiment::par_fault ||
        (circuit == Circuit::kstage && kstage_fault == FaultKind::parametric)) {
        if (fault_temperature >= kLegalTempLow && fault_temperature <= kLegalTempHigh) {
            bad("fault.temperature", "a parametric fault must lie outside [-40, 125] °C");
        }
    }
    if (circuit == Circuit::kstage && analysis != AnalysisKind::transient) {
        bad("analysis", "kstage circuits support transient analysis only");
    }

    const auto names = circuit_signals(circuit);
    const auto observed = resolved_signals();
    for (const auto& s : observed) {
        if (std::find(names.begin(), names.end(), s) == names.end()) {
            bad("observed_signals", fmt::format("'{}' is not a signal of circuit '{}'", s, to_string(circuit)));
        }
    }
    for (std::size_t i = 0; i < observed.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (observed[i] == observed[j]) bad("observed_signals", fmt::format("'{}' listed twice", observed[i]));
        }
    }

    if (rates_pct.empty()) bad("anomaly.rates_pct", "must list at least one rate");
    for (double r : rates_pct) {
        if (!(r > 0.0 && r <= 100.0)) bad("anomaly.rates_pct", "rates must lie in (0, 100]");
    }
    if (!(amp_low > 0.0) || !(amp_high >= amp_low)) bad("anomaly.amp_low", "need 0 < amp_low <= amp_high");
    for (double t : resolved_thresholds()) {
        if (!(t >= 0.0 && t <= 1.0)) bad("anomaly.thresholds", "thresholds must lie in [0, 1]");
    }
    for (double d : resolved_deltas()) {
        if (!(d >= 0.0) || !std::isfinite(d)) bad("anomaly.deltas", "deltas must be non-negative");
    }
    if (!(stimulus_amplitude >= 0.0)) bad("stimulus.amplitude", "must be non-negative");
    if (!(gain_rel_std >= 0.0 && gain_rel_std < 0.5)) bad("variation.gain_rel_std", "must lie in [0, 0.5)");
    if (!(offset_std >= 0.0)) bad("variation.offset_std", "must be non-negative");
    if (!(noise_std >= 0.0)) bad("noise_std", "must be non-negative");
    if (!(observation_offset_std >= 0.0)) bad("observation_offset_std", "must be non-negative");
    try {
        vref.validate();
    } catch (const Error& e) {
        bad("vref." + e.key(), e.what());
    }
    if (kmeans.max_iter == 0) bad("kmeans.max_iter", "must be positive");
    if (!(kmeans.tol >= 0.0)) bad("kmeans.tol", "must be non-negative");
    if (gmm.max_iter == 0) bad("gmm.max_iter", "must be positive");
    if (!(gmm.tol >= 0.0)) bad("gmm.tol", "must be non-negative");
    if (!(gmm.variance_floor > 0.0)) bad("gmm.variance_floor", "must be positive");
    if (!(birch.threshold > 0.0)) bad("birch.threshold", "must be positive");
    if (birch.branching < 2) bad("birch.branching", "must be at least 2");
    if (!(spectral.sigma >= 0.0)) bad("spectral.sigma", "must be non-negative (0 = median distance)");
}

void apply_config_yaml(ExperimentConfig& config, const std::string& yaml_text) {
    apply_node(config, load_yaml(yaml_text));
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorKind::config, fmt::format("override '{}' must look like key=value", assignment), "set");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string value(assignment.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) bad(key, "unknown configuration key");
    it->second(config, load_yaml(value), key);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    ExperimentConfig config;
    apply_config_yaml(config, read_file(path));
    return config;
}

std::vector<ExperimentConfig> parse_suite(const std::string& yaml_text, const std::vector<std::string>& overrides) {
    const YAML::Node root = load_yaml(yaml_text);
    std::vector<ExperimentConfig> out;
    if (!root || root.IsNull()) return out;
    if (!root.IsMap()) throw Error(ErrorKind::config, "suite must be a mapping", "suite");
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (key != "defaults" && key != "experiments") bad(key, "unknown suite key");
    }
    const YAML::Node defaults = root["defaults"];
    const YAML::Node entries = root["experiments"];
    if (!entries || entries.IsNull()) return out;
    if (!entries.IsSequence()) bad("experiments", "must be a list");

    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        YAML::Node entry = YAML::Clone(entries[idx]);
        if (!entry.IsMap()) bad(fmt::format("experiments[{}]", idx), "must be a mapping");
        std::vector<std::string> algorithms;
        std::vector<bool> selections;
        if (entry["algorithms"]) {
            algorithms = string_list(entry["algorithms"], "algorithms");
            entry.remove("algorithms");
        }
        if (entry["centroid_select"] && entry["centroid_select"].IsSequence()) {
            for (const auto& v : entry["centroid_select"]) selections.push_back(scalar<bool>(v, "centroid_select"));
            entry.remove("centroid_select");
        }
        ExperimentConfig base;
        apply_node(base, defaults);
        apply_node(base, entry);
        for (const auto& o : overrides) apply_override(base, o);

        if (algorithms.empty()) algorithms.emplace_back(to_string(base.algorithm));
        if (selections.empty()) selections.push_back(base.centroid_select);
        for (const auto& a : algorithms) {
            for (bool sel : selections) {
                ExperimentConfig c = base;
                apply_override(c, "algorithm=" + a);
                c.centroid_select = sel;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> load_suite(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    return parse_suite(read_file(path), overrides);
}

}  // namespace amsad
