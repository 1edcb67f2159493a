#include "amsad/bench.hpp"

#include "amsad/csv.hpp"
#include "amsad/error.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace amsad {

namespace {

constexpr std::uint64_t kFitStream = 0xF17;

struct SampleVerdicts {
    Label label = Label::normal;
    std::vector<int> windows;  // assignment per window, in window order
};

std::vector<SampleVerdicts> group_by_sample(std::span<const FeatureRow> rows, std::span<const int> assignments) {
    if (rows.size() != assignments.size()) throw Error(ErrorKind::input, "assignment count differs from row count");
    std::vector<SampleVerdicts> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::pair<std::size_t, int>>> windows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [it, fresh] = index.emplace(rows[i].sample_id, out.size());
        if (fresh) {
            out.push_back(SampleVerdicts{rows[i].label, {}});
            windows.emplace_back();
        } else if (out[it->second].label != rows[i].label) {
            throw Error(ErrorKind::input, fmt::format("sample {} has conflicting labels", rows[i].sample_id));
        }
        windows[it->second].emplace_back(rows[i].window_index, assignments[i]);
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::sort(windows[s].begin(), windows[s].end());
        for (const auto& [w, a] : windows[s]) out[s].windows.push_back(a);
    }
    return out;
}

std::string circuit_label(const ExperimentConfig& c) {
    if (c.circuit == Circuit::kstage) return fmt::format("kstage({})", c.stages);
    return std::string(to_string(c.circuit));
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "+") + p;
    return out;
}

}  // namespace

FitOptions fit_options(const ExperimentConfig& c) {
    const std::uint64_t seed = derive_seed(c.seed, kFitStream);
    switch (c.algorithm) {
    case Algorithm::kmeans: {
        auto o = c.kmeans;
        o.seed = seed;
        return o;
    }
    case Algorithm::gmm: {
        auto o = c.gmm;
        o.seed = seed;
        return o;
    }
    case Algorithm::birch: return c.birch;
    case Algorithm::spectral: {
        auto o = c.spectral;
        o.seed = seed;
        return o;
    }
    case Algorithm::centroid: break;
    }
    throw Error(ErrorKind::config, "centroid is not a base algorithm", "algorithm");
}

double permutation_accuracy(std::span<const Label> labels, std::span<const int> assignments) {
    if (labels.size() != assignments.size()) throw Error(ErrorKind::input, "label and assignment counts differ");
    if (labels.empty()) throw Error(ErrorKind::input, "no labels to score");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (assignments[i] != 0 && assignments[i] != 1) throw Error(ErrorKind::input, "assignments must be 0 or 1");
        if (static_cast<int>(labels[i]) == assignments[i]) ++agree;
    }
    const std::size_t best = std::max(agree, labels.size() - agree);
    return 100.0 * static_cast<double>(best) / static_cast<double>(labels.size());
}

ScoredUnit score_rows(std::span<const FeatureRow> rows, std::span<const int> assignments,
                      std::optional<std::size_t> window_k) {
    const auto samples = group_by_sample(rows, assignments);
    if (samples.empty()) throw Error(ErrorKind::input, "no rows to score");
    const std::size_t k = window_k.value_or(1);
    for (const auto& s : samples) {
        if (s.windows.size() != k) throw Error(ErrorKind::window, "every sample needs one row per window", "window_k");
    }

    ScoredUnit best;
    bool have = false;
    // Try the anomalous label on cluster 1 first so ties keep the canonical mapping.
    for (int anomalous : {1, 0}) {
        ScoredUnit u;
        u.anomalous_cluster = anomalous;
        std::size_t n_anom = 0;
        double speedup_sum = 0.0;
        for (const auto& s : samples) {
            std::optional<std::size_t> first;
            for (std::size_t w = 0; w < s.windows.size(); ++w) {
                if (s.windows[w] == anomalous) {
                    first = w;
                    break;
                }
            }
            const bool flagged = first.has_value();
            if (s.label == Label::anomalous) {
                ++n_anom;
                flagged ? ++u.confusion.true_positive : ++u.confusion.false_negative;
                speedup_sum += flagged ? static_cast<double>(k) / static_cast<double>(*first + 1) : 1.0;
            } else {
                flagged ? ++u.confusion.false_positive : ++u.confusion.true_negative;
            }
        }
        const auto correct = u.confusion.true_positive + u.confusion.true_negative;
        u.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(samples.size());
        u.detect_rate = n_anom ? static_cast<double>(u.confusion.true_positive) / static_cast<double>(n_anom) : 0.0;
        u.mean_speedup = n_anom ? speedup_sum / static_cast<double>(n_anom) : 1.0;
        if (!have || u.accuracy_pct > best.accuracy_pct) {
            best = u;
            have = true;
        }
    }
    return best;
}

EvaluationReport evaluate(const ExperimentConfig& config) {
    config.validate();
    return evaluate(config, generate_signals(config));
}

EvaluationReport evaluate(const ExperimentConfig& config, const SignalSet& set) {
    config.validate();
    EvaluationReport report;
    report.config = config;

    std::vector<std::vector<std::string>> signal_units;
    for (const auto& s : set.names) signal_units.push_back({s});
    if (config.multisignal && set.names.size() > 1) signal_units.push_back(set.names);

    std::vector<FeatureSelection> feature_units;
    if (config.per_feature && config.features.size() > 1) {
        for (Feature f : config.features.features()) feature_units.emplace_back(std::vector<Feature>{f});
    }
    feature_units.push_back(config.features);

    const FitOptions options = fit_options(config);
    for (const auto& signals : signal_units) {
        for (const auto& features : feature_units) {
            UnitResult u;
            u.family = std::string(experiment_family(config.experiment));
            u.experiment = config.label();
            u.circuit = circuit_label(config);
            u.algorithm = std::string(to_string(config.algorithm));
            u.features = features.size() == FeatureSelection::all().size() ? "agg" : features.label();
            u.signals = join(signals);
            u.window_k = config.window_k.value_or(0);
            u.centroid_select = config.centroid_select;
            u.seed = config.seed;
            try {
                const auto rows = featurize(set, signals, features, config.window_k);
                const auto normalized = normalize_dataset(rows).first;
                const Matrix x = Matrix::from_feature_rows(normalized);
                ClusterModel model = fit(x, options);
                if (config.centroid_select) {
                    model = apply_centroid_selection(model, x, CentroidOptions{config.interval_sigma});
                    for (const auto& p : std::get<CentroidState>(model.state).pairs) {
                        u.centroid_fallbacks += (p.low_fallback ? 1 : 0) + (p.high_fallback ? 1 : 0);
                    }
                }
                const auto assignments = assign_all(model, x);
                const auto scored = score_rows(normalized, assignments, config.window_k);
                u.accuracy_pct = scored.accuracy_pct;
                u.confusion = scored.confusion;
                u.detect_rate = scored.detect_rate;
                u.mean_speedup = scored.mean_speedup;
                u.anomalous_cluster = scored.anomalous_cluster;
            } catch (const std::exception& e) {
                u.error = e.what();
            }
            report.units.push_back(std::move(u));
        }
    }
    return report;
}

std::vector<EvaluationReport> run_suite(const std::vector<ExperimentConfig>& configs) {
    std::vector<EvaluationReport> out(configs.size());
    const auto n = static_cast<std::ptrdiff_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            out[idx] = evaluate(configs[idx]);
        } catch (const std::exception& e) {
            const auto& c = configs[idx];
            UnitResult u;
            u.family = std::string(experiment_family(c.experiment));
            u.experiment = c.label();
            u.circuit = circuit_label(c);
            u.algorithm = std::string(to_string(c.algorithm));
            u.features = c.features.label();
            u.window_k = c.window_k.value_or(0);
            u.centroid_select = c.centroid_select;
            u.seed = c.seed;
            u.error = e.what();
            out[idx].config = c;
            out[idx].units.push_back(std::move(u));
        }
    }
    return out;
}

std::string report_csv(std::span<const EvaluationReport> reports) {
    std::string out(kReportHeader);
    out += '\n';
    for (const auto& r : reports) {
        for (const auto& u : r.units) {
            out += fmt::format("{},{},{},{},{},{},{},", u.experiment, u.circuit, u.algorithm, u.features, u.signals,
                               u.window_k, u.centroid_select ? 1 : 0);
            if (u.error.empty()) {
                out += fmt::format("{:.4f},{:.4f},{:.4f}", u.accuracy_pct, u.detect_rate, u.mean_speedup);
            } else {
                out += ",,";
            }
            out += fmt::format(",{}\n", u.seed);
        }
    }
    return out;
}

void write_report_csv(std::span<const EvaluationReport> reports, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << report_csv(reports);
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::vector<UnitResult> read_report_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const auto expected = csv::split(kReportHeader);
    if (t.header != expected) throw Error(ErrorKind::input, path.string() + ": unexpected report header");
    std::vector<UnitResult> out;
    for (const auto& f : t.rows) {
        UnitResult u;
        u.experiment = f[0];
        try {
            std::string code = f[0];
            if (const auto cut = code.find_first_of("-_ "); cut != std::string::npos) code.resize(cut);
            u.family = std::string(experiment_family(parse_experiment(code)));
        } catch (const Error&) {
            u.family = "other";
        }
        u.circuit = f[1];
        u.algorithm = f[2];
        u.features = f[3];
        u.signals = f[4];
        u.window_k = static_cast<std::size_t>(csv::parse_int(f[5], "windowed"));
        u.centroid_select = csv::parse_int(f[6], "centroid_select") != 0;
        if (f[7].empty()) {
            u.error = "failed";
        } else {
            u.accuracy_pct = csv::parse_double(f[7], "accuracy_pct");
            u.detect_rate = csv::parse_double(f[8], "detect_rate");
            u.mean_speedup = csv::parse_double(f[9], "mean_speedup");
        }
        u.seed = static_cast<std::uint64_t>(csv::parse_int(f[10], "seed"));
        out.push_back(std::move(u));
    }
    return out;
}

std::string format_report_table(std::span<const UnitResult> units) {
    static constexpr std::pair<std::string_view, std::string_view> kGroups[] = {
        {"single", "Single-block anomalies, VRef chain"},
        {"pll", "PLL-block anomalies, multipoint observation"},
        {"multi_periodic", "Multipoint periodic anomalies"},
        {"multi_random", "Multipoint random anomalies"},
        {"component", "Component-level faults"},
        {"kstage", "k-stage amplifier"},
        {"other", "Other"},
    };
    std::ostringstream os;
    for (const auto& [family, title] : kGroups) {
        bool any = false;
        for (const auto& u : units) {
            if (u.family != family) continue;
            if (!any) {
                os << title << '\n';
                os << fmt::format("  {:<14} {:<16} {:<9} {:<15} {:<32} {:>3} {:>3} {:>9} {:>7} {:>7}\n", "experiment",
                                  "circuit", "algorithm", "features", "signals", "win", "cs", "acc%", "detect",
                                  "speedup");
                any = true;
            }
            if (!u.error.empty()) {
                os << fmt::format("  {:<14} {:<16} {:<9} {:<15} {:<32} FAILED: {}\n", u.experiment, u.circuit,
                                  u.algorithm, u.features, u.signals, u.error);
                continue;
            }
            os << fmt::format("  {:<14} {:<16} {:<9} {:<15} {:<32} {:>3} {:>3} {:>9.2f} {:>7.3f} {:>7.3f}\n",
                              u.experiment, u.circuit, u.algorithm, u.features, u.signals, u.window_k,
                              u.centroid_select ? "yes" : "no", u.accuracy_pct, u.detect_rate, u.mean_speedup);
        }
        if (any) os << '\n';
    }
    return os.str();
}

}  // namespace amsad
