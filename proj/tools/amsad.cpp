// amsad: command-line front end for simulation, injection, featurization,
// clustering, centroid selection, windowed detection and experiment runs.

#include "amsad/bench.hpp"
#include "amsad/centroid.hpp"
#include "amsad/csv.hpp"
#include "amsad/earlydetect.hpp"
#include "amsad/error.hpp"
#include "amsad/features.hpp"
#include "amsad/inject.hpp"
#include "amsad/model_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace fs = std::filesystem;
using namespace amsad;

namespace {

// Thrown for bad flag combinations that CLI11 cannot express; exit code 1.
struct UsageError : std::runtime_error {
    std::string key;
    UsageError(const std::string& msg, std::string k) : std::runtime_error(msg), key(std::move(k)) {}
};

struct Global {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string config;
    std::vector<std::string> sets;
};

void add_global(CLI::App* sub, Global& g) {
    sub->add_option("--seed", g.seed, "Master RNG seed [integer]; overrides the config seed")->group("Global");
    sub->add_option("--out", g.out, "Output path [file or directory, see subcommand]")->group("Global");
    sub->add_option("--config", g.config, "Experiment config [YAML file]")->group("Global");
    sub->add_option("--set", g.sets, "Config override [key=value], repeatable; applied after --config")
        ->group("Global");
}

ExperimentConfig base_config(const Global& g) {
    ExperimentConfig c;
    if (!g.config.empty()) c = load_experiment_config(g.config);
    for (const auto& s : g.sets) apply_override(c, s);
    if (g.seed) c.seed = *g.seed;
    return c;
}

fs::path require_out(const Global& g) {
    if (g.out.empty()) throw UsageError("--out is required", "out");
    return g.out;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
    ensure_parent(p);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, fmt::format("cannot write {}", p.string()), "out");
    f << text;
    if (!f) throw Error(ErrorKind::io, fmt::format("write failed for {}", p.string()), "out");
}

// Windows stored in a dataset: max window_index + 1, or none when every row is window 0
// and each sample appears once.
std::optional<std::size_t> infer_windows(const std::vector<FeatureRow>& rows) {
    std::size_t k = 0;
    for (const auto& r : rows) k = std::max(k, r.window_index + 1);
    if (k > 1) return k;
    return std::nullopt;
}

Matrix normalized_matrix(const std::vector<FeatureRow>& rows, const NormalizationParams& params) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.values.size() != params.dims()) {
            throw Error(ErrorKind::input,
                        fmt::format("row {} has {} features, model expects {}", r.sample_id, r.values.size(),
                                    params.dims()),
                        "input");
        }
        out.push_back(params.apply(r.values));
    }
    return Matrix::from_rows(out);
}

bool has_both_labels(const std::vector<FeatureRow>& rows) {
    bool normal = false, anomalous = false;
    for (const auto& r : rows) (r.label == Label::anomalous ? anomalous : normal) = true;
    return normal && anomalous;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
    std::string circuit;
    std::string experiment;
    std::optional<std::size_t> samples;
    std::optional<double> duration;
    bool anomalous = false;
};

void run_simulate(const Global& g, const SimulateArgs& a) {
    ExperimentConfig c = base_config(g);
    if (!a.circuit.empty()) {
        apply_override(c, "circuit=" + a.circuit);
        if (a.experiment.empty()) {
            if (c.circuit == Circuit::kstage) apply_override(c, "experiment=KStage");
            else if (c.circuit != Circuit::vref_blocks) apply_override(c, "experiment=OmBoth");
        }
    }
    if (!a.experiment.empty()) apply_override(c, "experiment=" + a.experiment);
    if (a.samples) c.n_samples = *a.samples;
    if (a.duration) c.duration = *a.duration;
    c.observed_signals = circuit_signals(c.circuit);
    c.validate();

    const fs::path dir = require_out(g);
    fs::create_directories(dir);
    for (const auto& w : simulate_sample(c, c.seed, a.anomalous)) {
        const fs::path p = dir / (w.name() + ".csv");
        write_waveform_csv(w, p);
        std::cout << p.string() << '\n';
    }
}

// inject ---------------------------------------------------------------------

struct InjectArgs {
    std::string input;
    std::string kind = "random";
    double rate = 0.5;
    double amp_low = 2.0;
    double amp_high = 5.0;
    double threshold = 0.9;
    double delta = 1.0;
    std::string record;
};

void run_inject(const Global& g, const InjectArgs& a) {
    const fs::path out = require_out(g);
    const Waveform w = read_waveform_csv(a.input);
    AnomalySpec spec;
    spec.seed = g.seed.value_or(1);
    if (a.kind == "random") spec.kind = PointRandom{a.rate, a.amp_low, a.amp_high};
    else spec.kind = PointPeriodic{a.threshold, a.delta};
    const auto [injected, record] = inject(w, spec);
    ensure_parent(out);
    write_waveform_csv(injected, out);
    if (!a.record.empty()) {
        ensure_parent(a.record);
        write_injection_csv(record, a.record);
    }
    std::cout << fmt::format("injected {} samples into {}\n", record.size(), out.string());
}

// featurize ------------------------------------------------------------------

struct FeaturizeArgs {
    std::vector<std::string> inputs;
    std::string features;
    std::optional<std::size_t> windows;
    std::string label = "normal";
};

void run_featurize(const Global& g, const FeaturizeArgs& a) {
    const fs::path out = require_out(g);
    std::vector<FeatureRow> rows;
    if (a.inputs.empty()) {
        ExperimentConfig c = base_config(g);
        if (!a.features.empty()) c.features = FeatureSelection::parse(a.features);
        if (a.windows) c.window_k = *a.windows;
        rows = generate_dataset(c);
    } else {
        const FeatureSelection sel = a.features.empty() ? FeatureSelection::all() : FeatureSelection::parse(a.features);
        const Label label = a.label == "anomalous" ? Label::anomalous : Label::normal;
        for (const auto& in : a.inputs) {
            const Waveform w = read_waveform_csv(in);
            const std::string id = fs::path(in).stem().string();
            if (a.windows) {
                const auto win = windowed_features(w, *a.windows, sel);
                for (std::size_t i = 0; i < win.size(); ++i) rows.push_back(FeatureRow{win[i], i, label, id});
            } else {
                rows.push_back(FeatureRow{extract_features(w, sel), 0, label, id});
            }
        }
    }
    ensure_parent(out);
    write_dataset_csv(rows, out);
    std::cout << fmt::format("{} rows written to {}\n", rows.size(), out.string());
}

// fit ------------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string algorithm;
    bool centroid_select = false;
    std::string interval_sigma;
    std::string anomalous_cluster = "auto";
    std::string features;
};

void run_fit(const Global& g, const FitArgs& a) {
    const fs::path out = require_out(g);
    ExperimentConfig c = base_config(g);
    if (!a.algorithm.empty()) apply_override(c, "algorithm=" + a.algorithm);
    if (a.centroid_select) c.centroid_select = true;
    if (!a.interval_sigma.empty()) apply_override(c, "interval_sigma=" + a.interval_sigma);
    if (!a.features.empty()) c.features = FeatureSelection::parse(a.features);

    const auto rows = read_dataset_csv(a.input);
    const auto [normalized, params] = normalize_dataset(rows);
    if (params.dims() % c.features.size() != 0) {
        throw Error(ErrorKind::config,
                    fmt::format("dataset has {} columns, not a multiple of the {} selected features", params.dims(),
                                c.features.size()),
                    "features");
    }
    const Matrix x = Matrix::from_feature_rows(normalized);
    ClusterModel model = fit(x, fit_options(c));
    if (c.centroid_select) model = apply_centroid_selection(model, x, CentroidOptions{c.interval_sigma});

    const auto window_k = infer_windows(rows);
    const auto assignments = assign_all(model, x);
    std::optional<ScoredUnit> scored;
    if (has_both_labels(rows)) scored = score_rows(normalized, assignments, window_k);

    if (a.anomalous_cluster == "auto") model.anomalous_cluster = scored ? scored->anomalous_cluster : 1;
    else model.anomalous_cluster = a.anomalous_cluster == "0" ? 0 : 1;

    save_model(ModelFile{model, params, c.features, window_k}, out);
    std::cout << fmt::format("algorithm {}  rows {}  dims {}  iterations {}  anomalous cluster {}\n",
                             to_string(model.algorithm), x.rows(), x.cols(), model.trace.iterations,
                             model.anomalous_cluster);
    if (scored) std::cout << fmt::format("training accuracy {:.2f} %\n", scored->accuracy_pct);
}

// select-centroids -------------------------------------------------------------

struct SelectArgs {
    std::string input;
    std::string model;
    std::string interval_sigma = "global";
    std::string model_out;
};

std::string members_field(const std::vector<std::size_t>& idx) {
    std::string s;
    for (auto i : idx) s += (s.empty() ? "" : ";") + std::to_string(i);
    return s;
}

void run_select_centroids(const Global& g, const SelectArgs& a) {
    const fs::path out = require_out(g);
    const ModelFile base = load_model(a.model);
    const auto rows = read_dataset_csv(a.input);
    const Matrix x = normalized_matrix(rows, base.normalization);
    const CentroidOptions opts{a.interval_sigma == "cluster" ? IntervalSigma::cluster : IntervalSigma::global};
    const auto traces = trace_centroid_selection(x, centroid_inputs(base.model), opts);

    std::string text =
        "dim,mu,sigma,flipped,var_low_1,var_low_2,var_low_3,var_low_4,var_high_1,var_high_2,var_high_3,var_high_4,"
        "low_from,low_to,high_from,high_to,m_low,m_high,low,high,low_fallback,high_fallback,low_members,high_members\n";
    for (std::size_t d = 0; d < traces.size(); ++d) {
        const auto& t = traces[d];
        text += fmt::format("{},{},{},{}", d, csv::number(t.mu), csv::number(t.sigma), t.flipped ? 1 : 0);
        for (double v : t.var_low) text += "," + csv::number(v);
        for (double v : t.var_high) text += "," + csv::number(v);
        text += fmt::format(",{},{},{},{},{},{},{},{},{},{},{},{}\n", csv::number(t.low_from), csv::number(t.low_to),
                            csv::number(t.high_from), csv::number(t.high_to), t.pair.m_low, t.pair.m_high,
                            csv::number(t.pair.low), csv::number(t.pair.high), t.pair.low_fallback ? 1 : 0,
                            t.pair.high_fallback ? 1 : 0, members_field(t.low_members),
                            members_field(t.high_members));
    }
    write_text(out, text);

    if (!a.model_out.empty()) {
        std::vector<CentroidPair> pairs;
        for (const auto& t : traces) pairs.push_back(t.pair);
        ModelFile refit = base;
        refit.model = refit_with_centroids(x, pairs);
        refit.model.anomalous_cluster = base.model.anomalous_cluster;
        save_model(refit, a.model_out);
    }
    std::size_t fallbacks = 0;
    for (const auto& t : traces) fallbacks += (t.pair.low_fallback ? 1 : 0) + (t.pair.high_fallback ? 1 : 0);
    std::cout << fmt::format("{} dimensions, {} fallback sides\n", traces.size(), fallbacks);
}

// detect ---------------------------------------------------------------------

struct DetectArgs {
    std::string model;
    std::vector<std::string> inputs;
    std::optional<std::size_t> windows;
    bool early_stop = false;
};

void run_detect(const Global& g, const DetectArgs& a) {
    const fs::path out = require_out(g);
    const ModelFile mf = load_model(a.model);
    if (mf.model.dims != mf.features.size()) {
        throw Error(ErrorKind::input,
                    fmt::format("model has {} dimensions but detection uses one signal with {} features",
                                mf.model.dims, mf.features.size()),
                    "model");
    }
    const std::size_t k = a.windows.value_or(mf.window_k.value_or(1));
    std::vector<DetectionResult> results;
    for (const auto& in : a.inputs) {
        const Waveform w = read_waveform_csv(in);
        const WindowGeometry geom{w.size(), k, w.sample_period()};
        geom.validate();
        auto windows = windowed_features(w, k, mf.features);
        for (auto& row : windows) row = mf.normalization.apply(row);
        DetectionResult r = detect_windowed(mf.model, windows, geom, a.early_stop);
        r.sample_id = fs::path(in).stem().string();
        results.push_back(std::move(r));
    }
    ensure_parent(out);
    write_detection_csv(results, out);
    const auto s = latency_report(results);
    std::cout << fmt::format("signals {}  detected {:.1f} %  mean latency {} s  mean speedup {:.3f}\n", s.count,
                             100.0 * s.detection_rate, csv::number(s.mean_latency_seconds), s.mean_speedup);
}

// experiment / suite / report ----------------------------------------------------

struct ExperimentArgs {
    std::string algorithm;
    bool centroid_select = false;
    std::string dataset;
    std::string table;
};

void emit_table(const std::vector<UnitResult>& units, const std::string& table_path) {
    const std::string table = format_report_table(units);
    std::cout << table;
    if (!table_path.empty()) write_text(table_path, table);
}

std::vector<UnitResult> flatten(const std::vector<EvaluationReport>& reports) {
    std::vector<UnitResult> units;
    for (const auto& r : reports) units.insert(units.end(), r.units.begin(), r.units.end());
    return units;
}

void run_experiment(const Global& g, const ExperimentArgs& a) {
    const fs::path out = require_out(g);
    ExperimentConfig c = base_config(g);
    if (!a.algorithm.empty()) apply_override(c, "algorithm=" + a.algorithm);
    if (a.centroid_select) c.centroid_select = true;
    c.validate();
    const SignalSet set = generate_signals(c);
    if (!a.dataset.empty()) {
        ensure_parent(a.dataset);
        write_dataset_csv(featurize(set, set.names, c.features, c.window_k), a.dataset);
    }
    const std::vector<EvaluationReport> reports{evaluate(c, set)};
    ensure_parent(out);
    write_report_csv(reports, out);
    emit_table(flatten(reports), a.table);
}

struct SuiteArgs {
    std::string suite;
    std::string table;
};

void run_suite_cmd(const Global& g, const SuiteArgs& a) {
    const fs::path out = require_out(g);
    const std::string path = !a.suite.empty() ? a.suite : g.config;
    if (path.empty()) throw UsageError("--suite is required", "suite");
    auto overrides = g.sets;
    if (g.seed) overrides.push_back(fmt::format("seed={}", *g.seed));
    const auto configs = load_suite(path, overrides);
    const auto reports = run_suite(configs);
    ensure_parent(out);
    write_report_csv(reports, out);
    emit_table(flatten(reports), a.table);
}

void run_report(const Global& g, const std::string& input) {
    const auto units = read_report_csv(input);
    const std::string table = format_report_table(units);
    std::cout << table;
    if (!g.out.empty()) write_text(g.out, table);
}

void print_error(std::string_view kind, std::string_view key, std::string_view message) {
    nlohmann::json j;
    j["error"] = kind;
    j["key"] = key;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised anomaly detection for analog and mixed-signal circuit waveforms"};
    app.require_subcommand(1);
    app.get_formatter()->column_width(44);

    std::vector<Global> globals(9);
    std::function<void()> action;

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate one signal per circuit node and write waveform CSVs");
    add_global(s, globals[0]);
    s->add_option("--circuit", sim.circuit, "Circuit [vref_blocks|vref_components|opamp|kstage(K)]");
    s->add_option("--experiment", sim.experiment, "Experiment code [IA, PA, ..., OmBoth, KStage(1,3)]");
    s->add_option("--samples", sim.samples, "Samples per signal [count]")->check(CLI::PositiveNumber);
    s->add_option("--duration", sim.duration, "Signal duration [s]")->check(CLI::PositiveNumber);
    s->add_flag("--anomalous", sim.anomalous, "Apply the experiment's injection or fault [flag]");
    s->callback([&] { action = [&] { run_simulate(globals[0], sim); }; });
    s->footer("--out names a directory; one <signal>.csv is written per node.");

    InjectArgs inj;
    auto* i = app.add_subcommand("inject", "Inject point anomalies into a waveform CSV");
    add_global(i, globals[1]);
    i->add_option("--input", inj.input, "Clean waveform [CSV t,value]")->required()->check(CLI::ExistingFile);
    i->add_option("--kind", inj.kind, "Anomaly kind [random|periodic]")
        ->check(CLI::IsMember({"random", "periodic"}));
    i->add_option("--rate", inj.rate, "Random anomaly rate [% of samples]")->check(CLI::Range(0.0, 100.0));
    i->add_option("--amp-low", inj.amp_low, "Lowest random magnitude [x max|w|]");
    i->add_option("--amp-high", inj.amp_high, "Highest random magnitude [x max|w|]");
    i->add_option("--threshold", inj.threshold, "Periodic threshold [fraction of max(w)]");
    i->add_option("--delta", inj.delta, "Periodic increment [fraction of max(w)]");
    i->add_option("--record", inj.record, "Injection record [CSV position,original,injected]");
    i->footer("--out names the injected waveform CSV. --seed drives the random positions.");
    i->callback([&] { action = [&] { run_inject(globals[1], inj); }; });

    FeaturizeArgs feat;
    auto* f = app.add_subcommand("featurize", "Extract feature rows from waveforms or a generated experiment set");
    add_global(f, globals[2]);
    f->add_option("--input", feat.inputs, "Waveforms [CSV t,value], repeatable; omit to generate from --config")
        ->check(CLI::ExistingFile);
    f->add_option("--features", feat.features, "Features [comma list of mean,variance,slope]");
    f->add_option("--windows", feat.windows, "Windows per signal [count, must divide the sample count]")
        ->check(CLI::PositiveNumber);
    f->add_option("--label", feat.label, "Label written for --input rows [normal|anomalous]")
        ->check(CLI::IsMember({"normal", "anomalous"}));
    f->footer("--out names the dataset CSV (sample_id,label,window_index,f1..fD).");
    f->callback([&] { action = [&] { run_featurize(globals[2], feat); }; });

    FitArgs fit_args;
    auto* ft = app.add_subcommand("fit", "Fit a two-cluster model on a dataset CSV");
    add_global(ft, globals[3]);
    ft->add_option("--input", fit_args.input, "Dataset [CSV]")->required()->check(CLI::ExistingFile);
    ft->add_option("--algorithm", fit_args.algorithm, "Algorithm [kmeans|gmm|birch|spectral]");
    ft->add_flag("--centroid-select", fit_args.centroid_select, "Refit on selected centroids [flag]");
    ft->add_option("--interval-sigma", fit_args.interval_sigma, "Centroid interval spread [global|cluster]")
        ->check(CLI::IsMember({"global", "cluster"}));
    ft->add_option("--anomalous-cluster", fit_args.anomalous_cluster,
                   "Cluster reported as anomalous [0|1|auto]; auto uses dataset labels when both are present")
        ->check(CLI::IsMember({"0", "1", "auto"}));
    ft->add_option("--features", fit_args.features, "Features the dataset columns hold [comma list]");
    ft->footer("--out names the model JSON. Columns are min-max normalized before fitting.");
    ft->callback([&] { action = [&] { run_fit(globals[3], fit_args); }; });

    SelectArgs sel;
    auto* sc = app.add_subcommand("select-centroids", "Trace centroid selection for a fitted model");
    add_global(sc, globals[4]);
    sc->add_option("--input", sel.input, "Dataset [CSV]")->required()->check(CLI::ExistingFile);
    sc->add_option("--model", sel.model, "Base model [JSON]")->required()->check(CLI::ExistingFile);
    sc->add_option("--interval-sigma", sel.interval_sigma, "Interval spread [global|cluster]")
        ->check(CLI::IsMember({"global", "cluster"}));
    sc->add_option("--model-out", sel.model_out, "Refit nearest-centroid model [JSON]");
    sc->footer("--out names the trace CSV, one row per feature dimension.");
    sc->callback([&] { action = [&] { run_select_centroids(globals[4], sel); }; });

    DetectArgs det;
    auto* d = app.add_subcommand("detect", "Windowed detection of waveforms with a fitted model");
    add_global(d, globals[5]);
    d->add_option("--model", det.model, "Model [JSON]")->required()->check(CLI::ExistingFile);
    d->add_option("--input", det.inputs, "Waveforms [CSV t,value], repeatable")->required()->check(CLI::ExistingFile);
    d->add_option("--windows", det.windows, "Windows per signal [count]; default from the model")
        ->check(CLI::PositiveNumber);
    d->add_flag("--early-stop", det.early_stop, "Stop at the first anomalous window [flag]");
    d->footer("--out names the detection CSV (sample_id,first_window,m,latency_s,speedup).");
    d->callback([&] { action = [&] { run_detect(globals[5], det); }; });

    ExperimentArgs ex;
    auto* e = app.add_subcommand("experiment", "Generate, fit and score one experiment config");
    add_global(e, globals[6]);
    e->add_option("--algorithm", ex.algorithm, "Algorithm [kmeans|gmm|birch|spectral]");
    e->add_flag("--centroid-select", ex.centroid_select, "Refit on selected centroids [flag]");
    e->add_option("--dataset", ex.dataset, "Also write the generated dataset [CSV]");
    e->add_option("--table", ex.table, "Also write the summary table [text file]");
    e->footer("--out names the report CSV.");
    e->callback([&] { action = [&] { run_experiment(globals[6], ex); }; });

    SuiteArgs su;
    auto* st = app.add_subcommand("suite", "Run every config of a suite file");
    add_global(st, globals[7]);
    st->add_option("--suite", su.suite, "Suite [YAML with defaults and experiments]")->check(CLI::ExistingFile);
    st->add_option("--table", su.table, "Also write the summary table [text file]");
    st->footer("--out names the report CSV. --seed and --set apply to every entry.");
    st->callback([&] { action = [&] { run_suite_cmd(globals[7], su); }; });

    std::string report_input;
    auto* r = app.add_subcommand("report", "Format a report CSV as a table grouped by experiment family");
    add_global(r, globals[8]);
    r->add_option("--input", report_input, "Report [CSV]")->required()->check(CLI::ExistingFile);
    r->footer("--out optionally names a text file for the table.");
    r->callback([&] { action = [&] { run_report(globals[8], report_input); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);
        print_error("usage", "", err.what());
        std::cerr << app.help();
        return 1;
    }

    try {
        action();
    } catch (const UsageError& err) {
        print_error("usage", err.key, err.what());
        return 1;
    } catch (const Error& err) {
        print_error(to_string(err.kind()), err.key(), err.what());
        return err.kind() == ErrorKind::config ? 1 : 2;
    } catch (const std::exception& err) {
        print_error("runtime", "", err.what());
        return 2;
    }
    return 0;
}
