#include "amsad/bench.hpp"
#include "amsad/model_io.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace amsad;
using fixtures::error_kind;
using fixtures::error_key;

namespace {

ExperimentConfig small(std::string_view experiment) {
    ExperimentConfig c;
    apply_override(c, std::string("experiment=") + std::string(experiment));
    c.n_samples_per_class = 10;
    c.n_samples = 300;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("permutation accuracy") {
    const std::vector<Label> labels{Label::normal, Label::normal, Label::anomalous, Label::anomalous};
    CHECK(permutation_accuracy(labels, std::vector<int>{1, 1, 0, 0}) == 100.0);
    CHECK(permutation_accuracy(labels, std::vector<int>{0, 0, 0, 0}) == 50.0);
    CHECK(permutation_accuracy(labels, std::vector<int>{0, 1, 0, 0}) == 75.0);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> a(4);
        for (auto& v : a) v = static_cast<int>(rng() & 1);
        CHECK(permutation_accuracy(labels, a) >= 50.0);
    }
}

TEST_CASE("config validation names the failing key") {
    ExperimentConfig c;
    c.n_samples_per_class = 5;
    CHECK(error_key([&] { c.validate(); }) == "n_samples_per_class");
    ExperimentConfig open;
    apply_override(open, "experiment=Open");
    CHECK(error_key([&] { open.validate(); }) == "experiment");
    apply_override(open, "circuit=opamp");
    CHECK_NOTHROW(open.validate());
    ExperimentConfig k;
    CHECK(error_key([&] { apply_override(k, "gmm.tol=abc"); }) == "gmm.tol");
    CHECK(error_key([&] { apply_override(k, "no_such_key=1"); }) == "no_such_key");
    CHECK(error_kind([&] { apply_override(k, "nonsense"); }) == ErrorKind::config);
}

TEST_CASE("yaml config with nested keys") {
    ExperimentConfig c;
    apply_config_yaml(c, "circuit: kstage(3)\nexperiment: KStage(1,3)\ngmm:\n  max_iter: 50\nvref:\n  noise_std: 0.02\n");
    CHECK(c.circuit == Circuit::kstage);
    CHECK(c.stages == 3);
    CHECK(c.experiment == Experiment::kstage);
    CHECK(c.anomalous_stages == std::set<std::size_t>{0, 2});
    CHECK(c.gmm.max_iter == 50);
    CHECK(c.vref.noise_std == 0.02);
    CHECK(c.label() == "KStage(1,3)");
    CHECK_NOTHROW(c.validate());
    CHECK(error_kind([&] { apply_config_yaml(c, "experiment: [unclosed"); }) == ErrorKind::config);
}

TEST_CASE("experiment defaults") {
    ExperimentConfig ia;
    CHECK(ia.resolved_signals() == std::vector<std::string>{"pll_intensity"});
    CHECK(ia.resolved_anomaly_type() == AnomalyType::random);
    CHECK(ia.locations() == std::vector<BlockLocation>{BlockLocation::input_a});
    const auto ippa = small("IPPA");
    CHECK(ippa.resolved_anomaly_type() == AnomalyType::periodic);
    CHECK(ippa.resolved_thresholds() == std::vector<double>{0.1, 0.9});
    CHECK(ippa.resolved_deltas() == std::vector<double>{0.05, 0.10});
    CHECK(ippa.locations() == std::vector<BlockLocation>{BlockLocation::input_a, BlockLocation::pll_b});
    CHECK(small("IPTRA").locations().size() == 3);
}

TEST_CASE("dataset is balanced and windowed") {
    auto c = small("PA");
    c.window_k = 5;
    const auto rows = generate_dataset(c);
    CHECK(rows.size() == 20 * 5);
    const auto anomalous = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.label == Label::anomalous; });
    CHECK(anomalous == 50);
    CHECK(rows[0].values.size() == 3);
    c.window_k.reset();
    CHECK(generate_dataset(c).size() == 20);
}

TEST_CASE("dataset bytes are reproducible") {
    const auto c = small("TA");
    const auto dir = std::filesystem::temp_directory_path();
    write_dataset_csv(generate_dataset(c), dir / "amsad_det_a.csv");
    write_dataset_csv(generate_dataset(c), dir / "amsad_det_b.csv");
    CHECK(slurp(dir / "amsad_det_a.csv") == slurp(dir / "amsad_det_b.csv"));
    auto other = c;
    other.seed = 2;
    write_dataset_csv(generate_dataset(other), dir / "amsad_det_b.csv");
    CHECK(slurp(dir / "amsad_det_a.csv") != slurp(dir / "amsad_det_b.csv"));
}

TEST_CASE("labels never reach the fit") {
    auto rows = normalize_dataset(generate_dataset(small("PA"))).first;
    const Matrix x = Matrix::from_feature_rows(rows);
    std::mt19937_64 rng(5);
    std::shuffle(rows.begin(), rows.end(), rng);  // label order scrambled, values kept in place
    auto relabeled = normalize_dataset(generate_dataset(small("PA"))).first;
    for (std::size_t i = 0; i < relabeled.size(); ++i) relabeled[i].label = rows[i].label;
    const Matrix y = Matrix::from_feature_rows(relabeled);
    CHECK(x == y);
    const auto a = fit(x, fit_options(small("PA")));
    const auto b = fit(y, fit_options(small("PA")));
    CHECK(std::get<GmmState>(a.state).means == std::get<GmmState>(b.state).means);
}

TEST_CASE("component faults separate on the dc sweep mean") {
    for (const char* e : {"OmPfet", "OmNfet", "OmBoth"}) {
        auto c = small(e);
        apply_override(c, "circuit=opamp");
        apply_override(c, "analysis=dc_input");
        c.features = FeatureSelection::parse("mean");
        const auto rep = evaluate(c);
        REQUIRE(rep.units.size() == 1);
        CHECK(rep.units[0].error.empty());
        CHECK(rep.units[0].accuracy_pct == 100.0);
    }
}

TEST_CASE("evaluation units and confusion totals") {
    auto c = small("PA");
    c.observed_signals = {"trig", "output"};
    c.multisignal = true;
    const auto rep = evaluate(c);
    CHECK(rep.units.size() == 3 * 4);
    for (const auto& u : rep.units) {
        CHECK(u.error.empty());
        CHECK(u.confusion.total() == 20);
        CHECK(u.accuracy_pct >= 50.0);
        CHECK(u.accuracy_pct <= 100.0);
    }
    CHECK(rep.units.back().signals == "trig+output");
    CHECK(rep.units.back().features == "agg");
}

TEST_CASE("suite expansion, failure isolation and reports") {
    const std::string yaml = R"(
defaults:
  n_samples_per_class: 10
  n_samples: 300
experiments:
  - experiment: PA
    algorithms: [kmeans, gmm]
    centroid_select: [false, true]
    per_feature: false
  - experiment: Open
)";
    const auto configs = parse_suite(yaml);
    REQUIRE(configs.size() == 5);
    CHECK(configs[1].algorithm == Algorithm::kmeans);
    CHECK(configs[1].centroid_select);
    const auto reports = run_suite(configs);
    REQUIRE(reports.size() == 5);
    CHECK(reports[4].units[0].error.find("experiment") != std::string::npos);
    const auto csv = report_csv(reports);
    CHECK(csv.rfind(std::string(kReportHeader), 0) == 0);
    CHECK(csv == report_csv(run_suite(parse_suite(yaml))));

    const auto path = std::filesystem::temp_directory_path() / "amsad_report.csv";
    write_report_csv(reports, path);
    const auto back = read_report_csv(path);
    CHECK(back.size() == 5);
    CHECK(back[0].family == "single");
    CHECK(back[4].error.size() > 0);
    const auto table = format_report_table(back);
    CHECK(table.find("PA") != std::string::npos);
    CHECK(parse_suite("").empty());
    CHECK(run_suite({}).empty());
    CHECK(error_key([] { parse_suite("experiments:\n  - bogus: 1\n"); }) == "bogus");
}

TEST_CASE("model json round-trip for every algorithm") {
    const auto f = fixtures::canonical_blobs();
    std::vector<ClusterModel> models{fit_kmeans(f.x), fit_gmm(f.x), fit_birch(f.x), fit_spectral(f.x)};
    models.push_back(apply_centroid_selection(models[1], f.x));
    for (const auto& m : models) {
        ModelFile mf{m, NormalizationParams({0.0, -1.0}, {2.0, 3.0}), FeatureSelection::parse("mean,slope"), 5};
        const auto text = model_to_json(mf);
        const auto back = model_from_json(text);
        CHECK(model_to_json(back) == text);
        CHECK(back.normalization == mf.normalization);
        CHECK(back.features == mf.features);
        CHECK(back.window_k == mf.window_k);
        CHECK(assign_all(back.model, f.x) == assign_all(m, f.x));
    }
    CHECK(error_kind([] { model_from_json("{\"format\":\"amsad-model\",\"version\":99}"); }) == ErrorKind::input);
    CHECK(error_key([] { model_from_json("{\"format\":\"amsad-model\",\"version\":99}"); }) == "version");
    CHECK(error_kind([] { model_from_json("not json"); }) == ErrorKind::input);
}
