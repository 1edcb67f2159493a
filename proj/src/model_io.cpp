#include "amsad/model_io.hpp"

#include "amsad/error.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace amsad {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Matrix matrix_from(const json& j, const std::string& key) {
    if (!j.is_array()) throw Error(ErrorKind::input, key + " must be an array of rows", key);
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
    try {
        return Matrix::from_rows(rows);
    } catch (const Error&) {
        throw Error(ErrorKind::input, key + " rows differ in length", key);
    }
}

const json& field(const json& j, const std::string& key) {
    if (!j.contains(key)) throw Error(ErrorKind::input, fmt::format("model file lacks '{}'", key), key);
    return j.at(key);
}

json state_json(const ModelState& state) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, KMeansState>) {
                return {{"centroids", matrix_json(s.centroids)}};
            } else if constexpr (std::is_same_v<T, GmmState>) {
                return {{"weights", s.weights}, {"means", matrix_json(s.means)}, {"variances", matrix_json(s.variances)}};
            } else if constexpr (std::is_same_v<T, BirchState>) {
                return {{"centroids", matrix_json(s.centroids)},
                        {"subclusters", s.subclusters},
                        {"threshold", s.threshold},
                        {"branching", s.branching}};
            } else if constexpr (std::is_same_v<T, SpectralState>) {
                return {{"sigma", s.sigma},
                        {"training_rows", matrix_json(s.training_rows)},
                        {"training_labels", s.training_labels},
                        {"eigenvalues", s.eigenvalues},
                        {"embedding", matrix_json(s.embedding)}};
            } else {
                json pairs = json::array();
                for (const auto& p : s.pairs) {
                    pairs.push_back({{"low", p.low},
                                     {"high", p.high},
                                     {"m_low", p.m_low},
                                     {"m_high", p.m_high},
                                     {"low_fallback", p.low_fallback},
                                     {"high_fallback", p.high_fallback}});
                }
                return {{"centroids", matrix_json(s.centroids)}, {"pairs", pairs}};
            }
        },
        state);
}

ModelState state_from(Algorithm a, const json& j) {
    switch (a) {
    case Algorithm::kmeans: return KMeansState{matrix_from(field(j, "centroids"), "state.centroids")};
    case Algorithm::gmm:
        return GmmState{field(j, "weights").get<std::vector<double>>(), matrix_from(field(j, "means"), "state.means"),
                        matrix_from(field(j, "variances"), "state.variances")};
    case Algorithm::birch:
        return BirchState{matrix_from(field(j, "centroids"), "state.centroids"),
                          field(j, "subclusters").get<std::size_t>(), field(j, "threshold").get<double>(),
                          field(j, "branching").get<std::size_t>()};
    case Algorithm::spectral:
        return SpectralState{matrix_from(field(j, "training_rows"), "state.training_rows"),
                             field(j, "training_labels").get<std::vector<int>>(), field(j, "sigma").get<double>(),
                             field(j, "eigenvalues").get<std::vector<double>>(),
                             matrix_from(field(j, "embedding"), "state.embedding")};
    case Algorithm::centroid: {
        CentroidState s;
        s.centroids = matrix_from(field(j, "centroids"), "state.centroids");
        for (const auto& p : field(j, "pairs")) {
            s.pairs.push_back(CentroidPair{p.at("low").get<double>(), p.at("high").get<double>(),
                                           p.at("m_low").get<int>(), p.at("m_high").get<int>(),
                                           p.at("low_fallback").get<bool>(), p.at("high_fallback").get<bool>()});
        }
        return s;
    }
    }
    throw Error(ErrorKind::input, "unknown algorithm", "algorithm");
}

void check_state(const ClusterModel& m) {
    auto expect = [&](const Matrix& x, const char* key) {
        if (x.rows() != kClusters || x.cols() != m.dims) {
            throw Error(ErrorKind::input, fmt::format("{} must be {} x {}", key, kClusters, m.dims), key);
        }
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GmmState>) {
                expect(s.means, "state.means");
                expect(s.variances, "state.variances");
                if (s.weights.size() != kClusters) throw Error(ErrorKind::input, "state.weights needs 2 entries", "state.weights");
            } else if constexpr (std::is_same_v<T, SpectralState>) {
                if (s.training_rows.cols() != m.dims || s.training_rows.rows() != s.training_labels.size() ||
                    s.training_rows.empty()) {
                    throw Error(ErrorKind::input, "spectral training rows and labels disagree", "state.training_rows");
                }
            } else {
                expect(s.centroids, "state.centroids");
            }
        },
        m.state);
}

}  // namespace

std::string model_to_json(const ModelFile& file) {
    const ClusterModel& m = file.model;
    json stats = {{"count", std::vector<std::size_t>(m.stats.count.begin(), m.stats.count.end())},
                  {"mean", {m.stats.mean[0], m.stats.mean[1]}},
                  {"stddev", {m.stats.stddev[0], m.stats.stddev[1]}}};
    std::vector<std::string> features;
    for (Feature f : file.features.features()) features.emplace_back(to_string(f));
    json j = {
        {"format", "amsad-model"},
        {"version", kModelFormatVersion},
        {"algorithm", to_string(m.algorithm)},
        {"dims", m.dims},
        {"anomalous_cluster", m.anomalous_cluster},
        {"features", features},
        {"window_k", file.window_k ? json(*file.window_k) : json(nullptr)},
        {"normalization",
         {{"min", std::vector<double>(file.normalization.min().begin(), file.normalization.min().end())},
          {"max", std::vector<double>(file.normalization.max().begin(), file.normalization.max().end())}}},
        {"stats", stats},
        {"state", state_json(m.state)},
        {"trace", {{"objective", m.trace.objective}, {"iterations", m.trace.iterations}, {"converged", m.trace.converged}}},
    };
    return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::input, fmt::format("model file is not valid JSON: {}", e.what()), "model");
    }
    try {
        if (field(j, "format") != "amsad-model") throw Error(ErrorKind::input, "not a model file", "format");
        const int version = field(j, "version").get<int>();
        if (version != kModelFormatVersion) {
            throw Error(ErrorKind::input, fmt::format("unsupported model version {}", version), "version");
        }
        ModelFile f;
        ClusterModel& m = f.model;
        try {
            m.algorithm = parse_algorithm(field(j, "algorithm").get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorKind::input, e.what(), "algorithm");
        }
        m.dims = field(j, "dims").get<std::size_t>();
        m.anomalous_cluster = field(j, "anomalous_cluster").get<int>();
        if (m.anomalous_cluster != 0 && m.anomalous_cluster != 1) {
            throw Error(ErrorKind::input, "anomalous_cluster must be 0 or 1", "anomalous_cluster");
        }
        std::vector<Feature> features;
        for (const auto& name : field(j, "features")) features.push_back(parse_feature(name.get<std::string>()));
        f.features = FeatureSelection(std::move(features));
        if (!field(j, "window_k").is_null()) f.window_k = j.at("window_k").get<std::size_t>();
        const auto& norm = field(j, "normalization");
        f.normalization = NormalizationParams(field(norm, "min").get<std::vector<double>>(),
                                              field(norm, "max").get<std::vector<double>>());
        const auto& st = field(j, "stats");
        const auto counts = field(st, "count").get<std::vector<std::size_t>>();
        const auto means = field(st, "mean").get<std::vector<std::vector<double>>>();
        const auto stds = field(st, "stddev").get<std::vector<std::vector<double>>>();
        if (counts.size() != kClusters || means.size() != kClusters || stds.size() != kClusters) {
            throw Error(ErrorKind::input, "stats must describe two clusters", "stats");
        }
        for (std::size_t c = 0; c < kClusters; ++c) {
            m.stats.count[c] = counts[c];
            m.stats.mean[c] = means[c];
            m.stats.stddev[c] = stds[c];
        }
        m.state = state_from(m.algorithm, field(j, "state"));
        check_state(m);
        const auto& tr = field(j, "trace");
        m.trace.objective = field(tr, "objective").get<std::vector<double>>();
        m.trace.iterations = field(tr, "iterations").get<std::size_t>();
        m.trace.converged = field(tr, "converged").get<bool>();
        if (f.normalization.dims() != m.dims) {
            throw Error(ErrorKind::input, "normalization does not match model dimensions", "normalization");
        }
        return f;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::input, fmt::format("malformed model file: {}", e.what()), "model");
    }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << model_to_json(file);
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace amsad
