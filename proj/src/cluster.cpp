#include "amsad/cluster.hpp"

#include "amsad/error.hpp"
#include "cluster_detail.hpp"

#include <cmath>
#include <limits>
#include <type_traits>

#include <fmt/format.h>

namespace amsad {

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::kmeans: return "kmeans";
    case Algorithm::gmm: return "gmm";
    case Algorithm::birch: return "birch";
    case Algorithm::spectral: return "spectral";
    case Algorithm::centroid: return "centroid";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "kmeans" || text == "k-means") return Algorithm::kmeans;
    if (text == "gmm") return Algorithm::gmm;
    if (text == "birch") return Algorithm::birch;
    if (text == "spectral") return Algorithm::spectral;
    if (text == "centroid") return Algorithm::centroid;
    throw Error(ErrorKind::config, fmt::format("unknown algorithm '{}'", text), "algorithm");
}

namespace {

struct AssignVisitor {
    const ClusterModel& model;
    const Matrix& rows;
    Exec exec;
    std::vector<int>& labels;

    void nearest(const Matrix& centroids) const {
        std::vector<double> dist2(rows.rows());
        kernels::nearest_centroid(rows, centroids, labels, dist2, exec);
    }
    void operator()(const KMeansState& s) const { nearest(s.centroids); }
    void operator()(const BirchState& s) const { nearest(s.centroids); }
    void operator()(const CentroidState& s) const { nearest(s.centroids); }
    void operator()(const GmmState& s) const {
        Matrix joint;
        kernels::gmm_log_joint(rows, s.weights, s.means, s.variances, joint, exec);
        for (std::size_t i = 0; i < rows.rows(); ++i) labels[i] = joint(i, 1) > joint(i, 0) ? 1 : 0;
    }
    void operator()(const SpectralState& s) const {
        std::vector<std::size_t> nearest_idx(rows.rows());
        kernels::nearest_row(s.training_rows, rows, nearest_idx, exec);
        for (std::size_t i = 0; i < rows.rows(); ++i) labels[i] = s.training_labels[nearest_idx[i]];
    }
};

// Means along dimension 0 used to order clusters when one side is empty.
double center_dim0(const ModelState& state, std::size_t c) {
    return std::visit(
        [c](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GmmState>) {
                return s.means(c, 0);
            } else if constexpr (std::is_same_v<T, SpectralState>) {
                return static_cast<double>(c);
            } else {
                return s.centroids(c, 0);
            }
        },
        state);
}

void swap_state(ModelState& state) {
    std::visit(
        [](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GmmState>) {
                std::swap(s.weights[0], s.weights[1]);
                s.means.swap_rows(0, 1);
                s.variances.swap_rows(0, 1);
            } else if constexpr (std::is_same_v<T, SpectralState>) {
                for (int& l : s.training_labels) l = 1 - l;
            } else if constexpr (std::is_same_v<T, CentroidState>) {
                s.centroids.swap_rows(0, 1);
                for (auto& p : s.pairs) {
                    std::swap(p.low, p.high);
                    std::swap(p.m_low, p.m_high);
                    std::swap(p.low_fallback, p.high_fallback);
                }
            } else {
                s.centroids.swap_rows(0, 1);
            }
        },
        state);
}

// Statistics in label order, tolerating empty clusters.
ClusterStats raw_stats(const Matrix& rows, std::span<const int> labels) {
    ClusterStats st;
    const std::size_t d = rows.cols();
    std::array<std::vector<double>, kClusters> sum{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const int l = labels[i];
        if (l < 0 || l >= static_cast<int>(kClusters)) throw Error(ErrorKind::input, "label out of range");
        ++st.count[l];
        for (std::size_t j = 0; j < d; ++j) sum[l][j] += rows(i, j);
    }
    for (std::size_t c = 0; c < kClusters; ++c) {
        if (st.count[c] == 0) continue;
        const double n = static_cast<double>(st.count[c]);
        st.mean[c].resize(d);
        for (std::size_t j = 0; j < d; ++j) st.mean[c][j] = sum[c][j] / n;
        std::vector<double> acc(d);
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            if (labels[i] != static_cast<int>(c)) continue;
            for (std::size_t j = 0; j < d; ++j) {
                const double e = rows(i, j) - st.mean[c][j];
                acc[j] += e * e;
            }
        }
        st.stddev[c].resize(d);
        for (std::size_t j = 0; j < d; ++j) st.stddev[c][j] = std::sqrt(acc[j] / n);
    }
    return st;
}

void swap_stats(ClusterStats& st) {
    std::swap(st.mean[0], st.mean[1]);
    std::swap(st.stddev[0], st.stddev[1]);
    std::swap(st.count[0], st.count[1]);
}

}  // namespace

int assign(const ClusterModel& model, std::span<const double> row) {
    if (row.size() != model.dims) {
        throw Error(ErrorKind::input, fmt::format("model expects {} dimensions, got {}", model.dims, row.size()));
    }
    Matrix m(1, row.size());
    std::copy(row.begin(), row.end(), m.row(0).begin());
    return assign_all(model, m, Exec::serial).front();
}

std::vector<int> assign_all(const ClusterModel& model, const Matrix& rows, Exec exec) {
    if (rows.empty()) return {};
    if (rows.cols() != model.dims) {
        throw Error(ErrorKind::input, fmt::format("model expects {} dimensions, got {}", model.dims, rows.cols()));
    }
    std::vector<int> labels(rows.rows());
    std::visit(AssignVisitor{model, rows, exec, labels}, model.state);
    return labels;
}

ClusterStats cluster_stats_from_labels(const Matrix& rows, std::span<const int> labels) {
    if (labels.size() != rows.rows()) throw Error(ErrorKind::input, "label count differs from row count");
    if (rows.cols() == 0) throw Error(ErrorKind::input, "rows have no dimensions");
    ClusterStats st = raw_stats(rows, labels);
    for (std::size_t c = 0; c < kClusters; ++c) {
        if (st.count[c] == 0) throw Error(ErrorKind::stats, fmt::format("cluster {} has no members", c));
    }
    if (st.mean[1][0] < st.mean[0][0]) {
        swap_stats(st);
        st.swapped = true;
    }
    return st;
}

ClusterStats cluster_stats(const ClusterModel& model, const Matrix& rows) {
    const auto labels = assign_all(model, rows);
    return cluster_stats_from_labels(rows, labels);
}

void canonicalize(ClusterModel& model, const Matrix& rows) {
    auto labels = assign_all(model, rows);
    ClusterStats st = raw_stats(rows, labels);
    bool swap = false;
    if (st.count[0] > 0 && st.count[1] > 0) {
        swap = st.mean[1][0] < st.mean[0][0];
    } else {
        swap = center_dim0(model.state, 1) < center_dim0(model.state, 0);
    }
    if (swap) {
        swap_state(model.state);
        swap_stats(st);
    }
    model.stats = std::move(st);
}

ClusterModel fit(const Matrix& rows, const FitOptions& options) {
    return std::visit(
        [&rows](const auto& o) -> ClusterModel {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, KMeansOptions>) return fit_kmeans(rows, o);
            else if constexpr (std::is_same_v<T, GmmOptions>) return fit_gmm(rows, o);
            else if constexpr (std::is_same_v<T, BirchOptions>) return fit_birch(rows, o);
            else return fit_spectral(rows, o);
        },
        options);
}

namespace detail {

void check_training_rows(const Matrix& rows, std::size_t min_rows) {
    if (rows.rows() < min_rows) {
        throw Error(ErrorKind::fit, fmt::format("need at least {} rows to fit, got {}", min_rows, rows.rows()));
    }
    if (rows.cols() == 0) throw Error(ErrorKind::fit, "rows have no dimensions");
    for (double v : rows.data()) {
        if (!std::isfinite(v)) throw Error(ErrorKind::input, "non-finite value in training rows");
    }
    for (std::size_t i = 1; i < rows.rows(); ++i) {
        if (squared_distance(rows.row(0), rows.row(i)) > 0.0) return;
    }
    throw Error(ErrorKind::fit, "all training rows are identical");
}

}  // namespace detail

}  // namespace amsad
