#include "amsad/centroid.hpp"

#include "amsad/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace amsad {

namespace {

constexpr double kRangeSlack = 1e-9;

// First index of the minimum, reported 1-based.
int first_min(const std::array<double, 4>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[best]) best = i;
    }
    return static_cast<int>(best) + 1;
}

double interval_mean(std::span<const double> feature, double from, double to, std::vector<std::size_t>& members) {
    members.clear();
    double sum = 0.0;
    for (std::size_t i = 0; i < feature.size(); ++i) {
        if (feature[i] >= from && feature[i] <= to) {
            members.push_back(i);
            sum += feature[i];
        }
    }
    return members.empty() ? 0.0 : sum / static_cast<double>(members.size());
}

}  // namespace

CentroidTrace trace_centroid_selection(std::span<const double> feature, std::array<double, 2> mu_k,
                                       std::array<double, 2> sigma_k, const CentroidOptions& options) {
    if (feature.empty()) throw Error(ErrorKind::input, "centroid selection needs feature values");
    for (double v : feature) {
        if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack)) {
            throw Error(ErrorKind::input, fmt::format("feature value {} is not normalized to [0, 1]", v));
        }
    }
    if (!(mu_k[0] <= mu_k[1])) throw Error(ErrorKind::input, "cluster means must be ordered low to high");
    if (!(sigma_k[0] >= 0.0 && sigma_k[1] >= 0.0)) throw Error(ErrorKind::input, "cluster std must be non-negative");

    CentroidTrace t;
    const double n = static_cast<double>(feature.size());
    double sum = 0.0;
    for (double v : feature) sum += v;
    t.mu = sum / n;
    double acc = 0.0;
    for (double v : feature) acc += (v - t.mu) * (v - t.mu);
    t.sigma = std::sqrt(acc / n);

    if ((mu_k[0] < t.mu && mu_k[1] < t.mu) || (mu_k[0] > t.mu && mu_k[1] > t.mu)) {
        throw Error(ErrorKind::degenerate,
                    fmt::format("both cluster means lie on the same side of the feature mean {}", t.mu));
    }
    t.low_side = mu_k[0] < t.mu;
    t.high_side = mu_k[1] > t.mu;

    for (int i = 1; i <= 4; ++i) {
        const double di = i;
        t.var_low[i - 1] = std::abs(mu_k[0] + di * sigma_k[0] - (t.mu - di * t.sigma));
        t.var_high[i - 1] = std::abs(mu_k[1] - di * sigma_k[1] - (t.mu + di * t.sigma));
    }

    const double s_low = options.interval_sigma == IntervalSigma::global ? t.sigma : sigma_k[0];
    const double s_high = options.interval_sigma == IntervalSigma::global ? t.sigma : sigma_k[1];

    CentroidPair& p = t.pair;
    p.low = mu_k[0];
    p.high = mu_k[1];
    if (t.low_side) {
        const int m = first_min(t.var_low);
        t.low_from = mu_k[0] + (m + 1) * s_low;
        t.low_to = t.mu;
        const double c = interval_mean(feature, t.low_from, t.low_to, t.low_members);
        if (t.low_members.empty()) {
            p.low_fallback = true;
        } else {
            p.low = c;
            p.m_low = m;
        }
    } else {
        p.low_fallback = true;
    }
    if (t.high_side) {
        const int m = first_min(t.var_high);
        t.high_from = t.mu;
        t.high_to = mu_k[1] - (m + 1) * s_high;
        const double c = interval_mean(feature, t.high_from, t.high_to, t.high_members);
        if (t.high_members.empty()) {
            p.high_fallback = true;
        } else {
            p.high = c;
            p.m_high = m;
        }
    } else {
        p.high_fallback = true;
    }
    return t;
}

CentroidPair select_centroids(std::span<const double> feature, std::array<double, 2> mu_k,
                              std::array<double, 2> sigma_k, const CentroidOptions& options) {
    return trace_centroid_selection(feature, mu_k, sigma_k, options).pair;
}

std::vector<CentroidTrace> trace_centroid_selection(const Matrix& rows, const ClusterStats& stats,
                                                    const CentroidOptions& options) {
    for (std::size_t c = 0; c < kClusters; ++c) {
        if (stats.count[c] == 0 || stats.mean[c].size() != rows.cols() || stats.stddev[c].size() != rows.cols()) {
            throw Error(ErrorKind::stats, fmt::format("cluster {} has no statistics for centroid selection", c));
        }
    }
    std::vector<CentroidTrace> out;
    std::vector<double> column(rows.rows());
    for (std::size_t j = 0; j < rows.cols(); ++j) {
        for (std::size_t i = 0; i < rows.rows(); ++i) column[i] = rows(i, j);
        std::array<double, 2> mu{stats.mean[0][j], stats.mean[1][j]};
        std::array<double, 2> sd{stats.stddev[0][j], stats.stddev[1][j]};
        const bool flip = mu[0] > mu[1];
        if (flip) {
            std::swap(mu[0], mu[1]);
            std::swap(sd[0], sd[1]);
        }
        CentroidTrace t = trace_centroid_selection(column, mu, sd, options);
        if (flip) {
            t.flipped = true;
            CentroidPair& p = t.pair;
            std::swap(p.low, p.high);
            std::swap(p.m_low, p.m_high);
            std::swap(p.low_fallback, p.high_fallback);
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<CentroidPair> select_centroids(const Matrix& rows, const ClusterStats& stats,
                                           const CentroidOptions& options) {
    std::vector<CentroidPair> out;
    for (const auto& t : trace_centroid_selection(rows, stats, options)) out.push_back(t.pair);
    return out;
}

ClusterModel refit_with_centroids(const Matrix& rows, std::span<const CentroidPair> pairs) {
    if (pairs.empty() || pairs.size() != rows.cols()) {
        throw Error(ErrorKind::input, "need one centroid pair per feature dimension");
    }
    CentroidState state;
    state.centroids = Matrix(kClusters, pairs.size());
    state.pairs.assign(pairs.begin(), pairs.end());
    bool distinct = false;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        state.centroids(0, j) = pairs[j].low;
        state.centroids(1, j) = pairs[j].high;
        distinct = distinct || pairs[j].low != pairs[j].high;
    }
    if (!distinct) throw Error(ErrorKind::refit, "selected centroids coincide");

    ClusterModel model;
    model.algorithm = Algorithm::centroid;
    model.dims = pairs.size();
    model.state = std::move(state);
    if (!rows.empty()) canonicalize(model, rows);
    return model;
}

ClusterStats centroid_inputs(const ClusterModel& base) {
    const auto* g = std::get_if<GmmState>(&base.state);
    if (!g) return base.stats;
    ClusterStats st;
    for (std::size_t c = 0; c < kClusters; ++c) {
        const auto mu = g->means.row(c);
        const auto var = g->variances.row(c);
        st.mean[c].assign(mu.begin(), mu.end());
        for (double v : var) st.stddev[c].push_back(std::sqrt(v));
        st.count[c] = base.stats.count[c] > 0 ? base.stats.count[c] : 1;
    }
    return st;
}

ClusterModel apply_centroid_selection(const ClusterModel& base, const Matrix& rows, const CentroidOptions& options) {
    const auto pairs = select_centroids(rows, centroid_inputs(base), options);
    ClusterModel model = refit_with_centroids(rows, pairs);
    model.anomalous_cluster = base.anomalous_cluster;
    return model;
}

}  // namespace amsad
