#include "amsad/cluster.hpp"

#include "amsad/error.hpp"
#include "cluster_detail.hpp"

#include <algorithm>
#include <cmath>

namespace amsad {

namespace {

void check_params(const GmmParams& p, std::size_t dims) {
    if (p.weights.size() != kClusters || p.means.rows() != kClusters || p.variances.rows() != kClusters ||
        p.means.cols() != dims || p.variances.cols() != dims) {
        throw Error(ErrorKind::config, "GMM parameters must describe 2 components of the data dimension", "initial");
    }
    for (double w : p.weights) {
        if (!(w > 0.0)) throw Error(ErrorKind::config, "GMM weights must be positive", "initial");
    }
    for (double v : p.variances.data()) {
        if (!(v > 0.0)) throw Error(ErrorKind::config, "GMM variances must be positive", "initial");
    }
}

}  // namespace

EStep gmm_e_step(const Matrix& rows, const GmmParams& params, Exec exec) {
    check_params(params, rows.cols());
    EStep out;
    kernels::gmm_log_joint(rows, params.weights, params.means, params.variances, out.responsibilities, exec);
    double ll = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto r = out.responsibilities.row(i);
        const double m = *std::max_element(r.begin(), r.end());
        double s = 0.0;
        for (double v : r) s += std::exp(v - m);
        const double lse = m + std::log(s);
        for (double& v : r) v = std::exp(v - lse);
        ll += lse;
    }
    out.log_likelihood = ll;
    return out;
}

GmmParams gmm_m_step(const Matrix& rows, const Matrix& resp, double variance_floor) {
    const std::size_t n = rows.rows();
    const std::size_t d = rows.cols();
    if (resp.rows() != n || resp.cols() != kClusters) throw Error(ErrorKind::input, "responsibilities must be n x 2");
    GmmParams p{std::vector<double>(kClusters), Matrix(kClusters, d), Matrix(kClusters, d)};
    for (std::size_t c = 0; c < kClusters; ++c) {
        double nk = 0.0;
        for (std::size_t i = 0; i < n; ++i) nk += resp(i, c);
        if (!(nk > 0.0)) throw Error(ErrorKind::fit, "a mixture component lost all responsibility");
        p.weights[c] = nk / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) p.means(c, j) += resp(i, c) * rows(i, j);
        }
        for (std::size_t j = 0; j < d; ++j) p.means(c, j) /= nk;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double e = rows(i, j) - p.means(c, j);
                p.variances(c, j) += resp(i, c) * e * e;
            }
        }
        for (std::size_t j = 0; j < d; ++j) p.variances(c, j) = std::max(p.variances(c, j) / nk, variance_floor);
    }
    return p;
}

GmmParams gmm_init_from_kmeans(const Matrix& rows, std::uint64_t seed, double variance_floor) {
    KMeansOptions ko;
    ko.seed = seed;
    ko.exec = Exec::serial;
    const ClusterModel km = fit_kmeans(rows, ko);
    const auto labels = assign_all(km, rows, Exec::serial);
    Matrix resp(rows.rows(), kClusters);
    for (std::size_t i = 0; i < rows.rows(); ++i) resp(i, static_cast<std::size_t>(labels[i])) = 1.0;
    return gmm_m_step(rows, resp, variance_floor);
}

ClusterModel fit_gmm(const Matrix& rows, const GmmOptions& options) {
    if (options.max_iter == 0) throw Error(ErrorKind::config, "max_iter must be positive", "max_iter");
    if (!(options.tol >= 0.0)) throw Error(ErrorKind::config, "tol must be non-negative", "tol");
    if (!(options.variance_floor > 0.0)) {
        throw Error(ErrorKind::config, "variance floor must be positive", "variance_floor");
    }
    detail::check_training_rows(rows, 2 * kClusters);

    GmmParams params = options.initial ? *options.initial
                                       : gmm_init_from_kmeans(rows, options.seed, options.variance_floor);
    check_params(params, rows.cols());

    FitTrace trace;
    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        const EStep e = gmm_e_step(rows, params, options.exec);
        const bool stalled = !trace.objective.empty() && e.log_likelihood - trace.objective.back() < options.tol;
        trace.objective.push_back(e.log_likelihood);
        if (stalled) {
            trace.converged = true;
            break;
        }
        params = gmm_m_step(rows, e.responsibilities, options.variance_floor);
        ++trace.iterations;
    }
    if (!trace.converged) trace.objective.push_back(gmm_e_step(rows, params, options.exec).log_likelihood);

    ClusterModel model;
    model.algorithm = Algorithm::gmm;
    model.dims = rows.cols();
    model.state = GmmState{std::move(params.weights), std::move(params.means), std::move(params.variances)};
    model.trace = std::move(trace);
    canonicalize(model, rows);
    return model;
}

}  // namespace amsad
