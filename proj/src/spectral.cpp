#include "amsad/cluster.hpp"

#include "amsad/error.hpp"
#include "cluster_detail.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace amsad {

SpectralEmbedding spectral_embedding(const Matrix& rows, double sigma, Exec exec) {
    const std::size_t n = rows.rows();
    if (n < kClusters) throw Error(ErrorKind::fit, "spectral embedding needs at least two rows");
    Matrix w;
    kernels::gaussian_affinity(rows, sigma, w, exec);

    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (double v : w.row(i)) deg += v;
        if (!(deg > 0.0)) {
            throw Error(ErrorKind::fit, fmt::format("row {} is disconnected at sigma {}", i, sigma), "sigma");
        }
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }

    Eigen::MatrixXd lap(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = w(i, j) * inv_sqrt_deg[i] * inv_sqrt_deg[j];
            lap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (i == j ? 1.0 : 0.0) - a;
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::fit, "Laplacian eigen-decomposition failed");

    SpectralEmbedding out;
    out.eigenvectors = Matrix(n, kClusters);
    for (std::size_t c = 0; c < kClusters; ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        out.eigenvalues.push_back(solver.eigenvalues()(col));
        // Fix the arbitrary sign so the first clearly non-zero component is positive.
        double sign = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = solver.eigenvectors()(static_cast<Eigen::Index>(i), col);
            if (std::abs(v) > 1e-12) {
                sign = v < 0.0 ? -1.0 : 1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.eigenvectors(i, c) = sign * solver.eigenvectors()(static_cast<Eigen::Index>(i), col);
        }
    }
    return out;
}

double median_pairwise_distance(const Matrix& rows) {
    if (rows.rows() < 2) throw Error(ErrorKind::input, "need two rows for a pairwise distance");
    std::vector<double> d;
    d.reserve(rows.rows() * (rows.rows() - 1) / 2);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        for (std::size_t j = i + 1; j < rows.rows(); ++j) d.push_back(std::sqrt(squared_distance(rows.row(i), rows.row(j))));
    }
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

ClusterModel fit_spectral(const Matrix& rows, const SpectralOptions& options) {
    if (!(options.sigma >= 0.0) || !std::isfinite(options.sigma)) {
        throw Error(ErrorKind::config, "sigma must be non-negative (0 selects the median distance)", "sigma");
    }
    detail::check_training_rows(rows, kClusters);
    const double sigma = options.sigma > 0.0 ? options.sigma : median_pairwise_distance(rows);
    SpectralEmbedding emb = spectral_embedding(rows, sigma, options.exec);

    Matrix unit = emb.eigenvectors;
    for (std::size_t i = 0; i < unit.rows(); ++i) {
        auto r = unit.row(i);
        double norm = 0.0;
        for (double v : r) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& v : r) v /= norm;
        }
    }

    KMeansOptions ko;
    ko.seed = options.seed;
    ko.exec = options.exec;
    LloydResult r = lloyd(unit, {}, kmeans_plus_plus(unit, options.seed), ko.max_iter, ko.tol, ko.exec);

    ClusterModel model;
    model.algorithm = Algorithm::spectral;
    model.dims = rows.cols();
    model.trace = std::move(r.trace);
    model.state = SpectralState{rows, std::move(r.labels), sigma, std::move(emb.eigenvalues), std::move(emb.eigenvectors)};
    canonicalize(model, rows);
    return model;
}

}  // namespace amsad
