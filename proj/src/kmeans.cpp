#include "amsad/cluster.hpp"

#include "amsad/error.hpp"
#include "cluster_detail.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace amsad {

LloydResult lloyd(const Matrix& points, std::span<const double> weights, Matrix centroids,
                  std::size_t max_iter, double tol, Exec exec) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    const std::size_t k = centroids.rows();
    if (n == 0) throw Error(ErrorKind::fit, "no points to cluster");
    if (centroids.cols() != d) throw Error(ErrorKind::input, "centroid dimensionality differs from points");
    if (!weights.empty() && weights.size() != n) throw Error(ErrorKind::input, "weight count differs from points");
    auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

    LloydResult res;
    res.labels.assign(n, 0);
    std::vector<double> dist2(n);

    auto assign_step = [&] {
        kernels::nearest_centroid(points, centroids, res.labels, dist2, exec);
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) sse += w(i) * dist2[i];
        res.trace.objective.push_back(sse);
    };

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        assign_step();
        ++res.trace.iterations;

        Matrix next(k, d);
        std::vector<double> mass(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(res.labels[i]);
            mass[c] += w(i);
            for (std::size_t j = 0; j < d; ++j) next(c, j) += w(i) * points(i, j);
        }
        bool reseeded = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (mass[c] > 0.0) {
                for (std::size_t j = 0; j < d; ++j) next(c, j) /= mass[c];
                continue;
            }
            // Empty cluster: move it onto the worst-served point.
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (dist2[i] > dist2[far]) far = i;
            }
            std::copy(points.row(far).begin(), points.row(far).end(), next.row(c).begin());
            dist2[far] = 0.0;
            reseeded = true;
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, squared_distance(next.row(c), centroids.row(c)));
        centroids = std::move(next);
        if (!reseeded && std::sqrt(shift) <= tol) {
            res.trace.converged = true;
            break;
        }
    }
    assign_step();
    res.centroids = std::move(centroids);
    return res;
}

Matrix kmeans_plus_plus(const Matrix& points, std::uint64_t seed) {
    detail::check_training_rows(points, kClusters);
    std::mt19937_64 rng(seed);
    const std::size_t n = points.rows();
    Matrix out(kClusters, points.cols());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t first = pick(rng);
    std::copy(points.row(first).begin(), points.row(first).end(), out.row(0).begin());

    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < kClusters; ++c) {
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), out.row(c - 1)));
        std::discrete_distribution<std::size_t> draw(d2.begin(), d2.end());
        const std::size_t next = draw(rng);
        std::copy(points.row(next).begin(), points.row(next).end(), out.row(c).begin());
    }
    return out;
}

Matrix kmeans_extremes(const Matrix& points) {
    detail::check_training_rows(points, kClusters);
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i < points.rows(); ++i) {
        if (points(i, 0) < points(lo, 0)) lo = i;
        if (points(i, 0) > points(hi, 0)) hi = i;
    }
    if (points(lo, 0) == points(hi, 0)) {
        // Constant first dimension: take the row farthest from the first minimum.
        hi = lo;
        double best = 0.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            const double dd = squared_distance(points.row(i), points.row(lo));
            if (dd > best) {
                best = dd;
                hi = i;
            }
        }
    }
    Matrix out(kClusters, points.cols());
    std::copy(points.row(lo).begin(), points.row(lo).end(), out.row(0).begin());
    std::copy(points.row(hi).begin(), points.row(hi).end(), out.row(1).begin());
    return out;
}

ClusterModel fit_kmeans(const Matrix& rows, const KMeansOptions& options) {
    if (options.max_iter == 0) throw Error(ErrorKind::config, "max_iter must be positive", "max_iter");
    if (!(options.tol >= 0.0)) throw Error(ErrorKind::config, "tol must be non-negative", "tol");
    detail::check_training_rows(rows, kClusters);

    Matrix init;
    if (options.initial_centroids) {
        init = *options.initial_centroids;
        if (init.rows() != kClusters || init.cols() != rows.cols()) {
            throw Error(ErrorKind::config, "initial centroids must be 2 x D", "initial_centroids");
        }
    } else if (options.init == KMeansInit::extremes) {
        init = kmeans_extremes(rows);
    } else {
        init = kmeans_plus_plus(rows, options.seed);
    }

    LloydResult r = lloyd(rows, {}, std::move(init), options.max_iter, options.tol, options.exec);
    ClusterModel model;
    model.algorithm = Algorithm::kmeans;
    model.dims = rows.cols();
    model.state = KMeansState{std::move(r.centroids)};
    model.trace = std::move(r.trace);
    canonicalize(model, rows);
    return model;
}

}  // namespace amsad
