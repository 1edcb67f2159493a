#include "amsad/kernels.hpp"

#include "amsad/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amsad::kernels {

namespace {

constexpr std::size_t kParallelMinRows = 64;

inline void nearest_centroid_row(const Matrix& x, const Matrix& centroids, std::size_t i,
                                 std::span<int> labels, std::span<double> dist2) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(x.row(i), centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    labels[i] = best;
    dist2[i] = best_d;
}

inline void gmm_row(const Matrix& x, std::span<const double> log_weights, const Matrix& means,
                    const Matrix& variances, std::span<const double> log_norm, std::size_t i, Matrix& out) {
    const auto xi = x.row(i);
    for (std::size_t c = 0; c < means.rows(); ++c) {
        const auto mu = means.row(c);
        const auto var = variances.row(c);
        double quad = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const double d = xi[j] - mu[j];
            quad += d * d / var[j];
        }
        out(i, c) = log_weights[c] + log_norm[c] - 0.5 * quad;
    }
}

inline void affinity_row(const Matrix& x, double inv_two_sigma2, std::size_t i, Matrix& out) {
    for (std::size_t j = 0; j < x.rows(); ++j) {
        out(i, j) = i == j ? 0.0 : std::exp(-squared_distance(x.row(i), x.row(j)) * inv_two_sigma2);
    }
}

inline std::size_t nearest_row_one(const Matrix& reference, std::span<const double> q) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reference.rows(); ++r) {
        const double d = squared_distance(q, reference.row(r));
        if (d < best_d) {
            best_d = d;
            best = r;
        }
    }
    return best;
}

void check_cols(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error(ErrorKind::input, "dimension mismatch between data and model");
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void nearest_centroid(const Matrix& x, const Matrix& centroids, std::span<int> labels,
                      std::span<double> dist2, Exec exec) {
    check_cols(x, centroids);
    if (labels.size() != x.rows() || dist2.size() != x.rows()) {
        throw Error(ErrorKind::input, "output spans must match the number of rows");
    }
    const auto n = static_cast<std::ptrdiff_t>(x.rows());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) if (x.rows() >= kParallelMinRows)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            nearest_centroid_row(x, centroids, static_cast<std::size_t>(i), labels, dist2);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            nearest_centroid_row(x, centroids, static_cast<std::size_t>(i), labels, dist2);
        }
    }
}

void gmm_log_joint(const Matrix& x, std::span<const double> weights, const Matrix& means,
                   const Matrix& variances, Matrix& out, Exec exec) {
    check_cols(x, means);
    check_cols(x, variances);
    const std::size_t k = means.rows();
    if (weights.size() != k || variances.rows() != k) throw Error(ErrorKind::input, "inconsistent GMM parameters");
    if (out.rows() != x.rows() || out.cols() != k) out = Matrix(x.rows(), k);

    std::vector<double> log_weights(k);
    std::vector<double> log_norm(k);
    const double log_two_pi = std::log(2.0 * std::numbers::pi);
    for (std::size_t c = 0; c < k; ++c) {
        log_weights[c] = std::log(weights[c]);
        double acc = 0.0;
        for (double v : variances.row(c)) acc += log_two_pi + std::log(v);
        log_norm[c] = -0.5 * acc;
    }

    const auto n = static_cast<std::ptrdiff_t>(x.rows());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) if (x.rows() >= kParallelMinRows)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            gmm_row(x, log_weights, means, variances, log_norm, static_cast<std::size_t>(i), out);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            gmm_row(x, log_weights, means, variances, log_norm, static_cast<std::size_t>(i), out);
        }
    }
}

void gaussian_affinity(const Matrix& x, double sigma, Matrix& out, Exec exec) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::config, "affinity sigma must be positive", "sigma");
    if (out.rows() != x.rows() || out.cols() != x.rows()) out = Matrix(x.rows(), x.rows());
    const double inv = 1.0 / (2.0 * sigma * sigma);
    const auto n = static_cast<std::ptrdiff_t>(x.rows());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) if (x.rows() >= kParallelMinRows)
        for (std::ptrdiff_t i = 0; i < n; ++i) affinity_row(x, inv, static_cast<std::size_t>(i), out);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) affinity_row(x, inv, static_cast<std::size_t>(i), out);
    }
}

void nearest_row(const Matrix& reference, const Matrix& queries, std::span<std::size_t> out, Exec exec) {
    check_cols(reference, queries);
    if (reference.empty()) throw Error(ErrorKind::input, "no reference rows");
    if (out.size() != queries.rows()) throw Error(ErrorKind::input, "output span must match query rows");
    const auto n = static_cast<std::ptrdiff_t>(queries.rows());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) if (queries.rows() >= kParallelMinRows)
        for (std::ptrdiff_t q = 0; q < n; ++q) {
            out[static_cast<std::size_t>(q)] = nearest_row_one(reference, queries.row(static_cast<std::size_t>(q)));
        }
    } else {
        for (std::ptrdiff_t q = 0; q < n; ++q) {
            out[static_cast<std::size_t>(q)] = nearest_row_one(reference, queries.row(static_cast<std::size_t>(q)));
        }
    }
}

}  // namespace amsad::kernels
