#pragma once

// Data-parallel inner loops shared by the clustering algorithms.
//
// Each kernel exists as a serial reference and an OpenMP variant. Both
// compute every output element with the same arithmetic and never reduce
// across rows, so their results are bitwise identical for any thread count.

#include "amsad/matrix.hpp"

#include <cstddef>
#include <span>

namespace amsad::kernels {

enum class Exec { serial, parallel };

/// labels[i] = argmin_c |x_i - c|^2 (lowest index wins ties); dist2[i] is that minimum.
void nearest_centroid(const Matrix& x, const Matrix& centroids, std::span<int> labels,
                      std::span<double> dist2, Exec exec);

/// out(i, c) = log(weights[c]) + log N(x_i | means_c, diag(variances_c)).
void gmm_log_joint(const Matrix& x, std::span<const double> weights, const Matrix& means,
                   const Matrix& variances, Matrix& out, Exec exec);

/// out(i, j) = exp(-|x_i - x_j|^2 / (2 sigma^2)) for i != j, 0 on the diagonal.
void gaussian_affinity(const Matrix& x, double sigma, Matrix& out, Exec exec);

/// out[q] = index of the reference row nearest to query row q (lowest index wins ties).
void nearest_row(const Matrix& reference, const Matrix& queries, std::span<std::size_t> out, Exec exec);

/// Number of OpenMP threads the parallel variants would use (1 without OpenMP).
int max_threads();

}  // namespace amsad::kernels
