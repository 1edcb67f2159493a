#pragma once

// Centroid selection for two clusters and the nearest-centroid refit that
// replaces a base model's assignments with the selected centroids.

#include "amsad/cluster.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace amsad {

/// Which spread widens the averaging intervals: the whole feature's std
/// (default) or the owning cluster's std.
enum class IntervalSigma { global, cluster };

struct CentroidOptions {
    IntervalSigma interval_sigma = IntervalSigma::global;
};

/// Every intermediate of one selection, for auditing.
struct CentroidTrace {
    double mu = 0.0;
    double sigma = 0.0;  // population std of the feature
    bool low_side = false;   // cluster 0 lies strictly below mu
    bool high_side = false;  // cluster 1 lies strictly above mu
    std::array<double, 4> var_low{};   // index i-1 holds the i-th interval
    std::array<double, 4> var_high{};
    double low_from = 0.0, low_to = 0.0;    // closed averaging interval for `low`
    double high_from = 0.0, high_to = 0.0;  // closed averaging interval for `high`
    std::vector<std::size_t> low_members;   // feature indices averaged into `low`
    std::vector<std::size_t> high_members;
    bool flipped = false;  // this dimension orders the clusters the other way; `pair` is already swapped back
    CentroidPair pair;
};

/// `mu_k`/`sigma_k` are canonically ordered cluster statistics. Throws
/// Error(input) when values fall outside [0, 1] or mu_k is not ordered, and
/// Error(degenerate) when both clusters sit strictly on the same side of the
/// feature mean.
CentroidTrace trace_centroid_selection(std::span<const double> feature, std::array<double, 2> mu_k,
                                       std::array<double, 2> sigma_k, const CentroidOptions& options = {});

CentroidPair select_centroids(std::span<const double> feature, std::array<double, 2> mu_k,
                              std::array<double, 2> sigma_k, const CentroidOptions& options = {});

/// One trace per column of `rows`, using per-dimension cluster statistics.
/// A dimension whose cluster means run opposite to dimension 0 is traced
/// with the clusters swapped.
std::vector<CentroidTrace> trace_centroid_selection(const Matrix& rows, const ClusterStats& stats,
                                                    const CentroidOptions& options = {});

std::vector<CentroidPair> select_centroids(const Matrix& rows, const ClusterStats& stats,
                                           const CentroidOptions& options = {});

/// Nearest-centroid model over {low, high} vectors; ties go to cluster 0.
/// Throws Error(refit) when the two centroid vectors coincide.
ClusterModel refit_with_centroids(const Matrix& rows, std::span<const CentroidPair> pairs);

/// Cluster means and stds fed to selection: a GMM's component parameters,
/// otherwise the training membership statistics.
ClusterStats centroid_inputs(const ClusterModel& base);

/// select_centroids on centroid_inputs(base), then refit.
ClusterModel apply_centroid_selection(const ClusterModel& base, const Matrix& rows,
                                      const CentroidOptions& options = {});

}  // namespace amsad
