#pragma once

// Two-cluster models: k-means, diagonal GMM, BIRCH and spectral clustering,
// plus the nearest-centroid model produced by centroid selection.
//
// Every fitted model is canonical: cluster 0 is the cluster whose training
// members have the lower mean along feature dimension 0. Ties anywhere
// resolve to the lowest index.

#include "amsad/kernels.hpp"
#include "amsad/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace amsad {

inline constexpr std::size_t kClusters = 2;

using kernels::Exec;

enum class Algorithm { kmeans, gmm, birch, spectral, centroid };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

struct ClusterStats {
    std::array<std::vector<double>, kClusters> mean;
    std::array<std::vector<double>, kClusters> stddev;  // population std per dimension
    std::array<std::size_t, kClusters> count{};
    bool swapped = false;  // true when the input labels were reordered to reach canonical order
};

/// Per-iteration objective: SSE for k-means (non-increasing), total
/// log-likelihood for GMM (non-decreasing).
struct FitTrace {
    std::vector<double> objective;
    std::size_t iterations = 0;
    bool converged = false;
};

/// One entry per feature dimension; produced by centroid selection.
struct CentroidPair {
    double low = 0.0;
    double high = 0.0;
    int m_low = 0;   // selected sigma interval 1..4, 0 when the side fell back
    int m_high = 0;
    bool low_fallback = false;
    bool high_fallback = false;

    friend bool operator==(const CentroidPair&, const CentroidPair&) = default;
};

struct KMeansState {
    Matrix centroids;  // kClusters x D
};

struct GmmState {
    std::vector<double> weights;
    Matrix means;      // kClusters x D
    Matrix variances;  // kClusters x D, floored
};

struct BirchState {
    Matrix centroids;  // global centroids, kClusters x D
    std::size_t subclusters = 0;
    double threshold = 0.0;  // radius threshold actually used
    std::size_t branching = 0;
};

struct SpectralState {
    Matrix training_rows;
    std::vector<int> training_labels;
    double sigma = 0.0;
    std::vector<double> eigenvalues;  // the kClusters smallest of the normalized Laplacian
    Matrix embedding;                 // n x kClusters eigenvectors before row normalization
};

struct CentroidState {
    Matrix centroids;  // row 0 = low, row 1 = high
    std::vector<CentroidPair> pairs;
};

using ModelState = std::variant<KMeansState, GmmState, BirchState, SpectralState, CentroidState>;

struct ClusterModel {
    Algorithm algorithm = Algorithm::kmeans;
    std::size_t dims = 0;
    ClusterStats stats;  // training-set membership statistics
    ModelState state;
    FitTrace trace;
    int anomalous_cluster = 1;
};

/// Throws Error(input) on a dimension mismatch.
int assign(const ClusterModel& model, std::span<const double> row);
std::vector<int> assign_all(const ClusterModel& model, const Matrix& rows, Exec exec = Exec::parallel);

/// Per-cluster mean and population std of member rows, ordered so that
/// cluster 0 has the lower mean along dimension 0. Throws Error(stats) when a
/// cluster has no members.
ClusterStats cluster_stats_from_labels(const Matrix& rows, std::span<const int> labels);
ClusterStats cluster_stats(const ClusterModel& model, const Matrix& rows);

// k-means ---------------------------------------------------------------------

enum class KMeansInit { plus_plus, extremes };

struct KMeansOptions {
    std::size_t max_iter = 300;
    double tol = 1e-10;  // stop when every centroid moves less than this (Euclidean)
    std::uint64_t seed = 0;
    KMeansInit init = KMeansInit::plus_plus;
    std::optional<Matrix> initial_centroids;  // overrides `init`
    Exec exec = Exec::parallel;
};

struct LloydResult {
    Matrix centroids;
    std::vector<int> labels;
    FitTrace trace;
};

/// Weighted Lloyd iterations from the given centroids. Empty weights mean
/// unit weights. A cluster that empties is reseeded at the point farthest
/// from its centroid.
LloydResult lloyd(const Matrix& points, std::span<const double> weights, Matrix centroids,
                  std::size_t max_iter, double tol, Exec exec);

/// k-means++ seeding (k = kClusters).
Matrix kmeans_plus_plus(const Matrix& points, std::uint64_t seed);

/// Extreme points along dimension 0 (minimum first).
Matrix kmeans_extremes(const Matrix& points);

/// Requires at least kClusters distinct rows.
ClusterModel fit_kmeans(const Matrix& rows, const KMeansOptions& options = {});

// GMM -------------------------------------------------------------------------

struct GmmParams {
    std::vector<double> weights;
    Matrix means;
    Matrix variances;
};

struct GmmOptions {
    std::size_t max_iter = 500;
    double tol = 1e-9;  // stop when the log-likelihood gain falls below this
    std::uint64_t seed = 0;
    double variance_floor = 1e-8;
    std::optional<GmmParams> initial;  // overrides the k-means initialization
    Exec exec = Exec::parallel;
};

struct EStep {
    Matrix responsibilities;  // n x kClusters
    double log_likelihood = 0.0;
};

EStep gmm_e_step(const Matrix& rows, const GmmParams& params, Exec exec = Exec::parallel);
GmmParams gmm_m_step(const Matrix& rows, const Matrix& responsibilities, double variance_floor);

/// Initial parameters from a k-means fit: centroids, member variances, proportions.
GmmParams gmm_init_from_kmeans(const Matrix& rows, std::uint64_t seed, double variance_floor);

/// Requires at least 2·kClusters rows that are not all identical.
ClusterModel fit_gmm(const Matrix& rows, const GmmOptions& options = {});

// BIRCH -----------------------------------------------------------------------

/// Clustering feature: count, linear sum, and sum of squared norms.
struct ClusteringFeature {
    std::size_t n = 0;
    std::vector<double> linear_sum;
    double square_sum = 0.0;

    ClusteringFeature() = default;
    explicit ClusteringFeature(std::span<const double> point);

    void add(std::span<const double> point);
    void merge(const ClusteringFeature& other);
    std::vector<double> centroid() const;
    /// Root-mean-square distance of members to the centroid.
    double radius() const;

    friend bool operator==(const ClusteringFeature&, const ClusteringFeature&) = default;
};

class CfTree {
public:
    CfTree(std::size_t dims, std::size_t branching, double threshold);
    ~CfTree();
    CfTree(CfTree&&) noexcept;
    CfTree& operator=(CfTree&&) noexcept;

    void insert(std::span<const double> point);
    std::vector<ClusteringFeature> leaf_entries() const;
    /// Sum of all leaf entries, equal to the CF of every inserted point.
    ClusteringFeature root_summary() const;
    std::size_t height() const;

    struct Node;

private:
    std::size_t dims_;
    std::size_t branching_;
    double threshold_;
    std::unique_ptr<Node> root_;
};

struct BirchOptions {
    std::size_t branching = 50;
    double threshold = 0.05;
    Exec exec = Exec::parallel;
};

/// Leaf subclusters are grouped by weighted k-means over their centroids.
/// If the tree ends with fewer than kClusters subclusters the threshold is
/// halved and the tree rebuilt.
ClusterModel fit_birch(const Matrix& rows, const BirchOptions& options = {});

// Spectral --------------------------------------------------------------------

struct SpectralOptions {
    double sigma = 0.1;
    std::uint64_t seed = 0;
    Exec exec = Exec::parallel;
};

struct SpectralEmbedding {
    std::vector<double> eigenvalues;  // ascending, kClusters smallest
    Matrix eigenvectors;              // n x kClusters
};

/// Eigenvectors of the symmetric normalized Laplacian I - D^-1/2 W D^-1/2
/// for the Gaussian affinity W. Throws Error(fit) when a row has zero degree.
SpectralEmbedding spectral_embedding(const Matrix& rows, double sigma, Exec exec = Exec::parallel);

/// Median pairwise Euclidean distance, a common bandwidth default.
double median_pairwise_distance(const Matrix& rows);

ClusterModel fit_spectral(const Matrix& rows, const SpectralOptions& options = {});

// Dispatch --------------------------------------------------------------------

using FitOptions = std::variant<KMeansOptions, GmmOptions, BirchOptions, SpectralOptions>;

ClusterModel fit(const Matrix& rows, const FitOptions& options);

/// Relabels a freshly fitted model so that it is canonical on `rows`.
void canonicalize(ClusterModel& model, const Matrix& rows);

}  // namespace amsad
