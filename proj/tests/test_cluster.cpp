#include "amsad/bench.hpp"
#include "amsad/cluster.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace amsad;
using fixtures::column;
using fixtures::error_kind;

namespace {

double accuracy(const ClusterModel& m, const fixtures::Labeled& f) {
    const auto a = assign_all(m, f.x);
    return permutation_accuracy(f.labels, a);
}

// Direct-density responsibilities with no log-space tricks.
Matrix brute_responsibilities(const Matrix& x, const GmmParams& p) {
    Matrix r(x.rows(), 2);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double dens[2];
        for (std::size_t c = 0; c < 2; ++c) {
            double d = p.weights[c];
            for (std::size_t j = 0; j < x.cols(); ++j) {
                const double v = p.variances(c, j);
                const double z = x(i, j) - p.means(c, j);
                d *= std::exp(-z * z / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
            }
            dens[c] = d;
        }
        for (std::size_t c = 0; c < 2; ++c) r(i, c) = dens[c] / (dens[0] + dens[1]);
    }
    return r;
}

}  // namespace

TEST_CASE("algorithm names") {
    CHECK(parse_algorithm("k-means") == Algorithm::kmeans);
    CHECK(parse_algorithm(to_string(Algorithm::spectral)) == Algorithm::spectral);
    CHECK(error_kind([] { parse_algorithm("dbscan"); }) == ErrorKind::config);
}

TEST_CASE("k-means on the four-point example") {
    const Matrix x = column({0, 1, 10, 11});
    for (auto init : {KMeansInit::extremes, KMeansInit::plus_plus}) {
        KMeansOptions o;
        o.init = init;
        o.seed = 3;
        const auto m = fit_kmeans(x, o);
        const auto& c = std::get<KMeansState>(m.state).centroids;
        CHECK(c(0, 0) == 0.5);
        CHECK(c(1, 0) == 10.5);
        CHECK(assign_all(m, x) == std::vector<int>{0, 0, 1, 1});
        CHECK(m.trace.converged);
    }
}

TEST_CASE("k-means rejects data without two distinct points") {
    CHECK(error_kind([] { fit_kmeans(column({3, 3, 3, 3})); }) == ErrorKind::fit);
    CHECK(error_kind([] { fit_kmeans(column({1})); }) == ErrorKind::fit);
    CHECK(error_kind([] { fit_kmeans(column({1, NAN, 2})); }) == ErrorKind::input);
}

TEST_CASE("k-means sse never increases") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto f = fixtures::gaussian_pair(60, 3, 1.5, 1.0, s);
        KMeansOptions o;
        o.seed = s;
        const auto m = fit_kmeans(f.x, o);
        for (std::size_t i = 1; i < m.trace.objective.size(); ++i) {
            CHECK(m.trace.objective[i] <= m.trace.objective[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("cluster statistics example") {
    const Matrix x = column({0, 1, 10, 11});
    const std::vector<int> labels{1, 1, 0, 0};
    const auto st = cluster_stats_from_labels(x, labels);
    CHECK(st.swapped);
    CHECK(st.mean[0][0] == 0.5);
    CHECK(st.mean[1][0] == 10.5);
    CHECK(st.stddev[0][0] == 0.5);
    CHECK(st.stddev[1][0] == 0.5);
    const std::vector<int> single{0, 0, 0, 1};
    CHECK(cluster_stats_from_labels(x, single).stddev[1][0] == 0.0);
    const std::vector<int> empty{0, 0, 0, 0};
    CHECK(error_kind([&] { cluster_stats_from_labels(x, empty); }) == ErrorKind::stats);
}

TEST_CASE("assign ties go to cluster 0 and dimensions are checked") {
    ClusterModel m;
    m.algorithm = Algorithm::kmeans;
    m.dims = 1;
    Matrix c(2, 1);
    c(0, 0) = 0.0;
    c(1, 0) = 1.0;
    m.state = KMeansState{c};
    const std::vector<double> mid{0.5}, at{1.0}, wide{0.5, 0.5};
    CHECK(assign(m, mid) == 0);
    CHECK(assign(m, at) == 1);
    CHECK(error_kind([&] { assign(m, wide); }) == ErrorKind::input);
}

TEST_CASE("gmm responsibilities match the direct-density oracle") {
    const auto f = fixtures::gaussian_pair(40, 2, 2.0, 1.0, 5);
    GmmParams p;
    p.weights = {0.3, 0.7};
    p.means = Matrix(2, 2);
    p.variances = Matrix(2, 2, 1.0);
    p.means(1, 0) = 2.0;
    p.means(1, 1) = 1.5;
    p.variances(0, 1) = 0.5;
    p.variances(1, 0) = 2.0;
    const auto e = gmm_e_step(f.x, p);
    const Matrix oracle = brute_responsibilities(f.x, p);
    double ll = 0.0;
    for (std::size_t i = 0; i < f.x.rows(); ++i) {
        for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(e.responsibilities(i, c) - oracle(i, c)) < 1e-9);
    }
    for (std::size_t i = 0; i < f.x.rows(); ++i) {
        double d = 0.0;
        for (std::size_t c = 0; c < 2; ++c) {
            double dc = p.weights[c];
            for (std::size_t j = 0; j < 2; ++j) {
                const double z = f.x(i, j) - p.means(c, j);
                dc *= std::exp(-z * z / (2 * p.variances(c, j))) / std::sqrt(2 * std::numbers::pi * p.variances(c, j));
            }
            d += dc;
        }
        ll += std::log(d);
    }
    CHECK(e.log_likelihood == doctest::Approx(ll).epsilon(1e-12));
}

TEST_CASE("gmm m-step matches weighted moments") {
    const Matrix x = column({0, 1, 2, 3});
    Matrix r(4, 2);
    const double w0[] = {1.0, 0.75, 0.25, 0.0};
    for (std::size_t i = 0; i < 4; ++i) {
        r(i, 0) = w0[i];
        r(i, 1) = 1.0 - w0[i];
    }
    const auto p = gmm_m_step(x, r, 1e-8);
    CHECK(p.weights[0] == doctest::Approx(0.5));
    CHECK(p.means(0, 0) == doctest::Approx((0.75 + 0.5) / 2.0));
    const double mu = p.means(0, 0);
    const double var = (1.0 * mu * mu + 0.75 * (1 - mu) * (1 - mu) + 0.25 * (2 - mu) * (2 - mu)) / 2.0;
    CHECK(p.variances(0, 0) == doctest::Approx(var));
}

TEST_CASE("gmm log-likelihood never decreases") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto f = fixtures::gaussian_pair(60, 2, 2.0, 1.0, 100 + s);
        GmmOptions o;
        o.seed = s;
        const auto m = fit_gmm(f.x, o);
        for (std::size_t i = 1; i < m.trace.objective.size(); ++i) {
            CHECK(m.trace.objective[i] >= m.trace.objective[i - 1] - 1e-9);
        }
    }
}

TEST_CASE("gmm rejects degenerate data") {
    CHECK(error_kind([] { fit_gmm(column({2, 2, 2, 2, 2, 2})); }) == ErrorKind::fit);
}

TEST_CASE("gmm point at a component mean joins that component") {
    const auto f = fixtures::canonical_blobs();
    const auto m = fit_gmm(f.x);
    const auto& st = std::get<GmmState>(m.state);
    for (std::size_t c = 0; c < 2; ++c) CHECK(assign(m, st.means.row(c)) == static_cast<int>(c));
}

TEST_CASE("clustering feature additivity is exact") {
    const std::vector<std::vector<double>> pts{{0.5, 1.25}, {2.0, -0.75}, {0.125, 4.0}, {3.5, 0.0}};
    ClusteringFeature a(pts[0]), b(pts[2]);
    a.add(pts[1]);
    b.add(pts[3]);
    ClusteringFeature all;
    for (const auto& p : pts) all.merge(ClusteringFeature(p));
    ClusteringFeature ab = a;
    ab.merge(b);
    CHECK(ab == all);
    CHECK(all.n == 4);
    CHECK(all.linear_sum == std::vector<double>{6.125, 4.5});
    CHECK(all.centroid() == std::vector<double>{6.125 / 4, 4.5 / 4});

    CfTree tree(2, 3, 0.1);
    for (const auto& p : pts) tree.insert(p);
    CHECK(tree.root_summary() == all);
}

TEST_CASE("cf tree splits and conserves mass") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> u(0, 1 << 10);
    CfTree tree(2, 4, 1e-3);
    ClusteringFeature total;
    for (int i = 0; i < 500; ++i) {
        const std::vector<double> p{u(rng) / 1024.0, u(rng) / 1024.0};
        tree.insert(p);
        total.merge(ClusteringFeature(p));
    }
    CHECK(tree.height() > 1);
    CHECK(tree.root_summary() == total);
    std::size_t n = 0;
    for (const auto& e : tree.leaf_entries()) n += e.n;
    CHECK(n == 500);
}

TEST_CASE("birch rejects bad options") {
    const Matrix x = column({0, 1, 10, 11});
    CHECK(error_kind([&] { fit_birch(x, BirchOptions{.threshold = 0.0}); }) == ErrorKind::config);
    CHECK(error_kind([&] { fit_birch(x, BirchOptions{.branching = 1}); }) == ErrorKind::config);
}

TEST_CASE("birch shrinks the threshold until two subclusters exist") {
    const auto m = fit_birch(column({0, 0.01, 0.02, 0.03}), BirchOptions{.threshold = 10.0});
    const auto& st = std::get<BirchState>(m.state);
    CHECK(st.subclusters >= 2);
    CHECK(st.threshold < 10.0);
}

TEST_CASE("spectral embedding is orthonormal with a null eigenvalue") {
    const auto f = fixtures::gaussian_pair(30, 2, 1.0, 1.0, 8);
    const auto e = spectral_embedding(f.x, median_pairwise_distance(f.x));
    REQUIRE(e.eigenvalues.size() == 2);
    CHECK(std::abs(e.eigenvalues[0]) < 1e-8);
    CHECK(e.eigenvalues[0] <= e.eigenvalues[1]);
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < f.x.rows(); ++i) dot += e.eigenvectors(i, a) * e.eigenvectors(i, b);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
    }
}

TEST_CASE("spectral fails on an isolated point") {
    const Matrix x = column({0, 0.001, 0.002, 100});
    CHECK(error_kind([&] { fit_spectral(x, SpectralOptions{.sigma = 0.01}); }) == ErrorKind::fit);
    CHECK(fixtures::error_key([&] { fit_spectral(x, SpectralOptions{.sigma = 0.01}); }) == "sigma");
}

TEST_CASE("all algorithms separate the canonical blobs and are canonical") {
    const auto f = fixtures::canonical_blobs();
    const std::vector<FitOptions> opts{KMeansOptions{}, GmmOptions{}, BirchOptions{}, SpectralOptions{}};
    for (const auto& o : opts) {
        const auto m = fit(f.x, o);
        CHECK(accuracy(m, f) == 100.0);
        const auto st = cluster_stats(m, f.x);
        CHECK(st.mean[0][0] < st.mean[1][0]);
        CHECK(m.stats.mean[0][0] < m.stats.mean[1][0]);
    }
}

TEST_CASE("fits are reproducible") {
    const auto f = fixtures::gaussian_pair(50, 2, 2.0, 1.0, 77);
    for (const FitOptions& o : std::vector<FitOptions>{KMeansOptions{.seed = 4}, GmmOptions{.seed = 4},
                                                        BirchOptions{}, SpectralOptions{.seed = 4}}) {
        CHECK(assign_all(fit(f.x, o), f.x) == assign_all(fit(f.x, o), f.x));
    }
}

TEST_CASE("row order does not change k-means extremes result") {
    const auto f = fixtures::gaussian_pair(40, 1, 6.0, 1.0, 3);
    Matrix rev(f.x.rows(), 1);
    for (std::size_t i = 0; i < f.x.rows(); ++i) rev(i, 0) = f.x(f.x.rows() - 1 - i, 0);
    KMeansOptions o;
    o.init = KMeansInit::extremes;
    const auto a = std::get<KMeansState>(fit_kmeans(f.x, o).state).centroids;
    const auto b = std::get<KMeansState>(fit_kmeans(rev, o).state).centroids;
    CHECK(a(0, 0) == doctest::Approx(b(0, 0)).epsilon(1e-12));
    CHECK(a(1, 0) == doctest::Approx(b(1, 0)).epsilon(1e-12));
}
