#include "amsad/bench.hpp"
#include "amsad/centroid.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace amsad;
using fixtures::column;
using fixtures::error_kind;

TEST_CASE("both cluster means at the feature mean fall back on both sides") {
    const std::vector<double> f{0.2, 0.4, 0.6, 0.8};
    const auto p = select_centroids(f, {0.5, 0.5}, {0.1, 0.1});
    CHECK(p.low == 0.5);
    CHECK(p.high == 0.5);
    CHECK(p.low_fallback);
    CHECK(p.high_fallback);
    CHECK(p.m_low == 0);
}

TEST_CASE("mirror-symmetric data gives symmetric centroids") {
    const std::vector<double> f{0.1, 0.15, 0.2, 0.25, 0.3, 0.7, 0.75, 0.8, 0.85, 0.9};
    const CentroidOptions cluster_sigma{IntervalSigma::cluster};
    const auto t = trace_centroid_selection(f, {0.2, 0.8}, {0.02, 0.02}, cluster_sigma);
    CHECK(t.pair.m_low == t.pair.m_high);
    CHECK_FALSE(t.pair.low_fallback);
    CHECK_FALSE(t.pair.high_fallback);
    CHECK(std::abs((t.mu - t.pair.low) - (t.pair.high - t.mu)) < 1e-9);
    CHECK(t.pair.low == doctest::Approx(0.275));
    CHECK(t.low_members == std::vector<std::size_t>{3, 4});
    CHECK(t.high_members == std::vector<std::size_t>{5, 6});

    const auto g = trace_centroid_selection(f, {0.2, 0.8}, {0.02, 0.02});
    CHECK(g.pair.m_low == g.pair.m_high);
    CHECK(std::abs((g.mu - g.pair.low) - (g.pair.high - g.mu)) < 1e-9);
}

TEST_CASE("variance terms follow the interval formulas") {
    const std::vector<double> f{0.0, 0.1, 0.3, 0.6, 1.0};
    const std::array<double, 2> mk{0.1, 0.8}, sk{0.05, 0.2};
    const auto t = trace_centroid_selection(f, mk, sk);
    CHECK(t.mu == doctest::Approx(0.4));
    double var = 0.0;
    for (double v : f) var += (v - 0.4) * (v - 0.4);
    CHECK(t.sigma == doctest::Approx(std::sqrt(var / 5.0)));
    for (int i = 1; i <= 4; ++i) {
        CHECK(t.var_low[i - 1] == doctest::Approx(std::abs(mk[0] + i * sk[0] - (t.mu - i * t.sigma))));
        CHECK(t.var_high[i - 1] == doctest::Approx(std::abs(mk[1] - i * sk[1] - (t.mu + i * t.sigma))));
    }
}

TEST_CASE("argmin keeps the first of equal minima") {
    // mu = 0.5 and sigma = 0.25 exactly, so var_low = var_high = {0.125, 0.125, 0.375, 0.625}.
    const std::vector<double> f{0.25, 0.25, 0.75, 0.75};
    const auto t = trace_centroid_selection(f, {0.125, 0.875}, {0.0, 0.0}, CentroidOptions{IntervalSigma::cluster});
    CHECK(t.var_low[0] == t.var_low[1]);
    CHECK(t.var_high[0] == t.var_high[1]);
    CHECK(t.pair.m_low == 1);
    CHECK(t.pair.m_high == 1);
    CHECK(t.pair.low == 0.25);
    CHECK(t.pair.high == 0.75);
}

TEST_CASE("input checks") {
    const std::vector<double> bad{0.1, 1.5};
    CHECK(error_kind([&] { select_centroids(bad, {0.1, 0.9}, {0.1, 0.1}); }) == ErrorKind::input);
    const std::vector<double> f{0.1, 0.2, 0.9};
    CHECK(error_kind([&] { select_centroids(f, {0.9, 0.1}, {0.1, 0.1}); }) == ErrorKind::input);
    CHECK(error_kind([&] { select_centroids(f, {0.0, 0.05}, {0.1, 0.1}); }) == ErrorKind::degenerate);
    CHECK(error_kind([&] { select_centroids(f, {0.95, 0.99}, {0.1, 0.1}); }) == ErrorKind::degenerate);
    const std::vector<double> slack{-1e-10, 1.0 + 1e-10};
    CHECK_NOTHROW(select_centroids(slack, {0.0, 1.0}, {0.0, 0.0}));
}

TEST_CASE("nearest-centroid refit") {
    const Matrix x = column({0.1, 0.2, 0.8, 0.9});
    const std::vector<CentroidPair> pair{{0.15, 0.85}};
    const auto m = refit_with_centroids(x, pair);
    CHECK(m.algorithm == Algorithm::centroid);
    CHECK(assign_all(m, x) == std::vector<int>{0, 0, 1, 1});
    const std::vector<double> mid{0.5};
    CHECK(assign(m, mid) == 0);
    const std::vector<CentroidPair> same{{0.4, 0.4}};
    CHECK(error_kind([&] { refit_with_centroids(x, same); }) == ErrorKind::refit);
}

TEST_CASE("per-dimension selection flips reversed dimensions") {
    Matrix x(4, 2);
    const double a[] = {0.1, 0.2, 0.8, 0.9};
    for (std::size_t i = 0; i < 4; ++i) {
        x(i, 0) = a[i];
        x(i, 1) = 1.0 - a[i];
    }
    const std::vector<int> labels{0, 0, 1, 1};
    const auto st = cluster_stats_from_labels(x, labels);
    const auto traces = trace_centroid_selection(x, st, CentroidOptions{IntervalSigma::cluster});
    REQUIRE(traces.size() == 2);
    CHECK_FALSE(traces[0].flipped);
    CHECK(traces[1].flipped);
    CHECK(traces[0].pair.low < traces[0].pair.high);
    CHECK(traces[1].pair.low > traces[1].pair.high);
    const auto m = refit_with_centroids(x, select_centroids(x, st, CentroidOptions{IntervalSigma::cluster}));
    CHECK(assign_all(m, x) == labels);
}

TEST_CASE("centroid selection never hurts on overlapping gaussians") {
    double base = 0.0, boosted = 0.0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto f = fixtures::gaussian_pair(100, 1, 2.0, 1.0, 300 + s);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < f.x.rows(); ++i) {
            lo = std::min(lo, f.x(i, 0));
            hi = std::max(hi, f.x(i, 0));
        }
        for (std::size_t i = 0; i < f.x.rows(); ++i) f.x(i, 0) = (f.x(i, 0) - lo) / (hi - lo);
        const auto g = fit_gmm(f.x, GmmOptions{.seed = s});
        base += permutation_accuracy(f.labels, assign_all(g, f.x));
        const auto c = apply_centroid_selection(g, f.x);
        boosted += permutation_accuracy(f.labels, assign_all(c, f.x));
    }
    CHECK(boosted >= base);
}

TEST_CASE("gmm centroid inputs come from the components") {
    const auto f = fixtures::canonical_blobs();
    const auto g = fit_gmm(f.x);
    const auto in = centroid_inputs(g);
    const auto& st = std::get<GmmState>(g.state);
    CHECK(in.mean[1][0] == st.means(1, 0));
    CHECK(in.stddev[0][1] == std::sqrt(st.variances(0, 1)));
}
