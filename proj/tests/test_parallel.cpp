// Serial reference kernels against their OpenMP variants, bit for bit.

#include "amsad/bench.hpp"
#include "amsad/kernels.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <omp.h>

using namespace amsad;
using kernels::Exec;

namespace {

struct Threads {
    int saved = omp_get_max_threads();
    explicit Threads(int n) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("kernels agree bitwise across execution modes") {
    Threads t(4);
    const auto f = fixtures::gaussian_pair(150, 3, 1.0, 1.0, 12);
    Matrix c(2, 3);
    for (std::size_t j = 0; j < 3; ++j) c(1, j) = 1.0;

    std::vector<int> la(f.x.rows()), lb(f.x.rows());
    std::vector<double> da(f.x.rows()), db(f.x.rows());
    kernels::nearest_centroid(f.x, c, la, da, Exec::serial);
    kernels::nearest_centroid(f.x, c, lb, db, Exec::parallel);
    CHECK(la == lb);
    CHECK(da == db);

    Matrix va(2, 3, 0.7), ga, gb;
    const std::vector<double> w{0.4, 0.6};
    kernels::gmm_log_joint(f.x, w, c, va, ga, Exec::serial);
    kernels::gmm_log_joint(f.x, w, c, va, gb, Exec::parallel);
    CHECK(ga == gb);

    Matrix aa, ab;
    kernels::gaussian_affinity(f.x, 0.8, aa, Exec::serial);
    kernels::gaussian_affinity(f.x, 0.8, ab, Exec::parallel);
    CHECK(aa == ab);

    std::vector<std::size_t> na(f.x.rows()), nb(f.x.rows());
    kernels::nearest_row(f.x, f.x, na, Exec::serial);
    kernels::nearest_row(f.x, f.x, nb, Exec::parallel);
    CHECK(na == nb);
}

TEST_CASE("fits agree bitwise across execution modes") {
    Threads t(4);
    const auto f = fixtures::gaussian_pair(100, 2, 2.0, 1.0, 31);
    const auto km = [&](Exec e) { return fit_kmeans(f.x, KMeansOptions{.seed = 2, .exec = e}); };
    CHECK(std::get<KMeansState>(km(Exec::serial).state).centroids ==
          std::get<KMeansState>(km(Exec::parallel).state).centroids);
    CHECK(km(Exec::serial).trace.objective == km(Exec::parallel).trace.objective);

    const auto gm = [&](Exec e) { return fit_gmm(f.x, GmmOptions{.seed = 2, .exec = e}); };
    CHECK(std::get<GmmState>(gm(Exec::serial).state).means == std::get<GmmState>(gm(Exec::parallel).state).means);
    CHECK(gm(Exec::serial).trace.objective == gm(Exec::parallel).trace.objective);

    const auto br = [&](Exec e) { return fit_birch(f.x, BirchOptions{.exec = e}); };
    CHECK(std::get<BirchState>(br(Exec::serial).state).centroids ==
          std::get<BirchState>(br(Exec::parallel).state).centroids);

    const auto sp = [&](Exec e) { return fit_spectral(f.x, SpectralOptions{.seed = 2, .exec = e}); };
    CHECK(std::get<SpectralState>(sp(Exec::serial).state).training_labels ==
          std::get<SpectralState>(sp(Exec::parallel).state).training_labels);

    CHECK(assign_all(gm(Exec::serial), f.x, Exec::serial) == assign_all(gm(Exec::serial), f.x, Exec::parallel));
}

TEST_CASE("datasets and suites do not depend on the thread count") {
    ExperimentConfig c;
    apply_override(c, "experiment=IPPA");
    c.n_samples_per_class = 12;
    c.n_samples = 300;
    c.window_k = 3;
    std::vector<FeatureRow> one, four;
    std::string r1, r4;
    const auto suite = parse_suite("defaults: {n_samples_per_class: 10, n_samples: 300}\n"
                                   "experiments: [{experiment: PA}, {experiment: TA}, {experiment: IPRA}]\n");
    {
        Threads t(1);
        one = generate_dataset(c);
        r1 = report_csv(run_suite(suite));
    }
    {
        Threads t(4);
        four = generate_dataset(c);
        r4 = report_csv(run_suite(suite));
    }
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].values == four[i].values);
        CHECK(one[i].sample_id == four[i].sample_id);
    }
    CHECK(r1 == r4);
}
