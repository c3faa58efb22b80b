#include <doctest.h>

#include "imapce/dpgmm.hpp"
#include "imapce/metrics.hpp"
#include "support/test_helpers.hpp"

#include <random>

using namespace imapce;
using namespace imapce::testing;

namespace {

// Generate-and-recover oracle: spherical gaussian blobs with known labels.
std::pair<Matrix, IntVector> gaussian_blobs(const std::vector<Vector>& centers, int per_cluster,
                                            double stdev, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, stdev);
    const Index dim = centers.front().size();
    Matrix pts(static_cast<Index>(centers.size()) * per_cluster, dim);
    IntVector labels(pts.rows());
    Index row = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < per_cluster; ++i, ++row) {
            for (Index j = 0; j < dim; ++j) pts(row, j) = centers[c](j) + g(rng);
            labels(row) = static_cast<int>(c);
        }
    }
    return {pts, labels};
}

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

} // namespace

TEST_SUITE_BEGIN("dpgmm");

TEST_CASE("three separated blobs are recovered with three active components") {
    auto [pts, truth] = gaussian_blobs({vec2(0, 0), vec2(10, 0), vec2(0, 10)}, 200, 1.0, 17);
    ClusterModel model = fit_dpgmm(pts, DpgmmConfig{});

    CHECK(model.active_components.size() == 3);
    CHECK(nmi(model.assignments, truth) > 0.95);

    SUBCASE("elbo is non-decreasing") {
        REQUIRE(model.elbo_trace.size() >= 2);
        for (std::size_t i = 1; i < model.elbo_trace.size(); ++i)
            CHECK(model.elbo_trace[i] >=
                  model.elbo_trace[i - 1] - 1e-8 * (1.0 + std::abs(model.elbo_trace[i - 1])));
    }
    SUBCASE("responsibilities are a proper distribution per row") {
        Vector row_sums = model.responsibilities.rowwise().sum();
        CHECK((row_sums.array() - 1.0).abs().maxCoeff() < 1e-10);
    }
    SUBCASE("weights sum to one") {
        CHECK(model.weights.sum() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(model.weights.minCoeff() >= 0.0);
    }
}

TEST_CASE("a single blob is absorbed by one component") {
    auto [pts, truth] = gaussian_blobs({vec2(3, -2)}, 400, 1.0, 5);
    ClusterModel model = fit_dpgmm(pts, DpgmmConfig{});
    int biggest = 0;
    for (int l : model.active_components) biggest = std::max(biggest, model.component_size(l));
    CHECK(biggest >= 380); // >= 95% of the points
    (void)truth;
}

TEST_CASE("duplicated points receive identical assignments") {
    auto [pts, truth] = gaussian_blobs({vec2(0, 0), vec2(6, 6)}, 50, 0.5, 23);
    Matrix doubled(pts.rows() * 2, pts.cols());
    doubled << pts, pts;
    ClusterModel model = fit_dpgmm(doubled, DpgmmConfig{});
    for (Index i = 0; i < pts.rows(); ++i)
        CHECK(model.assignments(i) == model.assignments(i + pts.rows()));
    (void)truth;
}

TEST_CASE("permuting the input rows permutes the assignments") {
    auto [pts, truth] = gaussian_blobs({vec2(0, 0), vec2(8, 1), vec2(-4, 7)}, 60, 0.8, 41);
    ClusterModel base = fit_dpgmm(pts, DpgmmConfig{});

    std::vector<Index> perm(static_cast<std::size_t>(pts.rows()));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(99));
    Matrix shuffled(pts.rows(), pts.cols());
    for (Index i = 0; i < pts.rows(); ++i) shuffled.row(i) = pts.row(perm[static_cast<std::size_t>(i)]);

    ClusterModel permuted = fit_dpgmm(shuffled, DpgmmConfig{});
    for (Index i = 0; i < pts.rows(); ++i)
        CHECK(permuted.assignments(i) == base.assignments(perm[static_cast<std::size_t>(i)]));
    (void)truth;
}

TEST_CASE("refitting the same data reproduces the model exactly") {
    auto [pts, truth] = gaussian_blobs({vec2(0, 0), vec2(5, 5)}, 100, 1.0, 3);
    ClusterModel a = fit_dpgmm(pts, DpgmmConfig{});
    ClusterModel b = fit_dpgmm(pts, DpgmmConfig{});
    CHECK((a.assignments - b.assignments).cwiseAbs().maxCoeff() == 0);
    CHECK((a.means - b.means).norm() == 0.0);
    (void)truth;
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(fit_dpgmm(Matrix::Zero(1, 2), DpgmmConfig{}), std::invalid_argument);
    Matrix bad = Matrix::Zero(5, 2);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fit_dpgmm(bad, DpgmmConfig{}), std::invalid_argument);
    DpgmmConfig cfg;
    cfg.max_components = 1;
    CHECK_THROWS_AS(fit_dpgmm(Matrix::Random(20, 2), cfg), std::invalid_argument);
}

TEST_CASE("posterior_params filters by size and regularizes covariances") {
    auto [pts, truth] = gaussian_blobs({vec2(0, 0), vec2(12, 0), vec2(0, 12)}, 150, 1.0, 29);
    // Append a couple of far outliers that should form a tiny component or
    // attach to an existing one.
    Matrix with_outliers(pts.rows() + 3, 2);
    with_outliers.topRows(pts.rows()) = pts;
    with_outliers.row(pts.rows()) = vec2(60, 60).transpose();
    with_outliers.row(pts.rows() + 1) = vec2(61, 59).transpose();
    with_outliers.row(pts.rows() + 2) = vec2(59, 61).transpose();

    ClusterModel model = fit_dpgmm(with_outliers, DpgmmConfig{});
    auto big = posterior_params(model, 75);
    CHECK(big.size() == 3); // the three real blobs pass, the outlier trio is filtered
    for (const auto& c : big) {
        CHECK(c.size >= 75);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(c.covariance);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }

    auto none = posterior_params(model, 100000);
    CHECK(none.empty()); // termination signal
}

TEST_CASE("sizes {300,200,3} with s=75 keep exactly two clusters") {
    auto [pts, truth] = gaussian_blobs({vec2(0, 0)}, 300, 0.7, 7);
    auto [pts2, truth2] = gaussian_blobs({vec2(9, 9)}, 200, 0.7, 8);
    auto [pts3, truth3] = gaussian_blobs({vec2(-9, 9)}, 3, 0.2, 9);
    Matrix all(503, 2);
    all << pts, pts2, pts3;
    ClusterModel model = fit_dpgmm(all, DpgmmConfig{});
    CHECK(posterior_params(model, 75).size() == 2);
    (void)truth;
    (void)truth2;
    (void)truth3;
}

TEST_SUITE_END();
