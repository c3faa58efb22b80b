#include <doctest.h>

#include "imapce/explore.hpp"
#include "imapce/metrics.hpp"
#include "support/test_helpers.hpp"

#include <random>
#include <set>

using namespace imapce;
using namespace imapce::testing;

TEST_SUITE_BEGIN("explore");

namespace {

// Two well-separated gaussian blobs in d dimensions.
Dataset two_blob_dataset(int per_blob, int d, double separation, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix pts(2 * per_blob, d);
    IntVector labels(2 * per_blob);
    for (int i = 0; i < 2 * per_blob; ++i) {
        const int blob = i < per_blob ? 0 : 1;
        for (int j = 0; j < d; ++j) pts(i, j) = g(rng) + (j == 0 ? separation * blob : 0.0);
        labels(i) = blob;
    }
    Dataset data(pts);
    data.add_labels("label", labels);
    return data;
}

void check_partition_invariants(const ExplorationHistory& history, Index n) {
    std::set<Index> claimed;
    for (const auto& it : history.iterations) {
        for (const auto& rows : it.distinct_rows) {
            CHECK(!rows.empty());
            for (Index r : rows) {
                CHECK(r >= 0);
                CHECK(r < n);
                CHECK(claimed.insert(r).second); // pairwise disjoint across iterations
            }
        }
    }
    for (Index r : history.initial_prior_rows) CHECK(claimed.insert(r).second);
}

} // namespace

TEST_CASE("mahalanobis distance") {
    Vector zero = Vector::Zero(2);
    Vector mj(2);
    mj << 2, 0;
    CHECK(mahalanobis(mj, zero, Matrix::Identity(2, 2)) == doctest::Approx(2.0));
    CHECK(mahalanobis(zero, zero, Matrix::Identity(2, 2)) == doctest::Approx(0.0));

    // Hand computation: C = diag(4, 1), m_j = (2, 0) -> 2 / sqrt(4) = 1.
    Matrix C = Matrix::Zero(2, 2);
    C(0, 0) = 4.0;
    C(1, 1) = 1.0;
    CHECK(mahalanobis(mj, zero, C) == doctest::Approx(1.0));
}

TEST_CASE("distance matrix symmetrizes the pairwise distances") {
    // delta_12 = 3, delta_21 = 5 -> D_12 = 4. Choose covariances scaled so
    // the directed distances come out exactly.
    ClusterSummary a, b;
    a.mean = Vector::Zero(1);
    b.mean = Vector::Ones(1);
    a.covariance = Matrix::Constant(1, 1, 1.0 / 9.0);  // delta_ab = 1/sqrt(1/9) = 3
    b.covariance = Matrix::Constant(1, 1, 1.0 / 25.0); // delta_ba = 5
    Matrix D = distance_matrix({a, b});
    CHECK(D(0, 1) == doctest::Approx(4.0));
    CHECK(D(1, 0) == doctest::Approx(4.0));
    CHECK(D(0, 0) == doctest::Approx(0.0));

    SUBCASE("identical clusters give a zero matrix") {
        Matrix Z = distance_matrix({a, a});
        CHECK(Z.norm() == doctest::Approx(0.0));
    }
    SUBCASE("fewer than two clusters is an error") {
        CHECK_THROWS_AS(distance_matrix({a}), std::invalid_argument);
    }
}

TEST_CASE("three-cluster distance matrix matches brute force") {
    std::vector<ClusterSummary> cs(3);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (auto& c : cs) {
        c.mean = Vector(2);
        c.mean << g(rng), g(rng);
        Matrix A(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) A(i, j) = g(rng);
        c.covariance = A * A.transpose() + 0.5 * Matrix::Identity(2, 2);
    }
    Matrix D = distance_matrix(cs);
    for (int l = 0; l < 3; ++l)
        for (int j = 0; j < 3; ++j) {
            const double dlj = std::sqrt((cs[j].mean - cs[l].mean).transpose() *
                                         cs[l].covariance.inverse() * (cs[j].mean - cs[l].mean));
            const double djl = std::sqrt((cs[l].mean - cs[j].mean).transpose() *
                                         cs[j].covariance.inverse() * (cs[l].mean - cs[j].mean));
            CHECK(D(l, j) == doctest::Approx(0.5 * (dlj + djl)).epsilon(1e-9));
        }
    CHECK((D - D.transpose()).norm() < 1e-12);
}

TEST_CASE("most distinct cluster selection") {
    Matrix D(3, 3);
    D << 0, 5, 0, 5, 0, 4, 0, 4, 0; // row sums 5, 9, 4
    CHECK(most_distinct(D) == std::vector<int>{1});

    SUBCASE("ties break to the lowest index") {
        Matrix T(3, 3);
        T << 0, 4, 1, // sums 5, 5, 2
            4, 0, 1, 1, 1, 0;
        CHECK(most_distinct(T) == std::vector<int>{0});
    }
    SUBCASE("exactly two clusters returns both") {
        Matrix P(2, 2);
        P << 0, 3, 3, 0;
        CHECK(most_distinct(P) == std::vector<int>{0, 1});
    }
}

TEST_CASE("two separated blobs are explored in at most two iterations") {
    Dataset data = two_blob_dataset(300, 10, 25.0, 44);
    Hyperparams hp;
    hp.alpha = 1.0;
    hp.mu = 50.0;
    hp.min_cluster_size = 75;
    hp.restarts = 2;
    hp.max_iter = 150;
    hp.seed = 0;

    ExplorationHistory history = explore(data, PriorSpec::none(), hp, DpgmmConfig{});
    REQUIRE(!history.iterations.empty());
    CHECK(history.iterations.size() <= 2);

    // Generative oracle: the first extracted cluster is at least 95% pure.
    const auto& first = history.iterations.front().distinct_rows;
    REQUIRE(!first.empty());
    const IntVector& labels = data.labels();
    for (const auto& rows : first) {
        int majority[2] = {0, 0};
        for (Index r : rows) majority[labels(r)]++;
        const double purity =
            static_cast<double>(std::max(majority[0], majority[1])) / static_cast<double>(rows.size());
        CHECK(purity >= 0.95);
    }
    check_partition_invariants(history, data.rows());
}

TEST_CASE("single-cluster data terminates with no acceptable cluster") {
    Dataset data = two_blob_dataset(200, 6, 0.0, 9); // one blob, zero separation
    Hyperparams hp;
    hp.mu = 10.0;
    hp.min_cluster_size = 75;
    hp.max_iter = 100;
    ExplorationHistory history = explore(data, PriorSpec::none(), hp, DpgmmConfig{});
    CHECK(history.terminal_reason == TerminalReason::NoAcceptableCluster);
    CHECK(history.iterations.size() == 1);
    CHECK(history.iterations.front().distinct_rows.empty());
}

TEST_CASE("oversized min cluster size terminates immediately") {
    Dataset data = two_blob_dataset(40, 5, 10.0, 3);
    Hyperparams hp;
    hp.min_cluster_size = 100; // larger than n
    ExplorationHistory history = explore(data, PriorSpec::none(), hp, DpgmmConfig{});
    CHECK(history.iterations.empty());
    CHECK(history.terminal_reason == TerminalReason::TooFewUnexplored);
}

TEST_CASE("subset prior rows start explored and stay out of Z") {
    Dataset data = two_blob_dataset(150, 8, 20.0, 12);
    IndexList prior_rows;
    for (Index i = 0; i < 50; ++i) prior_rows.push_back(i);
    Hyperparams hp;
    hp.mu = 10.0;
    hp.min_cluster_size = 60;
    hp.max_iter = 100;
    hp.seed = 5;
    ExplorationHistory history =
        explore(data, PriorSpec::subset(prior_rows), hp, DpgmmConfig{});
    for (const auto& it : history.iterations)
        for (Index r : it.embeddings.source_rows) CHECK(r >= 50);
    check_partition_invariants(history, data.rows());
}

TEST_CASE("unexplored count strictly decreases while iterating") {
    Dataset data = two_blob_dataset(250, 10, 18.0, 77);
    Hyperparams hp;
    hp.mu = 20.0;
    hp.min_cluster_size = 75;
    hp.max_iter = 120;
    ExplorationHistory history = explore(data, PriorSpec::none(), hp, DpgmmConfig{});
    std::size_t prev = static_cast<std::size_t>(data.rows()) + 1;
    for (const auto& it : history.iterations) {
        CHECK(it.embeddings.source_rows.size() < prev);
        prev = it.embeddings.source_rows.size();
    }
}

TEST_CASE("same seed reruns bitwise identically") {
    Dataset data = two_blob_dataset(200, 8, 15.0, 21);
    Hyperparams hp;
    hp.mu = 25.0;
    hp.min_cluster_size = 70;
    hp.max_iter = 120;
    hp.restarts = 3;
    hp.seed = 11;
    ExplorationHistory a = explore(data, PriorSpec::none(), hp, DpgmmConfig{});
    ExplorationHistory b = explore(data, PriorSpec::none(), hp, DpgmmConfig{});
    REQUIRE(a.iterations.size() == b.iterations.size());
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
        CHECK((a.iterations[i].projection - b.iterations[i].projection).norm() == 0.0);
        CHECK((a.iterations[i].clusters.assignments - b.iterations[i].clusters.assignments)
                  .cwiseAbs()
                  .maxCoeff() == 0);
        CHECK(a.iterations[i].distinct_rows == b.iterations[i].distinct_rows);
    }
    CHECK(a.terminal_reason == b.terminal_reason);
}

TEST_CASE("attribute and sample priors are rejected") {
    Dataset data = two_blob_dataset(50, 5, 5.0, 1);
    Hyperparams hp;
    CHECK_THROWS_AS(explore(data, PriorSpec::attributes({0}), hp, DpgmmConfig{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(explore(data, PriorSpec::samples(Matrix::Random(5, 5)), hp, DpgmmConfig{}),
                    std::invalid_argument);
}

TEST_SUITE_END();
