#ifndef IMAPCE_SRC_KMEANS_HPP
#define IMAPCE_SRC_KMEANS_HPP

#include "imapce/dataset.hpp"

#include <limits>
#include <random>

namespace imapce::detail {

inline IntVector lloyd(const Matrix& X, Matrix& centers, int max_iter) {
    const Index n = X.rows();
    const int k = static_cast<int>(centers.rows());
    IntVector assign = IntVector::Constant(n, -1);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            int bestc = 0;
            double bestd = (X.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double dd = (X.row(i) - centers.row(c)).squaredNorm();
                if (dd < bestd) {
                    bestd = dd;
                    bestc = c;
                }
            }
            if (assign(i) != bestc) {
                assign(i) = bestc;
                changed = true;
            }
        }
        if (!changed) break;
        Matrix sums = Matrix::Zero(k, X.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Index i = 0; i < n; ++i) {
            sums.row(assign(i)) += X.row(i);
            counts(assign(i)) += 1;
        }
        for (int c = 0; c < k; ++c)
            if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    }
    return assign;
}

// Seeded k-means++ center selection followed by Lloyd iterations.
// Deterministic for a fixed seed.
inline IntVector kmeans(const Matrix& X, int n_clusters, std::uint64_t seed,
                        int max_iter = 50, Matrix* centers_out = nullptr) {
    const Index n = X.rows();
    const int k = static_cast<int>(std::min<Index>(n_clusters, n));
    std::mt19937_64 rng(seed);

    Matrix centers(k, X.cols());
    Vector dist2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.row(0) = X.row(pick(rng));
    for (int c = 1; c < k; ++c) {
        for (Index i = 0; i < n; ++i)
            dist2(i) = std::min(dist2(i), (X.row(i) - centers.row(c - 1)).squaredNorm());
        const double total = dist2.sum();
        if (total <= 0.0) {
            centers.row(c) = X.row(pick(rng));
            continue;
        }
        std::uniform_real_distribution<double> unif(0.0, total);
        const double target = unif(rng);
        Index chosen = n - 1;
        double acc = 0.0;
        for (Index i = 0; i < n; ++i) {
            acc += dist2(i);
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
        centers.row(c) = X.row(chosen);
    }

    IntVector assign = lloyd(X, centers, max_iter);
    if (centers_out) *centers_out = centers;
    return assign;
}

// Farthest-point (maximin) seeding followed by Lloyd iterations. Fully
// deterministic and equivariant under row permutations (up to distance ties):
// every choice depends on point values, never on row order or an RNG.
inline IntVector kmeans_maximin(const Matrix& X, int n_clusters, int max_iter = 50,
                                Matrix* centers_out = nullptr) {
    const Index n = X.rows();
    const int k = static_cast<int>(std::min<Index>(n_clusters, n));

    Matrix centers(k, X.cols());
    Vector mean = X.colwise().mean();
    Index first = 0;
    double bestd = -1.0;
    for (Index i = 0; i < n; ++i) {
        const double dd = (X.row(i).transpose() - mean).squaredNorm();
        if (dd > bestd) {
            bestd = dd;
            first = i;
        }
    }
    centers.row(0) = X.row(first);
    Vector dist2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        Index far = 0;
        double fard = -1.0;
        for (Index i = 0; i < n; ++i) {
            dist2(i) = std::min(dist2(i), (X.row(i) - centers.row(c - 1)).squaredNorm());
            if (dist2(i) > fard) {
                fard = dist2(i);
                far = i;
            }
        }
        centers.row(c) = X.row(far);
    }

    IntVector assign = lloyd(X, centers, max_iter);
    if (centers_out) *centers_out = centers;
    return assign;
}

} // namespace imapce::detail

#endif
