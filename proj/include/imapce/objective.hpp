#ifndef IMAPCE_OBJECTIVE_HPP
#define IMAPCE_OBJECTIVE_HPP

#include "imapce/dataset.hpp"

#include <utility>
#include <vector>

namespace imapce {

/// Precomputed state for evaluating the informative-projection objective
///
///   f(V) = ||X - X V V'||_F^2 - alpha ||Y - Y V V'||_F^2
///          + mu * p * sum_{z in Z} (z' V A^{-1} V' z)^2,   A = V' X'X V
///
/// over column-orthonormal V. X and Y are expected centered; Z holds the
/// kurtosis target rows (a subset of X's rows, p = |Z|). The reconstruction
/// terms are evaluated through their trace forms, so the Euclidean gradient
/// of `imapce_cost` is exactly `imapce_euclid_gradient` even off manifold.
/// What data the kurtosis normalizer A is built from. FullData is the
/// literal objective (A = V'X'XV); TargetRows normalizes by the kurtosis
/// target set itself (A = V'Z'ZV), making the term the kurtosis *of* Z —
/// the reading the iterative exploration uses. The two coincide when Z = X.
enum class KurtosisNormalizer { FullData, TargetRows };

struct ImapceProblem {
    Matrix X; // n x d, centered
    Matrix Y; // m x d, centered; 0 x d when there is no prior
    Matrix Z; // p x d kurtosis target rows
    double alpha = 0.0;
    double mu = 0.0;
    // When set, the reconstruction grams are divided by their row counts so
    // alpha stays comparable across unequal |X|, |Y|. The kurtosis
    // normalizer is never count-scaled (the term is scale invariant).
    bool count_normalized = false;

    Matrix gram_x;       // X'X
    Matrix gram_y;       // Y'Y
    Matrix gram_kurt;    // gram behind the kurtosis normalizer A
    Matrix gram_x_recon; // gram used by the reconstruction terms
    Matrix gram_y_recon;
    double trace_x_recon = 0.0;
    double trace_y_recon = 0.0;

    static ImapceProblem build(Matrix X_centered, Matrix Y_centered, Matrix Z, double alpha,
                               double mu, bool count_normalized = false,
                               KurtosisNormalizer normalizer = KurtosisNormalizer::FullData);
};

/// Univariate kurtosis index of the projections v'x_i:
///   kappa = n * sum_i (v'x_i)^4 / (sum_i (v'x_i)^2)^2.
/// Scale invariant in both v and X; ranges over [1, n].
double kurtosis_index(const Matrix& X, const Vector& v);

/// Multivariate kurtosis term p * sum_{z in Z} (z' V A^{-1} V' z)^2 with
/// A = V' X_full' X_full V. Invariant under V -> V R for orthogonal R.
double multivariate_kurtosis(const Matrix& X_full, const Matrix& Z, const Matrix& V);

double imapce_cost(const ImapceProblem& prob, const Matrix& V);

Matrix imapce_euclid_gradient(const ImapceProblem& prob, const Matrix& V);

/// Convenience pair of closures over a shared problem, suitable for minimize().
std::pair<std::function<double(const Matrix&)>, std::function<Matrix(const Matrix&)>>
imapce_cost_grad(const ImapceProblem& prob);

/// Top-k eigenvectors of X'X/n - alpha * Y'Y/m, descending by eigenvalue,
/// with a deterministic sign fix. Y may be empty (plain PCA).
Matrix cpca_project(const Matrix& X_centered, const Matrix& Y_centered, double alpha, int k);

/// Product of the cosines of the principal angles between span(V1), span(V2).
double subspace_affinity(const Matrix& V1, const Matrix& V2);

struct CpcaSelection {
    double alpha = 0.0;
    Matrix V;
    int alpha_index = 0;
};

/// The contrastive-PCA projection protocol: one projection per candidate
/// alpha, spectral clustering of the projections under the subspace-affinity
/// kernel, then the medoid of the largest cluster (ties break to the lowest
/// alpha index).
CpcaSelection cpca_alpha_select(const Matrix& X_centered, const Matrix& Y_centered,
                                const std::vector<double>& alphas, int n_spectral_clusters,
                                int k, std::uint64_t seed = 0);

/// Default candidate grid for cpca_alpha_select: 0 plus log-spaced values.
std::vector<double> default_cpca_alphas();

} // namespace imapce

#endif
