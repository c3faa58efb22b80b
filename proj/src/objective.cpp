#include "imapce/objective.hpp"

#include "kmeans.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace imapce {

namespace {

// Symmetrized k x k solve of A W = B' for W' = B A^{-1}.
// Throws when A is not positive definite.
Matrix solve_against_gram(const Matrix& A_raw, const Matrix& B) {
    Matrix A = 0.5 * (A_raw + A_raw.transpose());
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("singular projected gram matrix A = V'X'XV");
    return llt.solve(B.transpose()).transpose();
}

void sign_fix_columns(Matrix& V) {
    for (Index j = 0; j < V.cols(); ++j) {
        Index imax = 0;
        V.col(j).cwiseAbs().maxCoeff(&imax);
        if (V(imax, j) < 0) V.col(j) = -V.col(j);
    }
}

} // namespace

ImapceProblem ImapceProblem::build(Matrix X_centered, Matrix Y_centered, Matrix Z, double alpha,
                                   double mu, bool count_normalized,
                                   KurtosisNormalizer normalizer) {
    if (Z.rows() == 0) throw std::invalid_argument("kurtosis target set Z is empty");
    if (Z.cols() != X_centered.cols())
        throw std::invalid_argument("Z column count does not match X");
    const bool have_prior = Y_centered.rows() > 0;
    if (have_prior && Y_centered.cols() != X_centered.cols())
        throw std::invalid_argument("Y column count does not match X");
    if (!have_prior && alpha != 0.0)
        throw std::invalid_argument("alpha must be 0 without prior data");
    if (alpha < 0.0 || mu < 0.0) throw std::invalid_argument("alpha and mu must be >= 0");

    ImapceProblem p;
    p.X = std::move(X_centered);
    p.Y = std::move(Y_centered);
    p.Z = std::move(Z);
    p.alpha = alpha;
    p.mu = mu;
    p.count_normalized = count_normalized;

    p.gram_x = p.X.transpose() * p.X;
    p.gram_y = have_prior ? Matrix(p.Y.transpose() * p.Y)
                          : Matrix::Zero(p.X.cols(), p.X.cols());
    p.gram_kurt = normalizer == KurtosisNormalizer::FullData ? p.gram_x
                                                             : Matrix(p.Z.transpose() * p.Z);
    const double nx = count_normalized ? static_cast<double>(p.X.rows()) : 1.0;
    const double ny = count_normalized && have_prior ? static_cast<double>(p.Y.rows()) : 1.0;
    p.gram_x_recon = p.gram_x / nx;
    p.gram_y_recon = p.gram_y / ny;
    p.trace_x_recon = p.gram_x_recon.trace();
    p.trace_y_recon = p.gram_y_recon.trace();
    return p;
}

double kurtosis_index(const Matrix& X, const Vector& v) {
    if (v.size() != X.cols()) throw std::invalid_argument("projection vector length mismatch");
    Vector proj = X * v;
    const double denom = proj.squaredNorm();
    if (denom <= 0.0) throw std::runtime_error("projected variance is zero");
    const double quartic = proj.array().square().square().sum();
    return static_cast<double>(X.rows()) * quartic / (denom * denom);
}

double multivariate_kurtosis(const Matrix& X_full, const Matrix& Z, const Matrix& V) {
    Matrix A = V.transpose() * (X_full.transpose() * (X_full * V));
    Matrix M = Z * V;                      // p x k
    Matrix C = solve_against_gram(A, M);   // rows c_i = A^{-1} V'z_i
    Vector u = (M.array() * C.array()).rowwise().sum(); // z'V A^{-1} V'z per row
    return static_cast<double>(Z.rows()) * u.squaredNorm();
}

double imapce_cost(const ImapceProblem& prob, const Matrix& V) {
    double cost = prob.trace_x_recon - (V.transpose() * prob.gram_x_recon * V).trace();
    if (prob.alpha != 0.0)
        cost -= prob.alpha * (prob.trace_y_recon - (V.transpose() * prob.gram_y_recon * V).trace());
    if (prob.mu != 0.0) {
        Matrix A = V.transpose() * prob.gram_kurt * V;
        Matrix M = prob.Z * V;
        Matrix C = solve_against_gram(A, M);
        Vector u = (M.array() * C.array()).rowwise().sum();
        cost += prob.mu * static_cast<double>(prob.Z.rows()) * u.squaredNorm();
    }
    return cost;
}

Matrix imapce_euclid_gradient(const ImapceProblem& prob, const Matrix& V) {
    Matrix grad = 2.0 * (prob.alpha * prob.gram_y_recon - prob.gram_x_recon) * V;
    if (prob.mu != 0.0) {
        const double p = static_cast<double>(prob.Z.rows());
        Matrix A = V.transpose() * prob.gram_kurt * V;
        Matrix M = prob.Z * V;                    // p x k, rows V'z_i
        Matrix C = solve_against_gram(A, M);      // p x k, rows A^{-1} V'z_i
        Vector u = (M.array() * C.array()).rowwise().sum();
        // sum_i u_i z_i z_i' V A^{-1}  ==  Z' diag(u) C
        Matrix first = prob.Z.transpose() * (C.array().colwise() * u.array()).matrix();
        // sum_i u_i G V A^{-1} (V'z_i z_i'V) A^{-1}  ==  (G V) C' diag(u) C
        Matrix inner = C.transpose() * (C.array().colwise() * u.array()).matrix();
        Matrix second = (prob.gram_kurt * V) * inner;
        grad += 4.0 * prob.mu * p * (first - second);
    }
    return grad;
}

std::pair<std::function<double(const Matrix&)>, std::function<Matrix(const Matrix&)>>
imapce_cost_grad(const ImapceProblem& prob) {
    auto cost = [&prob](const Matrix& V) { return imapce_cost(prob, V); };
    auto grad = [&prob](const Matrix& V) { return imapce_euclid_gradient(prob, V); };
    return {cost, grad};
}

Matrix cpca_project(const Matrix& X_centered, const Matrix& Y_centered, double alpha, int k) {
    const Index d = X_centered.cols();
    if (k > d) throw std::invalid_argument("embedding dimension exceeds data dimension");
    Matrix C = (X_centered.transpose() * X_centered) / static_cast<double>(X_centered.rows());
    if (Y_centered.rows() > 0 && alpha != 0.0) {
        if (Y_centered.cols() != d) throw std::invalid_argument("background column count mismatch");
        C -= alpha * (Y_centered.transpose() * Y_centered) / static_cast<double>(Y_centered.rows());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (C + C.transpose()));
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    Matrix V(d, k);
    for (int j = 0; j < k; ++j) V.col(j) = eig.eigenvectors().col(d - 1 - j); // descending
    sign_fix_columns(V);
    return V;
}

double subspace_affinity(const Matrix& V1, const Matrix& V2) {
    Eigen::JacobiSVD<Matrix> svd(V1.transpose() * V2);
    double prod = 1.0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        prod *= std::min(1.0, svd.singularValues()(i));
    return prod;
}

CpcaSelection cpca_alpha_select(const Matrix& X_centered, const Matrix& Y_centered,
                                const std::vector<double>& alphas, int n_spectral_clusters,
                                int k, std::uint64_t seed) {
    if (alphas.empty()) throw std::invalid_argument("alpha candidate list is empty");
    const int q = static_cast<int>(alphas.size());

    std::vector<Matrix> projections;
    projections.reserve(alphas.size());
    for (double a : alphas) projections.push_back(cpca_project(X_centered, Y_centered, a, k));
    if (q == 1) return CpcaSelection{alphas[0], projections[0], 0};

    Matrix affinity(q, q);
    for (int i = 0; i < q; ++i) {
        affinity(i, i) = 1.0;
        for (int j = i + 1; j < q; ++j) {
            const double a = subspace_affinity(projections[i], projections[j]);
            affinity(i, j) = a;
            affinity(j, i) = a;
        }
    }
    // Coincident subspaces: every index is a medoid, take the smallest.
    if ((affinity.array() - 1.0).abs().maxCoeff() < 1e-10)
        return CpcaSelection{alphas[0], projections[0], 0};

    // Normalized spectral clustering of the projections.
    const int nc = std::max(1, std::min(n_spectral_clusters, q));
    Vector deg = affinity.rowwise().sum();
    Vector dis = deg.array().max(1e-12).rsqrt();
    Matrix W = dis.asDiagonal() * affinity * dis.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (W + W.transpose()));
    Matrix U(q, nc);
    for (int j = 0; j < nc; ++j) U.col(j) = eig.eigenvectors().col(q - 1 - j);
    for (int i = 0; i < q; ++i) {
        const double norm = U.row(i).norm();
        if (norm > 1e-12) U.row(i) /= norm;
    }
    IntVector assign = detail::kmeans(U, nc, seed);

    // Largest cluster; ties go to the cluster holding the smallest index.
    std::vector<int> counts(static_cast<std::size_t>(nc), 0);
    std::vector<int> min_member(static_cast<std::size_t>(nc), q);
    for (int i = 0; i < q; ++i) {
        const auto c = static_cast<std::size_t>(assign(i));
        counts[c]++;
        min_member[c] = std::min(min_member[c], i);
    }
    int best_cluster = 0;
    for (int c = 1; c < nc; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        const auto bb = static_cast<std::size_t>(best_cluster);
        if (counts[cc] > counts[bb] ||
            (counts[cc] == counts[bb] && min_member[cc] < min_member[bb]))
            best_cluster = c;
    }

    // Medoid: maximal summed affinity to the rest of its cluster.
    int medoid = -1;
    double best_sum = -1.0;
    for (int i = 0; i < q; ++i) {
        if (assign(i) != best_cluster) continue;
        double s = 0.0;
        for (int j = 0; j < q; ++j)
            if (assign(j) == best_cluster) s += affinity(i, j);
        if (s > best_sum + 1e-15) {
            best_sum = s;
            medoid = i;
        }
    }
    return CpcaSelection{alphas[static_cast<std::size_t>(medoid)],
                         projections[static_cast<std::size_t>(medoid)], medoid};
}

std::vector<double> default_cpca_alphas() {
    std::vector<double> alphas{0.0};
    for (int i = 0; i < 14; ++i) alphas.push_back(std::pow(10.0, -2.0 + 3.0 * i / 13.0));
    return alphas;
}

} // namespace imapce
