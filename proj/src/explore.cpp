#include "imapce/explore.hpp"

#include "imapce/objective.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <stdexcept>

namespace imapce {

double mahalanobis(const Vector& m_j, const Vector& m_l, const Matrix& C_l) {
    if (m_j.size() != m_l.size() || C_l.rows() != m_j.size() || C_l.cols() != m_j.size())
        throw std::invalid_argument("mahalanobis: shape mismatch");
    Eigen::LLT<Matrix> llt(Matrix(0.5 * (C_l + C_l.transpose())));
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("cluster covariance is singular");
    return llt.matrixL().solve(m_j - m_l).norm();
}

Matrix distance_matrix(const std::vector<ClusterSummary>& clusters) {
    const int c = static_cast<int>(clusters.size());
    if (c < 2) throw std::invalid_argument("distance matrix needs at least two clusters");
    Matrix delta(c, c);
    for (int l = 0; l < c; ++l) {
        delta(l, l) = 0.0;
        for (int j = 0; j < c; ++j) {
            if (j == l) continue;
            delta(l, j) = mahalanobis(clusters[static_cast<std::size_t>(j)].mean,
                                      clusters[static_cast<std::size_t>(l)].mean,
                                      clusters[static_cast<std::size_t>(l)].covariance);
        }
    }
    return 0.5 * (delta + delta.transpose());
}

std::vector<int> most_distinct(const Matrix& D) {
    const int c = static_cast<int>(D.rows());
    if (c < 2 || D.cols() != c) throw std::invalid_argument("bad distance matrix");
    if (c == 2) return {0, 1};
    Vector sums = D.rowwise().sum();
    int best = 0;
    for (int l = 1; l < c; ++l)
        if (sums(l) > sums(best)) best = l;
    return {best};
}

const char* to_string(TerminalReason r) {
    switch (r) {
    case TerminalReason::TooFewUnexplored: return "too_few_unexplored";
    case TerminalReason::NoAcceptableCluster: return "no_acceptable_cluster";
    case TerminalReason::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

ExplorationHistory explore(const Dataset& data, const PriorSpec& prior, const Hyperparams& hp,
                           const DpgmmConfig& dpgmm_cfg, const ExploreOptions& opts) {
    if (prior.kind != PriorKind::None && prior.kind != PriorKind::Subset)
        throw std::invalid_argument("exploration needs a subset prior or no prior");
    if (hp.min_cluster_size < 1) throw std::invalid_argument("min cluster size must be >= 1");
    if (hp.k >= data.cols()) throw std::invalid_argument("embedding dimension must be < data dimension");

    const Index n = data.rows();
    const Matrix X = centered(data.values());

    std::vector<bool> explored(static_cast<std::size_t>(n), false);
    ExplorationHistory history;
    if (prior.kind == PriorKind::Subset) {
        (void)resolve_prior(data, prior); // validates the subset indices
        history.initial_prior_rows = prior.subset_rows;
        for (Index r : prior.subset_rows) explored[static_cast<std::size_t>(r)] = true;
    }

    auto unexplored_rows = [&]() {
        IndexList rows;
        for (Index i = 0; i < n; ++i)
            if (!explored[static_cast<std::size_t>(i)]) rows.push_back(i);
        return rows;
    };
    auto explored_rows = [&]() {
        IndexList rows;
        for (Index i = 0; i < n; ++i)
            if (explored[static_cast<std::size_t>(i)]) rows.push_back(i);
        return rows;
    };

    int round = 0;
    while (true) {
        IndexList z_rows = unexplored_rows();
        const Index m = n - static_cast<Index>(z_rows.size());
        if (static_cast<Index>(z_rows.size()) <= hp.min_cluster_size) {
            history.terminal_reason = TerminalReason::TooFewUnexplored;
            break;
        }
        if (round >= opts.max_outer_iterations) {
            history.terminal_reason = TerminalReason::MaxIterations;
            break;
        }

        // Prior data: rows explored so far, centered on their own means.
        Matrix Y(0, data.cols());
        if (m > 0) Y = centered(take_rows(data.values(), explored_rows()));
        const double alpha = m > 0 ? hp.alpha : 0.0;
        Matrix Z = take_rows(X, z_rows);

        ExplorationIteration iter;
        if (opts.driver == ExploreDriver::Imapce) {
            // Kurtosis *of the unexplored rows*: normalize by Z's own gram.
            ImapceProblem prob = ImapceProblem::build(X, Y, Z, alpha, hp.mu, false,
                                                      KurtosisNormalizer::TargetRows);
            SolverOptions sopt;
            sopt.max_iter = hp.max_iter;
            sopt.grad_tol = hp.grad_tol;
            sopt.restarts = hp.restarts;
            sopt.seed = hp.seed + 7919ULL * static_cast<std::uint64_t>(round);
            auto [cost, grad] = imapce_cost_grad(prob);
            SolveReport rep = minimize(cost, grad, data.cols(), hp.k, sopt);
            iter.projection = rep.V;
            iter.objective = rep.objective;
            iter.solver_converged = rep.converged;
        } else {
            std::vector<double> alphas = opts.cpca_alphas.empty() ? default_cpca_alphas()
                                                                  : opts.cpca_alphas;
            if (m == 0) {
                iter.projection = cpca_project(X, Matrix(0, data.cols()), 0.0, hp.k);
            } else {
                CpcaSelection sel = cpca_alpha_select(X, Y, alphas, opts.cpca_spectral_clusters,
                                                      hp.k, hp.seed);
                iter.projection = sel.V;
            }
            iter.objective = 0.0;
            iter.solver_converged = true;
        }

        iter.embeddings.points = Z * iter.projection;
        iter.embeddings.source_rows = z_rows;
        iter.clusters = fit_dpgmm(iter.embeddings.points, dpgmm_cfg);

        std::vector<ClusterSummary> acceptable = posterior_params(iter.clusters, hp.min_cluster_size);
        if (acceptable.size() < 2) {
            history.iterations.push_back(std::move(iter));
            history.terminal_reason = TerminalReason::NoAcceptableCluster;
            return history;
        }

        Matrix D = distance_matrix(acceptable);
        std::vector<int> chosen = most_distinct(D);
        for (int c : chosen) {
            const int comp = acceptable[static_cast<std::size_t>(c)].index;
            IndexList rows;
            for (Index i = 0; i < iter.clusters.assignments.size(); ++i)
                if (iter.clusters.assignments(i) == comp)
                    rows.push_back(z_rows[static_cast<std::size_t>(i)]);
            for (Index r : rows) explored[static_cast<std::size_t>(r)] = true;
            iter.distinct_rows.push_back(std::move(rows));
        }
        history.iterations.push_back(std::move(iter));
        ++round;
    }
    return history;
}

} // namespace imapce
