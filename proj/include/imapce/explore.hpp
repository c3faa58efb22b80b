#ifndef IMAPCE_EXPLORE_HPP
#define IMAPCE_EXPLORE_HPP

#include "imapce/dataset.hpp"
#include "imapce/dpgmm.hpp"
#include "imapce/stiefel.hpp"

#include <vector>

namespace imapce {

/// delta_lj = sqrt((m_j - m_l)' C_l^{-1} (m_j - m_l)). Asymmetric in general.
double mahalanobis(const Vector& m_j, const Vector& m_l, const Matrix& C_l);

/// Symmetrized pairwise distances D_lj = (delta_lj + delta_jl) / 2 between
/// the acceptable clusters. Requires at least two of them.
Matrix distance_matrix(const std::vector<ClusterSummary>& clusters);

/// Index of the cluster maximizing the row sums of D (ties break low); with
/// exactly two clusters both are returned.
std::vector<int> most_distinct(const Matrix& D);

enum class TerminalReason { TooFewUnexplored, NoAcceptableCluster, MaxIterations };

const char* to_string(TerminalReason r);

struct ExplorationIteration {
    Matrix projection;                // d x k
    EmbeddingSet embeddings;          // unexplored rows only
    ClusterModel clusters;
    std::vector<IndexList> distinct_rows; // 1 or 2 row sets (dataset indices); empty on the terminal iteration
    double objective = 0.0;
    bool solver_converged = false;
};

struct ExplorationHistory {
    std::vector<ExplorationIteration> iterations;
    TerminalReason terminal_reason = TerminalReason::TooFewUnexplored;
    IndexList initial_prior_rows;
};

/// How each iteration's projection is computed.
enum class ExploreDriver { Imapce, Cpca };

struct ExploreOptions {
    int max_outer_iterations = 50;
    ExploreDriver driver = ExploreDriver::Imapce;
    // cPCA driver: candidate trade-offs and the spectral-clustering width
    // used by the medoid selection protocol.
    std::vector<double> cpca_alphas;
    int cpca_spectral_clusters = 4;
};

/// Iterative cluster exploration: per round, minimize the objective with the
/// kurtosis term over the unexplored rows Z, embed Q = Z V*, cluster with the
/// DPGMM, discard clusters smaller than hp.min_cluster_size, move the most
/// distinct cluster into the prior, and repeat while more than
/// hp.min_cluster_size rows remain unexplored.
///
/// The prior must be PriorKind::None or PriorKind::Subset; on the first round
/// without prior data alpha is forced to 0. Deterministic for fixed seeds.
ExplorationHistory explore(const Dataset& data, const PriorSpec& prior, const Hyperparams& hp,
                           const DpgmmConfig& dpgmm_cfg, const ExploreOptions& opts = {});

} // namespace imapce

#endif
