#ifndef IMAPCE_DPGMM_HPP
#define IMAPCE_DPGMM_HPP

#include "imapce/dataset.hpp"

#include <optional>
#include <vector>

namespace imapce {

/// Priors and stopping rules for the truncated variational Dirichlet-process
/// Gaussian mixture. Unset data-dependent priors default to: mean_prior =
/// data mean, wishart_dof = dimension, wishart_scale = identity scaled so the
/// expected component precision matches the data variance.
struct DpgmmConfig {
    int max_components = 10;          // truncation level T
    double concentration = 1.0;       // stick-breaking Beta(1, concentration)
    std::optional<Vector> mean_prior; // xi
    double mean_precision = 1.0;      // rho
    std::optional<double> wishart_dof;    // beta, must exceed dim - 1
    std::optional<Matrix> wishart_scale;  // W, SPD scale of the precision prior
    int max_vi_iter = 200;
    double elbo_tol = 1e-4;
    // Inference is fully deterministic (farthest-point responsibility init),
    // so the seed currently has no effect; kept for config compatibility.
    std::uint64_t seed = 0;
};

/// Fitted mixture posterior plus hard assignments.
struct ClusterModel {
    Vector weights;                     // length T, sums to 1
    Matrix means;                       // T x k
    std::vector<Matrix> covariances;    // T matrices, k x k SPD
    IntVector assignments;              // length p, argmax responsibility
    Matrix responsibilities;            // p x T, rows sum to 1
    std::vector<int> active_components; // components with >= 1 assigned point
    std::vector<double> elbo_trace;     // one entry per variational iteration
    bool converged = false;

    int component_size(int l) const;
};

/// Truncated stick-breaking variational inference. The reported ELBO trace is
/// non-decreasing; iteration stops when the ELBO change drops below elbo_tol
/// or after max_vi_iter rounds.
ClusterModel fit_dpgmm(const Matrix& points, const DpgmmConfig& cfg);

struct ClusterSummary {
    int index = 0;    // component index in the model
    Vector mean;
    Matrix covariance; // ridge-regularized, safe to invert
    int size = 0;     // hard-assignment count
};

/// Components with at least min_size assigned points, covariance regularized
/// by +1e-6 * trace(C)/k * I. An empty result signals that exploration should
/// terminate (every cluster is outlier-sized).
std::vector<ClusterSummary> posterior_params(const ClusterModel& model, int min_size);

} // namespace imapce

#endif
