#ifndef IMAPCE_STIEFEL_HPP
#define IMAPCE_STIEFEL_HPP

#include "imapce/dataset.hpp"

#include <functional>
#include <vector>

namespace imapce {

struct SolverOptions {
    int max_iter = 500;
    double grad_tol = 1e-6;       // on the Riemannian gradient norm
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double initial_step = 1.0;
    int restarts = 1;
    std::uint64_t seed = 0;
};

struct SolveReport {
    Matrix V;                           // d x k, column-orthonormal
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    int restart_index = 0;
    int failed_restarts = 0;
    std::vector<double> objective_trace; // accepted iterates of the winning restart
};

/// ||V'V - I||_F, the Stiefel feasibility residual.
double stiefel_error(const Matrix& V);

/// Column-orthonormal d x k matrix from the QR of a seeded Gaussian draw.
Matrix random_stiefel(Index d, Index k, std::uint64_t seed);

/// Projects G onto the tangent space at V: xi = G - V sym(V'G).
Matrix tangent_project(const Matrix& V, const Matrix& G);

/// Sign-fixed thin-QR retraction of V + step*xi back onto the manifold.
/// Throws if the perturbed matrix is numerically rank deficient.
Matrix retract_qr(const Matrix& V, const Matrix& xi, double step);

using CostFn = std::function<double(const Matrix&)>;
using GradFn = std::function<Matrix(const Matrix&)>;

/// Riemannian steepest descent with Armijo backtracking, restarted from
/// `restarts` seeded random initial points; returns the restart with the
/// lowest final cost. Cost or gradient evaluations that throw or return
/// non-finite values fail the evaluation: during the line search the step
/// shrinks, elsewhere the restart is abandoned. Throws if every restart fails.
SolveReport minimize(const CostFn& cost, const GradFn& euclid_grad,
                     Index d, Index k, const SolverOptions& opts);

} // namespace imapce

#endif
