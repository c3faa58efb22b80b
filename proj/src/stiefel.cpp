#include "imapce/stiefel.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace imapce {

namespace {

constexpr double kMinStep = 1e-14;

// Thin QR with the sign convention diag(R) > 0, which makes the
// decomposition (and hence the retraction) unique.
Matrix thin_qr_positive(const Matrix& M) {
    const Index k = M.cols();
    Eigen::HouseholderQR<Matrix> qr(M);
    Matrix Q = qr.householderQ() * Matrix::Identity(M.rows(), k);
    Matrix R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Index j = 0; j < k; ++j) {
        const double rjj = R(j, j);
        if (std::abs(rjj) < 1e-12 * std::max(1.0, M.norm()))
            throw std::runtime_error("rank-deficient matrix in QR retraction");
        if (rjj < 0) Q.col(j) = -Q.col(j);
    }
    return Q;
}

} // namespace

double stiefel_error(const Matrix& V) {
    const Index k = V.cols();
    return (V.transpose() * V - Matrix::Identity(k, k)).norm();
}

Matrix random_stiefel(Index d, Index k, std::uint64_t seed) {
    if (k > d) throw std::invalid_argument("random_stiefel requires k <= d");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix G(d, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < d; ++i) G(i, j) = gauss(rng);
    return thin_qr_positive(G);
}

Matrix tangent_project(const Matrix& V, const Matrix& G) {
    if (G.rows() != V.rows() || G.cols() != V.cols())
        throw std::invalid_argument("tangent_project: shape mismatch");
    Matrix VtG = V.transpose() * G;
    Matrix sym = 0.5 * (VtG + VtG.transpose());
    return G - V * sym;
}

Matrix retract_qr(const Matrix& V, const Matrix& xi, double step) {
    if (xi.rows() != V.rows() || xi.cols() != V.cols())
        throw std::invalid_argument("retract_qr: shape mismatch");
    return thin_qr_positive(V + step * xi);
}

SolveReport minimize(const CostFn& cost, const GradFn& euclid_grad,
                     Index d, Index k, const SolverOptions& opts) {
    if (opts.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (opts.backtrack_factor <= 0.0 || opts.backtrack_factor >= 1.0)
        throw std::invalid_argument("backtrack_factor must lie in (0,1)");
    if (opts.armijo_c <= 0.0 || opts.armijo_c >= 1.0)
        throw std::invalid_argument("armijo_c must lie in (0,1)");

    auto eval_cost = [&](const Matrix& V, double& out) {
        try {
            out = cost(V);
        } catch (const std::exception&) {
            return false;
        }
        return std::isfinite(out);
    };

    SolveReport best;
    bool have_best = false;
    int failed = 0;

    for (int r = 0; r < opts.restarts; ++r) {
        Matrix V = random_stiefel(d, k, opts.seed + static_cast<std::uint64_t>(r));
        double f;
        if (!eval_cost(V, f)) {
            ++failed;
            continue;
        }

        SolveReport rep;
        rep.restart_index = r;
        rep.objective_trace.push_back(f);
        bool abandoned = false;

        for (int it = 0; it < opts.max_iter; ++it) {
            Matrix G;
            try {
                G = euclid_grad(V);
            } catch (const std::exception&) {
                abandoned = true;
                break;
            }
            if (!G.allFinite()) {
                abandoned = true;
                break;
            }
            Matrix xi = tangent_project(V, G);
            const double gnorm2 = xi.squaredNorm();
            if (std::sqrt(gnorm2) < opts.grad_tol) {
                rep.converged = true;
                break;
            }

            // Backtracking line search along -xi.
            double t = opts.initial_step;
            bool accepted = false;
            while (t >= kMinStep) {
                Matrix Vt;
                try {
                    Vt = retract_qr(V, -xi, t);
                } catch (const std::exception&) {
                    t *= opts.backtrack_factor;
                    continue;
                }
                double ft;
                if (eval_cost(Vt, ft) && ft <= f - opts.armijo_c * t * gnorm2) {
                    V = std::move(Vt);
                    f = ft;
                    accepted = true;
                    break;
                }
                t *= opts.backtrack_factor;
            }
            if (!accepted) break; // numerical floor reached
            rep.iterations = it + 1;
            rep.objective_trace.push_back(f);
        }

        if (abandoned) {
            ++failed;
            continue;
        }
        rep.V = std::move(V);
        rep.objective = f;
        if (!have_best || rep.objective < best.objective) {
            best = std::move(rep);
            have_best = true;
        }
    }

    if (!have_best)
        throw std::runtime_error("every solver restart failed with non-finite cost or gradient");
    best.failed_restarts = failed;
    return best;
}

} // namespace imapce
