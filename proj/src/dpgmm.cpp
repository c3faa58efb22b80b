#include "imapce/dpgmm.hpp"

#include "kmeans.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace imapce {

namespace {

// Digamma via the downward recurrence and the asymptotic expansion.
double digamma(double x) {
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_multigamma(int k, double x) {
    double out = 0.25 * k * (k - 1) * std::log(std::numbers::pi);
    for (int j = 1; j <= k; ++j) out += std::lgamma(x + 0.5 * (1 - j));
    return out;
}

double kl_beta(double a, double b, double a0, double b0) {
    return log_beta_fn(a0, b0) - log_beta_fn(a, b) + (a - a0) * digamma(a) +
           (b - b0) * digamma(b) + (a0 - a + b0 - b) * digamma(a + b);
}

// Per-component variational posterior in Normal-Wishart form. The Wishart
// scale W is stored through its inverse, which the updates produce directly.
struct ComponentPosterior {
    double rho = 0.0;
    Vector m;
    double beta = 0.0;
    Matrix w_inv;
    Eigen::LLT<Matrix> w_inv_chol;
    double log_det_w = 0.0;
    double e_log_det_lambda = 0.0;

    void finalize(int kdim) {
        w_inv = 0.5 * (w_inv + w_inv.transpose());
        w_inv_chol.compute(w_inv);
        if (w_inv_chol.info() != Eigen::Success)
            throw std::runtime_error("posterior Wishart scale not positive definite");
        log_det_w = 0.0;
        for (Index j = 0; j < w_inv.rows(); ++j)
            log_det_w -= 2.0 * std::log(w_inv_chol.matrixL()(j, j));
        e_log_det_lambda = kdim * std::numbers::ln2 + log_det_w;
        for (int j = 1; j <= kdim; ++j) e_log_det_lambda += digamma(0.5 * (beta + 1 - j));
    }

    // (x - m)' W (x - m) through the Cholesky factor of W^{-1}.
    double mahalanobis_w(const Vector& x) const {
        return w_inv_chol.matrixL().solve(x - m).squaredNorm();
    }
};

// Truncated stick-breaking variational posterior: one Beta stick per
// component, conjugate Normal-Wishart component posteriors, and the exact
// evidence bound of the truncated model.
struct VariationalState {
    const Matrix& points;
    int T;
    int kdim;
    double gamma, rho0, beta0;
    Vector xi;
    Matrix w0_inv;
    double log_det_w0;

    std::vector<ComponentPosterior> comps;
    std::vector<double> stick_a, stick_b;
    Vector e_log_w;

    VariationalState(const Matrix& pts, int T_, double gamma_, double rho0_, double beta0_,
                     Vector xi_, Matrix w0_inv_, double log_det_w0_)
        : points(pts), T(T_), kdim(static_cast<int>(pts.cols())), gamma(gamma_), rho0(rho0_),
          beta0(beta0_), xi(std::move(xi_)), w0_inv(std::move(w0_inv_)), log_det_w0(log_det_w0_),
          comps(static_cast<std::size_t>(T_)), stick_a(static_cast<std::size_t>(T_)),
          stick_b(static_cast<std::size_t>(T_)), e_log_w(T_) {}

    void m_step(const Matrix& resp) {
        const Index p = points.rows();
        Vector counts = resp.colwise().sum();
        for (int l = 0; l < T; ++l) {
            auto& c = comps[static_cast<std::size_t>(l)];
            const double nl = counts(l);
            Vector qbar = xi;
            Matrix scatter = Matrix::Zero(kdim, kdim);
            if (nl > 0.0) {
                qbar = (resp.col(l).transpose() * points).transpose() / nl;
                for (Index i = 0; i < p; ++i) {
                    if (resp(i, l) == 0.0) continue;
                    Vector dev = points.row(i).transpose() - qbar;
                    scatter.noalias() += resp(i, l) * (dev * dev.transpose());
                }
            }
            c.rho = rho0 + nl;
            c.m = (rho0 * xi + nl * qbar) / c.rho;
            c.beta = beta0 + nl;
            Vector gap = qbar - xi;
            c.w_inv = w0_inv + scatter + (rho0 * nl / (rho0 + nl)) * (gap * gap.transpose());
            c.finalize(kdim);
        }
        double tail = 0.0; // mass assigned above the current stick
        for (int l = T - 1; l >= 0; --l) {
            stick_a[static_cast<std::size_t>(l)] = 1.0 + counts(l);
            stick_b[static_cast<std::size_t>(l)] = gamma + tail;
            tail += counts(l);
        }
        double acc = 0.0;
        for (int l = 0; l < T; ++l) {
            const double a = stick_a[static_cast<std::size_t>(l)];
            const double b = stick_b[static_cast<std::size_t>(l)];
            e_log_w(l) = acc + digamma(a) - digamma(a + b);
            acc += digamma(b) - digamma(a + b);
        }
    }

    // Fresh responsibilities plus the evidence bound at (new resp, current params).
    double e_step(Matrix& resp) const {
        const Index p = points.rows();
        const double half_k_log_2pi = 0.5 * kdim * std::log(2.0 * std::numbers::pi);
        double bound = 0.0;
        Vector s(T);
        for (Index i = 0; i < p; ++i) {
            for (int l = 0; l < T; ++l) {
                const auto& c = comps[static_cast<std::size_t>(l)];
                const double quad =
                    kdim / c.rho + c.beta * c.mahalanobis_w(points.row(i).transpose());
                s(l) = e_log_w(l) + 0.5 * c.e_log_det_lambda - half_k_log_2pi - 0.5 * quad;
            }
            const double smax = s.maxCoeff();
            Vector e = (s.array() - smax).exp();
            const double tot = e.sum();
            resp.row(i) = e.transpose() / tot;
            bound += smax + std::log(tot);
        }
        for (int l = 0; l < T; ++l)
            bound -= kl_beta(stick_a[static_cast<std::size_t>(l)],
                             stick_b[static_cast<std::size_t>(l)], 1.0, gamma);
        for (int l = 0; l < T; ++l) {
            const auto& c = comps[static_cast<std::size_t>(l)];
            // Gaussian mean part, expectation over the Wishart factor folded in.
            const double mean_quad = rho0 * c.beta * c.mahalanobis_w(xi);
            bound -=
                0.5 * (mean_quad + kdim * rho0 / c.rho - kdim + kdim * std::log(c.rho / rho0));
            // Wishart part.
            const Matrix w_l = c.w_inv_chol.solve(Matrix::Identity(kdim, kdim));
            double kl_wishart = 0.5 * (c.beta - beta0) * c.e_log_det_lambda;
            kl_wishart += 0.5 * c.beta * ((w0_inv * w_l).trace() - kdim);
            kl_wishart += 0.5 * kdim * (beta0 - c.beta) * std::numbers::ln2;
            kl_wishart += 0.5 * (beta0 * log_det_w0 - c.beta * c.log_det_w);
            kl_wishart += log_multigamma(kdim, 0.5 * beta0) - log_multigamma(kdim, 0.5 * c.beta);
            bound -= kl_wishart;
        }
        return bound;
    }
};

} // namespace

int ClusterModel::component_size(int l) const {
    int count = 0;
    for (Index i = 0; i < assignments.size(); ++i)
        if (assignments(i) == l) ++count;
    return count;
}

ClusterModel fit_dpgmm(const Matrix& points, const DpgmmConfig& cfg) {
    const Index p = points.rows();
    const int kdim = static_cast<int>(points.cols());
    if (p < 2) throw std::invalid_argument("need at least two points to fit a mixture");
    if (!points.allFinite()) throw std::invalid_argument("points contain NaN or Inf");
    if (cfg.max_components < 2) throw std::invalid_argument("max_components must be >= 2");
    if (cfg.concentration <= 0.0) throw std::invalid_argument("concentration must be > 0");
    if (cfg.mean_precision <= 0.0) throw std::invalid_argument("mean_precision must be > 0");

    const int T = cfg.max_components;
    const Vector xi = cfg.mean_prior ? *cfg.mean_prior : Vector(points.colwise().mean());
    if (xi.size() != kdim) throw std::invalid_argument("mean_prior has wrong dimension");
    const double beta0 = cfg.wishart_dof ? *cfg.wishart_dof : static_cast<double>(kdim);
    if (beta0 <= kdim - 1) throw std::invalid_argument("wishart_dof must exceed dim - 1");

    Matrix w0;
    if (cfg.wishart_scale) {
        w0 = *cfg.wishart_scale;
        if (w0.rows() != kdim || w0.cols() != kdim)
            throw std::invalid_argument("wishart_scale has wrong shape");
    } else {
        // E[Lambda] = beta0 * W0; aim it at the inverse data variance.
        Matrix c = centered(points);
        double var = c.squaredNorm() / (static_cast<double>(p) * kdim);
        var = std::max(var, 1e-12);
        w0 = Matrix::Identity(kdim, kdim) / (beta0 * var);
    }
    Eigen::LLT<Matrix> w0_chol(Matrix(0.5 * (w0 + w0.transpose())));
    if (w0_chol.info() != Eigen::Success)
        throw std::invalid_argument("wishart_scale must be positive definite");
    double log_det_w0 = 0.0;
    for (Index j = 0; j < w0.rows(); ++j) log_det_w0 += 2.0 * std::log(w0_chol.matrixL()(j, j));
    const Matrix w0_inv = w0_chol.solve(Matrix::Identity(kdim, kdim));

    // Hard responsibilities from deterministic k-means.
    Matrix resp = Matrix::Zero(p, T);
    {
        IntVector init = detail::kmeans_maximin(points, T);
        for (Index i = 0; i < p; ++i) resp(i, init(i)) = 1.0;
    }

    VariationalState state(points, T, cfg.concentration, cfg.mean_precision, beta0, xi, w0_inv,
                           log_det_w0);
    std::vector<double> elbo_trace;
    bool converged = false;
    int iterations_used = 0;

    auto run_to_convergence = [&]() {
        double prev = elbo_trace.empty() ? -std::numeric_limits<double>::infinity()
                                         : elbo_trace.back();
        while (iterations_used < cfg.max_vi_iter) {
            state.m_step(resp);
            const double bound = state.e_step(resp);
            elbo_trace.push_back(bound);
            ++iterations_used;
            if (std::abs(bound - prev) < cfg.elbo_tol) {
                converged = true;
                return;
            }
            prev = bound;
        }
        converged = false;
    };

    run_to_convergence();

    // Coordinate ascent cannot fuse components that jointly model one blob,
    // so propose pairwise merges and keep any that raise the bound. Trials
    // are bound-checked, so the recorded trace stays monotone.
    bool merged = true;
    while (merged) {
        merged = false;
        const double current = elbo_trace.back();
        Vector counts = resp.colwise().sum();
        for (int l1 = 0; l1 < T && !merged; ++l1) {
            if (counts(l1) < 0.5) continue;
            for (int l2 = l1 + 1; l2 < T && !merged; ++l2) {
                if (counts(l2) < 0.5) continue;
                Matrix trial = resp;
                trial.col(l1) += trial.col(l2);
                trial.col(l2).setZero();
                state.m_step(trial);
                const double bound = state.e_step(trial);
                if (bound > current + cfg.elbo_tol) {
                    resp = std::move(trial);
                    elbo_trace.push_back(bound);
                    merged = true;
                }
            }
        }
        if (merged) run_to_convergence();
    }
    // Leave the parameters consistent with the final responsibilities.
    state.m_step(resp);

    ClusterModel model;
    model.elbo_trace = std::move(elbo_trace);
    model.converged = converged;
    model.responsibilities = resp;
    model.assignments = IntVector(p);
    for (Index i = 0; i < p; ++i) {
        Index arg = 0;
        resp.row(i).maxCoeff(&arg);
        model.assignments(i) = static_cast<int>(arg);
    }

    // Expected stick weights, renormalized over the truncation.
    model.weights = Vector(T);
    double remaining = 1.0;
    for (int l = 0; l < T; ++l) {
        const double ev = state.stick_a[static_cast<std::size_t>(l)] /
                          (state.stick_a[static_cast<std::size_t>(l)] +
                           state.stick_b[static_cast<std::size_t>(l)]);
        model.weights(l) = remaining * ev;
        remaining *= 1.0 - ev;
    }
    model.weights /= model.weights.sum();

    model.means = Matrix(T, kdim);
    model.covariances.reserve(static_cast<std::size_t>(T));
    for (int l = 0; l < T; ++l) {
        const auto& c = state.comps[static_cast<std::size_t>(l)];
        model.means.row(l) = c.m.transpose();
        // Plug-in covariance from the expected precision beta * W.
        model.covariances.push_back(Matrix(c.w_inv / c.beta));
    }
    for (int l = 0; l < T; ++l)
        if (model.component_size(l) > 0) model.active_components.push_back(l);
    return model;
}

std::vector<ClusterSummary> posterior_params(const ClusterModel& model, int min_size) {
    if (min_size < 1) throw std::invalid_argument("min_size must be >= 1");
    std::vector<ClusterSummary> out;
    const int T = static_cast<int>(model.weights.size());
    for (int l = 0; l < T; ++l) {
        const int size = model.component_size(l);
        if (size < min_size) continue;
        ClusterSummary s;
        s.index = l;
        s.size = size;
        s.mean = model.means.row(l).transpose();
        const Matrix& c = model.covariances[static_cast<std::size_t>(l)];
        const double ridge = 1e-6 * c.trace() / static_cast<double>(c.rows());
        s.covariance = c + ridge * Matrix::Identity(c.rows(), c.cols());
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace imapce
