#include "imapce/pipeline.hpp"

#include <cmath>

namespace imapce {

EmbedResult embed_dataset(const Dataset& data, const PriorSpec& prior, const Hyperparams& hp,
                          const EmbedOptions& opts) {
    ResolvedPrior rp = resolve_prior(data, prior);
    auto [work, pre] = preprocess(data, true, opts.svd_dims);
    const Matrix& X = work.values(); // centered by preprocess
    Matrix Y(0, X.cols());
    if (rp.prior.rows() > 0) Y = centered(pre.apply(rp.prior));
    const double alpha = rp.prior.rows() > 0 ? hp.alpha : 0.0;

    EmbedResult out;
    out.preprocessor = pre;

    if (opts.method == EmbedMethod::Imapce) {
        double mu = hp.mu;
        if (opts.auto_mu) {
            Matrix Vc = cpca_project(X, Y, alpha, hp.k);
            out.contrastive_reconstruction_error = (X - X * Vc * Vc.transpose()).squaredNorm();
            mu = out.contrastive_reconstruction_error * std::pow(10.0, opts.auto_mu_exponent);
        }
        out.mu_used = mu;
        Matrix Z = take_rows(X, rp.kurtosis_rows);
        const KurtosisNormalizer normalizer = prior.kind == PriorKind::Subset
                                                  ? KurtosisNormalizer::TargetRows
                                                  : KurtosisNormalizer::FullData;
        ImapceProblem problem = ImapceProblem::build(X, Y, std::move(Z), alpha, mu, false,
                                                     normalizer);
        SolverOptions sopt;
        sopt.max_iter = hp.max_iter;
        sopt.grad_tol = hp.grad_tol;
        sopt.restarts = hp.restarts;
        sopt.seed = hp.seed;
        auto [cost, grad] = imapce_cost_grad(problem);
        out.report = minimize(cost, grad, X.cols(), hp.k, sopt);
        out.projection = out.report.V;
        out.objective = out.report.objective;
    } else {
        if (Y.rows() == 0) {
            out.projection = cpca_project(X, Y, 0.0, hp.k);
            out.cpca_alpha = 0.0;
        } else {
            const std::vector<double> alphas =
                opts.cpca_alphas.empty() ? default_cpca_alphas() : opts.cpca_alphas;
            CpcaSelection sel =
                cpca_alpha_select(X, Y, alphas, opts.cpca_spectral_clusters, hp.k, hp.seed);
            out.projection = sel.V;
            out.cpca_alpha = sel.alpha;
        }
        out.objective = (X - X * out.projection * out.projection.transpose()).squaredNorm();
    }
    out.embeddings = X * out.projection;
    return out;
}

} // namespace imapce
