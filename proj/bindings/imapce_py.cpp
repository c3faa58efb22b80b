// Python bindings for the informative-projection library: embedding,
// iterative exploration, the DPGMM, and the evaluation metrics, all over
// numpy arrays.

#include "imapce/data_io.hpp"
#include "imapce/dataset.hpp"
#include "imapce/dpgmm.hpp"
#include "imapce/explore.hpp"
#include "imapce/metrics.hpp"
#include "imapce/objective.hpp"
#include "imapce/pipeline.hpp"
#include "imapce/stiefel.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace imapce;

namespace {

PriorSpec make_prior(const std::optional<IndexList>& prior_cols,
                     const std::optional<Matrix>& prior_matrix,
                     const std::optional<IndexList>& prior_rows) {
    const int given = (prior_cols ? 1 : 0) + (prior_matrix ? 1 : 0) + (prior_rows ? 1 : 0);
    if (given > 1)
        throw std::invalid_argument("pass at most one of prior_cols, prior_matrix, prior_rows");
    if (prior_cols) return PriorSpec::attributes(*prior_cols);
    if (prior_matrix) return PriorSpec::samples(*prior_matrix);
    if (prior_rows) return PriorSpec::subset(*prior_rows);
    return PriorSpec::none();
}

Dataset make_dataset(const Matrix& values, const std::optional<IntVector>& labels) {
    Dataset data(values);
    if (labels) data.add_labels("label", *labels);
    return data;
}

Hyperparams make_hp(double alpha, double mu, int k, int min_cluster_size, int restarts,
                    std::uint64_t seed, int max_iter, double grad_tol) {
    Hyperparams hp;
    hp.alpha = alpha;
    hp.mu = mu;
    hp.k = k;
    hp.min_cluster_size = min_cluster_size;
    hp.restarts = restarts;
    hp.seed = seed;
    hp.max_iter = max_iter;
    hp.grad_tol = grad_tol;
    return hp;
}

py::dict cluster_model_dict(const ClusterModel& model) {
    py::dict d;
    d["weights"] = model.weights;
    d["means"] = model.means;
    d["covariances"] = model.covariances;
    d["assignments"] = model.assignments;
    d["active_components"] = model.active_components;
    d["elbo_trace"] = model.elbo_trace;
    d["converged"] = model.converged;
    return d;
}

} // namespace

PYBIND11_MODULE(_imapce, m) {
    m.doc() = "Informative manifold projections for cluster exploration";

    m.def(
        "gen_synthetic",
        [](int n, std::uint64_t seed, double noise_std, int front_clusters, int mid_clusters) {
            SyntheticSpec spec;
            spec.n = n;
            spec.seed = seed;
            spec.noise_std = noise_std;
            spec.front_clusters = front_clusters;
            spec.mid_clusters = mid_clusters;
            Dataset d = gen_synthetic(spec);
            return py::make_tuple(d.values(), d.labels("label_dims14"), d.labels("label_dims56"));
        },
        py::arg("n") = 1500, py::arg("seed") = 0, py::arg("noise_std") = 0.1,
        py::arg("front_clusters") = 2, py::arg("mid_clusters") = 3,
        "Ten-dimensional synthetic benchmark; returns (values, front_labels, mid_labels)");

    m.def("center", [](const Matrix& X) { return centered(X); }, py::arg("X"),
          "Subtract column means");

    m.def("kurtosis_index", &kurtosis_index, py::arg("X"), py::arg("v"),
          "Scale-invariant fourth-moment ratio of the projections X @ v");

    m.def("multivariate_kurtosis", &multivariate_kurtosis, py::arg("X_full"), py::arg("Z"),
          py::arg("V"), "p * sum_z (z'V A^-1 V'z)^2 with A = V'X'XV");

    m.def("random_stiefel", &random_stiefel, py::arg("d"), py::arg("k"), py::arg("seed") = 0,
          "Seeded column-orthonormal d x k matrix");

    m.def("cpca_project",
          [](const Matrix& X, const std::optional<Matrix>& Y, double alpha, int k) {
              return cpca_project(X, Y ? *Y : Matrix(0, X.cols()), alpha, k);
          },
          py::arg("X"), py::arg("Y") = py::none(), py::arg("alpha") = 1.0, py::arg("k") = 2,
          "Top-k eigenvectors of X'X/n - alpha Y'Y/m (inputs centered)");

    m.def("cpca_alpha_select",
          [](const Matrix& X, const Matrix& Y, const std::optional<std::vector<double>>& alphas,
             int n_spectral_clusters, int k, std::uint64_t seed) {
              CpcaSelection sel = cpca_alpha_select(X, Y, alphas ? *alphas : default_cpca_alphas(),
                                                    n_spectral_clusters, k, seed);
              py::dict d;
              d["alpha"] = sel.alpha;
              d["projection"] = sel.V;
              d["alpha_index"] = sel.alpha_index;
              return d;
          },
          py::arg("X"), py::arg("Y"), py::arg("alphas") = py::none(),
          py::arg("n_spectral_clusters") = 4, py::arg("k") = 2, py::arg("seed") = 0,
          "Contrastive-PCA spectral-medoid alpha selection (inputs centered)");

    m.def(
        "embed",
        [](const Matrix& values, const std::optional<IntVector>& labels,
           const std::optional<IndexList>& prior_cols, const std::optional<Matrix>& prior_matrix,
           const std::optional<IndexList>& prior_rows, const std::string& method, double alpha,
           double mu, bool auto_mu, int k, int restarts, std::uint64_t seed, int max_iter,
           double grad_tol, const std::optional<int>& svd_dims) {
            Dataset data = make_dataset(values, labels);
            EmbedOptions opts;
            if (method == "imapce")
                opts.method = EmbedMethod::Imapce;
            else if (method == "cpca")
                opts.method = EmbedMethod::Cpca;
            else
                throw std::invalid_argument("method must be 'imapce' or 'cpca'");
            opts.auto_mu = auto_mu;
            opts.svd_dims = svd_dims;
            EmbedResult res =
                embed_dataset(data, make_prior(prior_cols, prior_matrix, prior_rows),
                              make_hp(alpha, mu, k, 1, restarts, seed, max_iter, grad_tol), opts);
            py::dict d;
            d["embeddings"] = res.embeddings;
            d["projection"] = res.projection;
            d["objective"] = res.objective;
            d["mu"] = res.mu_used;
            d["cpca_alpha"] = res.cpca_alpha;
            d["converged"] = res.report.converged;
            d["iterations"] = res.report.iterations;
            d["objective_trace"] = res.report.objective_trace;
            return d;
        },
        py::arg("values"), py::arg("labels") = py::none(), py::arg("prior_cols") = py::none(),
        py::arg("prior_matrix") = py::none(), py::arg("prior_rows") = py::none(),
        py::arg("method") = "imapce", py::arg("alpha") = 1.0, py::arg("mu") = 0.0,
        py::arg("auto_mu") = false, py::arg("k") = 2, py::arg("restarts") = 10,
        py::arg("seed") = 0, py::arg("max_iter") = 500, py::arg("grad_tol") = 1e-6,
        py::arg("svd_dims") = py::none(),
        "Embedding pipeline: prior resolution, centering, optional SVD, then the "
        "manifold objective (or contrastive PCA); returns a result dict");

    m.def(
        "fit_dpgmm",
        [](const Matrix& points, int max_components, double concentration, int max_vi_iter,
           double elbo_tol) {
            DpgmmConfig cfg;
            cfg.max_components = max_components;
            cfg.concentration = concentration;
            cfg.max_vi_iter = max_vi_iter;
            cfg.elbo_tol = elbo_tol;
            return cluster_model_dict(fit_dpgmm(points, cfg));
        },
        py::arg("points"), py::arg("max_components") = 10, py::arg("concentration") = 1.0,
        py::arg("max_vi_iter") = 200, py::arg("elbo_tol") = 1e-4,
        "Truncated variational Dirichlet-process Gaussian mixture");

    m.def(
        "explore",
        [](const Matrix& values, const std::optional<IntVector>& labels,
           const std::optional<IndexList>& prior_rows, double alpha, double mu, int k, int s,
           int restarts, std::uint64_t seed, int max_iter, int max_components,
           double concentration, int max_outer_iterations, const std::string& driver) {
            Dataset data = make_dataset(values, labels);
            PriorSpec prior = prior_rows ? PriorSpec::subset(*prior_rows) : PriorSpec::none();
            Hyperparams hp = make_hp(alpha, mu, k, s, restarts, seed, max_iter, 1e-6);
            DpgmmConfig dc;
            dc.max_components = max_components;
            dc.concentration = concentration;
            ExploreOptions opts;
            opts.max_outer_iterations = max_outer_iterations;
            if (driver == "imapce")
                opts.driver = ExploreDriver::Imapce;
            else if (driver == "cpca")
                opts.driver = ExploreDriver::Cpca;
            else
                throw std::invalid_argument("driver must be 'imapce' or 'cpca'");

            ExplorationHistory h = explore(data, prior, hp, dc, opts);
            py::list iterations;
            for (const auto& it : h.iterations) {
                py::dict d;
                d["projection"] = it.projection;
                d["embeddings"] = it.embeddings.points;
                d["embedded_rows"] = it.embeddings.source_rows;
                d["clusters"] = cluster_model_dict(it.clusters);
                d["distinct_rows"] = it.distinct_rows;
                d["objective"] = it.objective;
                iterations.append(d);
            }
            py::dict out;
            out["iterations"] = iterations;
            out["terminal_reason"] = std::string(to_string(h.terminal_reason));
            out["initial_prior_rows"] = h.initial_prior_rows;
            return out;
        },
        py::arg("values"), py::arg("labels") = py::none(), py::arg("prior_rows") = py::none(),
        py::arg("alpha") = 1.0, py::arg("mu") = 0.0, py::arg("k") = 2, py::arg("s") = 75,
        py::arg("restarts") = 10, py::arg("seed") = 0, py::arg("max_iter") = 500,
        py::arg("max_components") = 10, py::arg("concentration") = 1.0,
        py::arg("max_outer_iterations") = 50, py::arg("driver") = "imapce",
        "Iterative cluster exploration; returns the per-iteration history");

    m.def("laplacian_score", &laplacian_score, py::arg("points"), py::arg("labels"),
          py::arg("n_neighbors"), "Label-mixing score in [0,1] on the kNN graph");

    m.def("mean_jaccard", &mean_jaccard, py::arg("clusters"), py::arg("labels"),
          "Class-averaged best-cluster Jaccard overlap");

    m.def("nmi", &nmi, py::arg("a"), py::arg("b"),
          "Mutual information normalized by the mean entropy");

    m.def(
        "separability_accuracy",
        [](const Matrix& points, const IntVector& labels, int n_splits, double train_frac,
           std::uint64_t seed) {
            AccuracyReport rep = separability_accuracy(points, labels, n_splits, train_frac, seed);
            return py::make_tuple(rep.mean, rep.stdev);
        },
        py::arg("points"), py::arg("labels"), py::arg("n_splits") = 10,
        py::arg("train_frac") = 0.75, py::arg("seed") = 0,
        "Linear max-margin test accuracy over seeded splits; returns (mean, std)");

    m.def(
        "preprocess",
        [](const Matrix& values, bool center_data, const std::optional<int>& svd_dims) {
            auto [data, pre] = preprocess(Dataset(values), center_data, svd_dims);
            py::dict d;
            d["values"] = data.values();
            d["mean"] = pre.mean;
            if (pre.basis) d["basis"] = *pre.basis;
            d["retained_variance"] = pre.retained_variance;
            return d;
        },
        py::arg("values"), py::arg("center") = true, py::arg("svd_dims") = py::none(),
        "Centering and optional SVD projection; returns the transform pieces");

    m.def(
        "superimpose",
        [](const Matrix& reference, const IntVector& labels, const Matrix& background,
           int class_a, int class_b, int n_complex, std::uint64_t seed) {
            Dataset ref(reference);
            ref.add_labels("label", labels);
            ComplexSpec spec;
            spec.class_a = class_a;
            spec.class_b = class_b;
            spec.n_complex = n_complex;
            spec.seed = seed;
            Dataset out = superimpose(ref, Dataset(background), spec);
            return py::make_tuple(out.values(), out.labels());
        },
        py::arg("reference"), py::arg("labels"), py::arg("background"), py::arg("class_a"),
        py::arg("class_b"), py::arg("n_complex") = 6000, py::arg("seed") = 0,
        "Clipped pixelwise sum of two reference classes with random background rows");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
