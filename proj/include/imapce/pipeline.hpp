#ifndef IMAPCE_PIPELINE_HPP
#define IMAPCE_PIPELINE_HPP

#include "imapce/data_io.hpp"
#include "imapce/dataset.hpp"
#include "imapce/objective.hpp"
#include "imapce/stiefel.hpp"

#include <optional>
#include <vector>

namespace imapce {

enum class EmbedMethod { Imapce, Cpca };

struct EmbedOptions {
    EmbedMethod method = EmbedMethod::Imapce;
    std::optional<int> svd_dims; // optional SVD preprocessing
    bool auto_mu = false;        // derive mu from the contrastive reconstruction error
    int auto_mu_exponent = -2;
    std::vector<double> cpca_alphas; // empty -> default grid
    int cpca_spectral_clusters = 4;
};

struct EmbedResult {
    Matrix embeddings; // n x k, all dataset rows
    Matrix projection; // working-space d x k
    double objective = 0.0;
    double mu_used = 0.0;
    double cpca_alpha = 0.0; // selected trade-off (cPCA method only)
    double contrastive_reconstruction_error = 0.0; // set when auto_mu
    SolveReport report;      // populated for the manifold method
    Preprocessor preprocessor;
};

/// The full embedding pipeline: resolve the prior against the dataset, center
/// (and optionally SVD-project) the data, apply the identical transform to
/// the prior samples, then either minimize the informative-projection
/// objective on the Stiefel manifold or run the contrastive-PCA protocol.
/// Alpha is forced to 0 when the prior is empty.
EmbedResult embed_dataset(const Dataset& data, const PriorSpec& prior, const Hyperparams& hp,
                          const EmbedOptions& opts = {});

} // namespace imapce

#endif
