#ifndef IMAPCE_METRICS_HPP
#define IMAPCE_METRICS_HPP

#include "imapce/dataset.hpp"

#include <vector>

namespace imapce {

/// Symmetric unit-weight kNN adjacency (union symmetrization, no self loops)
/// as per-node neighbor lists.
std::vector<std::vector<Index>> knn_graph(const Matrix& points, int n_neighbors);

/// Label-mixing score in [0,1] over embedding neighborhoods. For each label
/// value c with indicator z, the per-class score is z'Lz / z'Dz on the unit
/// kNN graph (L = D - W); the result is the class-size weighted average.
/// High values mean neighborhoods mix labels, i.e. the labelled structure has
/// been removed from the embedding.
double laplacian_score(const Matrix& points, const IntVector& labels, int n_neighbors);

/// Each ground-truth class is matched to the stored cluster with the highest
/// Jaccard overlap |A&B|/|A|B| (classes score 0 with no clusters stored);
/// returns the unweighted mean over classes. Clusters must be disjoint.
double mean_jaccard(const std::vector<IndexList>& clusters, const IntVector& labels);

/// Mutual information normalized by the arithmetic mean of the entropies.
/// Convention: two zero-entropy partitions score 1, a single zero-entropy
/// side scores 0.
double nmi(const IntVector& a, const IntVector& b);

struct AccuracyReport {
    double mean = 0.0;
    double stdev = 0.0;
};

/// Test accuracy of a linear max-margin classifier (hinge loss, L2 penalty,
/// one-vs-rest) over seeded random train/test splits.
AccuracyReport separability_accuracy(const Matrix& points, const IntVector& labels,
                                     int n_splits = 10, double train_frac = 0.75,
                                     std::uint64_t seed = 0);

} // namespace imapce

#endif
