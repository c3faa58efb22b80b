#ifndef IMAPCE_DATASET_HPP
#define IMAPCE_DATASET_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace imapce {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Integer annotation attached to every row of a Dataset. A dataset may carry
/// several of these (e.g. the synthetic benchmark has one labelling per
/// structured dimension group).
struct LabelColumn {
    std::string name;
    IntVector values;
};

/// Immutable n x d sample matrix with optional labels and column names.
/// All entries are validated to be finite on construction.
class Dataset {
public:
    explicit Dataset(Matrix values);
    Dataset(Matrix values, std::vector<std::string> column_names);

    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    const std::vector<std::string>& column_names() const { return column_names_; }

    void add_labels(std::string name, IntVector values);
    bool has_labels() const { return !labels_.empty(); }
    const std::vector<LabelColumn>& label_columns() const { return labels_; }
    /// First label column; throws if none exist.
    const IntVector& labels() const;
    const IntVector& labels(const std::string& name) const;

private:
    Matrix values_;
    std::vector<LabelColumn> labels_;
    std::vector<std::string> column_names_;
};

enum class PriorKind { None, Attributes, Samples, Subset };

/// Which prior knowledge to factor out of the embeddings.
struct PriorSpec {
    PriorKind kind = PriorKind::None;
    IndexList attribute_cols;  // Attributes: column indices into the dataset
    Matrix sample_matrix;      // Samples: external m x d prior matrix
    IndexList subset_rows;     // Subset: row indices into the dataset

    static PriorSpec none();
    static PriorSpec attributes(IndexList cols);
    static PriorSpec samples(Matrix m);
    static PriorSpec subset(IndexList rows);
};

struct Hyperparams {
    double alpha = 1.0;        // prior-variance trade-off; forced to 0 without prior data
    double mu = 0.0;           // kurtosis scale
    int k = 2;                 // embedding dimension
    int min_cluster_size = 75; // minimum acceptable cluster size s
    int restarts = 1;
    std::uint64_t seed = 0;
    int max_iter = 500;
    double grad_tol = 1e-6;
};

/// Prior resolved against a concrete dataset: the m x d prior matrix Y and
/// the row indices of the kurtosis target set Z. The working data matrix is
/// always the dataset itself.
struct ResolvedPrior {
    Matrix prior;            // empty (0 x d) when there is no prior data
    IndexList kurtosis_rows; // rows of X the kurtosis term runs over
};

/// Maps a PriorSpec onto the inputs of the objective:
///   Attributes -> Y keeps the prior columns of X, zeros elsewhere; Z = all rows
///   Samples    -> Y is the external matrix; Z = all rows
///   Subset     -> Y = X[rows]; Z = complement of rows
///   None       -> Y empty; Z = all rows
ResolvedPrior resolve_prior(const Dataset& X, const PriorSpec& prior);

Vector column_means(const Matrix& X);

/// Subtracts column means. Idempotent.
Matrix centered(const Matrix& X);

/// Gathers the given rows of X into a new matrix.
Matrix take_rows(const Matrix& X, const IndexList& rows);

/// Embedded points along with the rows of the originating dataset they came from.
struct EmbeddingSet {
    Matrix points;         // p x k
    IndexList source_rows; // length p
};

} // namespace imapce

#endif
