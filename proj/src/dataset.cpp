#include "imapce/dataset.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace imapce {

namespace {

void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite())
        throw std::invalid_argument(std::string(what) + " contains NaN or Inf entries");
}

void check_index_list(const IndexList& idx, Index bound, const char* what) {
    std::unordered_set<Index> seen;
    for (Index i : idx) {
        if (i < 0 || i >= bound)
            throw std::invalid_argument(std::string(what) + " index out of range");
        if (!seen.insert(i).second)
            throw std::invalid_argument(std::string(what) + " contains duplicate indices");
    }
}

} // namespace

Dataset::Dataset(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw std::invalid_argument("dataset must have at least one row and one column");
    check_finite(values_, "dataset");
}

Dataset::Dataset(Matrix values, std::vector<std::string> column_names)
    : Dataset(std::move(values)) {
    if (!column_names.empty() && static_cast<Index>(column_names.size()) != values_.cols())
        throw std::invalid_argument("column name count does not match column count");
    column_names_ = std::move(column_names);
}

void Dataset::add_labels(std::string name, IntVector values) {
    if (values.size() != values_.rows())
        throw std::invalid_argument("label vector length does not match row count");
    labels_.push_back(LabelColumn{std::move(name), std::move(values)});
}

const IntVector& Dataset::labels() const {
    if (labels_.empty())
        throw std::logic_error("dataset has no labels");
    return labels_.front().values;
}

const IntVector& Dataset::labels(const std::string& name) const {
    for (const auto& col : labels_)
        if (col.name == name) return col.values;
    throw std::invalid_argument("no label column named '" + name + "'");
}

PriorSpec PriorSpec::none() { return PriorSpec{}; }

PriorSpec PriorSpec::attributes(IndexList cols) {
    PriorSpec p;
    p.kind = PriorKind::Attributes;
    p.attribute_cols = std::move(cols);
    return p;
}

PriorSpec PriorSpec::samples(Matrix m) {
    PriorSpec p;
    p.kind = PriorKind::Samples;
    p.sample_matrix = std::move(m);
    return p;
}

PriorSpec PriorSpec::subset(IndexList rows) {
    PriorSpec p;
    p.kind = PriorKind::Subset;
    p.subset_rows = std::move(rows);
    return p;
}

ResolvedPrior resolve_prior(const Dataset& X, const PriorSpec& prior) {
    const Index n = X.rows();
    const Index d = X.cols();
    ResolvedPrior out;

    auto all_rows = [&]() {
        IndexList rows(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
        return rows;
    };

    switch (prior.kind) {
    case PriorKind::None:
        out.prior = Matrix(0, d);
        out.kurtosis_rows = all_rows();
        break;
    case PriorKind::Attributes: {
        if (prior.attribute_cols.empty())
            throw std::invalid_argument("attribute prior needs at least one column");
        check_index_list(prior.attribute_cols, d, "attribute column");
        // Prior columns retained, everything else zeroed, so Y has d columns
        // as the objective requires.
        Matrix Y = Matrix::Zero(n, d);
        for (Index c : prior.attribute_cols) Y.col(c) = X.values().col(c);
        out.prior = std::move(Y);
        out.kurtosis_rows = all_rows();
        break;
    }
    case PriorKind::Samples:
        if (prior.sample_matrix.rows() == 0)
            throw std::invalid_argument("sample prior matrix is empty");
        if (prior.sample_matrix.cols() != d)
            throw std::invalid_argument("sample prior matrix column count does not match data");
        check_finite(prior.sample_matrix, "sample prior matrix");
        out.prior = prior.sample_matrix;
        out.kurtosis_rows = all_rows();
        break;
    case PriorKind::Subset: {
        if (prior.subset_rows.empty())
            throw std::invalid_argument("subset prior needs at least one row");
        check_index_list(prior.subset_rows, n, "subset row");
        if (static_cast<Index>(prior.subset_rows.size()) == n)
            throw std::invalid_argument("subset prior covers every row; nothing left to explore");
        std::vector<bool> in_prior(static_cast<std::size_t>(n), false);
        for (Index r : prior.subset_rows) in_prior[static_cast<std::size_t>(r)] = true;
        out.prior = take_rows(X.values(), prior.subset_rows);
        for (Index i = 0; i < n; ++i)
            if (!in_prior[static_cast<std::size_t>(i)]) out.kurtosis_rows.push_back(i);
        break;
    }
    }
    return out;
}

Vector column_means(const Matrix& X) { return X.colwise().mean(); }

Matrix centered(const Matrix& X) {
    if (X.rows() == 0) return X;
    return X.rowwise() - X.colwise().mean();
}

Matrix take_rows(const Matrix& X, const IndexList& rows) {
    Matrix out(static_cast<Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = X.row(rows[i]);
    return out;
}

} // namespace imapce
