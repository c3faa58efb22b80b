#ifndef IMAPCE_DATA_IO_HPP
#define IMAPCE_DATA_IO_HPP

#include "imapce/dataset.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace imapce {

/// Recipe for the ten-dimensional synthetic benchmark: two clusters in the
/// first four dimensions (centers ~ N(0, 25)), three clusters in dimensions
/// 5-6 (centers ~ N(0, 1)), per-point noise ~ N(0, 0.01) on the structured
/// dimensions, and pure N(0, 1) samples in the last four dimensions.
/// Normal parameters are read as N(mean, variance).
struct SyntheticSpec {
    int n = 1500;
    int front_clusters = 2;       // dimensions 1-4
    int mid_clusters = 3;         // dimensions 5-6
    double front_center_std = 5.0;
    double mid_center_std = 1.0;
    double noise_std = 0.1;
    std::uint64_t seed = 0;
};

/// Emits the dataset with label columns "label_dims14" and "label_dims56".
Dataset gen_synthetic(const SyntheticSpec& spec);

/// Column roles for the CSV loader. Binary columns are given as
/// (name, positive value) pairs and encoded 1 when the cell equals the
/// positive value, else 0. Dataset columns appear in listed order,
/// numeric first.
struct CsvColumns {
    std::vector<std::string> numeric;
    std::vector<std::pair<std::string, std::string>> binary;
    std::vector<std::string> labels;
};

struct CsvLoadResult {
    Dataset data;
    int dropped_rows = 0;
    std::vector<std::string> warnings; // one entry per dropped row, with line number
};

/// Loads a comma-separated file with a mandatory header row. Rows with
/// missing ("" or "?") or unparseable cells are dropped and reported.
/// Unknown column names and empty files are errors. When `columns` is empty,
/// every column whose name starts with "label" becomes an integer label
/// column and the rest are numeric features.
CsvLoadResult load_csv(const std::filesystem::path& path, const CsvColumns& columns = {});

/// Loads an IDX image/label pair (big-endian, magic 0x803 / 0x801); pixels
/// are scaled to [0,1] and rows are the flattened images.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Construction of a "complex" dataset: samples of two reference classes,
/// each pixelwise-added to a random background image and clipped to [0,1].
struct ComplexSpec {
    int class_a = 0;
    int class_b = 1;
    int n_complex = 6000; // total rows, split evenly between the classes
    std::uint64_t seed = 0;
};

/// Both datasets must share the pixel dimension and lie in [0,1]. Reference
/// labels are retained on the output.
Dataset superimpose(const Dataset& reference, const Dataset& background, const ComplexSpec& spec);

/// Recorded centering/projection transform so prior samples can be mapped
/// into the same space as the preprocessed data.
struct Preprocessor {
    Vector mean;                 // column means subtracted
    std::optional<Matrix> basis; // d x r right singular basis
    double retained_variance = 1.0;

    Matrix apply(const Matrix& m) const;
};

/// Centers and optionally projects onto the top right-singular directions.
/// Useful before kurtosis optimization when n is close to d.
std::pair<Dataset, Preprocessor> preprocess(const Dataset& data, bool center_data,
                                            std::optional<int> svd_dims);

// ---- CSV writers (deterministic "%.12g" formatting) ----

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& column_names);

/// Embeddings file: row id, one column per embedding dimension, then any
/// label columns of the originating dataset restricted to source_rows.
void write_embeddings_csv(const std::filesystem::path& path, const Matrix& points,
                          const IndexList& source_rows, const Dataset& origin);

} // namespace imapce

#endif
