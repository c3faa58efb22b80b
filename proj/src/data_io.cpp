#include "imapce/data_io.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace imapce {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // Trim surrounding whitespace; the formats handled here are unquoted.
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

std::uint32_t read_be_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("truncated IDX header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

} // namespace

Dataset gen_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
    const int d = 10;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix front_centers(spec.front_clusters, 4);
    for (Index i = 0; i < front_centers.rows(); ++i)
        for (Index j = 0; j < 4; ++j) front_centers(i, j) = spec.front_center_std * gauss(rng);
    Matrix mid_centers(spec.mid_clusters, 2);
    for (Index i = 0; i < mid_centers.rows(); ++i)
        for (Index j = 0; j < 2; ++j) mid_centers(i, j) = spec.mid_center_std * gauss(rng);

    std::uniform_int_distribution<int> pick_front(0, spec.front_clusters - 1);
    std::uniform_int_distribution<int> pick_mid(0, spec.mid_clusters - 1);

    Matrix X(spec.n, d);
    IntVector front_labels(spec.n), mid_labels(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        const int fc = pick_front(rng);
        const int mc = pick_mid(rng);
        front_labels(i) = fc;
        mid_labels(i) = mc;
        for (int j = 0; j < 4; ++j) X(i, j) = front_centers(fc, j) + spec.noise_std * gauss(rng);
        for (int j = 0; j < 2; ++j) X(i, 4 + j) = mid_centers(mc, j) + spec.noise_std * gauss(rng);
        for (int j = 6; j < d; ++j) X(i, j) = gauss(rng);
    }

    std::vector<std::string> names;
    for (int j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    Dataset out(std::move(X), std::move(names));
    out.add_labels("label_dims14", std::move(front_labels));
    out.add_labels("label_dims56", std::move(mid_labels));
    return out;
}

CsvLoadResult load_csv(const std::filesystem::path& path, const CsvColumns& columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    const std::vector<std::string> header = split_csv_line(line);

    auto column_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::invalid_argument("unknown column '" + name + "' in " + path.string());
        return static_cast<std::size_t>(it - header.begin());
    };

    CsvColumns cols = columns;
    if (cols.numeric.empty() && cols.binary.empty() && cols.labels.empty()) {
        for (const auto& h : header)
            (h.rfind("label", 0) == 0 ? cols.labels : cols.numeric).push_back(h);
    }
    if (cols.numeric.empty() && cols.binary.empty())
        throw std::invalid_argument("no feature columns requested from " + path.string());

    std::vector<std::size_t> num_idx, lab_idx;
    std::vector<std::pair<std::size_t, std::string>> bin_idx;
    for (const auto& n : cols.numeric) num_idx.push_back(column_index(n));
    for (const auto& [n, pos] : cols.binary) bin_idx.emplace_back(column_index(n), pos);
    for (const auto& n : cols.labels) lab_idx.push_back(column_index(n));

    const std::size_t width = header.size();
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<int>> label_rows;
    int dropped = 0;
    std::vector<std::string> warnings;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        auto drop = [&](const std::string& why) {
            ++dropped;
            warnings.push_back("line " + std::to_string(line_no) + ": " + why);
        };
        if (cells.size() != width) {
            drop("expected " + std::to_string(width) + " cells, got " + std::to_string(cells.size()));
            continue;
        }
        bool ok = true;
        std::vector<double> row;
        row.reserve(num_idx.size() + bin_idx.size());
        for (std::size_t idx : num_idx) {
            double v;
            const std::string& cell = cells[idx];
            if (cell.empty() || cell == "?") {
                drop("missing value in column '" + header[idx] + "'");
                ok = false;
                break;
            }
            if (!parse_double(cell, v)) {
                drop("unparseable numeric '" + cell + "' in column '" + header[idx] + "'");
                ok = false;
                break;
            }
            row.push_back(v);
        }
        if (!ok) continue;
        for (const auto& [idx, positive] : bin_idx) {
            const std::string& cell = cells[idx];
            if (cell.empty() || cell == "?") {
                drop("missing value in column '" + header[idx] + "'");
                ok = false;
                break;
            }
            row.push_back(cell == positive ? 1.0 : 0.0);
        }
        if (!ok) continue;
        std::vector<int> labs;
        for (std::size_t idx : lab_idx) {
            double v;
            if (!parse_double(cells[idx], v)) {
                drop("unparseable label '" + cells[idx] + "' in column '" + header[idx] + "'");
                ok = false;
                break;
            }
            labs.push_back(static_cast<int>(std::llround(v)));
        }
        if (!ok) continue;
        rows.push_back(std::move(row));
        label_rows.push_back(std::move(labs));
    }
    if (rows.empty()) throw std::runtime_error("no usable data rows in " + path.string());

    Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];

    std::vector<std::string> names = cols.numeric;
    for (const auto& [n, _] : cols.binary) names.push_back(n);
    Dataset data(std::move(values), std::move(names));
    for (std::size_t c = 0; c < lab_idx.size(); ++c) {
        IntVector lab(static_cast<Index>(rows.size()));
        for (std::size_t i = 0; i < label_rows.size(); ++i)
            lab(static_cast<Index>(i)) = label_rows[i][c];
        data.add_labels(cols.labels[c], std::move(lab));
    }
    return CsvLoadResult{std::move(data), dropped, std::move(warnings)};
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot open " + images_path.string());
    if (read_be_u32(img) != 0x00000803u)
        throw std::runtime_error("bad image magic in " + images_path.string());
    const std::uint32_t n = read_be_u32(img);
    const std::uint32_t rows = read_be_u32(img);
    const std::uint32_t cols = read_be_u32(img);
    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("cannot open " + labels_path.string());
    if (read_be_u32(lab) != 0x00000801u)
        throw std::runtime_error("bad label magic in " + labels_path.string());
    if (read_be_u32(lab) != n)
        throw std::runtime_error("image/label count mismatch");

    Matrix values(static_cast<Index>(n), static_cast<Index>(pixels));
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < n; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
        if (!img) throw std::runtime_error("truncated image data in " + images_path.string());
        for (std::size_t j = 0; j < pixels; ++j)
            values(static_cast<Index>(i), static_cast<Index>(j)) = buf[j] / 255.0;
    }
    IntVector labels(static_cast<Index>(n));
    std::vector<unsigned char> lbuf(n);
    lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(n));
    if (!lab) throw std::runtime_error("truncated label data in " + labels_path.string());
    for (std::uint32_t i = 0; i < n; ++i) labels(static_cast<Index>(i)) = lbuf[i];

    Dataset out(std::move(values));
    out.add_labels("label", std::move(labels));
    return out;
}

Dataset superimpose(const Dataset& reference, const Dataset& background, const ComplexSpec& spec) {
    if (reference.cols() != background.cols())
        throw std::invalid_argument("reference and background pixel dimensions differ");
    if (spec.n_complex < 2 || spec.n_complex % 2 != 0)
        throw std::invalid_argument("n_complex must be a positive even number");
    auto in_unit_range = [](const Matrix& m) {
        return m.minCoeff() >= 0.0 && m.maxCoeff() <= 1.0;
    };
    if (!in_unit_range(reference.values()) || !in_unit_range(background.values()))
        throw std::invalid_argument("pixel values must lie in [0,1]");
    const IntVector& labels = reference.labels();

    std::mt19937_64 rng(spec.seed);
    const int per_class = spec.n_complex / 2;
    IndexList chosen;
    for (int cls : {spec.class_a, spec.class_b}) {
        IndexList rows;
        for (Index i = 0; i < reference.rows(); ++i)
            if (labels(i) == cls) rows.push_back(i);
        if (rows.empty())
            throw std::invalid_argument("reference class " + std::to_string(cls) + " is absent");
        if (static_cast<int>(rows.size()) < per_class)
            throw std::invalid_argument("reference class " + std::to_string(cls) +
                                        " has fewer than " + std::to_string(per_class) + " samples");
        std::shuffle(rows.begin(), rows.end(), rng);
        chosen.insert(chosen.end(), rows.begin(), rows.begin() + per_class);
    }

    std::uniform_int_distribution<Index> pick_bg(0, background.rows() - 1);
    Matrix values(spec.n_complex, reference.cols());
    IntVector out_labels(spec.n_complex);
    for (int i = 0; i < spec.n_complex; ++i) {
        const Index r = chosen[static_cast<std::size_t>(i)];
        const Index b = pick_bg(rng);
        values.row(i) =
            (reference.values().row(r) + background.values().row(b)).cwiseMin(1.0).cwiseMax(0.0);
        out_labels(i) = labels(r);
    }
    Dataset out(std::move(values));
    out.add_labels("label", std::move(out_labels));
    return out;
}

Matrix Preprocessor::apply(const Matrix& m) const {
    Matrix shifted = m.rowwise() - mean.transpose();
    return basis ? Matrix(shifted * *basis) : shifted;
}

std::pair<Dataset, Preprocessor> preprocess(const Dataset& data, bool center_data,
                                            std::optional<int> svd_dims) {
    Preprocessor pre;
    pre.mean = center_data ? Vector(column_means(data.values()))
                           : Vector(Vector::Zero(data.cols()));
    Matrix work = data.values().rowwise() - pre.mean.transpose();

    if (svd_dims) {
        const int r = *svd_dims;
        if (r < 1 || r >= std::min(data.rows(), data.cols()))
            throw std::invalid_argument("svd_dims must lie in [1, min(n,d))");
        Eigen::BDCSVD<Matrix> svd(work, Eigen::ComputeThinV);
        const Vector& sv = svd.singularValues();
        const double total = sv.squaredNorm();
        pre.basis = svd.matrixV().leftCols(r);
        pre.retained_variance = total > 0.0 ? sv.head(r).squaredNorm() / total : 1.0;
        work = work * *pre.basis;
    }

    std::vector<std::string> names;
    if (pre.basis)
        for (int j = 0; j < work.cols(); ++j) names.push_back("pc" + std::to_string(j));
    else
        names = data.column_names();
    Dataset out(std::move(work), std::move(names));
    for (const auto& lc : data.label_columns()) out.add_labels(lc.name, lc.values);
    return {std::move(out), std::move(pre)};
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (Index j = 0; j < data.cols(); ++j) {
        if (j) out << ',';
        out << (data.column_names().empty() ? "f" + std::to_string(j) : data.column_names()[static_cast<std::size_t>(j)]);
    }
    for (const auto& lc : data.label_columns()) out << ',' << lc.name;
    out << '\n';
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j) {
            if (j) out << ',';
            out << format_double(data.values()(i, j));
        }
        for (const auto& lc : data.label_columns()) out << ',' << lc.values(i);
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& column_names) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < column_names.size(); ++j) {
        if (j) out << ',';
        out << column_names[j];
    }
    out << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_embeddings_csv(const std::filesystem::path& path, const Matrix& points,
                          const IndexList& source_rows, const Dataset& origin) {
    if (static_cast<Index>(source_rows.size()) != points.rows())
        throw std::invalid_argument("source row count does not match embeddings");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "row";
    for (Index j = 0; j < points.cols(); ++j) out << ",e" << j;
    for (const auto& lc : origin.label_columns()) out << ',' << lc.name;
    out << '\n';
    for (Index i = 0; i < points.rows(); ++i) {
        out << source_rows[static_cast<std::size_t>(i)];
        for (Index j = 0; j < points.cols(); ++j) out << ',' << format_double(points(i, j));
        for (const auto& lc : origin.label_columns())
            out << ',' << lc.values(source_rows[static_cast<std::size_t>(i)]);
        out << '\n';
    }
}

} // namespace imapce
