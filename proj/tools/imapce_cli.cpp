// imapce: informative manifold projections for cluster exploration.
//
// Subcommands: synth | embed | explore | score. Every command accepts
// --config FILE with flat key=value lines (same keys as the long flags);
// command-line flags override file values. All numeric artifacts are CSV and
// deterministic for a fixed seed.

#include "imapce/data_io.hpp"
#include "imapce/dataset.hpp"
#include "imapce/dpgmm.hpp"
#include "imapce/explore.hpp"
#include "imapce/metrics.hpp"
#include "imapce/objective.hpp"
#include "imapce/pipeline.hpp"
#include "imapce/stiefel.hpp"
#include "imapce/svg.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace imapce;

namespace {

constexpr const char* kErrorPrefix = "imapce: error: ";

// "0-3,7,9" -> {0,1,2,3,7,9}
IndexList parse_index_list(const std::string& text) {
    IndexList out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        const auto dash = part.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(std::stoll(part));
        } else {
            const long long lo = std::stoll(part.substr(0, dash));
            const long long hi = std::stoll(part.substr(dash + 1));
            if (hi < lo) throw CLI::ValidationError("index range", "descending range " + part);
            for (long long v = lo; v <= hi; ++v) out.push_back(v);
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(std::stod(part));
    return out;
}

void write_resolved_config(const CLI::App& app, const fs::path& out_dir) {
    std::ofstream out(out_dir / "config.resolved");
    out << app.config_to_str(true, false);
}

fs::path make_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

struct DataOptions {
    std::string path;
    std::vector<std::string> numeric_cols;
    std::vector<std::string> binary_cols; // name=positive_value
    std::vector<std::string> label_cols;

    void attach(CLI::App& app) {
        app.add_option("--data", path, "Input dataset CSV")->required();
        app.add_option("--numeric-cols", numeric_cols,
                       "Numeric feature columns (default: all non-label columns)");
        app.add_option("--binary-cols", binary_cols,
                       "Binary columns as name=positive_value pairs");
        app.add_option("--label-cols", label_cols,
                       "Label columns (default: columns named label*)");
    }

    Dataset load(std::ostream& log) const {
        CsvColumns cols;
        cols.numeric = numeric_cols;
        for (const auto& spec : binary_cols) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--binary-cols", "expected name=positive_value");
            cols.binary.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
        }
        cols.labels = label_cols;
        CsvLoadResult res = load_csv(path, cols);
        for (const auto& w : res.warnings) log << "warning: " << path << ": " << w << "\n";
        if (res.dropped_rows > 0)
            log << "warning: dropped " << res.dropped_rows << " rows from " << path << "\n";
        return std::move(res.data);
    }
};

struct PriorOptions {
    std::string type = "none";
    std::string cols;
    std::string rows;
    std::string file;

    void attach(CLI::App& app) {
        app.add_option("--prior-type", type, "Prior kind: none|attributes|samples|subset")
            ->check(CLI::IsMember({"none", "attributes", "samples", "subset"}))
            ->capture_default_str();
        app.add_option("--prior-cols", cols, "Attribute prior: column indices, e.g. 0-3");
        app.add_option("--prior-rows", rows, "Subset prior: row indices, e.g. 0-99,200");
        app.add_option("--prior-file", file, "Sample prior: CSV of prior samples");
    }

    PriorSpec resolve(std::ostream& log) const {
        if (type == "none") return PriorSpec::none();
        if (type == "attributes") {
            if (cols.empty()) throw CLI::ValidationError("--prior-cols", "required for attributes");
            return PriorSpec::attributes(parse_index_list(cols));
        }
        if (type == "subset") {
            if (rows.empty()) throw CLI::ValidationError("--prior-rows", "required for subset");
            return PriorSpec::subset(parse_index_list(rows));
        }
        if (file.empty()) throw CLI::ValidationError("--prior-file", "required for samples");
        CsvLoadResult res = load_csv(file);
        for (const auto& w : res.warnings) log << "warning: " << file << ": " << w << "\n";
        return PriorSpec::samples(res.data.values());
    }
};

struct HyperOptions {
    double alpha = 1.0;
    double mu = 0.0;
    bool auto_mu = false;
    int auto_mu_exponent = -2;
    int k = 2;
    int s = 75;
    int restarts = 10;
    std::uint64_t seed = 0;
    int max_iter = 500;
    double grad_tol = 1e-6;

    void attach(CLI::App& app) {
        app.add_option("--alpha", alpha, "Prior variance trade-off")->capture_default_str();
        app.add_option("--mu", mu, "Kurtosis scale")->capture_default_str();
        app.add_flag("--auto-mu", auto_mu,
                     "Set mu from the contrastive reconstruction error of the data");
        app.add_option("--auto-mu-exponent", auto_mu_exponent,
                       "Power of ten below the reconstruction error used by --auto-mu")
            ->capture_default_str();
        app.add_option("--k", k, "Embedding dimension")->capture_default_str();
        app.add_option("--s", s, "Minimum acceptable cluster size")->capture_default_str();
        app.add_option("--restarts", restarts, "Random solver restarts")->capture_default_str();
        app.add_option("--seed", seed, "Random seed")->capture_default_str();
        app.add_option("--max-iter", max_iter, "Solver iteration cap")->capture_default_str();
        app.add_option("--grad-tol", grad_tol, "Riemannian gradient norm tolerance")
            ->capture_default_str();
    }

    Hyperparams to_hyperparams() const {
        Hyperparams hp;
        hp.alpha = alpha;
        hp.mu = mu;
        hp.k = k;
        hp.min_cluster_size = s;
        hp.restarts = restarts;
        hp.seed = seed;
        hp.max_iter = max_iter;
        hp.grad_tol = grad_tol;
        return hp;
    }
};

struct DpgmmOptions {
    int max_components = 10;
    double concentration = 1.0;
    int max_vi_iter = 200;
    double elbo_tol = 1e-4;

    void attach(CLI::App& app) {
        app.add_option("--max-components", max_components, "DPGMM truncation level")
            ->capture_default_str();
        app.add_option("--concentration", concentration, "DPGMM stick concentration")
            ->capture_default_str();
        app.add_option("--max-vi-iter", max_vi_iter, "DPGMM iteration cap")->capture_default_str();
        app.add_option("--elbo-tol", elbo_tol, "DPGMM ELBO tolerance")->capture_default_str();
    }

    DpgmmConfig to_config() const {
        DpgmmConfig cfg;
        cfg.max_components = max_components;
        cfg.concentration = concentration;
        cfg.max_vi_iter = max_vi_iter;
        cfg.elbo_tol = elbo_tol;
        return cfg;
    }
};

IntVector svg_classes(const Dataset& data, const IndexList& rows, const std::string& label_col) {
    IntVector classes = IntVector::Constant(static_cast<Index>(rows.size()), -2);
    if (data.has_labels()) {
        const IntVector& labels = label_col.empty() ? data.labels() : data.labels(label_col);
        for (std::size_t i = 0; i < rows.size(); ++i)
            classes(static_cast<Index>(i)) = labels(rows[i]);
    }
    return classes;
}

double contrastive_reconstruction_error(const Matrix& Xc, const Matrix& Yc, double alpha, int k) {
    Matrix V = cpca_project(Xc, Yc, Yc.rows() > 0 ? alpha : 0.0, k);
    return (Xc - Xc * V * V.transpose()).squaredNorm();
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(std::vector<std::string> args) {
    CLI::App app{"Generate the ten-dimensional synthetic benchmark"};
    app.set_config("--config");
    SyntheticSpec spec;
    std::string out;
    app.add_option("--n", spec.n, "Number of samples")->capture_default_str();
    app.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    app.add_option("--noise-std", spec.noise_std, "Structured-dimension noise std")
        ->capture_default_str();
    app.add_option("--front-clusters", spec.front_clusters, "Clusters in dimensions 1-4")
        ->capture_default_str();
    app.add_option("--mid-clusters", spec.mid_clusters, "Clusters in dimensions 5-6")
        ->capture_default_str();
    app.add_option("--out", out, "Output directory")->required();
    std::reverse(args.begin(), args.end());
    app.parse(args);

    const fs::path dir = make_out_dir(out);
    Dataset data = gen_synthetic(spec);
    write_dataset_csv(dir / "synthetic.csv", data);
    write_resolved_config(app, dir);
    std::cout << "wrote " << (dir / "synthetic.csv").string() << " (" << data.rows() << " x "
              << data.cols() << ")\n";
    return 0;
}

// ---- embed ----------------------------------------------------------------

int cmd_embed(std::vector<std::string> args) {
    CLI::App app{"Compute a low-dimensional embedding"};
    app.set_config("--config");
    DataOptions data_opt;
    PriorOptions prior_opt;
    HyperOptions hp_opt;
    std::string method = "imapce";
    std::string out;
    std::optional<int> svd_dims;
    std::string cpca_alphas_text;
    int cpca_clusters = 4;
    app.add_option("--method", method, "imapce|cpca")
        ->check(CLI::IsMember({"imapce", "cpca"}))
        ->capture_default_str();
    data_opt.attach(app);
    prior_opt.attach(app);
    hp_opt.attach(app);
    app.add_option("--svd-dims", svd_dims, "Project to this many singular directions first");
    app.add_option("--cpca-alphas", cpca_alphas_text, "cPCA candidate alphas, e.g. 0,0.5,1");
    app.add_option("--cpca-clusters", cpca_clusters, "Spectral clusters for cPCA alpha selection")
        ->capture_default_str();
    app.add_option("--out", out, "Output directory")->required();
    std::reverse(args.begin(), args.end());
    app.parse(args);

    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = make_out_dir(out);
    Dataset raw = data_opt.load(std::cerr);
    PriorSpec prior = prior_opt.resolve(std::cerr);

    EmbedOptions eopt;
    eopt.method = method == "imapce" ? EmbedMethod::Imapce : EmbedMethod::Cpca;
    eopt.svd_dims = svd_dims;
    eopt.auto_mu = hp_opt.auto_mu;
    eopt.auto_mu_exponent = hp_opt.auto_mu_exponent;
    if (!cpca_alphas_text.empty()) eopt.cpca_alphas = parse_double_list(cpca_alphas_text);
    eopt.cpca_spectral_clusters = cpca_clusters;

    EmbedResult res = embed_dataset(raw, prior, hp_opt.to_hyperparams(), eopt);

    std::ofstream log(dir / "run_log.txt");
    if (svd_dims)
        log << "svd_dims: " << *svd_dims
            << "\nretained_variance: " << res.preprocessor.retained_variance << "\n";
    if (method == "imapce") {
        if (hp_opt.auto_mu)
            log << "auto_mu_reconstruction_error: " << res.contrastive_reconstruction_error
                << "\nauto_mu: " << res.mu_used << "\n";
        log << "objective: " << res.objective << "\nconverged: " << (res.report.converged ? 1 : 0)
            << "\niterations: " << res.report.iterations
            << "\nbest_restart: " << res.report.restart_index
            << "\nfailed_restarts: " << res.report.failed_restarts << "\nobjective_trace:";
        for (double v : res.report.objective_trace) log << ' ' << v;
        log << "\n";
    } else {
        log << "cpca_alpha: " << res.cpca_alpha << "\nreconstruction_error: " << res.objective
            << "\n";
    }

    IndexList all_rows(static_cast<std::size_t>(raw.rows()));
    for (Index i = 0; i < raw.rows(); ++i) all_rows[static_cast<std::size_t>(i)] = i;
    write_embeddings_csv(dir / "embeddings.csv", res.embeddings, all_rows, raw);
    {
        std::vector<std::string> names;
        for (int j = 0; j < hp_opt.k; ++j) names.push_back("v" + std::to_string(j));
        write_matrix_csv(dir / "projection.csv", res.projection, names);
    }
    if (hp_opt.k == 2) {
        SvgPanel panel{"embeddings (" + method + ")", res.embeddings,
                       svg_classes(raw, all_rows, ""), {}};
        write_scatter_svg(dir / "embeddings.svg", {panel});
    }
    const auto t1 = std::chrono::steady_clock::now();
    log << "wall_time_s: "
        << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0 << "\n";
    write_resolved_config(app, dir);
    std::cout << "wrote embeddings for " << raw.rows() << " rows to " << dir.string() << "\n";
    return 0;
}

// ---- explore ---------------------------------------------------------------

int cmd_explore(std::vector<std::string> args) {
    CLI::App app{"Iterative cluster exploration"};
    app.set_config("--config");
    DataOptions data_opt;
    PriorOptions prior_opt;
    HyperOptions hp_opt;
    DpgmmOptions dpgmm_opt;
    std::string driver = "imapce";
    std::string out;
    std::optional<int> svd_dims;
    int max_outer = 50;
    std::string label_col;
    app.add_option("--driver", driver, "Projection driver per iteration: imapce|cpca")
        ->check(CLI::IsMember({"imapce", "cpca"}))
        ->capture_default_str();
    data_opt.attach(app);
    prior_opt.attach(app);
    hp_opt.attach(app);
    dpgmm_opt.attach(app);
    app.add_option("--svd-dims", svd_dims, "Project to this many singular directions first");
    app.add_option("--max-outer-iter", max_outer, "Exploration round cap")->capture_default_str();
    app.add_option("--label-col", label_col, "Label column for the ground-truth panel");
    app.add_option("--out", out, "Output directory")->required();
    std::reverse(args.begin(), args.end());
    app.parse(args);

    const fs::path dir = make_out_dir(out);
    Dataset raw = data_opt.load(std::cerr);
    PriorSpec prior = prior_opt.resolve(std::cerr);
    auto [data, pre] = preprocess(raw, true, svd_dims);

    Hyperparams hp = hp_opt.to_hyperparams();
    if (hp_opt.auto_mu) {
        const Matrix& X = data.values();
        ResolvedPrior rp = resolve_prior(data, prior);
        Matrix Y = rp.prior.rows() > 0 ? Matrix(centered(rp.prior)) : Matrix(0, X.cols());
        const double err =
            contrastive_reconstruction_error(X, Y, rp.prior.rows() > 0 ? hp.alpha : 0.0, hp.k);
        hp.mu = err * std::pow(10.0, hp_opt.auto_mu_exponent);
    }
    ExploreOptions opts;
    opts.max_outer_iterations = max_outer;
    opts.driver = driver == "imapce" ? ExploreDriver::Imapce : ExploreDriver::Cpca;

    ExplorationHistory history = explore(data, prior, hp, dpgmm_opt.to_config(), opts);

    const Matrix& X = data.values();
    for (std::size_t i = 0; i < history.iterations.size(); ++i) {
        const auto& it = history.iterations[i];
        char name[32];
        std::snprintf(name, sizeof(name), "iter_%03zu", i);
        const fs::path iter_dir = dir / name;
        fs::create_directories(iter_dir);

        write_embeddings_csv(iter_dir / "embeddings.csv", it.embeddings.points,
                             it.embeddings.source_rows, raw);
        {
            std::vector<std::string> names;
            for (Index j = 0; j < it.projection.cols(); ++j)
                names.push_back("v" + std::to_string(j));
            write_matrix_csv(iter_dir / "projection.csv", it.projection, names);
        }
        {
            std::ofstream f(iter_dir / "assignments.csv");
            f << "row,cluster\n";
            for (Index r = 0; r < it.clusters.assignments.size(); ++r)
                f << it.embeddings.source_rows[static_cast<std::size_t>(r)] << ','
                  << it.clusters.assignments(r) << '\n';
        }
        {
            std::ofstream f(iter_dir / "distinct_rows.csv");
            f << "row,set\n";
            for (std::size_t s = 0; s < it.distinct_rows.size(); ++s)
                for (Index r : it.distinct_rows[s]) f << r << ',' << s << '\n';
        }

        if (it.projection.cols() == 2) {
            // Triptych mirroring the exploration figures: everything / DPGMM
            // clusters with the distinct cluster framed / ground truth.
            std::vector<SvgPanel> panels;
            Matrix all = X * it.projection;
            IntVector shade = IntVector::Constant(X.rows(), -1);
            for (Index r : it.embeddings.source_rows) shade(r) = -2;
            panels.push_back({"prior (grey) and unexplored (black)", all, shade, {}});

            IndexList framed;
            {
                std::set<Index> distinct;
                for (const auto& rows : it.distinct_rows) distinct.insert(rows.begin(), rows.end());
                for (Index r = 0; r < static_cast<Index>(it.embeddings.source_rows.size()); ++r)
                    if (distinct.count(it.embeddings.source_rows[static_cast<std::size_t>(r)]))
                        framed.push_back(r);
            }
            panels.push_back({"dpgmm clusters, most distinct framed", it.embeddings.points,
                              it.clusters.assignments, framed});
            if (raw.has_labels())
                panels.push_back({"unexplored points by ground truth", it.embeddings.points,
                                  svg_classes(raw, it.embeddings.source_rows, label_col),
                                  {}});
            write_scatter_svg(iter_dir / "triptych.svg", panels);
        }
    }

    {
        std::ofstream f(dir / "summary.txt");
        f << "iterations: " << history.iterations.size() << "\n";
        f << "terminal_reason: " << to_string(history.terminal_reason) << "\n";
        for (std::size_t i = 0; i < history.iterations.size(); ++i) {
            f << "iter_" << i << ": unexplored="
              << history.iterations[i].embeddings.source_rows.size() << " distinct_sizes=";
            for (const auto& rows : history.iterations[i].distinct_rows) f << rows.size() << ' ';
            f << "objective=" << history.iterations[i].objective << "\n";
        }
    }
    write_resolved_config(app, dir);
    std::cout << "explored " << history.iterations.size() << " iterations ("
              << to_string(history.terminal_reason) << "); results in " << dir.string() << "\n";
    return 0;
}

// ---- score ----------------------------------------------------------------

struct LoadedEmbeddings {
    Matrix points;
    IndexList rows;
    std::vector<LabelColumn> labels;

    const IntVector& label(const std::string& name) const {
        if (labels.empty()) throw std::runtime_error("embeddings file carries no label column");
        if (name.empty()) return labels.front().values;
        for (const auto& lc : labels)
            if (lc.name == name) return lc.values;
        throw std::runtime_error("no label column named '" + name + "'");
    }
};

LoadedEmbeddings load_embeddings(const fs::path& path) {
    CsvLoadResult res = load_csv(path); // label* columns auto-detected
    const Dataset& d = res.data;
    // Column 0 is the row id, the rest are coordinates.
    LoadedEmbeddings out;
    const Index k = d.cols() - 1;
    if (k < 1) throw std::runtime_error("embeddings file has no coordinate columns");
    out.points = d.values().rightCols(k);
    out.rows.reserve(static_cast<std::size_t>(d.rows()));
    for (Index i = 0; i < d.rows(); ++i)
        out.rows.push_back(static_cast<Index>(std::llround(d.values()(i, 0))));
    out.labels = d.label_columns();
    return out;
}

std::vector<IndexList> load_distinct_clusters(const fs::path& explore_dir) {
    std::vector<IndexList> clusters;
    std::vector<fs::path> iter_dirs;
    for (const auto& e : fs::directory_iterator(explore_dir))
        if (e.is_directory() && e.path().filename().string().rfind("iter_", 0) == 0)
            iter_dirs.push_back(e.path());
    std::sort(iter_dirs.begin(), iter_dirs.end());
    for (const auto& d : iter_dirs) {
        const fs::path f = d / "distinct_rows.csv";
        if (!fs::exists(f)) continue;
        std::ifstream in(f);
        std::string line;
        std::getline(in, line); // header
        std::map<int, IndexList> sets;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            sets[std::stoi(line.substr(comma + 1))].push_back(std::stoll(line.substr(0, comma)));
        }
        for (auto& [_, rows] : sets) clusters.push_back(std::move(rows));
    }
    return clusters;
}

int cmd_score(std::vector<std::string> args) {
    CLI::App app{"Evaluate embeddings or exploration output"};
    app.set_config("--config");
    std::string kind;
    std::string embeddings_path;
    std::string explore_dir;
    std::string labels_a, labels_b;
    std::string label_col;
    std::string data_path;
    std::string neighbors_text = "10,20,30,40,50,60,70,80,90,100";
    int n_splits = 10;
    double train_frac = 0.75;
    std::uint64_t seed = 0;
    std::string out;
    app.add_option("--kind", kind, "laplacian|jaccard|nmi|clf")
        ->check(CLI::IsMember({"laplacian", "jaccard", "nmi", "clf"}))
        ->required();
    app.add_option("--embeddings", embeddings_path, "embeddings.csv from embed/explore");
    app.add_option("--explore-dir", explore_dir, "explore output directory (jaccard/nmi)");
    app.add_option("--data", data_path, "dataset CSV carrying ground-truth labels");
    app.add_option("--labels-a", labels_a, "first label CSV for nmi");
    app.add_option("--labels-b", labels_b, "second label CSV for nmi");
    app.add_option("--label-col", label_col, "label column to score against");
    app.add_option("--neighbors", neighbors_text, "laplacian neighbor sweep")
        ->capture_default_str();
    app.add_option("--n-splits", n_splits, "classifier train/test splits")->capture_default_str();
    app.add_option("--train-frac", train_frac, "classifier training fraction")
        ->capture_default_str();
    app.add_option("--seed", seed, "classifier split seed")->capture_default_str();
    app.add_option("--out", out, "Output directory")->required();
    std::reverse(args.begin(), args.end());
    app.parse(args);

    const fs::path dir = make_out_dir(out);
    std::ofstream report(dir / "report.csv");
    char buf[64];

    auto ground_truth = [&]() {
        if (data_path.empty())
            throw std::runtime_error("--data with labels is required for this score");
        CsvLoadResult res = load_csv(data_path);
        return label_col.empty() ? res.data.labels() : res.data.labels(label_col);
    };

    if (kind == "laplacian") {
        LoadedEmbeddings emb = load_embeddings(embeddings_path);
        const IntVector& labels = emb.label(label_col);
        report << "neighbors,score\n";
        for (Index nn : parse_index_list(neighbors_text)) {
            const double s = laplacian_score(emb.points, labels, static_cast<int>(nn));
            std::snprintf(buf, sizeof(buf), "%.12g", s);
            report << nn << ',' << buf << '\n';
        }
    } else if (kind == "jaccard") {
        std::vector<IndexList> clusters = load_distinct_clusters(explore_dir);
        const IntVector labels = ground_truth();
        std::snprintf(buf, sizeof(buf), "%.12g", mean_jaccard(clusters, labels));
        report << "metric,value\nmean_jaccard," << buf << '\n';
    } else if (kind == "nmi") {
        double value = 0.0;
        if (!explore_dir.empty()) {
            // Stored-cluster partition vs ground truth over every row; rows
            // the exploration never stored form one remainder cluster.
            std::vector<IndexList> clusters = load_distinct_clusters(explore_dir);
            if (clusters.empty()) throw std::runtime_error("no stored clusters found");
            const IntVector labels = ground_truth();
            IntVector part = IntVector::Zero(labels.size());
            for (std::size_t c = 0; c < clusters.size(); ++c)
                for (Index r : clusters[c]) part(r) = static_cast<int>(c) + 1;
            value = nmi(part, labels);
        } else {
            if (labels_a.empty() || labels_b.empty())
                throw std::runtime_error("nmi needs --explore-dir or --labels-a/--labels-b");
            CsvLoadResult a = load_csv(labels_a);
            CsvLoadResult b = load_csv(labels_b);
            const IntVector& la = label_col.empty() ? a.data.labels() : a.data.labels(label_col);
            const IntVector& lb = label_col.empty() ? b.data.labels() : b.data.labels(label_col);
            value = nmi(la, lb);
        }
        std::snprintf(buf, sizeof(buf), "%.12g", value);
        report << "metric,value\nnmi," << buf << '\n';
    } else { // clf
        LoadedEmbeddings emb = load_embeddings(embeddings_path);
        const IntVector& labels = emb.label(label_col);
        AccuracyReport rep = separability_accuracy(emb.points, labels, n_splits, train_frac, seed);
        report << "metric,mean,std\n";
        std::snprintf(buf, sizeof(buf), "%.12g", rep.mean);
        report << "accuracy," << buf;
        std::snprintf(buf, sizeof(buf), "%.12g", rep.stdev);
        report << ',' << buf << '\n';
    }
    write_resolved_config(app, dir);
    std::cout << "wrote " << (dir / "report.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "-h" || args[0] == "--help") {
        std::cout << "usage: imapce <synth|embed|explore|score> [options]\n"
                     "       imapce <command> --help for per-command options\n";
        return args.empty() ? 1 : 0;
    }
    const std::string command = args[0];
    args.erase(args.begin());
    try {
        if (command == "synth") return cmd_synth(std::move(args));
        if (command == "embed") return cmd_embed(std::move(args));
        if (command == "explore") return cmd_explore(std::move(args));
        if (command == "score") return cmd_score(std::move(args));
        std::cerr << kErrorPrefix << "unknown command '" << command << "'\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cerr << kErrorPrefix << e.what() << "\n";
        return e.get_exit_code() ? e.get_exit_code() : 1;
    } catch (const std::exception& e) {
        std::cerr << kErrorPrefix << e.what() << "\n";
        return 1;
    }
}
