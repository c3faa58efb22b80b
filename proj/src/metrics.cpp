#include "imapce/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace imapce {

std::vector<std::vector<Index>> knn_graph(const Matrix& points, int n_neighbors) {
    const Index p = points.rows();
    if (n_neighbors < 1 || n_neighbors >= p)
        throw std::invalid_argument("n_neighbors must lie in [1, p)");

    std::vector<std::set<Index>> adj(static_cast<std::size_t>(p));
    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j)
            dist[static_cast<std::size_t>(j)] = {(points.row(i) - points.row(j)).squaredNorm(), j};
        dist[static_cast<std::size_t>(i)].first = std::numeric_limits<double>::infinity();
        std::partial_sort(dist.begin(), dist.begin() + n_neighbors, dist.end());
        for (int t = 0; t < n_neighbors; ++t) {
            const Index j = dist[static_cast<std::size_t>(t)].second;
            adj[static_cast<std::size_t>(i)].insert(j);
            adj[static_cast<std::size_t>(j)].insert(i);
        }
    }
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i)
        out[static_cast<std::size_t>(i)].assign(adj[static_cast<std::size_t>(i)].begin(),
                                                adj[static_cast<std::size_t>(i)].end());
    return out;
}

double laplacian_score(const Matrix& points, const IntVector& labels, int n_neighbors) {
    const Index p = points.rows();
    if (labels.size() != p) throw std::invalid_argument("label length mismatch");
    std::unordered_set<int> classes(labels.begin(), labels.end());
    if (classes.size() < 2) throw std::invalid_argument("need at least two distinct labels");

    const auto adj = knn_graph(points, n_neighbors);
    double weighted = 0.0;
    for (int c : std::set<int>(classes.begin(), classes.end())) {
        // z'Lz counts cross edges, z'Dz sums degrees inside the class.
        long long cross = 0, degree = 0, size = 0;
        for (Index i = 0; i < p; ++i) {
            if (labels(i) != c) continue;
            ++size;
            for (Index j : adj[static_cast<std::size_t>(i)]) {
                ++degree;
                if (labels(j) != c) ++cross;
            }
        }
        if (degree == 0) throw std::runtime_error("degenerate graph: isolated class");
        weighted += static_cast<double>(size) / static_cast<double>(p) *
                    (static_cast<double>(cross) / static_cast<double>(degree));
    }
    return weighted;
}

double mean_jaccard(const std::vector<IndexList>& clusters, const IntVector& labels) {
    if (labels.size() == 0) throw std::invalid_argument("empty ground truth");
    {
        std::unordered_set<Index> seen;
        for (const auto& c : clusters)
            for (Index r : c)
                if (!seen.insert(r).second)
                    throw std::invalid_argument("stored clusters are not disjoint");
    }

    std::map<int, std::unordered_set<Index>> class_rows;
    for (Index i = 0; i < labels.size(); ++i) class_rows[labels(i)].insert(i);

    double total = 0.0;
    for (const auto& [label, rows] : class_rows) {
        double best = 0.0;
        for (const auto& cluster : clusters) {
            std::size_t inter = 0;
            for (Index r : cluster)
                if (rows.count(r)) ++inter;
            const std::size_t uni = rows.size() + cluster.size() - inter;
            if (uni > 0) best = std::max(best, static_cast<double>(inter) / static_cast<double>(uni));
        }
        total += best;
    }
    return total / static_cast<double>(class_rows.size());
}

namespace {

double entropy(const std::unordered_map<int, Index>& counts, Index n) {
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(n);
        if (f > 0.0) h -= f * std::log(f);
    }
    return h;
}

} // namespace

double nmi(const IntVector& a, const IntVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("partition length mismatch");
    const Index n = a.size();
    if (n == 0) throw std::invalid_argument("empty partitions");

    std::unordered_map<int, Index> ca, cb;
    std::map<std::pair<int, int>, Index> joint;
    for (Index i = 0; i < n; ++i) {
        ca[a(i)]++;
        cb[b(i)]++;
        joint[{a(i), b(i)}]++;
    }
    const double ha = entropy(ca, n);
    const double hb = entropy(cb, n);
    if (ha == 0.0 && hb == 0.0) return 1.0; // both constant: identical partitions
    if (ha == 0.0 || hb == 0.0) return 0.0;

    double mi = 0.0;
    for (const auto& [ab, c] : joint) {
        const double pab = static_cast<double>(c) / static_cast<double>(n);
        const double pa = static_cast<double>(ca[ab.first]) / static_cast<double>(n);
        const double pb = static_cast<double>(cb[ab.second]) / static_cast<double>(n);
        mi += pab * std::log(pab / (pa * pb));
    }
    return std::max(0.0, mi) / (0.5 * (ha + hb));
}

namespace {

// Full-batch subgradient descent on the L2-regularized hinge loss with a
// 1/(lambda t) step schedule and iterate averaging. Deterministic.
struct LinearSvm {
    Vector w;
    double b = 0.0;

    void train(const Matrix& X, const Vector& y, double lambda, int iters) {
        const Index n = X.rows();
        w = Vector::Zero(X.cols());
        b = 0.0;
        Vector w_avg = Vector::Zero(X.cols());
        double b_avg = 0.0;
        for (int t = 1; t <= iters; ++t) {
            Vector margins = y.array() * (X * w).array() + y.array() * b;
            Vector gw = lambda * w;
            double gb = 0.0;
            for (Index i = 0; i < n; ++i) {
                if (margins(i) < 1.0) {
                    gw -= y(i) / static_cast<double>(n) * X.row(i).transpose();
                    gb -= y(i) / static_cast<double>(n);
                }
            }
            const double step = 1.0 / (lambda * (static_cast<double>(t) + 10.0));
            w -= step * gw;
            b -= step * gb;
            w_avg += w;
            b_avg += b;
        }
        w = w_avg / iters;
        b = b_avg / iters;
    }

    double score(const Vector& x) const { return w.dot(x) + b; }
};

} // namespace

AccuracyReport separability_accuracy(const Matrix& points, const IntVector& labels,
                                     int n_splits, double train_frac, std::uint64_t seed) {
    const Index p = points.rows();
    if (labels.size() != p) throw std::invalid_argument("label length mismatch");
    if (train_frac <= 0.0 || train_frac >= 1.0)
        throw std::invalid_argument("train fraction must lie in (0,1)");

    std::map<int, Index> counts;
    for (Index i = 0; i < p; ++i) counts[labels(i)]++;
    if (counts.size() < 2) throw std::invalid_argument("need at least two classes");
    for (const auto& [c, cnt] : counts)
        if (cnt < 4) throw std::invalid_argument("every class needs at least four points");
    std::vector<int> classes;
    for (const auto& [c, _] : counts) classes.push_back(c);

    std::mt19937_64 rng(seed);
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});

    std::vector<double> accuracies;
    for (int split = 0; split < n_splits; ++split) {
        // Resample until every class appears in the training part.
        std::vector<Index> train, test;
        for (int attempt = 0; attempt < 100; ++attempt) {
            std::shuffle(order.begin(), order.end(), rng);
            const Index n_train = static_cast<Index>(train_frac * static_cast<double>(p));
            train.assign(order.begin(), order.begin() + n_train);
            test.assign(order.begin() + n_train, order.end());
            std::unordered_set<int> seen;
            for (Index i : train) seen.insert(labels(i));
            if (seen.size() == classes.size() && !test.empty()) break;
            train.clear();
        }
        if (train.empty()) throw std::runtime_error("could not build a stratified split");

        // Standardize on the training part.
        Matrix Xtr = take_rows(points, IndexList(train.begin(), train.end()));
        Vector mean = Xtr.colwise().mean();
        Vector sd = ((Xtr.rowwise() - mean.transpose()).array().square().colwise().mean())
                        .sqrt()
                        .max(1e-12);
        auto standardize = [&](const Vector& x) {
            return Vector(((x - mean).array() / sd.array()).matrix());
        };
        Matrix Xs(Xtr.rows(), Xtr.cols());
        for (Index i = 0; i < Xtr.rows(); ++i)
            Xs.row(i) = standardize(Xtr.row(i).transpose()).transpose();

        std::vector<LinearSvm> models(classes.size());
        for (std::size_t c = 0; c < classes.size(); ++c) {
            Vector y(Xs.rows());
            for (Index i = 0; i < Xs.rows(); ++i)
                y(i) = labels(train[static_cast<std::size_t>(i)]) == classes[c] ? 1.0 : -1.0;
            models[c].train(Xs, y, 1e-3, 300);
        }

        Index correct = 0;
        for (Index i : test) {
            const Vector x = standardize(points.row(i).transpose());
            std::size_t best = 0;
            double best_score = models[0].score(x);
            for (std::size_t c = 1; c < classes.size(); ++c) {
                const double s = models[c].score(x);
                if (s > best_score) {
                    best_score = s;
                    best = c;
                }
            }
            if (classes[best] == labels(i)) ++correct;
        }
        accuracies.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
    }

    AccuracyReport rep;
    for (double a : accuracies) rep.mean += a;
    rep.mean /= static_cast<double>(accuracies.size());
    double var = 0.0;
    for (double a : accuracies) var += (a - rep.mean) * (a - rep.mean);
    rep.stdev = std::sqrt(var / static_cast<double>(accuracies.size()));
    return rep;
}

} // namespace imapce
