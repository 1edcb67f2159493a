#include "amsad/cluster.hpp"

#include "amsad/error.hpp"
#include "cluster_detail.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace amsad {

ClusteringFeature::ClusteringFeature(std::span<const double> point)
    : n(1), linear_sum(point.begin(), point.end()) {
    for (double v : point) square_sum += v * v;
}

void ClusteringFeature::add(std::span<const double> point) {
    if (n == 0) {
        *this = ClusteringFeature(point);
        return;
    }
    if (point.size() != linear_sum.size()) throw Error(ErrorKind::input, "point dimensionality differs from CF");
    ++n;
    for (std::size_t j = 0; j < point.size(); ++j) {
        linear_sum[j] += point[j];
        square_sum += point[j] * point[j];
    }
}

void ClusteringFeature::merge(const ClusteringFeature& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    if (other.linear_sum.size() != linear_sum.size()) throw Error(ErrorKind::input, "CF dimensionality mismatch");
    n += other.n;
    for (std::size_t j = 0; j < linear_sum.size(); ++j) linear_sum[j] += other.linear_sum[j];
    square_sum += other.square_sum;
}

std::vector<double> ClusteringFeature::centroid() const {
    if (n == 0) throw Error(ErrorKind::stats, "centroid of an empty clustering feature");
    std::vector<double> c(linear_sum);
    for (double& v : c) v /= static_cast<double>(n);
    return c;
}

double ClusteringFeature::radius() const {
    if (n == 0) return 0.0;
    const double nd = static_cast<double>(n);
    double c2 = 0.0;
    for (double v : linear_sum) c2 += (v / nd) * (v / nd);
    return std::sqrt(std::max(0.0, square_sum / nd - c2));
}

struct CfTree::Node {
    bool leaf = true;
    std::vector<ClusteringFeature> entries;
    std::vector<std::unique_ptr<Node>> children;  // parallel to entries for inner nodes
};

namespace {

using Node = CfTree::Node;

ClusteringFeature summarize(const Node& node) {
    ClusteringFeature s;
    for (const auto& e : node.entries) s.merge(e);
    return s;
}

std::size_t closest_entry(const Node& node, std::span<const double> point) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.entries.size(); ++i) {
        const double d = squared_distance(node.entries[i].centroid(), point);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// Splits an overfull node around its farthest pair of entries; `node` keeps
// the first group and the returned sibling takes the second.
std::unique_ptr<Node> split(Node& node) {
    const std::size_t m = node.entries.size();
    std::vector<std::vector<double>> cents;
    cents.reserve(m);
    for (const auto& e : node.entries) cents.push_back(e.centroid());
    std::size_t a = 0;
    std::size_t b = 1;
    double far = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = squared_distance(cents[i], cents[j]);
            if (d > far) {
                far = d;
                a = i;
                b = j;
            }
        }
    }
    auto sibling = std::make_unique<Node>();
    sibling->leaf = node.leaf;
    Node kept;
    kept.leaf = node.leaf;
    for (std::size_t i = 0; i < m; ++i) {
        const bool to_b = i == b || (i != a && squared_distance(cents[i], cents[b]) < squared_distance(cents[i], cents[a]));
        Node& dst = to_b ? *sibling : kept;
        dst.entries.push_back(std::move(node.entries[i]));
        if (!node.leaf) dst.children.push_back(std::move(node.children[i]));
    }
    node = std::move(kept);
    return sibling;
}

std::unique_ptr<Node> insert_into(Node& node, std::span<const double> point, std::size_t branching, double threshold) {
    if (node.leaf) {
        if (!node.entries.empty()) {
            const std::size_t i = closest_entry(node, point);
            ClusteringFeature trial = node.entries[i];
            trial.add(point);
            if (trial.radius() <= threshold) {
                node.entries[i] = std::move(trial);
                return nullptr;
            }
        }
        node.entries.emplace_back(point);
    } else {
        const std::size_t i = closest_entry(node, point);
        auto sibling = insert_into(*node.children[i], point, branching, threshold);
        if (sibling) {
            node.entries[i] = summarize(*node.children[i]);
            const auto pos = static_cast<std::ptrdiff_t>(i + 1);
            node.entries.insert(node.entries.begin() + pos, summarize(*sibling));
            node.children.insert(node.children.begin() + pos, std::move(sibling));
        } else {
            node.entries[i].add(point);
        }
    }
    if (node.entries.size() > branching) return split(node);
    return nullptr;
}

void collect_leaves(const Node& node, std::vector<ClusteringFeature>& out) {
    if (node.leaf) {
        out.insert(out.end(), node.entries.begin(), node.entries.end());
        return;
    }
    for (const auto& child : node.children) collect_leaves(*child, out);
}

}  // namespace

CfTree::CfTree(std::size_t dims, std::size_t branching, double threshold)
    : dims_(dims), branching_(branching), threshold_(threshold), root_(std::make_unique<Node>()) {
    if (dims == 0) throw Error(ErrorKind::config, "CF tree needs at least one dimension");
    if (branching < 2) throw Error(ErrorKind::config, "branching factor must be at least 2", "branching");
    if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
        throw Error(ErrorKind::config, "threshold must be a finite non-negative number", "threshold");
    }
}

CfTree::~CfTree() = default;
CfTree::CfTree(CfTree&&) noexcept = default;
CfTree& CfTree::operator=(CfTree&&) noexcept = default;

void CfTree::insert(std::span<const double> point) {
    if (point.size() != dims_) throw Error(ErrorKind::input, "point dimensionality differs from tree");
    auto sibling = insert_into(*root_, point, branching_, threshold_);
    if (sibling) {
        auto root = std::make_unique<Node>();
        root->leaf = false;
        root->entries.push_back(summarize(*root_));
        root->entries.push_back(summarize(*sibling));
        root->children.push_back(std::move(root_));
        root->children.push_back(std::move(sibling));
        root_ = std::move(root);
    }
}

std::vector<ClusteringFeature> CfTree::leaf_entries() const {
    std::vector<ClusteringFeature> out;
    collect_leaves(*root_, out);
    return out;
}

ClusteringFeature CfTree::root_summary() const { return summarize(*root_); }

std::size_t CfTree::height() const {
    std::size_t h = 1;
    for (const Node* n = root_.get(); !n->leaf; n = n->children.front().get()) ++h;
    return h;
}

ClusterModel fit_birch(const Matrix& rows, const BirchOptions& options) {
    if (options.branching < 2) throw Error(ErrorKind::config, "branching factor must be at least 2", "branching");
    if (!(options.threshold > 0.0) || !std::isfinite(options.threshold)) {
        throw Error(ErrorKind::config, "threshold must be positive", "threshold");
    }
    detail::check_training_rows(rows, kClusters);

    double threshold = options.threshold;
    std::vector<ClusteringFeature> leaves;
    for (int attempt = 0;; ++attempt) {
        CfTree tree(rows.cols(), options.branching, threshold);
        for (std::size_t i = 0; i < rows.rows(); ++i) tree.insert(rows.row(i));
        leaves = tree.leaf_entries();
        if (leaves.size() >= kClusters) break;
        if (attempt == 60) throw Error(ErrorKind::fit, "could not form two subclusters", "threshold");
        threshold /= 2.0;
    }

    Matrix points(leaves.size(), rows.cols());
    std::vector<double> weights(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto c = leaves[i].centroid();
        std::copy(c.begin(), c.end(), points.row(i).begin());
        weights[i] = static_cast<double>(leaves[i].n);
    }

    // Farthest-point start: lowest subcluster along dimension 0, then the one farthest from it.
    std::size_t first = 0;
    for (std::size_t i = 1; i < points.rows(); ++i) {
        if (points(i, 0) < points(first, 0)) first = i;
    }
    std::size_t second = first == 0 ? 1 : 0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        if (squared_distance(points.row(i), points.row(first)) > squared_distance(points.row(second), points.row(first))) {
            second = i;
        }
    }
    Matrix init(kClusters, rows.cols());
    std::copy(points.row(first).begin(), points.row(first).end(), init.row(0).begin());
    std::copy(points.row(second).begin(), points.row(second).end(), init.row(1).begin());

    LloydResult r = lloyd(points, weights, std::move(init), 300, 1e-10, options.exec);

    ClusterModel model;
    model.algorithm = Algorithm::birch;
    model.dims = rows.cols();
    model.state = BirchState{std::move(r.centroids), leaves.size(), threshold, options.branching};
    model.trace = std::move(r.trace);
    canonicalize(model, rows);
    return model;
}

}  // namespace amsad
