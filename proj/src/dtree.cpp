#include "evasim/dtree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evasim/errors.hpp"

namespace evasim {

double binary_entropy(std::int64_t a, std::int64_t b) {
    const std::int64_t n = a + b;
    if (n == 0 || a == 0 || b == 0) return 0.0;
    const double pa = static_cast<double>(a) / static_cast<double>(n);
    const double pb = static_cast<double>(b) / static_cast<double>(n);
    return -pa * std::log2(pa) - pb * std::log2(pb);
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain_ratio = 0.0;
};

struct Builder {
    const Dataset& data;
    const TrainParams& params;
    std::vector<TreeNode> nodes;

    std::array<std::int64_t, 2> count_classes(const std::vector<std::size_t>& idx) const {
        std::array<std::int64_t, 2> c = {0, 0};
        for (std::size_t i : idx) {
            c[data.vectors[i].label == Label::malicious ? 1 : 0]++;
        }
        return c;
    }

    // Majority class; exact tie goes to malicious.
    static Label majority(const std::array<std::int64_t, 2>& c) {
        return c[1] >= c[0] ? Label::malicious : Label::benign;
    }

    std::optional<SplitChoice> best_split(const std::vector<std::size_t>& idx) const {
        const auto total = count_classes(idx);
        const double parent_entropy = binary_entropy(total[0], total[1]);
        const auto n = static_cast<std::int64_t>(idx.size());
        if (parent_entropy == 0.0) return std::nullopt;

        std::optional<SplitChoice> best;
        std::vector<std::size_t> sorted = idx;
        for (std::size_t f = 0; f < data.schema.size(); ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return data.vectors[a].values[f] < data.vectors[b].values[f];
            });
            std::int64_t left_benign = 0, left_malicious = 0;
            for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
                const double v = data.vectors[sorted[k]].values[f];
                const double v_next = data.vectors[sorted[k + 1]].values[f];
                if (data.vectors[sorted[k]].label == Label::malicious) {
                    ++left_malicious;
                } else {
                    ++left_benign;
                }
                if (v == v_next) continue;

                const std::int64_t n_left = left_benign + left_malicious;
                const std::int64_t n_right = n - n_left;
                if (n_left < params.min_leaf_size || n_right < params.min_leaf_size) continue;

                const double gain =
                    parent_entropy -
                    (static_cast<double>(n_left) / static_cast<double>(n)) *
                        binary_entropy(left_benign, left_malicious) -
                    (static_cast<double>(n_right) / static_cast<double>(n)) *
                        binary_entropy(total[0] - left_benign, total[1] - left_malicious);
                if (gain <= 0.0) continue;
                const double split_info = binary_entropy(n_left, n_right);
                const double ratio = gain / split_info;
                // Strict > keeps the earliest (feature, threshold) on ties.
                if (!best || ratio > best->gain_ratio) {
                    best = SplitChoice{static_cast<int>(f), (v + v_next) / 2.0, ratio};
                }
            }
        }
        return best;
    }

    int build(const std::vector<std::size_t>& idx, int parent, int depth) {
        const int me = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{});
        nodes[me].parent = parent;
        nodes[me].counts = count_classes(idx);

        const bool depth_capped = params.max_depth && depth >= *params.max_depth;
        std::optional<SplitChoice> split;
        if (!depth_capped) split = best_split(idx);
        if (!split) {
            nodes[me].leaf_class = majority(nodes[me].counts);
            return me;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (data.vectors[i].values[static_cast<std::size_t>(split->feature)] <=
                split->threshold) {
                left_idx.push_back(i);
            } else {
                right_idx.push_back(i);
            }
        }
        nodes[me].feature = split->feature;
        nodes[me].threshold = split->threshold;
        const int l = build(left_idx, me, depth + 1);
        const int r = build(right_idx, me, depth + 1);
        nodes[me].left = l;
        nodes[me].right = r;
        return me;
    }
};

}  // namespace

DecisionTree DecisionTree::train(const Dataset& data, const TrainParams& params) {
    if (params.min_leaf_size < 1) throw std::invalid_argument("min_leaf_size must be >= 1");
    std::vector<std::size_t> idx;
    idx.reserve(data.vectors.size());
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        if (data.vectors[i].label == Label::unlabeled) {
            throw std::invalid_argument("training data contains unlabeled vector: " +
                                        data.vectors[i].id);
        }
        idx.push_back(i);
    }
    if (idx.empty()) throw EmptyDatasetError("train: no labeled vectors");

    Builder builder{data, params, {}};
    builder.build(idx, -1, 0);

    DecisionTree tree;
    tree.schema_ = data.schema;
    tree.nodes_ = std::move(builder.nodes);
    tree.root_ = 0;
    tree.meta_ = TreeMeta{idx.size(), params};
    return tree;
}

DecisionTree DecisionTree::from_nodes(FeatureSchema schema, std::vector<TreeNode> nodes, int root,
                                      TreeMeta meta) {
    const auto n = static_cast<int>(nodes.size());
    if (root < 0 || root >= n) throw std::invalid_argument("tree root out of range");
    if (nodes[root].parent != -1) throw std::invalid_argument("root must have parent -1");

    std::vector<bool> seen(nodes.size(), false);
    std::vector<int> stack{root};
    while (!stack.empty()) {
        const int at = stack.back();
        stack.pop_back();
        if (at < 0 || at >= n) throw std::invalid_argument("child index out of range");
        if (seen[at]) throw std::invalid_argument("tree contains a cycle or shared node");
        seen[at] = true;
        const TreeNode& node = nodes[at];
        if ((node.left < 0) != (node.right < 0)) {
            throw std::invalid_argument("inner node must have exactly two children");
        }
        if (node.is_leaf()) {
            if (node.leaf_class == Label::unlabeled) {
                throw std::invalid_argument("leaf without class");
            }
            continue;
        }
        if (node.feature < 0 || node.feature >= static_cast<int>(schema.size())) {
            throw std::invalid_argument("inner node feature out of range");
        }
        if (!std::isfinite(node.threshold)) {
            throw std::invalid_argument("inner node threshold not finite");
        }
        for (int child : {node.left, node.right}) {
            if (child < 0 || child >= n) throw std::invalid_argument("child index out of range");
            if (nodes[child].parent != at) {
                throw std::invalid_argument("child/parent link inconsistent");
            }
            stack.push_back(child);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw std::invalid_argument("unreachable node in tree");
    }

    DecisionTree tree;
    tree.schema_ = std::move(schema);
    tree.nodes_ = std::move(nodes);
    tree.root_ = root;
    tree.meta_ = std::move(meta);
    return tree;
}

Label DecisionTree::classify(std::span<const double> values) const {
    if (values.size() != schema_.size()) {
        throw SchemaMismatchError("classify: value count does not match tree schema");
    }
    int at = root_;
    while (!nodes_[at].is_leaf()) {
        const TreeNode& node = nodes_[at];
        at = values[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                              : node.right;
    }
    return nodes_[at].leaf_class;
}

Label DecisionTree::classify(const FeatureVector& fv) const {
    return classify(std::span<const double>(fv.values));
}

std::vector<int> DecisionTree::decision_path(std::span<const double> values) const {
    if (values.size() != schema_.size()) {
        throw SchemaMismatchError("decision_path: value count does not match tree schema");
    }
    std::vector<int> path;
    int at = root_;
    path.push_back(at);
    while (!nodes_[at].is_leaf()) {
        const TreeNode& node = nodes_[at];
        at = values[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                              : node.right;
        path.push_back(at);
    }
    return path;
}

std::vector<PathBox> DecisionTree::benign_paths() const {
    std::vector<PathBox> out;
    std::vector<IntervalSet> box(schema_.size());
    for (std::size_t f = 0; f < schema_.size(); ++f) box[f] = schema_.domain_set(f);

    // Depth-first, restoring the touched feature's set on the way back up.
    auto walk = [&](auto&& self, int at) -> void {
        const TreeNode& node = nodes_[at];
        if (node.is_leaf()) {
            if (node.leaf_class == Label::benign) {
                out.push_back(PathBox{at, box, Label::benign});
            }
            return;
        }
        const auto f = static_cast<std::size_t>(node.feature);
        const Interval dom = schema_.feature(f).domain;
        const IntervalSet saved = box[f];

        box[f] = saved.intersect(IntervalSet(Interval{dom.lo, node.threshold, dom.lo_open, false}));
        self(self, node.left);
        box[f] = saved.intersect(IntervalSet(Interval{node.threshold, dom.hi, true, dom.hi_open}));
        self(self, node.right);
        box[f] = saved;
    };
    walk(walk, root_);
    return out;
}

std::pair<int, std::vector<int>> mismatch_count(const PathBox& box,
                                                std::span<const double> values) {
    if (values.size() != box.box.size()) {
        throw SchemaMismatchError("mismatch_count: value count does not match box");
    }
    std::vector<int> mismatched;
    for (std::size_t f = 0; f < values.size(); ++f) {
        if (!box.box[f].contains(values[f])) mismatched.push_back(static_cast<int>(f));
    }
    return {static_cast<int>(mismatched.size()), mismatched};
}

}  // namespace evasim
