#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evasim/core.hpp"

namespace evasim {

struct TrainParams {
    int min_leaf_size = 5;           // every impure leaf holds at least this many vectors
    std::optional<int> max_depth;    // edges from root; nullopt = unlimited

    bool operator==(const TrainParams&) const = default;
};

struct TreeNode {
    int parent = -1;
    int left = -1;   // < 0 means leaf
    int right = -1;
    int feature = -1;         // inner nodes only
    double threshold = 0.0;   // value <= threshold goes left
    Label leaf_class = Label::unlabeled;  // leaves only
    std::array<std::int64_t, 2> counts = {0, 0};  // training {benign, malicious}

    bool is_leaf() const { return left < 0; }
};

struct TreeMeta {
    std::size_t training_size = 0;
    TrainParams params;
};

/// Per-benign-leaf feature box: the conjunction of all threshold conditions on
/// the root-to-leaf path. A vector reaches the leaf iff every feature value
/// lies in its box entry; untested features map to the full domain.
struct PathBox {
    int leaf = -1;
    std::vector<IntervalSet> box;  // indexed by feature
    Label leaf_class = Label::unlabeled;
};

/// Binary decision tree over numeric features, trained with C4.5-style gain
/// ratio. Immutable after construction; all queries are const and
/// concurrently callable.
class DecisionTree {
public:
    /// Deterministic training: candidate thresholds are midpoints between
    /// consecutive distinct sorted values, the split with the highest gain
    /// ratio wins, ties broken by lowest (feature index, threshold). Nodes
    /// stop at purity, min_leaf_size, max_depth, or zero gain. An unsplittable
    /// mixed node with an exactly tied class count is labeled malicious.
    ///
    /// Throws EmptyDatasetError when data has no labeled vectors, and
    /// std::invalid_argument on unlabeled vectors.
    static DecisionTree train(const Dataset& data, const TrainParams& params);

    /// Builds a tree from explicit nodes (used by deserialization and tests).
    /// Validates the structural invariants: binary, single root, acyclic, all
    /// nodes reachable, parent/child consistency.
    static DecisionTree from_nodes(FeatureSchema schema, std::vector<TreeNode> nodes, int root,
                                   TreeMeta meta);

    const FeatureSchema& schema() const { return schema_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int root() const { return root_; }
    const TreeMeta& meta() const { return meta_; }

    Label classify(const FeatureVector& fv) const;
    Label classify(std::span<const double> values) const;

    /// Root-to-leaf node index list; consistent with classify.
    std::vector<int> decision_path(std::span<const double> values) const;

    /// One PathBox per benign leaf, in depth-first (left-first) order.
    std::vector<PathBox> benign_paths() const;

private:
    FeatureSchema schema_;
    std::vector<TreeNode> nodes_;
    int root_ = 0;
    TreeMeta meta_;
};

/// Number of features whose value falls outside the box, plus the offending
/// feature indices in schema order.
std::pair<int, std::vector<int>> mismatch_count(const PathBox& box,
                                                std::span<const double> values);

/// Shannon entropy (bits) of a binary count split; 0 when either count is 0.
double binary_entropy(std::int64_t a, std::int64_t b);

}  // namespace evasim
