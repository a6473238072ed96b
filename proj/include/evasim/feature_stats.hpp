#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evasim/core.hpp"
#include "evasim/evasion.hpp"

namespace evasim {

/// InfoGain feature ranking: per feature, label entropy minus the weighted
/// entropy after the best single binary split, sorted descending (ties by
/// feature index). Throws EmptyDatasetError on an unlabeled/empty dataset.
std::vector<std::pair<int, double>> info_gain_rank(const Dataset& data);

struct FeatureUsage {
    std::string name;
    std::int64_t manipulation_count = 0;
    double info_gain = 0.0;
};

struct FeatureUsageStats {
    std::vector<FeatureUsage> features;            // schema order
    std::vector<int> manipulation_rank;            // feature indices, most manipulated first
    std::vector<int> info_gain_rank;               // feature indices, highest gain first
    int top_k = 5;
    std::vector<int> overlap;                      // indices in both top-k sets, schema order
};

/// Aggregates manipulation counts over success outcomes and compares the
/// most-manipulated features with the InfoGain-selected ones.
FeatureUsageStats feature_usage(const FeatureSchema& schema,
                                std::span<const ManipulationOutcome> outcomes,
                                const Dataset& reference_data, int top_k);

}  // namespace evasim
