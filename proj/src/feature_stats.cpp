#include "evasim/feature_stats.hpp"

#include <algorithm>

#include "evasim/dtree.hpp"
#include "evasim/errors.hpp"

namespace evasim {

std::vector<std::pair<int, double>> info_gain_rank(const Dataset& data) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        if (data.vectors[i].label != Label::unlabeled) idx.push_back(i);
    }
    if (idx.empty()) throw EmptyDatasetError("info_gain_rank: no labeled vectors");

    std::int64_t benign = 0, malicious = 0;
    for (std::size_t i : idx) {
        (data.vectors[i].label == Label::malicious ? malicious : benign)++;
    }
    const double label_entropy = binary_entropy(benign, malicious);
    const auto n = static_cast<std::int64_t>(idx.size());

    std::vector<std::pair<int, double>> scores;
    scores.reserve(data.schema.size());
    std::vector<std::size_t> sorted = idx;
    for (std::size_t f = 0; f < data.schema.size(); ++f) {
        std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
            return data.vectors[a].values[f] < data.vectors[b].values[f];
        });
        double best_gain = 0.0;
        std::int64_t left_benign = 0, left_malicious = 0;
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
            (data.vectors[sorted[k]].label == Label::malicious ? left_malicious : left_benign)++;
            if (data.vectors[sorted[k]].values[f] == data.vectors[sorted[k + 1]].values[f]) {
                continue;
            }
            const std::int64_t n_left = left_benign + left_malicious;
            const double gain =
                label_entropy -
                (static_cast<double>(n_left) / static_cast<double>(n)) *
                    binary_entropy(left_benign, left_malicious) -
                (static_cast<double>(n - n_left) / static_cast<double>(n)) *
                    binary_entropy(benign - left_benign, malicious - left_malicious);
            best_gain = std::max(best_gain, gain);
        }
        scores.emplace_back(static_cast<int>(f), best_gain);
    }
    std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        return a.second > b.second;  // stable keeps feature-index order on ties
    });
    return scores;
}

FeatureUsageStats feature_usage(const FeatureSchema& schema,
                                std::span<const ManipulationOutcome> outcomes,
                                const Dataset& reference_data, int top_k) {
    FeatureUsageStats stats;
    stats.top_k = top_k;

    std::vector<std::int64_t> counts(schema.size(), 0);
    for (const ManipulationOutcome& oc : outcomes) {
        if (oc.status != OutcomeStatus::success) continue;
        for (const FeatureChange& ch : oc.changes) {
            counts[static_cast<std::size_t>(ch.feature)]++;
        }
    }

    const auto gain_ranked = info_gain_rank(reference_data);
    std::vector<double> gains(schema.size(), 0.0);
    for (const auto& [f, g] : gain_ranked) gains[static_cast<std::size_t>(f)] = g;

    for (std::size_t f = 0; f < schema.size(); ++f) {
        stats.features.push_back(FeatureUsage{schema.feature(f).name, counts[f], gains[f]});
    }

    std::vector<int> by_count(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) by_count[f] = static_cast<int>(f);
    std::stable_sort(by_count.begin(), by_count.end(), [&](int a, int b) {
        return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    });
    stats.manipulation_rank = std::move(by_count);
    for (const auto& [f, g] : gain_ranked) stats.info_gain_rank.push_back(f);

    const auto k = static_cast<std::size_t>(std::max(0, top_k));
    std::vector<bool> in_manip(schema.size(), false), in_gain(schema.size(), false);
    for (std::size_t i = 0; i < std::min(k, stats.manipulation_rank.size()); ++i) {
        in_manip[static_cast<std::size_t>(stats.manipulation_rank[i])] = true;
    }
    for (std::size_t i = 0; i < std::min(k, stats.info_gain_rank.size()); ++i) {
        in_gain[static_cast<std::size_t>(stats.info_gain_rank[i])] = true;
    }
    for (std::size_t f = 0; f < schema.size(); ++f) {
        if (in_manip[f] && in_gain[f]) stats.overlap.push_back(static_cast<int>(f));
    }
    return stats;
}

}  // namespace evasim
