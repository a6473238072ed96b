#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "evasim/dtree.hpp"
#include "evasim/evasion.hpp"

namespace evasim {

struct ConfusionCounts {
    std::int64_t tp = 0;  // malicious flagged malicious
    std::int64_t fn = 0;  // malicious flagged benign
    std::int64_t fp = 0;  // benign flagged malicious
    std::int64_t tn = 0;  // benign flagged benign

    std::int64_t total() const { return tp + fn + fp + tn; }
};

/// Rates are null when the corresponding class is absent, never 0.
struct DetectionReport {
    ConfusionCounts counts;
    std::optional<double> acc;
    std::optional<double> tp;  // over malicious
    std::optional<double> fn;  // 1 - tp
    std::optional<double> fp;  // over benign
};

/// Confusion metrics from aligned prediction/truth label sequences. Unlabeled
/// truth entries are excluded. Throws LengthMismatchError.
DetectionReport compute_metrics(std::span<const Label> predicted, std::span<const Label> truth);

/// FN (target model on the attacked data, over malicious ground truth),
/// #MF (mean manipulated-feature count over successes) and FA
/// (failed / (success + failed), skips excluded) for one manipulation run.
struct AttackReport {
    std::optional<double> fn_rate;
    std::optional<double> mean_manipulated_features;
    std::optional<double> failed_attempt_rate;
};

AttackReport attack_stats(std::span<const ManipulationOutcome> outcomes,
                          const DecisionTree& target, const Dataset& attacked_data);

}  // namespace evasim
