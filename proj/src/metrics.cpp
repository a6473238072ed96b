#include "evasim/metrics.hpp"

#include "evasim/errors.hpp"

namespace evasim {

DetectionReport compute_metrics(std::span<const Label> predicted, std::span<const Label> truth) {
    if (predicted.size() != truth.size()) {
        throw LengthMismatchError("compute_metrics: prediction/truth lengths differ");
    }
    DetectionReport report;
    ConfusionCounts& c = report.counts;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::unlabeled) continue;
        const bool is_malicious = truth[i] == Label::malicious;
        const bool flagged = predicted[i] == Label::malicious;
        if (is_malicious) {
            (flagged ? c.tp : c.fn)++;
        } else {
            (flagged ? c.fp : c.tn)++;
        }
    }
    const std::int64_t malicious_total = c.tp + c.fn;
    const std::int64_t benign_total = c.fp + c.tn;
    if (malicious_total > 0) {
        report.tp = static_cast<double>(c.tp) / static_cast<double>(malicious_total);
        report.fn = 1.0 - *report.tp;
    }
    if (benign_total > 0) {
        report.fp = static_cast<double>(c.fp) / static_cast<double>(benign_total);
    }
    if (c.total() > 0) {
        report.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    }
    return report;
}

AttackReport attack_stats(std::span<const ManipulationOutcome> outcomes,
                          const DecisionTree& target, const Dataset& attacked_data) {
    AttackReport report;

    std::int64_t successes = 0, failures = 0, manipulated_features = 0;
    for (const ManipulationOutcome& oc : outcomes) {
        if (oc.status == OutcomeStatus::success) {
            ++successes;
            manipulated_features += static_cast<std::int64_t>(oc.changes.size());
        } else if (oc.status == OutcomeStatus::failed) {
            ++failures;
        }
    }
    if (successes + failures > 0) {
        report.failed_attempt_rate =
            static_cast<double>(failures) / static_cast<double>(successes + failures);
    }
    if (successes > 0) {
        report.mean_manipulated_features =
            static_cast<double>(manipulated_features) / static_cast<double>(successes);
    }

    std::int64_t malicious_total = 0, evading = 0;
    for (const FeatureVector& fv : attacked_data.vectors) {
        if (fv.label != Label::malicious) continue;
        ++malicious_total;
        if (target.classify(fv) == Label::benign) ++evading;
    }
    if (malicious_total > 0) {
        report.fn_rate = static_cast<double>(evading) / static_cast<double>(malicious_total);
    }
    return report;
}

}  // namespace evasim
