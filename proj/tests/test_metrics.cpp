#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evasim/datagen.hpp"
#include "evasim/errors.hpp"
#include "evasim/feature_stats.hpp"
#include "evasim/metrics.hpp"
#include "support/figure_tree.hpp"

using namespace evasim;
using namespace evasim::testsupport;

namespace {

std::vector<Label> labels(std::initializer_list<int> malicious_flags) {
    std::vector<Label> out;
    for (int m : malicious_flags) out.push_back(m ? Label::malicious : Label::benign);
    return out;
}

}  // namespace

TEST_CASE("compute_metrics: forced arithmetic") {
    // perfect predictions
    const auto truth = labels({1, 1, 0, 0, 0});
    const DetectionReport perfect = compute_metrics(truth, truth);
    CHECK(*perfect.acc == 1.0);
    CHECK(*perfect.tp == 1.0);
    CHECK(*perfect.fn == 0.0);
    CHECK(*perfect.fp == 0.0);

    // all predicted benign on 4 benign + 1 malicious
    const auto all_benign = labels({0, 0, 0, 0, 0});
    const DetectionReport blind = compute_metrics(all_benign, labels({1, 0, 0, 0, 0}));
    CHECK(*blind.acc == doctest::Approx(0.8));
    CHECK(*blind.tp == 0.0);
    CHECK(*blind.fn == 1.0);
    CHECK(*blind.fp == 0.0);

    CHECK_THROWS_AS(compute_metrics(all_benign, labels({1})), LengthMismatchError);
}

TEST_CASE("compute_metrics: hand-counted confusion (oracle)") {
    // counts TPc=9, FNc=1, FPc=2, TNc=38 -> TP=0.9 FN=0.1 FP=0.05 ACC=0.94
    std::vector<Label> truth, pred;
    auto push = [&](int n, Label t, Label p) {
        for (int i = 0; i < n; ++i) {
            truth.push_back(t);
            pred.push_back(p);
        }
    };
    push(9, Label::malicious, Label::malicious);
    push(1, Label::malicious, Label::benign);
    push(2, Label::benign, Label::malicious);
    push(38, Label::benign, Label::benign);

    const DetectionReport r = compute_metrics(pred, truth);
    CHECK(r.counts.tp == 9);
    CHECK(r.counts.fn == 1);
    CHECK(r.counts.fp == 2);
    CHECK(r.counts.tn == 38);
    CHECK(*r.tp == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(*r.fn == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(*r.fp == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(*r.acc == doctest::Approx(0.94).epsilon(1e-15));

    // identity TP + FN == 1
    CHECK(*r.tp + *r.fn == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("compute_metrics: absent classes report null") {
    const auto benign_only = labels({0, 0, 0});
    const DetectionReport r = compute_metrics(benign_only, benign_only);
    CHECK(!r.tp.has_value());
    CHECK(!r.fn.has_value());
    CHECK(r.fp.has_value());
    CHECK(r.acc.has_value());
}

TEST_CASE("attack_stats: aggregates and null handling") {
    const DecisionTree tree = make_figure_tree();

    Dataset attacked;
    attacked.schema = tree.schema();
    // one evading malicious vector (classifies benign), one caught
    attacked.vectors.push_back({"m1", {0, -1, 8, 0, 5, 5}, Label::malicious});   // benign leaf v3
    attacked.vectors.push_back({"m2", {0, -1, 5, 0, 5, 5}, Label::malicious});   // malicious v1
    attacked.vectors.push_back({"b1", {0, -1, 8, 0, 5, 5}, Label::benign});

    std::vector<ManipulationOutcome> outcomes(3);
    outcomes[0].status = OutcomeStatus::success;
    outcomes[0].changes = {FeatureChange{2, 5, 8}, FeatureChange{0, 1, 2}};
    outcomes[1].status = OutcomeStatus::failed;
    outcomes[2].status = OutcomeStatus::success;
    outcomes[2].changes = {FeatureChange{2, 5, 9}};

    const AttackReport r = attack_stats(outcomes, tree, attacked);
    CHECK(*r.failed_attempt_rate == doctest::Approx(1.0 / 3.0));
    CHECK(*r.mean_manipulated_features == doctest::Approx(1.5));
    CHECK(*r.fn_rate == doctest::Approx(0.5));

    // all skipped: FA and #MF null, FN stays defined by the data
    std::vector<ManipulationOutcome> skipped(2);
    skipped[0].status = OutcomeStatus::skipped_already_benign;
    skipped[1].status = OutcomeStatus::skipped_already_benign;
    Dataset blind;
    blind.schema = tree.schema();
    blind.vectors.push_back({"m1", {0, -1, 8, 0, 5, 5}, Label::malicious});
    blind.vectors.push_back({"m2", {9, -1, 15, 0, 5, 5}, Label::malicious});  // v13 benign leaf
    const AttackReport rs = attack_stats(skipped, tree, blind);
    CHECK(!rs.failed_attempt_rate.has_value());
    CHECK(!rs.mean_manipulated_features.has_value());
    CHECK(*rs.fn_rate == 1.0);
}

TEST_CASE("info gain: 8-vector hand dataset (oracle)") {
    // labels: m m m m b b b b; manual entropy table:
    //   A = 0 0 0 0 1 1 1 1  -> perfect split, gain = H(1/2) = 1
    //   B = 0 0 0 1 0 1 1 1  -> split at 0.5: both halves H(1/4,3/4) =
    //        0.8112781244591328, gain = 1 - 0.8112781244591328
    //   C = 0 1 0 1 0 1 0 1  -> label-independent, gain 0
    //   D = 5 5 5 5 5 5 5 5  -> constant, no candidate split, gain 0
    const FeatureSchema schema({
        {"A", FeatureKind::continuous, Interval::closed(0, 1)},
        {"B", FeatureKind::continuous, Interval::closed(0, 1)},
        {"C", FeatureKind::continuous, Interval::closed(0, 1)},
        {"D", FeatureKind::continuous, Interval::closed(0, 10)},
    });
    Dataset d;
    d.schema = schema;
    const double A[] = {0, 0, 0, 0, 1, 1, 1, 1};
    const double B[] = {0, 0, 0, 1, 0, 1, 1, 1};
    const double C[] = {0, 1, 0, 1, 0, 1, 0, 1};
    for (int i = 0; i < 8; ++i) {
        d.vectors.push_back({"v" + std::to_string(i),
                             {A[i], B[i], C[i], 5.0},
                             i < 4 ? Label::malicious : Label::benign});
    }

    const auto ranked = info_gain_rank(d);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].first == 0);
    CHECK(ranked[0].second == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ranked[1].first == 1);
    CHECK(ranked[1].second ==
          doctest::Approx(1.0 - 0.8112781244591328).epsilon(1e-12));
    // ties at zero keep schema order
    CHECK(ranked[2].first == 2);
    CHECK(std::abs(ranked[2].second) <= 1e-12);
    CHECK(ranked[3].first == 3);
    CHECK(std::abs(ranked[3].second) <= 1e-12);

    CHECK_THROWS_AS(info_gain_rank(Dataset{schema, {}}), EmptyDatasetError);
}

TEST_CASE("feature usage counts manipulations and reports top-k overlap") {
    const FeatureSchema schema({
        {"A", FeatureKind::continuous, Interval::closed(0, 1)},
        {"B", FeatureKind::continuous, Interval::closed(0, 1)},
        {"C", FeatureKind::continuous, Interval::closed(0, 1)},
    });
    Dataset ref;
    ref.schema = schema;
    for (int i = 0; i < 8; ++i) {
        ref.vectors.push_back({"v" + std::to_string(i),
                               {i < 4 ? 0.0 : 1.0, (i % 2) ? 1.0 : 0.0, 0.5},
                               i < 4 ? Label::malicious : Label::benign});
    }

    std::vector<ManipulationOutcome> outcomes(3);
    outcomes[0].status = OutcomeStatus::success;
    outcomes[0].changes = {FeatureChange{1, 0, 1}, FeatureChange{2, 0, 1}};
    outcomes[1].status = OutcomeStatus::success;
    outcomes[1].changes = {FeatureChange{1, 0, 1}};
    outcomes[2].status = OutcomeStatus::failed;  // failed attempts do not count
    outcomes[2].changes = {};

    const FeatureUsageStats stats = feature_usage(schema, outcomes, ref, 1);
    CHECK(stats.features[0].manipulation_count == 0);
    CHECK(stats.features[1].manipulation_count == 2);
    CHECK(stats.features[2].manipulation_count == 1);
    CHECK(stats.manipulation_rank[0] == 1);
    CHECK(stats.info_gain_rank[0] == 0);  // A separates perfectly
    CHECK(stats.overlap.empty());         // top-1 sets {B} vs {A} are disjoint

    const FeatureUsageStats wide = feature_usage(schema, outcomes, ref, 3);
    CHECK(wide.overlap == std::vector<int>{0, 1, 2});

    // no successes: all counts zero
    const FeatureUsageStats empty = feature_usage(
        schema, std::vector<ManipulationOutcome>{outcomes[2]}, ref, 2);
    for (const auto& f : empty.features) CHECK(f.manipulation_count == 0);
}
