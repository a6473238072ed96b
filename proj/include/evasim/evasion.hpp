#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evasim/constraints.hpp"
#include "evasim/dtree.hpp"
#include "evasim/rng.hpp"

namespace evasim {

enum class Strategy : std::uint8_t { parallel, sequential, full };
enum class Manipulation : std::uint8_t { f1, f2 };

std::string to_string(Strategy st);
Strategy strategy_from_string(const std::string& s);
std::string to_string(Manipulation f);
Manipulation manipulation_from_string(const std::string& s);

struct AttackConfig {
    Strategy strategy = Strategy::parallel;
    Manipulation manipulation = Manipulation::f1;
    int rounds = 1;  // alpha >= 1
    ConstraintSet constraints;
    TrainParams train_params;
    std::uint64_t seed = 0;
};

enum class OutcomeStatus : std::uint8_t { success, failed, skipped_already_benign };

std::string to_string(OutcomeStatus s);
OutcomeStatus outcome_status_from_string(const std::string& s);

struct FeatureChange {
    int feature = -1;
    double old_value = 0.0;
    double new_value = 0.0;

    bool operator==(const FeatureChange&) const = default;
};

struct ManipulationOutcome {
    std::string vector_id;
    OutcomeStatus status = OutcomeStatus::failed;
    std::vector<FeatureChange> changes;   // empty unless success
    std::vector<int> paths_tried;         // F2: benign leaf indices in attempt order
    int leaf_escapes = 0;                 // F1: escapes performed
};

struct ManipulationResult {
    Dataset data;
    std::vector<ManipulationOutcome> outcomes;  // malicious vectors, input order
};

/// Values of `feature` that divert a walk off the failing branch while staying
/// inside the accumulated path conditions and the manipulation constraints:
///   (domain \ failing_branch) n accumulated n domain_map n semantics_map.
/// The empty set is the "cannot escape here" value, not an error.
IntervalSet escape_interval(const FeatureSchema& schema, std::size_t feature,
                            const IntervalSet& accumulated, const IntervalSet& failing_branch,
                            const ConstraintSet& constraints);

/// Tree-walk manipulation: per malicious vector, descend maintaining
/// per-feature accumulated intervals; at a malicious leaf, escape on the
/// parent's feature and continue from the sibling. No backtracking: an empty
/// escape interval or an exhausted step budget (4x node count) fails the
/// vector and restores it. Vectors the tree already classifies benign are
/// skipped untouched; benign vectors always pass through untouched.
ManipulationResult manipulate_f1(const DecisionTree& tree, const Dataset& data,
                                 const ConstraintSet& constraints, const Rng& rng);

/// Benign-path manipulation: per malicious vector, try benign PathBoxes in
/// ascending mismatch order (ties by leaf index); repair every mismatched
/// feature from its escape interval, abandoning the box if any interval is
/// unsampleable. All boxes failing leaves the vector unmodified.
ManipulationResult manipulate_f2(const DecisionTree& tree, const Dataset& data,
                                 const ConstraintSet& constraints, const Rng& rng);

ManipulationResult manipulate(Manipulation which, const DecisionTree& tree, const Dataset& data,
                              const ConstraintSet& constraints, const Rng& rng);

/// Alg. PP: collapse a history of datasets into one by picking, per malicious
/// slot, a uniformly random round's version; the benign partition is the first
/// round's. Throws MisalignedHistoryError when malicious counts differ.
Dataset preprocess_pp(std::span<const Dataset> history, Rng& rng);

struct AttackRound {
    Dataset data;
    std::optional<DecisionTree> model;  // trained for i < alpha; absent under parallel
    std::vector<ManipulationOutcome> outcomes;
};

struct AttackRun {
    std::vector<AttackRound> rounds;  // round i at index i-1

    const Dataset& final_data() const { return rounds.back().data; }
};

/// Alg. AA: the adaptive attack. Round i manipulates
///   parallel:    F(M_0, D_0)
///   sequential:  F(M_{i-1}, D_{i-1})
///   full:        F(M_{i-1}, PP(D_0..D_{i-1}))
/// training the surrogate M_i from D_i between rounds (except under parallel,
/// where surrogates are never used). Per-round generators derive from
/// cfg.seed, so alpha=1 yields the same D_1 under all three strategies.
AttackRun adaptive_attack(const DecisionTree& m0, const Dataset& d0, const AttackConfig& cfg);

}  // namespace evasim
