#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evasim/evasion.hpp"

namespace evasim {

struct DefenseConfig {
    Strategy strategy = Strategy::parallel;
    Manipulation manipulation = Manipulation::f1;
    int rounds = 0;  // gamma >= 0; 0 means non-proactive
    ConstraintSet constraints;
    TrainParams train_params;
    std::uint64_t seed = 0;
};

/// M_0 plus the proactively trained detectors M_1..M_gamma.
struct Ensemble {
    DecisionTree m0;
    std::vector<DecisionTree> proactive;

    int gamma() const { return static_cast<int>(proactive.size()); }
};

/// Alg. PT: self-attack the labeled data round by round, mirroring the
/// adaptive attack's strategy structure with M_0 as the starting scheme, and
/// train one detector per round. Returns gamma trees (empty for gamma = 0).
std::vector<DecisionTree> proactive_train(const DecisionTree& m0, const Dataset& d0_dag,
                                          const DefenseConfig& cfg);

/// Majority-vote decision rule of Alg. PD: malicious when m0 says so, or when
/// the malicious votes among the gamma+1 schemes (m0 included) reach
/// floor((gamma+1)/2) + 1.
bool pd_flags_malicious(bool m0_malicious, int malicious_votes, int gamma);

struct VoteRecord {
    std::string vector_id;
    bool m0_malicious = false;
    int malicious_votes = 0;  // out of gamma+1 schemes
    bool flagged = false;
};

struct DetectionOutcome {
    std::vector<Label> predicted;        // aligned with the dataset's vectors
    std::vector<VoteRecord> votes;
    std::vector<std::string> malicious_ids;
};

/// Alg. PD over a dataset: applies every scheme to every vector and combines
/// votes with pd_flags_malicious.
DetectionOutcome proactive_detect(const Ensemble& ensemble, const Dataset& data);

}  // namespace evasim
