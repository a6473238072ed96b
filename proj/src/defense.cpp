#include "evasim/defense.hpp"

#include <stdexcept>

#include "evasim/errors.hpp"

namespace evasim {

std::vector<DecisionTree> proactive_train(const DecisionTree& m0, const Dataset& d0_dag,
                                          const DefenseConfig& cfg) {
    if (!(m0.schema() == d0_dag.schema)) {
        throw SchemaMismatchError("proactive_train: tree and data schemas differ");
    }
    if (cfg.rounds < 0) throw std::invalid_argument("proactive_train: gamma must be >= 0");

    std::vector<DecisionTree> models;
    if (cfg.rounds == 0) return models;
    models.reserve(static_cast<std::size_t>(cfg.rounds));

    const Rng master(cfg.seed);
    std::vector<Dataset> history{d0_dag};
    history.reserve(static_cast<std::size_t>(cfg.rounds) + 1);

    for (int i = 1; i <= cfg.rounds; ++i) {
        const Rng round_rng = master.derive(static_cast<std::uint64_t>(i));
        const Rng f_rng = round_rng.derive(1);
        const DecisionTree& target = models.empty() ? m0 : models.back();

        ManipulationResult res;
        switch (cfg.strategy) {
            case Strategy::parallel:
                res = manipulate(cfg.manipulation, m0, d0_dag, cfg.constraints, f_rng);
                break;
            case Strategy::sequential:
                res = manipulate(cfg.manipulation, target, history.back(), cfg.constraints,
                                 f_rng);
                break;
            case Strategy::full: {
                Rng pp_rng = round_rng.derive(2);
                const Dataset input = preprocess_pp(history, pp_rng);
                res = manipulate(cfg.manipulation, target, input, cfg.constraints, f_rng);
                break;
            }
        }
        models.push_back(DecisionTree::train(res.data, cfg.train_params));
        history.push_back(std::move(res.data));
    }
    return models;
}

bool pd_flags_malicious(bool m0_malicious, int malicious_votes, int gamma) {
    if (m0_malicious) return true;
    const int needed = (gamma + 1) / 2 + 1;
    return malicious_votes >= needed;
}

DetectionOutcome proactive_detect(const Ensemble& ensemble, const Dataset& data) {
    if (!(ensemble.m0.schema() == data.schema)) {
        throw SchemaMismatchError("proactive_detect: ensemble and data schemas differ");
    }
    for (const DecisionTree& tree : ensemble.proactive) {
        if (!(tree.schema() == data.schema)) {
            throw SchemaMismatchError("proactive_detect: proactive scheme schema differs");
        }
    }

    DetectionOutcome out;
    out.predicted.reserve(data.vectors.size());
    out.votes.reserve(data.vectors.size());
    const int gamma = ensemble.gamma();

    for (const FeatureVector& fv : data.vectors) {
        const bool m0_mal = ensemble.m0.classify(fv) == Label::malicious;
        int votes = m0_mal ? 1 : 0;
        for (const DecisionTree& tree : ensemble.proactive) {
            if (tree.classify(fv) == Label::malicious) ++votes;
        }
        const bool flagged = pd_flags_malicious(m0_mal, votes, gamma);
        out.predicted.push_back(flagged ? Label::malicious : Label::benign);
        out.votes.push_back(VoteRecord{fv.id, m0_mal, votes, flagged});
        if (flagged) out.malicious_ids.push_back(fv.id);
    }
    return out;
}

}  // namespace evasim
