#include "evasim/evasion.hpp"

#include <algorithm>
#include <stdexcept>

#include "evasim/errors.hpp"

namespace evasim {

std::string to_string(Strategy st) {
    switch (st) {
        case Strategy::parallel: return "parallel";
        case Strategy::sequential: return "sequential";
        case Strategy::full: return "full";
    }
    return "parallel";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "parallel") return Strategy::parallel;
    if (s == "sequential") return Strategy::sequential;
    if (s == "full") return Strategy::full;
    throw std::invalid_argument("unknown strategy: '" + s + "'");
}

std::string to_string(Manipulation f) {
    return f == Manipulation::f1 ? "F1" : "F2";
}

Manipulation manipulation_from_string(const std::string& s) {
    if (s == "F1" || s == "f1") return Manipulation::f1;
    if (s == "F2" || s == "f2") return Manipulation::f2;
    throw std::invalid_argument("unknown manipulation algorithm: '" + s + "'");
}

std::string to_string(OutcomeStatus s) {
    switch (s) {
        case OutcomeStatus::success: return "success";
        case OutcomeStatus::failed: return "failed";
        case OutcomeStatus::skipped_already_benign: return "skipped_already_benign";
    }
    return "failed";
}

OutcomeStatus outcome_status_from_string(const std::string& s) {
    if (s == "success") return OutcomeStatus::success;
    if (s == "failed") return OutcomeStatus::failed;
    if (s == "skipped_already_benign") return OutcomeStatus::skipped_already_benign;
    throw std::invalid_argument("unknown outcome status: '" + s + "'");
}

IntervalSet escape_interval(const FeatureSchema& schema, std::size_t feature,
                            const IntervalSet& accumulated, const IntervalSet& failing_branch,
                            const ConstraintSet& constraints) {
    const Interval domain = schema.feature(feature).domain;
    return failing_branch.complement_within(domain)
        .intersect(accumulated)
        .intersect(constraints.domain_of(schema, feature))
        .intersect(constraints.semantics_of(schema, feature));
}

namespace {

Interval branch_interval(const Interval& domain, double threshold, bool left) {
    return left ? Interval{domain.lo, threshold, domain.lo_open, false}
                : Interval{threshold, domain.hi, true, domain.hi_open};
}

void require_same_schema(const DecisionTree& tree, const Dataset& data, const char* who) {
    if (!(tree.schema() == data.schema)) {
        throw SchemaMismatchError(std::string(who) + ": tree and data schemas differ");
    }
}

ManipulationOutcome f1_one(const DecisionTree& tree, FeatureVector& fv,
                           const ConstraintSet& constraints, Rng& rng) {
    ManipulationOutcome outcome;
    outcome.vector_id = fv.id;

    if (tree.classify(fv) == Label::benign) {
        outcome.status = OutcomeStatus::skipped_already_benign;
        return outcome;
    }

    const FeatureSchema& schema = tree.schema();
    const std::vector<double> original = fv.values;
    std::vector<IntervalSet> accumulated(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) accumulated[f] = schema.domain_set(f);

    const auto& nodes = tree.nodes();
    const int budget = 4 * static_cast<int>(nodes.size());
    int steps = 0;
    // One-step undo: the accumulated set of the last branched feature before
    // that branch was applied, so a malicious leaf can escape against the
    // path conditions excluding its own failing edge.
    int last_feature = -1;
    IntervalSet last_before_branch;

    auto fail = [&]() {
        fv.values = original;
        outcome.status = OutcomeStatus::failed;
        outcome.changes.clear();
        return outcome;
    };

    int at = tree.root();
    while (steps++ < budget) {
        const TreeNode& node = nodes[at];
        if (node.is_leaf()) {
            if (node.leaf_class == Label::benign) {
                if (tree.classify(fv) != Label::benign) return fail();
                outcome.status = OutcomeStatus::success;
                return outcome;
            }
            const int parent = node.parent;
            if (parent < 0) return fail();  // single malicious leaf: nowhere to go
            const TreeNode& pnode = nodes[parent];
            const auto f = static_cast<std::size_t>(pnode.feature);
            const bool came_left = pnode.left == at;
            const Interval dom = schema.feature(f).domain;
            const IntervalSet failing(branch_interval(dom, pnode.threshold, came_left));
            // accumulated[f] currently includes the failing edge; escape from
            // the state before it was applied.
            const IntervalSet& before =
                (last_feature == static_cast<int>(f)) ? last_before_branch : accumulated[f];
            const IntervalSet escape =
                escape_interval(schema, f, before, failing, constraints);
            if (!escape.admits(schema.feature(f).kind)) return fail();

            const double z = sample_from(escape, schema.feature(f).kind, rng);
            outcome.changes.push_back(
                FeatureChange{static_cast<int>(f), fv.values[f], z});
            fv.values[f] = z;
            accumulated[f] = escape;
            last_feature = -1;
            ++outcome.leaf_escapes;
            at = came_left ? pnode.right : pnode.left;
        } else {
            const auto f = static_cast<std::size_t>(node.feature);
            const bool go_left = fv.values[f] <= node.threshold;
            const Interval dom = schema.feature(f).domain;
            last_feature = static_cast<int>(f);
            last_before_branch = accumulated[f];
            accumulated[f] =
                accumulated[f].intersect(IntervalSet(branch_interval(dom, node.threshold, go_left)));
            at = go_left ? node.left : node.right;
        }
    }
    return fail();  // step budget exhausted
}

ManipulationOutcome f2_one(const DecisionTree& tree, FeatureVector& fv,
                           const std::vector<PathBox>& boxes, const ConstraintSet& constraints,
                           Rng& rng) {
    ManipulationOutcome outcome;
    outcome.vector_id = fv.id;

    if (tree.classify(fv) == Label::benign) {
        outcome.status = OutcomeStatus::skipped_already_benign;
        return outcome;
    }

    const FeatureSchema& schema = tree.schema();
    const std::vector<double> original = fv.values;

    struct Ranked {
        int mismatches;
        int leaf;
        const PathBox* box;
        std::vector<int> features;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(boxes.size());
    for (const PathBox& box : boxes) {
        auto [count, features] = mismatch_count(box, fv.values);
        ranked.push_back(Ranked{count, box.leaf, &box, std::move(features)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.mismatches != b.mismatches) return a.mismatches < b.mismatches;
        return a.leaf < b.leaf;
    });

    for (const Ranked& candidate : ranked) {
        outcome.paths_tried.push_back(candidate.leaf);
        bool abandoned = false;
        std::vector<FeatureChange> changes;
        for (int fi : candidate.features) {
            const auto f = static_cast<std::size_t>(fi);
            const Interval dom = schema.feature(f).domain;
            // failing branch = domain \ box[f], so the escape interval reduces
            // to box[f] n domain_map n semantics_map.
            const IntervalSet failing = candidate.box->box[f].complement_within(dom);
            const IntervalSet escape =
                escape_interval(schema, f, schema.domain_set(f), failing, constraints);
            if (!escape.admits(schema.feature(f).kind)) {
                abandoned = true;
                break;
            }
            const double z = sample_from(escape, schema.feature(f).kind, rng);
            changes.push_back(FeatureChange{fi, fv.values[f], z});
            fv.values[f] = z;
        }
        if (!abandoned && tree.classify(fv) == Label::benign) {
            outcome.status = OutcomeStatus::success;
            outcome.changes = std::move(changes);
            return outcome;
        }
        fv.values = original;  // roll back before the next path
    }
    outcome.status = OutcomeStatus::failed;
    return outcome;
}

template <typename PerVector>
ManipulationResult run_manipulation(const Dataset& data, const Rng& rng,
                                    PerVector&& per_vector) {
    ManipulationResult result;
    result.data = data;
    std::uint64_t ordinal = 0;
    for (FeatureVector& fv : result.data.vectors) {
        if (fv.label != Label::malicious) continue;
        Rng vector_rng = rng.derive(ordinal++);
        result.outcomes.push_back(per_vector(fv, vector_rng));
    }
    return result;
}

}  // namespace

ManipulationResult manipulate_f1(const DecisionTree& tree, const Dataset& data,
                                 const ConstraintSet& constraints, const Rng& rng) {
    require_same_schema(tree, data, "manipulate_f1");
    return run_manipulation(data, rng, [&](FeatureVector& fv, Rng& vr) {
        return f1_one(tree, fv, constraints, vr);
    });
}

ManipulationResult manipulate_f2(const DecisionTree& tree, const Dataset& data,
                                 const ConstraintSet& constraints, const Rng& rng) {
    require_same_schema(tree, data, "manipulate_f2");
    const std::vector<PathBox> boxes = tree.benign_paths();
    return run_manipulation(data, rng, [&](FeatureVector& fv, Rng& vr) {
        return f2_one(tree, fv, boxes, constraints, vr);
    });
}

ManipulationResult manipulate(Manipulation which, const DecisionTree& tree, const Dataset& data,
                              const ConstraintSet& constraints, const Rng& rng) {
    return which == Manipulation::f1 ? manipulate_f1(tree, data, constraints, rng)
                                     : manipulate_f2(tree, data, constraints, rng);
}

Dataset preprocess_pp(std::span<const Dataset> history, Rng& rng) {
    if (history.empty()) throw std::invalid_argument("preprocess_pp: empty history");
    const Dataset& first = history.front();
    const std::vector<std::size_t> slots0 = first.indices_of(Label::malicious);

    std::vector<std::vector<std::size_t>> slots;
    slots.reserve(history.size());
    for (const Dataset& d : history) {
        if (!(d.schema == first.schema)) {
            throw SchemaMismatchError("preprocess_pp: history schemas differ");
        }
        slots.push_back(d.indices_of(Label::malicious));
        if (slots.back().size() != slots0.size()) {
            throw MisalignedHistoryError("preprocess_pp: malicious counts differ across history");
        }
    }

    Dataset out = first;
    if (history.size() > 1) {
        const auto m = static_cast<std::int64_t>(history.size());
        for (std::size_t z = 0; z < slots0.size(); ++z) {
            const auto pick = static_cast<std::size_t>(rng.uniform_int(0, m - 1));
            out.vectors[slots0[z]] = history[pick].vectors[slots[pick][z]];
        }
    }
    return out;
}

AttackRun adaptive_attack(const DecisionTree& m0, const Dataset& d0, const AttackConfig& cfg) {
    require_same_schema(m0, d0, "adaptive_attack");
    if (cfg.rounds < 1) throw std::invalid_argument("adaptive_attack: alpha must be >= 1");

    const Rng master(cfg.seed);
    AttackRun run;
    run.rounds.reserve(static_cast<std::size_t>(cfg.rounds));

    std::vector<const Dataset*> history{&d0};

    for (int i = 1; i <= cfg.rounds; ++i) {
        const Rng round_rng = master.derive(static_cast<std::uint64_t>(i));
        const Rng f_rng = round_rng.derive(1);

        const DecisionTree* target = &m0;
        if (cfg.strategy != Strategy::parallel && !run.rounds.empty() &&
            run.rounds.back().model) {
            target = &*run.rounds.back().model;
        }

        ManipulationResult res;
        switch (cfg.strategy) {
            case Strategy::parallel:
                res = manipulate(cfg.manipulation, m0, d0, cfg.constraints, f_rng);
                break;
            case Strategy::sequential: {
                const Dataset& input = run.rounds.empty() ? d0 : run.rounds.back().data;
                res = manipulate(cfg.manipulation, *target, input, cfg.constraints, f_rng);
                break;
            }
            case Strategy::full: {
                Rng pp_rng = round_rng.derive(2);
                std::vector<Dataset> hist_copy;
                hist_copy.reserve(history.size());
                for (const Dataset* d : history) hist_copy.push_back(*d);
                const Dataset input = preprocess_pp(hist_copy, pp_rng);
                res = manipulate(cfg.manipulation, *target, input, cfg.constraints, f_rng);
                break;
            }
        }

        AttackRound round;
        round.data = std::move(res.data);
        round.outcomes = std::move(res.outcomes);
        if (i < cfg.rounds && cfg.strategy != Strategy::parallel) {
            round.model = DecisionTree::train(round.data, cfg.train_params);
        }
        run.rounds.push_back(std::move(round));
        history.push_back(&run.rounds.back().data);
    }
    return run;
}

}  // namespace evasim
