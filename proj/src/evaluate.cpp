#include "evasim/evaluate.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

namespace evasim {

namespace {

// Stream tags for per-repetition seed derivation.
constexpr std::uint64_t kGenStream = 1;
constexpr std::uint64_t kSplitStream = 2;
constexpr std::uint64_t kAttackStream = 3;
constexpr std::uint64_t kDefenseStream = 4;

}  // namespace

RepetitionResult evaluate_once(const ExperimentSpec& spec, int rep) {
    RepetitionResult result;
    result.rep = rep;
    const Rng master(spec.master_seed);
    const Rng rep_rng = master.derive(static_cast<std::uint64_t>(rep));
    result.rep_seed = rep_rng.seed();

    Dataset full;
    if (spec.source.kind == DataSource::Kind::generated) {
        full = generate(spec.schema, spec.source.generator, rep_rng.derive(kGenStream));
    } else {
        full = spec.source.provided;
    }

    Rng split_rng = rep_rng.derive(kSplitStream);
    auto [train_data, eval_data] = stratified_split(full, spec.split_fraction, split_rng);

    const DecisionTree m0 = DecisionTree::train(train_data, spec.train_params);

    const Dataset* target_data = &eval_data;
    std::optional<AttackRun> attack_run;
    if (spec.alpha > 0) {
        AttackConfig acfg;
        acfg.strategy = spec.st_a;
        acfg.manipulation = spec.f_a;
        acfg.rounds = spec.alpha;
        acfg.constraints = spec.constraints;
        acfg.train_params = spec.train_params;
        acfg.seed = rep_rng.derive(kAttackStream).seed();
        attack_run = adaptive_attack(m0, eval_data, acfg);
        target_data = &attack_run->final_data();
    }

    DefenseConfig dcfg;
    dcfg.strategy = spec.st_d;
    dcfg.manipulation = spec.f_d;
    dcfg.rounds = spec.gamma;
    dcfg.constraints = spec.constraints;
    dcfg.train_params = spec.train_params;
    dcfg.seed = rep_rng.derive(kDefenseStream).seed();
    const Dataset& defense_data = spec.defense_data ? *spec.defense_data : train_data;
    Ensemble ensemble{m0, proactive_train(m0, defense_data, dcfg)};

    const DetectionOutcome detection = proactive_detect(ensemble, *target_data);

    std::vector<Label> truth;
    truth.reserve(target_data->vectors.size());
    for (const FeatureVector& fv : target_data->vectors) truth.push_back(fv.label);

    result.ensemble = compute_metrics(detection.predicted, truth);

    std::vector<Label> static_pred;
    static_pred.reserve(target_data->vectors.size());
    for (const FeatureVector& fv : target_data->vectors) static_pred.push_back(m0.classify(fv));
    result.static_m0 = compute_metrics(static_pred, truth);

    if (attack_run) {
        result.attack =
            attack_stats(attack_run->rounds.back().outcomes, m0, attack_run->final_data());
    }
    return result;
}

EvalResult evaluate(const ExperimentSpec& spec) {
    EvalResult result;
    for (int rep = 0; rep < spec.reps; ++rep) {
        result.reps.push_back(evaluate_once(spec, rep));
    }
    return result;
}

std::vector<GridCell> GridSpec::cross(const std::vector<Strategy>& st_a,
                                      const std::vector<Strategy>& st_d,
                                      const std::vector<Manipulation>& f_a,
                                      const std::vector<Manipulation>& f_d,
                                      const std::vector<int>& alphas,
                                      const std::vector<int>& gammas) {
    std::vector<GridCell> cells;
    for (Strategy sa : st_a)
        for (Strategy sd : st_d)
            for (Manipulation fa : f_a)
                for (Manipulation fd : f_d)
                    for (int alpha : alphas)
                        for (int gamma : gammas) {
                            cells.push_back(GridCell{sa, sd, fa, fd, alpha, gamma});
                        }
    return cells;
}

namespace {

Aggregate aggregate_of(const std::vector<std::optional<double>>& values) {
    std::vector<double> xs;
    for (const auto& v : values) {
        if (v) xs.push_back(*v);
    }
    Aggregate a;
    if (xs.empty()) return a;
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    a.mean = mean;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        a.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    } else {
        a.stddev = 0.0;
    }
    return a;
}

void aggregate_row(GridRow& row) {
    std::vector<std::optional<double>> acc, tp, fn, fp, mf, fa, sfn, sfp, sacc;
    for (const RepetitionResult& r : row.reps) {
        acc.push_back(r.ensemble.acc);
        tp.push_back(r.ensemble.tp);
        fn.push_back(r.ensemble.fn);
        fp.push_back(r.ensemble.fp);
        mf.push_back(r.attack ? r.attack->mean_manipulated_features : std::nullopt);
        fa.push_back(r.attack ? r.attack->failed_attempt_rate : std::nullopt);
        sfn.push_back(r.static_m0.fn);
        sfp.push_back(r.static_m0.fp);
        sacc.push_back(r.static_m0.acc);
    }
    row.acc = aggregate_of(acc);
    row.tp = aggregate_of(tp);
    row.fn = aggregate_of(fn);
    row.fp = aggregate_of(fp);
    row.mf = aggregate_of(mf);
    row.fa = aggregate_of(fa);
    row.static_fn = aggregate_of(sfn);
    row.static_fp = aggregate_of(sfp);
    row.static_acc = aggregate_of(sacc);
}

void run_cell(const GridSpec& spec, std::size_t index, GridRow& row) {
    const GridCell& cell = spec.cells[index];
    char id[16];
    std::snprintf(id, sizeof id, "c%04zu", index);
    row.cell_id = id;
    row.cell = cell;
    try {
        ExperimentSpec cell_spec = spec.base;
        cell_spec.st_a = cell.st_a;
        cell_spec.st_d = cell.st_d;
        cell_spec.f_a = cell.f_a;
        cell_spec.f_d = cell.f_d;
        cell_spec.alpha = cell.alpha;
        cell_spec.gamma = cell.gamma;
        row.reps = evaluate(cell_spec).reps;
        aggregate_row(row);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
}

}  // namespace

GridResult run_grid(const GridSpec& spec) {
    GridResult result;
    result.master_seed = spec.base.master_seed;
    result.reps = spec.base.reps;
    result.rows.resize(spec.cells.size());

    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1 || spec.cells.size() <= 1) {
        for (std::size_t i = 0; i < spec.cells.size(); ++i) {
            run_cell(spec, i, result.rows[i]);
        }
        return result;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.cells.size()) return;
            run_cell(spec, i, result.rows[i]);
        }
    };
    std::vector<std::thread> pool;
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                 spec.cells.size());
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return result;
}

namespace {

std::string format_rate(const std::optional<double>& v) {
    if (!v) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

}  // namespace

std::string grid_to_csv(const GridResult& result) {
    std::ostringstream os;
    os << "cell_id,st_a,st_d,f_a,f_d,alpha,gamma,acc,tp,fn,fp,mf,fa,seed,reps\n";
    for (const GridRow& row : result.rows) {
        os << row.cell_id << ',' << to_string(row.cell.st_a) << ',' << to_string(row.cell.st_d)
           << ',' << to_string(row.cell.f_a) << ',' << to_string(row.cell.f_d) << ','
           << row.cell.alpha << ',' << row.cell.gamma << ',' << format_rate(row.acc.mean) << ','
           << format_rate(row.tp.mean) << ',' << format_rate(row.fn.mean) << ','
           << format_rate(row.fp.mean) << ',' << format_rate(row.mf.mean) << ','
           << format_rate(row.fa.mean) << ',' << result.master_seed << ',' << result.reps
           << '\n';
    }
    return os.str();
}

std::string sweep_to_csv(const GridResult& result) {
    struct Key {
        int diff;
        Strategy st_d;
        Strategy st_a;
        Manipulation f;
        bool operator<(const Key& o) const {
            if (diff != o.diff) return diff < o.diff;
            if (st_d != o.st_d) return st_d < o.st_d;
            if (st_a != o.st_a) return st_a < o.st_a;
            return f < o.f;
        }
    };
    std::map<Key, std::vector<double>> groups;
    for (const GridRow& row : result.rows) {
        if (row.error || row.cell.f_a != row.cell.f_d) continue;
        Key key{row.cell.gamma - row.cell.alpha, row.cell.st_d, row.cell.st_a, row.cell.f_a};
        for (const RepetitionResult& r : row.reps) {
            if (r.ensemble.acc) groups[key].push_back(*r.ensemble.acc);
        }
    }
    std::ostringstream os;
    os << "gamma_minus_alpha,st_d,st_a,f,mean_acc,std_acc\n";
    for (const auto& [key, accs] : groups) {
        double sum = 0.0;
        for (double a : accs) sum += a;
        const double mean = accs.empty() ? 0.0 : sum / static_cast<double>(accs.size());
        double ss = 0.0;
        for (double a : accs) ss += (a - mean) * (a - mean);
        const double sd =
            accs.size() > 1 ? std::sqrt(ss / static_cast<double>(accs.size() - 1)) : 0.0;
        char mean_buf[32], sd_buf[32];
        std::snprintf(mean_buf, sizeof mean_buf, "%.6f", mean);
        std::snprintf(sd_buf, sizeof sd_buf, "%.6f", sd);
        os << key.diff << ',' << to_string(key.st_d) << ',' << to_string(key.st_a) << ','
           << to_string(key.f) << ',' << mean_buf << ',' << sd_buf << '\n';
    }
    return os.str();
}

}  // namespace evasim
