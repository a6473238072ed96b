#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evasim/datagen.hpp"
#include "evasim/defense.hpp"
#include "evasim/metrics.hpp"

namespace evasim {

/// Where the desk dataset comes from: the synthetic generator, or a
/// caller-provided dataset (already loaded from CSV).
struct DataSource {
    enum class Kind { generated, provided } kind = Kind::generated;
    GeneratorParams generator;       // used when kind == generated
    Dataset provided;                // used when kind == provided

    static DataSource generated_default() {
        DataSource s;
        s.generator = GeneratorParams::defaults();
        return s;
    }
};

/// One cell of the experiment space: strategies, manipulation algorithms and
/// round counts for both sides. alpha == 0 disables the attack.
struct ExperimentSpec {
    DataSource source;
    FeatureSchema schema;
    ConstraintSet constraints;       // shared by attacker and defender
    TrainParams train_params;
    double split_fraction = 0.5;     // stratified train / evaluation split

    Strategy st_a = Strategy::parallel;
    Manipulation f_a = Manipulation::f1;
    int alpha = 0;
    Strategy st_d = Strategy::parallel;
    Manipulation f_d = Manipulation::f1;
    int gamma = 0;

    std::uint64_t master_seed = 0;
    int reps = 5;

    /// Defender's proactive-manipulation data; the defender's training set
    /// when absent.
    std::optional<Dataset> defense_data;
};

/// Reports from a single seeded repetition. `ensemble` is the proactive
/// detector M_{0-gamma} on D_alpha; `static_m0` is M_0 alone on the same data.
struct RepetitionResult {
    int rep = 0;
    std::uint64_t rep_seed = 0;
    DetectionReport ensemble;
    DetectionReport static_m0;
    std::optional<AttackReport> attack;
};

struct EvalResult {
    std::vector<RepetitionResult> reps;
};

/// Alg. Eva for one repetition: generate/split, train M_0, run the adaptive
/// attack (alpha > 0), proactively train, detect with the majority vote, and
/// score against ground truth.
RepetitionResult evaluate_once(const ExperimentSpec& spec, int rep);

/// All repetitions of one spec (rep seeds derived from the master seed).
EvalResult evaluate(const ExperimentSpec& spec);

// --- experiment grid ---------------------------------------------------------

struct GridCell {
    Strategy st_a = Strategy::parallel;
    Strategy st_d = Strategy::parallel;
    Manipulation f_a = Manipulation::f1;
    Manipulation f_d = Manipulation::f1;
    int alpha = 1;
    int gamma = 0;
};

struct GridSpec {
    ExperimentSpec base;           // per-cell fields overridden by the cell
    std::vector<GridCell> cells;
    int jobs = 1;

    /// Cross product in row-major order over st_a, st_d, f_a, f_d, alpha,
    /// gamma (each list in its given order).
    static std::vector<GridCell> cross(const std::vector<Strategy>& st_a,
                                       const std::vector<Strategy>& st_d,
                                       const std::vector<Manipulation>& f_a,
                                       const std::vector<Manipulation>& f_d,
                                       const std::vector<int>& alphas,
                                       const std::vector<int>& gammas);
};

struct Aggregate {
    std::optional<double> mean;
    std::optional<double> stddev;  // sample stddev; 0 for a single value
};

struct GridRow {
    std::string cell_id;
    GridCell cell;
    std::optional<std::string> error;     // per-cell failure; the grid continues
    std::vector<RepetitionResult> reps;

    Aggregate acc, tp, fn, fp, mf, fa;    // over the ensemble / attack reports
    Aggregate static_fn, static_fp, static_acc;
};

struct GridResult {
    std::uint64_t master_seed = 0;
    int reps = 0;
    std::vector<GridRow> rows;
};

/// Runs every cell (optionally on `jobs` threads); rows are assembled in cell
/// order regardless of scheduling, and rep seeds depend only on (master seed,
/// rep), so cells differing in one knob share everything upstream of it.
GridResult run_grid(const GridSpec& spec);

/// Pinned column layout:
/// cell_id,st_a,st_d,f_a,f_d,alpha,gamma,acc,tp,fn,fp,mf,fa,seed,reps
/// with `null` for undefined rates.
std::string grid_to_csv(const GridResult& result);

/// gamma-alpha sweep aggregation over cells with f_a == f_d:
/// gamma_minus_alpha,st_d,st_a,f,mean_acc,std_acc, grouped by gamma - alpha.
std::string sweep_to_csv(const GridResult& result);

}  // namespace evasim
