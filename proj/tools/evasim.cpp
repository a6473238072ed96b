// evasim: desk-scale evasion / counter-evasion experiments on decision-tree
// malicious-website detectors.
//
// Subcommands: gen-data, train, attack, defend, evaluate, grid, rank-features.
// Every command accepts --seed, --config <json> and --out <dir>; command-line
// flags override config-file entries, which override defaults. Each run
// writes a manifest.json sufficient to replay it byte-identically
// (`--config <manifest.json>` reuses its resolved_config).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evasim/evaluate.hpp"
#include "evasim/feature_stats.hpp"
#include "evasim/io.hpp"
#include "evasim/version.hpp"

namespace fs = std::filesystem;
using namespace evasim;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config plumbing: flag > config file > default

json load_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) {
            path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            path = arg.substr(9);
        } else {
            continue;
        }
        json j = read_json_file(path);
        // a manifest replays through its resolved config
        if (j.contains("resolved_config")) return j.at("resolved_config");
        return j;
    }
    return json::object();
}

std::string value_to_arg(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

// Injects config entries as arguments ahead of the user's, so TakeLast makes
// explicit flags win.
std::vector<std::string> merged_args(const CLI::App& cmd, const json& config, int argc,
                                     char** argv) {
    std::vector<std::string> args;
    for (const auto& [key, value] : config.items()) {
        std::string flag = key;
        for (char& c : flag) {
            if (c == '_') c = '-';
        }
        try {
            (void)cmd.get_option("--" + flag);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError("config key '" + key + "' is not an option of this command");
        }
        if (value.is_null()) continue;
        args.push_back("--" + flag + "=" + value_to_arg(value));
    }
    for (int i = 2; i < argc; ++i) args.emplace_back(argv[i]);
    return args;
}

void parse_merged(CLI::App& cmd, const json& config, int argc, char** argv) {
    for (CLI::Option* opt : cmd.get_options()) {
        if (opt->get_expected_min() >= 1 && opt->get_expected_max() == 1) {
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }
    std::vector<std::string> args = merged_args(cmd, config, argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
    cmd.parse(args);
}

// ---------------------------------------------------------------------------
// shared option bundles

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string config_path;
    std::string out_dir = ".";

    void attach(CLI::App& cmd) {
        cmd.add_option("--seed", seed, "master seed");
        cmd.add_option("--config", config_path, "JSON config file (flags override it)");
        cmd.add_option("--out", out_dir, "output directory");
    }
};

struct GenOpts {
    std::int64_t n_malicious = 838;
    std::int64_t n_benign = -1;  // -1: derive from ratio
    double ratio = 4.0;
    double separation = 1.0;
    double noise_fraction = 0.0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--n-malicious", n_malicious, "malicious vector count")
            ->check(CLI::NonNegativeNumber);
        cmd.add_option("--n-benign", n_benign,
                       "benign vector count (-1 derives it from --ratio)");
        cmd.add_option("--ratio", ratio, "benign:malicious ratio when --n-benign is -1");
        cmd.add_option("--separation", separation, "class separation knob (1 = default)");
        cmd.add_option("--noise-fraction", noise_fraction,
                       "fraction of trailing features made label-independent");
    }

    GeneratorParams resolve() const {
        GeneratorParams p = GeneratorParams::defaults();
        p.n_malicious = static_cast<std::size_t>(n_malicious);
        p.n_benign = n_benign >= 0 ? static_cast<std::size_t>(n_benign)
                                   : static_cast<std::size_t>(std::llround(
                                         static_cast<double>(n_malicious) * ratio));
        p.class_separation = separation;
        p.noise_fraction = noise_fraction;
        return p;
    }
};

struct TrainOpts {
    int min_leaf_size = 5;
    int max_depth = 0;  // 0: unlimited

    void attach(CLI::App& cmd) {
        cmd.add_option("--min-leaf-size", min_leaf_size, "minimum vectors per impure leaf")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--max-depth", max_depth, "maximum tree depth (0 = unlimited)");
    }

    TrainParams resolve() const {
        TrainParams p;
        p.min_leaf_size = min_leaf_size;
        if (max_depth > 0) p.max_depth = max_depth;
        return p;
    }
};

// ---------------------------------------------------------------------------
// manifest

struct ManifestBuilder {
    std::string command;
    std::uint64_t seed = 0;
    json resolved = json::object();
    json input_hashes = json::object();
    std::vector<std::string> outputs;

    void input(const std::string& path) {
        input_hashes[path] = fnv1a_hex(read_text_file(path));
    }

    void write(const fs::path& out_dir) {
        json j{{"command", command},
               {"tool_version", kToolVersion},
               {"rng_algorithm", std::string(Rng::algorithm_id())},
               {"master_seed", seed},
               {"resolved_config", resolved},
               {"input_hashes", input_hashes},
               {"outputs", outputs}};
        write_json_file(out_dir / "manifest.json", j);
    }
};

fs::path ensure_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::pair<FeatureSchema, ConstraintSet> load_schema_or_default(const std::string& path,
                                                               ManifestBuilder& manifest) {
    if (path.empty()) return default_schema();
    manifest.input(path);
    return schema_from_json(read_json_file(path));
}

std::string fmt_rate(const std::optional<double>& v) {
    if (!v) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

void print_report_line(const std::string& name, const DetectionReport& r) {
    std::cout << "  " << name << ": acc=" << fmt_rate(r.acc) << " tp=" << fmt_rate(r.tp)
              << " fn=" << fmt_rate(r.fn) << " fp=" << fmt_rate(r.fp) << "\n";
}

// list parsing for grid dimensions: "all", comma lists, int ranges "0..8"
std::vector<Strategy> parse_strategies(const std::string& text) {
    if (text == "all") return {Strategy::parallel, Strategy::sequential, Strategy::full};
    std::vector<Strategy> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(strategy_from_string(tok));
    if (out.empty()) throw UsageError("empty strategy list");
    return out;
}

std::vector<Manipulation> parse_manips(const std::string& text) {
    if (text == "all") return {Manipulation::f1, Manipulation::f2};
    std::vector<Manipulation> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(manipulation_from_string(tok));
    if (out.empty()) throw UsageError("empty manipulation list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto dots = tok.find("..");
        if (dots != std::string::npos) {
            const int lo = std::stoi(tok.substr(0, dots));
            const int hi = std::stoi(tok.substr(dots + 2));
            if (hi < lo) throw UsageError("descending range '" + tok + "'");
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(std::stoi(tok));
        }
    }
    if (out.empty()) throw UsageError("empty integer list");
    return out;
}

json aggregate_to_json(const Aggregate& a) {
    json j = json::object();
    j["mean"] = a.mean ? json(*a.mean) : json(nullptr);
    j["std"] = a.stddev ? json(*a.stddev) : json(nullptr);
    return j;
}

json rep_to_json(const RepetitionResult& r) {
    json j{{"rep", r.rep},
           {"rep_seed", r.rep_seed},
           {"ensemble", detection_report_to_json(r.ensemble)},
           {"static_m0", detection_report_to_json(r.static_m0)}};
    j["attack"] = r.attack ? attack_report_to_json(*r.attack) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_gen_data(const CommonOpts& common, const GenOpts& gen) {
    const fs::path out = ensure_out_dir(common.out_dir);
    auto [schema, constraints] = default_schema();
    const GeneratorParams params = gen.resolve();
    const Dataset data = generate(schema, params, Rng(common.seed));

    save_csv(data, out / "dataset.csv");
    write_json_file(out / "schema.json", schema_to_json(schema, constraints));

    ManifestBuilder manifest;
    manifest.command = "gen-data";
    manifest.seed = common.seed;
    manifest.resolved = {{"seed", common.seed},
                         {"n_malicious", params.n_malicious},
                         {"n_benign", params.n_benign},
                         {"separation", params.class_separation},
                         {"noise_fraction", params.noise_fraction}};
    manifest.outputs = {"dataset.csv", "schema.json"};
    manifest.write(out);

    std::cout << "gen-data: " << data.vectors.size() << " vectors ("
              << data.count_of(Label::malicious) << " malicious, "
              << data.count_of(Label::benign) << " benign) -> "
              << (out / "dataset.csv").string() << "\n";
    return 0;
}

int cmd_train(const CommonOpts& common, const TrainOpts& train_opts,
              const std::string& data_path, const std::string& schema_path, double split) {
    const fs::path out = ensure_out_dir(common.out_dir);
    ManifestBuilder manifest;
    manifest.command = "train";
    manifest.seed = common.seed;

    auto [schema, constraints] = load_schema_or_default(schema_path, manifest);
    manifest.input(data_path);
    const Dataset data = load_csv(data_path, schema);

    Dataset train_data = data, test_data;
    if (split < 1.0) {
        Rng split_rng = Rng(common.seed).derive(2);
        std::tie(train_data, test_data) = stratified_split(data, split, split_rng);
    }
    const TrainParams params = train_opts.resolve();
    const DecisionTree tree = DecisionTree::train(train_data, params);

    const Dataset& report_on = split < 1.0 ? test_data : train_data;
    std::vector<Label> pred, truth;
    for (const auto& fv : report_on.vectors) {
        pred.push_back(tree.classify(fv));
        truth.push_back(fv.label);
    }
    const DetectionReport report = compute_metrics(pred, truth);

    write_json_file(out / "tree.json", tree_to_json(tree));
    write_json_file(out / "report.json", detection_report_to_json(report));

    manifest.resolved = {{"seed", common.seed},
                         {"data", data_path},
                         {"schema", schema_path},
                         {"min_leaf_size", train_opts.min_leaf_size},
                         {"max_depth", train_opts.max_depth},
                         {"split", split}};
    manifest.outputs = {"tree.json", "report.json"};
    manifest.write(out);

    std::cout << "train: " << tree.nodes().size() << " nodes on " << train_data.vectors.size()
              << " vectors\n";
    print_report_line(split < 1.0 ? "held-out" : "training", report);
    return 0;
}

int cmd_attack(const CommonOpts& common, const TrainOpts& train_opts,
               const std::string& data_path, const std::string& schema_path,
               const std::string& tree_path, const std::string& st, const std::string& f,
               int alpha) {
    const fs::path out = ensure_out_dir(common.out_dir);
    ManifestBuilder manifest;
    manifest.command = "attack";
    manifest.seed = common.seed;

    auto [schema, constraints] = load_schema_or_default(schema_path, manifest);
    manifest.input(data_path);
    manifest.input(tree_path);
    const Dataset d0 = load_csv(data_path, schema);
    const DecisionTree m0 = tree_from_json(read_json_file(tree_path));

    AttackConfig cfg;
    cfg.strategy = strategy_from_string(st);
    cfg.manipulation = manipulation_from_string(f);
    cfg.rounds = alpha;
    cfg.constraints = constraints;
    cfg.train_params = train_opts.resolve();
    cfg.seed = common.seed;

    const AttackRun run = adaptive_attack(m0, d0, cfg);
    const AttackReport report = attack_stats(run.rounds.back().outcomes, m0, run.final_data());

    save_csv(run.final_data(), out / "d_alpha.csv");
    {
        std::ofstream os(out / "outcomes.jsonl", std::ios::binary);
        save_outcomes_jsonl(run.rounds.back().outcomes, schema, os);
    }
    write_json_file(out / "attack_report.json", attack_report_to_json(report));

    manifest.resolved = {{"seed", common.seed},   {"data", data_path},
                         {"schema", schema_path}, {"tree", tree_path},
                         {"st", st},              {"f", f},
                         {"alpha", alpha},        {"min_leaf_size", train_opts.min_leaf_size},
                         {"max_depth", train_opts.max_depth}};
    manifest.outputs = {"d_alpha.csv", "outcomes.jsonl", "attack_report.json"};
    manifest.write(out);

    std::cout << "attack: " << to_string(cfg.manipulation) << " x" << alpha << " ("
              << to_string(cfg.strategy) << ") fn=" << fmt_rate(report.fn_rate)
              << " mf=" << fmt_rate(report.mean_manipulated_features)
              << " fa=" << fmt_rate(report.failed_attempt_rate) << "\n";
    return 0;
}

int cmd_defend(const CommonOpts& common, const TrainOpts& train_opts,
               const std::string& data_path, const std::string& schema_path,
               const std::string& tree_path, const std::string& st_d, const std::string& f_d,
               int gamma) {
    const fs::path out = ensure_out_dir(common.out_dir);
    ManifestBuilder manifest;
    manifest.command = "defend";
    manifest.seed = common.seed;

    auto [schema, constraints] = load_schema_or_default(schema_path, manifest);
    manifest.input(data_path);
    manifest.input(tree_path);
    const Dataset d0_dag = load_csv(data_path, schema);
    const DecisionTree m0 = tree_from_json(read_json_file(tree_path));

    DefenseConfig cfg;
    cfg.strategy = strategy_from_string(st_d);
    cfg.manipulation = manipulation_from_string(f_d);
    cfg.rounds = gamma;
    cfg.constraints = constraints;
    cfg.train_params = train_opts.resolve();
    cfg.seed = common.seed;

    const Ensemble ensemble{m0, proactive_train(m0, d0_dag, cfg)};
    const json provenance{{"st_d", st_d},       {"f_d", f_d},
                          {"gamma", gamma},     {"seed", common.seed},
                          {"data", data_path},  {"tree", tree_path}};
    write_json_file(out / "ensemble.json", ensemble_to_json(ensemble, provenance));

    manifest.resolved = {{"seed", common.seed},   {"data", data_path},
                         {"schema", schema_path}, {"tree", tree_path},
                         {"st_d", st_d},          {"f_d", f_d},
                         {"gamma", gamma},        {"min_leaf_size", train_opts.min_leaf_size},
                         {"max_depth", train_opts.max_depth}};
    manifest.outputs = {"ensemble.json"};
    manifest.write(out);

    std::cout << "defend: trained " << gamma << " proactive scheme(s)\n";
    return 0;
}

struct EvalOpts {
    std::string data_path;
    std::string schema_path;
    std::string defense_data_path;
    std::string st_a = "parallel";
    std::string f_a = "F1";
    int alpha = 0;
    std::string st_d = "parallel";
    std::string f_d = "F1";
    int gamma = 0;
    double split = 0.5;
    int reps = 5;

    void attach(CLI::App& cmd, bool grid_mode) {
        cmd.add_option("--data", data_path, "dataset CSV (omit to generate)");
        cmd.add_option("--schema", schema_path, "schema+constraints JSON");
        cmd.add_option("--defense-data", defense_data_path,
                       "defender's proactive-training CSV (default: the training split)");
        cmd.add_option("--f-a", f_a, grid_mode ? "attacker manipulation list or 'all'"
                                               : "attacker manipulation (F1|F2)");
        cmd.add_option("--f-d", f_d, grid_mode ? "defender manipulation list or 'all'"
                                               : "defender manipulation (F1|F2)");
        cmd.add_option("--st-a", st_a,
                       grid_mode ? "attacker strategy list or 'all'" : "attacker strategy");
        cmd.add_option("--st-d", st_d,
                       grid_mode ? "defender strategy list or 'all'" : "defender strategy");
        cmd.add_option("--split", split, "train fraction of the stratified split");
        cmd.add_option("--reps", reps, "seeded repetitions per cell")
            ->check(CLI::PositiveNumber);
    }

    ExperimentSpec base_spec(const CommonOpts& common, const GenOpts& gen,
                             const TrainOpts& train_opts, ManifestBuilder& manifest) const {
        ExperimentSpec spec;
        auto [schema, constraints] = load_schema_or_default(schema_path, manifest);
        spec.schema = schema;
        spec.constraints = constraints;
        if (!data_path.empty()) {
            manifest.input(data_path);
            spec.source.kind = DataSource::Kind::provided;
            spec.source.provided = load_csv(data_path, schema);
        } else {
            spec.source.kind = DataSource::Kind::generated;
            spec.source.generator = gen.resolve();
        }
        if (!defense_data_path.empty()) {
            manifest.input(defense_data_path);
            spec.defense_data = load_csv(defense_data_path, schema);
        }
        spec.train_params = train_opts.resolve();
        spec.split_fraction = split;
        spec.master_seed = common.seed;
        spec.reps = reps;
        return spec;
    }
};

int cmd_evaluate(const CommonOpts& common, const GenOpts& gen, const TrainOpts& train_opts,
                 const EvalOpts& eval_opts) {
    const fs::path out = ensure_out_dir(common.out_dir);
    ManifestBuilder manifest;
    manifest.command = "evaluate";
    manifest.seed = common.seed;

    ExperimentSpec spec = eval_opts.base_spec(common, gen, train_opts, manifest);
    spec.st_a = strategy_from_string(eval_opts.st_a);
    spec.f_a = manipulation_from_string(eval_opts.f_a);
    spec.alpha = eval_opts.alpha;
    spec.st_d = strategy_from_string(eval_opts.st_d);
    spec.f_d = manipulation_from_string(eval_opts.f_d);
    spec.gamma = eval_opts.gamma;

    const EvalResult result = evaluate(spec);

    json reps_json = json::array();
    for (const RepetitionResult& r : result.reps) reps_json.push_back(rep_to_json(r));

    auto mean_of = [&](auto proj) -> std::optional<double> {
        double sum = 0;
        int n = 0;
        for (const RepetitionResult& r : result.reps) {
            const std::optional<double> v = proj(r);
            if (v) {
                sum += *v;
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        return sum / n;
    };

    DetectionReport mean_detection;
    mean_detection.acc = mean_of([](const auto& r) { return r.ensemble.acc; });
    mean_detection.tp = mean_of([](const auto& r) { return r.ensemble.tp; });
    mean_detection.fn = mean_of([](const auto& r) { return r.ensemble.fn; });
    mean_detection.fp = mean_of([](const auto& r) { return r.ensemble.fp; });

    DetectionReport static_mean;
    static_mean.acc = mean_of([](const auto& r) { return r.static_m0.acc; });
    static_mean.tp = mean_of([](const auto& r) { return r.static_m0.tp; });
    static_mean.fn = mean_of([](const auto& r) { return r.static_m0.fn; });
    static_mean.fp = mean_of([](const auto& r) { return r.static_m0.fp; });

    AttackReport mean_attack;
    mean_attack.fn_rate =
        mean_of([](const auto& r) { return r.attack ? r.attack->fn_rate : std::nullopt; });
    mean_attack.mean_manipulated_features = mean_of([](const auto& r) {
        return r.attack ? r.attack->mean_manipulated_features : std::nullopt;
    });
    mean_attack.failed_attempt_rate = mean_of([](const auto& r) {
        return r.attack ? r.attack->failed_attempt_rate : std::nullopt;
    });

    write_json_file(out / "evaluation.json",
                    json{{"reps", reps_json},
                         {"aggregate",
                          json{{"ensemble", detection_report_to_json(mean_detection)},
                               {"static_m0", detection_report_to_json(static_mean)},
                               {"attack", attack_report_to_json(mean_attack)}}}});
    write_json_file(out / "detection_report.json", detection_report_to_json(mean_detection));
    write_json_file(out / "attack_report.json", attack_report_to_json(mean_attack));

    manifest.resolved = {{"seed", common.seed},
                         {"data", eval_opts.data_path},
                         {"schema", eval_opts.schema_path},
                         {"defense_data", eval_opts.defense_data_path},
                         {"st_a", eval_opts.st_a},
                         {"f_a", eval_opts.f_a},
                         {"alpha", eval_opts.alpha},
                         {"st_d", eval_opts.st_d},
                         {"f_d", eval_opts.f_d},
                         {"gamma", eval_opts.gamma},
                         {"split", eval_opts.split},
                         {"reps", eval_opts.reps},
                         {"n_malicious", gen.n_malicious},
                         {"n_benign", gen.n_benign},
                         {"ratio", gen.ratio},
                         {"separation", gen.separation},
                         {"noise_fraction", gen.noise_fraction},
                         {"min_leaf_size", train_opts.min_leaf_size},
                         {"max_depth", train_opts.max_depth}};
    manifest.outputs = {"evaluation.json", "detection_report.json", "attack_report.json"};
    manifest.write(out);

    std::cout << "evaluate: st_a=" << eval_opts.st_a << " f_a=" << eval_opts.f_a
              << " alpha=" << eval_opts.alpha << " st_d=" << eval_opts.st_d
              << " f_d=" << eval_opts.f_d << " gamma=" << eval_opts.gamma
              << " reps=" << eval_opts.reps << "\n";
    print_report_line("ensemble", mean_detection);
    print_report_line("static m0", static_mean);
    if (eval_opts.alpha > 0) {
        std::cout << "  attack: fn=" << fmt_rate(mean_attack.fn_rate)
                  << " mf=" << fmt_rate(mean_attack.mean_manipulated_features)
                  << " fa=" << fmt_rate(mean_attack.failed_attempt_rate) << "\n";
    }
    return 0;
}

int cmd_grid(const CommonOpts& common, const GenOpts& gen, const TrainOpts& train_opts,
             const EvalOpts& eval_opts, const std::string& alpha_list,
             const std::string& gamma_list, int jobs, bool matched_only) {
    const fs::path out = ensure_out_dir(common.out_dir);
    ManifestBuilder manifest;
    manifest.command = "grid";
    manifest.seed = common.seed;

    GridSpec grid;
    grid.base = eval_opts.base_spec(common, gen, train_opts, manifest);
    grid.jobs = jobs;
    grid.cells = GridSpec::cross(parse_strategies(eval_opts.st_a),
                                 parse_strategies(eval_opts.st_d), parse_manips(eval_opts.f_a),
                                 parse_manips(eval_opts.f_d), parse_int_list(alpha_list),
                                 parse_int_list(gamma_list));
    if (matched_only) {
        std::erase_if(grid.cells,
                      [](const GridCell& c) { return c.st_a != c.st_d || c.f_a != c.f_d; });
    }

    const GridResult result = run_grid(grid);

    const std::string csv = grid_to_csv(result);
    write_text_file(out / "grid.csv", csv);
    write_text_file(out / "sweep.csv", sweep_to_csv(result));

    json rows = json::array();
    for (const GridRow& row : result.rows) {
        json rj{{"cell_id", row.cell_id},
                {"st_a", to_string(row.cell.st_a)},
                {"st_d", to_string(row.cell.st_d)},
                {"f_a", to_string(row.cell.f_a)},
                {"f_d", to_string(row.cell.f_d)},
                {"alpha", row.cell.alpha},
                {"gamma", row.cell.gamma},
                {"acc", aggregate_to_json(row.acc)},
                {"tp", aggregate_to_json(row.tp)},
                {"fn", aggregate_to_json(row.fn)},
                {"fp", aggregate_to_json(row.fp)},
                {"mf", aggregate_to_json(row.mf)},
                {"fa", aggregate_to_json(row.fa)},
                {"static_fn", aggregate_to_json(row.static_fn)},
                {"static_fp", aggregate_to_json(row.static_fp)}};
        rj["error"] = row.error ? json(*row.error) : json(nullptr);
        json reps = json::array();
        for (const RepetitionResult& r : row.reps) reps.push_back(rep_to_json(r));
        rj["reps"] = reps;
        rows.push_back(std::move(rj));
    }
    write_json_file(out / "grid.json",
                    json{{"master_seed", result.master_seed},
                         {"reps", result.reps},
                         {"artifacts", json{{"csv", "grid.csv"}, {"sweep_csv", "sweep.csv"}}},
                         {"cells", rows}});

    manifest.resolved = {{"seed", common.seed},
                         {"data", eval_opts.data_path},
                         {"schema", eval_opts.schema_path},
                         {"st_a", eval_opts.st_a},
                         {"f_a", eval_opts.f_a},
                         {"st_d", eval_opts.st_d},
                         {"f_d", eval_opts.f_d},
                         {"alpha", alpha_list},
                         {"gamma", gamma_list},
                         {"split", eval_opts.split},
                         {"reps", eval_opts.reps},
                         {"n_malicious", gen.n_malicious},
                         {"n_benign", gen.n_benign},
                         {"ratio", gen.ratio},
                         {"separation", gen.separation},
                         {"noise_fraction", gen.noise_fraction},
                         {"min_leaf_size", train_opts.min_leaf_size},
                         {"max_depth", train_opts.max_depth},
                         {"matched_only", matched_only}};
    manifest.outputs = {"grid.csv", "grid.json", "sweep.csv"};
    manifest.write(out);

    std::cout << "grid: " << result.rows.size() << " cells x " << result.reps << " reps -> "
              << (out / "grid.csv").string() << "\n";
    std::cout << csv;
    return 0;
}

int cmd_rank_features(const CommonOpts& common, const std::string& data_path,
                      const std::string& schema_path,
                      const std::vector<std::string>& outcome_paths, int top_k) {
    const fs::path out = ensure_out_dir(common.out_dir);
    ManifestBuilder manifest;
    manifest.command = "rank-features";
    manifest.seed = common.seed;

    auto [schema, constraints] = load_schema_or_default(schema_path, manifest);
    manifest.input(data_path);
    const Dataset data = load_csv(data_path, schema);

    std::vector<ManipulationOutcome> outcomes;
    for (const std::string& path : outcome_paths) {
        manifest.input(path);
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open outcomes file: " + path);
        auto batch = load_outcomes_jsonl(is, schema);
        outcomes.insert(outcomes.end(), batch.begin(), batch.end());
    }

    const FeatureUsageStats stats = feature_usage(schema, outcomes, data, top_k);

    json features = json::array();
    for (const FeatureUsage& f : stats.features) {
        features.push_back(json{{"name", f.name},
                                {"manipulation_count", f.manipulation_count},
                                {"info_gain", f.info_gain}});
    }
    auto names_of = [&](const std::vector<int>& idx) {
        json arr = json::array();
        for (int f : idx) arr.push_back(schema.feature(static_cast<std::size_t>(f)).name);
        return arr;
    };
    write_json_file(out / "feature_stats.json",
                    json{{"features", features},
                         {"manipulation_rank", names_of(stats.manipulation_rank)},
                         {"info_gain_rank", names_of(stats.info_gain_rank)},
                         {"top_k", stats.top_k},
                         {"overlap", names_of(stats.overlap)}});

    manifest.resolved = {{"seed", common.seed},
                         {"data", data_path},
                         {"schema", schema_path},
                         {"top_k", top_k}};
    manifest.outputs = {"feature_stats.json"};
    manifest.write(out);

    std::cout << "rank-features: top-" << top_k << " by InfoGain:";
    for (int i = 0; i < top_k && i < static_cast<int>(stats.info_gain_rank.size()); ++i) {
        std::cout << ' '
                  << schema.feature(static_cast<std::size_t>(stats.info_gain_rank[i])).name;
    }
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evasion / counter-evasion experiments on decision-tree detectors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic desk dataset");
    CommonOpts gen_common;
    GenOpts gen_gen;
    gen_common.attach(*gen_cmd);
    gen_gen.attach(*gen_cmd);

    CLI::App* train_cmd = app.add_subcommand("train", "train a detection tree from CSV");
    CommonOpts train_common;
    TrainOpts train_train;
    std::string train_data, train_schema;
    double train_split = 0.5;
    train_common.attach(*train_cmd);
    train_train.attach(*train_cmd);
    train_cmd->add_option("--data", train_data, "dataset CSV");
    train_cmd->add_option("--schema", train_schema, "schema+constraints JSON");
    train_cmd->add_option("--split", train_split, "train fraction (1.0 trains on everything)");

    CLI::App* attack_cmd = app.add_subcommand("attack", "run the adaptive attack");
    CommonOpts attack_common;
    TrainOpts attack_train;
    std::string attack_data, attack_schema, attack_tree, attack_st = "parallel",
                                                         attack_f = "F1";
    int attack_alpha = 1;
    attack_common.attach(*attack_cmd);
    attack_train.attach(*attack_cmd);
    attack_cmd->add_option("--data", attack_data, "D_0 CSV");
    attack_cmd->add_option("--schema", attack_schema, "schema+constraints JSON");
    attack_cmd->add_option("--tree", attack_tree, "target tree JSON (M_0)");
    attack_cmd->add_option("--st", attack_st, "adaptation strategy");
    attack_cmd->add_option("--f", attack_f, "manipulation algorithm (F1|F2)");
    attack_cmd->add_option("--alpha", attack_alpha, "adaptation rounds")
        ->check(CLI::PositiveNumber);

    CLI::App* defend_cmd = app.add_subcommand("defend", "proactively train an ensemble");
    CommonOpts defend_common;
    TrainOpts defend_train;
    std::string defend_data, defend_schema, defend_tree, defend_st = "parallel",
                                                         defend_f = "F1";
    int defend_gamma = 8;
    defend_common.attach(*defend_cmd);
    defend_train.attach(*defend_cmd);
    defend_cmd->add_option("--data", defend_data, "defender's labeled CSV (D_0+)");
    defend_cmd->add_option("--schema", defend_schema, "schema+constraints JSON");
    defend_cmd->add_option("--tree", defend_tree, "starting tree JSON (M_0)");
    defend_cmd->add_option("--st-d", defend_st, "adaptation strategy");
    defend_cmd->add_option("--f-d", defend_f, "manipulation algorithm (F1|F2)");
    defend_cmd->add_option("--gamma", defend_gamma, "proactive rounds")
        ->check(CLI::NonNegativeNumber);

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "attack vs. defense, end to end");
    CommonOpts eval_common;
    GenOpts eval_gen;
    TrainOpts eval_train;
    EvalOpts eval_opts;
    eval_common.attach(*eval_cmd);
    eval_gen.attach(*eval_cmd);
    eval_train.attach(*eval_cmd);
    eval_opts.attach(*eval_cmd, false);
    eval_cmd->add_option("--alpha", eval_opts.alpha, "attacker rounds (0 = no attack)")
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--gamma", eval_opts.gamma, "defender rounds")
        ->check(CLI::NonNegativeNumber);

    CLI::App* grid_cmd = app.add_subcommand("grid", "run an experiment grid");
    CommonOpts grid_common;
    GenOpts grid_gen;
    TrainOpts grid_train;
    EvalOpts grid_opts;
    std::string grid_alpha = "1", grid_gamma = "8";
    int grid_jobs = 1;
    bool grid_matched_only = false;
    grid_common.attach(*grid_cmd);
    grid_gen.attach(*grid_cmd);
    grid_train.attach(*grid_cmd);
    grid_opts.attach(*grid_cmd, true);
    grid_cmd->add_option("--alpha", grid_alpha, "alpha list, e.g. '1' or '0..8'");
    grid_cmd->add_option("--gamma", grid_gamma, "gamma list, e.g. '8' or '0..9'");
    grid_cmd->add_option("--jobs", grid_jobs, "parallel cells")->check(CLI::PositiveNumber);
    grid_cmd->add_flag("--matched-only", grid_matched_only,
                       "keep only cells with st_a == st_d and f_a == f_d");

    CLI::App* rank_cmd = app.add_subcommand("rank-features", "InfoGain vs manipulation counts");
    CommonOpts rank_common;
    std::string rank_data, rank_schema;
    std::vector<std::string> rank_outcomes;
    int rank_top_k = 5;
    rank_common.attach(*rank_cmd);
    rank_cmd->add_option("--data", rank_data, "dataset CSV");
    rank_cmd->add_option("--schema", rank_schema, "schema+constraints JSON");
    rank_cmd->add_option("--outcomes", rank_outcomes, "outcomes JSONL file(s)")->take_all();
    rank_cmd->add_option("--top-k", rank_top_k, "overlap set size")->check(CLI::PositiveNumber);

    if (argc < 2) {
        std::cerr << app.help();
        return 1;
    }
    const std::string sub = argv[1];
    if (sub == "--help" || sub == "-h") {
        std::cout << app.help();
        return 0;
    }
    if (sub == "--version") {
        std::cout << kToolVersion << "\n";
        return 0;
    }

    try {
        CLI::App* cmd = nullptr;
        for (CLI::App* candidate : app.get_subcommands({})) {
            if (candidate->get_name() == sub) {
                cmd = candidate;
                break;
            }
        }
        if (cmd == nullptr) {
            std::cerr << "error: unknown command '" << sub << "'\n";
            return 1;
        }
        const json config = load_config_arg(argc, argv);
        parse_merged(*cmd, config, argc, argv);

        if (cmd == gen_cmd) return cmd_gen_data(gen_common, gen_gen);
        if (cmd == train_cmd) {
            if (train_data.empty()) throw UsageError("--data is required");
            return cmd_train(train_common, train_train, train_data, train_schema, train_split);
        }
        if (cmd == attack_cmd) {
            if (attack_data.empty() || attack_tree.empty()) {
                throw UsageError("--data and --tree are required");
            }
            return cmd_attack(attack_common, attack_train, attack_data, attack_schema,
                              attack_tree, attack_st, attack_f, attack_alpha);
        }
        if (cmd == defend_cmd) {
            if (defend_data.empty() || defend_tree.empty()) {
                throw UsageError("--data and --tree are required");
            }
            return cmd_defend(defend_common, defend_train, defend_data, defend_schema,
                              defend_tree, defend_st, defend_f, defend_gamma);
        }
        if (cmd == eval_cmd) return cmd_evaluate(eval_common, eval_gen, eval_train, eval_opts);
        if (cmd == grid_cmd) {
            return cmd_grid(grid_common, grid_gen, grid_train, grid_opts, grid_alpha,
                            grid_gamma, grid_jobs, grid_matched_only);
        }
        if (cmd == rank_cmd) {
            if (rank_data.empty()) throw UsageError("--data is required");
            return cmd_rank_features(rank_common, rank_data, rank_schema, rank_outcomes,
                                     rank_top_k);
        }
        std::cerr << "error: no command selected\n";
        return 1;
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
