#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evasim/evaluate.hpp"
#include "evasim/io.hpp"

using namespace evasim;

namespace {

// Small desk spec so the whole grid machinery stays fast in unit tests.
ExperimentSpec small_spec(std::uint64_t seed = 1001) {
    ExperimentSpec spec;
    auto [schema, constraints] = default_schema();
    spec.schema = schema;
    spec.constraints = constraints;
    spec.source = DataSource::generated_default();
    spec.source.generator.n_malicious = 60;
    spec.source.generator.n_benign = 240;
    spec.master_seed = seed;
    spec.reps = 2;
    return spec;
}

}  // namespace

TEST_CASE("evaluate: baseline run without attack or proactive training") {
    ExperimentSpec spec = small_spec();
    spec.alpha = 0;
    spec.gamma = 0;
    const EvalResult result = evaluate(spec);
    REQUIRE(result.reps.size() == 2);
    for (const RepetitionResult& r : result.reps) {
        REQUIRE(r.ensemble.acc.has_value());
        CHECK(*r.ensemble.acc > 0.9);
        CHECK(!r.attack.has_value());
        // gamma=0: the ensemble is exactly m0
        CHECK(r.ensemble.counts.tp == r.static_m0.counts.tp);
        CHECK(r.ensemble.counts.fp == r.static_m0.counts.fp);
    }
}

TEST_CASE("evaluate: attack lowers static detection, defense recovers some") {
    ExperimentSpec spec = small_spec();
    spec.alpha = 1;
    spec.gamma = 4;
    spec.st_a = Strategy::full;
    spec.st_d = Strategy::full;
    const EvalResult result = evaluate(spec);
    for (const RepetitionResult& r : result.reps) {
        REQUIRE(r.attack.has_value());
        REQUIRE(r.attack->fn_rate.has_value());
        CHECK(*r.attack->fn_rate == *r.static_m0.fn);
        CHECK(*r.ensemble.fn <= *r.static_m0.fn);
        CHECK(*r.ensemble.fp >= *r.static_m0.fp);
    }
}

TEST_CASE("grid: cardinality, determinism, cross-strategy equality at alpha=1") {
    GridSpec grid;
    grid.base = small_spec(77);
    grid.base.reps = 1;
    grid.cells = GridSpec::cross(
        {Strategy::parallel, Strategy::sequential, Strategy::full},
        {Strategy::parallel, Strategy::sequential, Strategy::full},
        {Manipulation::f1, Manipulation::f2}, {Manipulation::f1, Manipulation::f2}, {1}, {2});
    CHECK(grid.cells.size() == 36);

    const GridResult a = run_grid(grid);
    const GridResult b = run_grid(grid);
    const std::string csv_a = grid_to_csv(a);
    CHECK(csv_a == grid_to_csv(b));
    REQUIRE(a.rows.size() == 36);
    for (const GridRow& row : a.rows) {
        CHECK(!row.error.has_value());
        REQUIRE(row.reps.size() == 1);
    }

    // cells differing only in st_a report identical attack stats at alpha=1
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < a.rows.size(); ++j) {
            const GridCell& ci = a.rows[i].cell;
            const GridCell& cj = a.rows[j].cell;
            if (ci.f_a == cj.f_a && ci.f_d == cj.f_d && ci.st_d == cj.st_d &&
                ci.alpha == cj.alpha && ci.gamma == cj.gamma && ci.alpha == 1) {
                CHECK(a.rows[i].fa.mean == a.rows[j].fa.mean);
                CHECK(a.rows[i].mf.mean == a.rows[j].mf.mean);
                CHECK(a.rows[i].static_fn.mean == a.rows[j].static_fn.mean);
            }
        }
    }

    // csv surface: pinned header and one line per cell
    std::istringstream is(csv_a);
    std::string header;
    std::getline(is, header);
    CHECK(header == "cell_id,st_a,st_d,f_a,f_d,alpha,gamma,acc,tp,fn,fp,mf,fa,seed,reps");
    int lines = 0;
    for (std::string line; std::getline(is, line);) {
        if (!line.empty()) ++lines;
    }
    CHECK(lines == 36);
}

TEST_CASE("grid: jobs > 1 produces the same rows as sequential") {
    GridSpec grid;
    grid.base = small_spec(31);
    grid.base.reps = 1;
    grid.cells = GridSpec::cross({Strategy::parallel}, {Strategy::parallel},
                                 {Manipulation::f1, Manipulation::f2},
                                 {Manipulation::f1, Manipulation::f2}, {1}, {0, 2});
    const GridResult seq = run_grid(grid);
    grid.jobs = 4;
    const GridResult par = run_grid(grid);
    CHECK(grid_to_csv(seq) == grid_to_csv(par));
}

TEST_CASE("grid: per-cell failure is recorded in-row, grid continues") {
    GridSpec grid;
    grid.base = small_spec(5);
    grid.base.reps = 1;
    grid.base.source.generator.per_feature.clear();  // breaks generation
    grid.cells = GridSpec::cross({Strategy::parallel}, {Strategy::parallel},
                                 {Manipulation::f1}, {Manipulation::f1}, {1}, {0});
    const GridResult r = run_grid(grid);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].error.has_value());
    const std::string csv = grid_to_csv(r);
    CHECK(csv.find("null") != std::string::npos);
}

TEST_CASE("sweep csv aggregates matched-manipulation cells by gamma - alpha") {
    GridSpec grid;
    grid.base = small_spec(13);
    grid.base.reps = 2;
    grid.cells = GridSpec::cross({Strategy::full}, {Strategy::full}, {Manipulation::f1},
                                 {Manipulation::f1}, {0, 1}, {0, 1});
    const GridResult r = run_grid(grid);
    const std::string sweep = sweep_to_csv(r);

    std::istringstream is(sweep);
    std::string header;
    std::getline(is, header);
    CHECK(header == "gamma_minus_alpha,st_d,st_a,f,mean_acc,std_acc");
    std::vector<int> diffs;
    for (std::string line; std::getline(is, line);) {
        if (line.empty()) continue;
        diffs.push_back(std::stoi(line.substr(0, line.find(','))));
    }
    CHECK(diffs == std::vector<int>{-1, 0, 1});  // grouped and ordered by gamma - alpha
}

TEST_CASE("null rates surface as literal null in the grid csv") {
    GridSpec grid;
    grid.base = small_spec(3);
    grid.base.reps = 1;
    grid.base.source.generator.n_malicious = 0;  // no malicious: tp/fn undefined
    grid.base.source.generator.n_benign = 80;
    grid.cells = GridSpec::cross({Strategy::parallel}, {Strategy::parallel},
                                 {Manipulation::f1}, {Manipulation::f1}, {0}, {0});
    const GridResult r = run_grid(grid);
    REQUIRE(r.rows.size() == 1);
    REQUIRE(!r.rows[0].error.has_value());
    CHECK(!r.rows[0].tp.mean.has_value());
    const std::string csv = grid_to_csv(r);
    CHECK(csv.find(",null,") != std::string::npos);
}
