#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "evasim/datagen.hpp"
#include "evasim/io.hpp"

using namespace evasim;

TEST_CASE("default schema: the 16 features and their constraints") {
    auto [schema, constraints] = default_schema();
    REQUIRE(schema.size() == 16);

    const char* expected[] = {
        "URL_length", "Content_length", "#Redirect", "#Scripts", "#Embedded_URL",
        "#Special_character", "#Iframe", "#JS_function", "#Long_string", "#Src_app_bytes",
        "#Local_app_packet", "Dest_app_bytes", "Duration", "#Dist_remote_tcp_port",
        "#Dist_remote_IP", "#DNS_query"};
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(schema.feature(i).name == expected[i]);
        CHECK(schema.feature(i).domain.lo >= 0.0);
        CHECK(schema.feature(i).domain.hi > schema.feature(i).domain.lo);
    }
    CHECK(schema.feature(12).kind == FeatureKind::continuous);  // Duration
    CHECK(schema.feature(0).kind == FeatureKind::integer);

    // #Scripts cannot be manipulated to 0
    const auto scripts = static_cast<std::size_t>(schema.index_of("#Scripts"));
    CHECK(!constraints.semantics_of(schema, scripts).contains(0.0));
    CHECK(constraints.semantics_of(schema, scripts).contains(1.0));
    CHECK(schema.feature(scripts).domain.contains(0.0));  // benign sites may have none

    // unconstrained feature resolves to its full domain
    const auto iframe = static_cast<std::size_t>(schema.index_of("#Iframe"));
    CHECK(constraints.semantics_of(schema, iframe) == schema.domain_set(iframe));

    // lower-bounded lengths
    CHECK(schema.feature(0).domain.lo == 12.0);
    CHECK(schema.feature(1).domain.lo == 1.0);
}

TEST_CASE("ratio helper echoes the 4:1 setting") {
    GeneratorParams p = GeneratorParams::defaults();
    p.with_malicious_count(838);
    CHECK(p.n_malicious == 838);
    CHECK(p.n_benign == 3352);
}

TEST_CASE("generated vectors validate; generation is deterministic") {
    auto [schema, constraints] = default_schema();
    GeneratorParams params = GeneratorParams::defaults();
    params.n_malicious = 100;
    params.n_benign = 400;

    const Dataset a = generate(schema, params, Rng(7));
    const Dataset b = generate(schema, params, Rng(7));
    const Dataset c = generate(schema, params, Rng(8));
    CHECK(a == b);
    CHECK(!(a == c));

    CHECK(a.vectors.size() == 500);
    CHECK(a.count_of(Label::malicious) == 100);
    CHECK(a.count_of(Label::benign) == 400);
    CHECK(a.validate().empty());

    GeneratorParams none = params;
    none.n_malicious = 0;
    const Dataset all_benign = generate(schema, none, Rng(7));
    CHECK(all_benign.count_of(Label::malicious) == 0);
    CHECK(all_benign.count_of(Label::benign) == 400);
}

TEST_CASE("class-conditional means recover within 3 sigma / sqrt(n)") {
    // wide domain keeps truncation bias negligible (bounds 10+ sigma away)
    const FeatureSchema schema({
        {"f", FeatureKind::continuous, Interval::closed(-1000, 1000)},
    });
    GeneratorParams params;
    params.n_malicious = 50000;
    params.n_benign = 50000;
    params.per_feature = {{10.0, 4.0, 30.0, 6.0}};

    const Dataset d = generate(schema, params, Rng(99));
    double benign_sum = 0, malicious_sum = 0;
    for (const auto& fv : d.vectors) {
        (fv.label == Label::malicious ? malicious_sum : benign_sum) += fv.values[0];
    }
    const double benign_mean = benign_sum / 50000.0;
    const double malicious_mean = malicious_sum / 50000.0;
    CHECK(std::abs(benign_mean - 10.0) < 3.0 * 4.0 / std::sqrt(50000.0));
    CHECK(std::abs(malicious_mean - 30.0) < 3.0 * 6.0 / std::sqrt(50000.0));
}

TEST_CASE("separation and noise knobs") {
    const FeatureSchema schema({
        {"f", FeatureKind::continuous, Interval::closed(-1000, 1000)},
        {"g", FeatureKind::continuous, Interval::closed(-1000, 1000)},
    });
    GeneratorParams params;
    params.n_malicious = 20000;
    params.n_benign = 20000;
    params.per_feature = {{0.0, 1.0, 50.0, 1.0}, {0.0, 1.0, 50.0, 1.0}};

    // separation 0 collapses the classes
    params.class_separation = 0.0;
    const Dataset collapsed = generate(schema, params, Rng(1));
    double mal_mean = 0;
    for (const auto& fv : collapsed.vectors) {
        if (fv.label == Label::malicious) mal_mean += fv.values[0];
    }
    mal_mean /= 20000.0;
    CHECK(std::abs(mal_mean) < 0.1);

    // noise fraction 0.5 neutralizes the last feature only
    params.class_separation = 1.0;
    params.noise_fraction = 0.5;
    const Dataset noisy = generate(schema, params, Rng(2));
    double mal_f = 0, mal_g = 0;
    for (const auto& fv : noisy.vectors) {
        if (fv.label == Label::malicious) {
            mal_f += fv.values[0];
            mal_g += fv.values[1];
        }
    }
    CHECK(mal_f / 20000.0 > 49.0);
    CHECK(std::abs(mal_g / 20000.0) < 0.1);
}

TEST_CASE("stratified split keeps classes balanced and partitions exactly") {
    auto [schema, constraints] = default_schema();
    GeneratorParams params = GeneratorParams::defaults();
    params.n_malicious = 101;
    params.n_benign = 400;
    const Dataset d = generate(schema, params, Rng(5));

    Rng split_rng(17);
    auto [train, eval] = stratified_split(d, 0.5, split_rng);
    CHECK(train.count_of(Label::malicious) == 50);
    CHECK(eval.count_of(Label::malicious) == 51);
    CHECK(train.count_of(Label::benign) == 200);
    CHECK(eval.count_of(Label::benign) == 200);
    CHECK(train.vectors.size() + eval.vectors.size() == d.vectors.size());

    // no overlap, nothing lost
    std::set<std::string> ids;
    for (const auto& v : train.vectors) ids.insert(v.id);
    for (const auto& v : eval.vectors) {
        CHECK(ids.insert(v.id).second);
    }
    CHECK(ids.size() == d.vectors.size());
}

TEST_CASE("invalid generator params are rejected") {
    auto [schema, constraints] = default_schema();
    GeneratorParams p = GeneratorParams::defaults();
    p.per_feature.pop_back();
    CHECK_THROWS_AS(generate(schema, p, Rng(1)), std::invalid_argument);

    GeneratorParams q = GeneratorParams::defaults();
    q.per_feature[0].benign_sd = 0.0;
    CHECK_THROWS_AS(generate(schema, q, Rng(1)), std::invalid_argument);
}
