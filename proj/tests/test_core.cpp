#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "evasim/core.hpp"
#include "evasim/datagen.hpp"
#include "evasim/errors.hpp"
#include "evasim/io.hpp"

using namespace evasim;

namespace {

FeatureSchema small_schema() {
    return FeatureSchema({
        {"X", FeatureKind::continuous, Interval::closed(0, 10)},
        {"N", FeatureKind::integer, Interval::closed(0, 5)},
    });
}

}  // namespace

TEST_CASE("schema construction validates") {
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::continuous, Interval::closed(0, 1)},
                                   {"a", FeatureKind::continuous, Interval::closed(0, 1)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::continuous, {1, 0, false, false}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FeatureSchema({{"a", FeatureKind::integer, Interval::closed(0.5, 3)}}),
                    std::invalid_argument);
    const FeatureSchema s = small_schema();
    CHECK(s.index_of("N") == 1);
    CHECK(s.index_of("missing") == -1);
}

TEST_CASE("validate_vector catches each violation kind") {
    const FeatureSchema s = small_schema();
    CHECK(validate_vector(s, {"ok", {5.0, 2.0}, Label::benign}).empty());

    const auto out_of_domain = validate_vector(s, {"v", {11.0, 2.0}, Label::benign});
    REQUIRE(out_of_domain.size() == 1);
    CHECK(out_of_domain[0].find("out of domain") != std::string::npos);

    const auto non_integral = validate_vector(s, {"v", {5.0, 2.5}, Label::benign});
    REQUIRE(non_integral.size() == 1);
    CHECK(non_integral[0].find("non-integral") != std::string::npos);

    CHECK(validate_vector(s, {"v", {5.0}, Label::benign}).size() == 1);
}

TEST_CASE("constraints resolve against schema") {
    const FeatureSchema s = small_schema();
    ConstraintSet c;
    c.set_semantics("N", IntervalSet(Interval::closed(1, 5)));
    c.freeze("X");
    c.validate_against(s);

    CHECK(c.semantics_of(s, 0).empty());                      // frozen
    CHECK(c.semantics_of(s, 1) == IntervalSet(Interval::closed(1, 5)));
    CHECK(c.domain_of(s, 0) == IntervalSet(Interval::closed(0, 10)));  // absent = full

    ConstraintSet bad;
    bad.set_domain("nope", IntervalSet(Interval::closed(0, 1)));
    CHECK_THROWS_AS(bad.validate_against(s), std::invalid_argument);

    ConstraintSet oversize;
    oversize.set_domain("X", IntervalSet(Interval::closed(-5, 10)));
    CHECK_THROWS_AS(oversize.validate_against(s), std::invalid_argument);
}

TEST_CASE("csv round-trip is exact") {
    const FeatureSchema s = small_schema();
    Dataset d;
    d.schema = s;
    d.vectors = {
        {"a", {0.1, 3.0}, Label::benign},
        {"b", {9.999999999999998, 5.0}, Label::malicious},
        {"c", {1.0 / 3.0, 0.0}, Label::benign},
    };
    const std::string text = to_csv(d);
    std::istringstream is(text);
    const Dataset back = load_csv(is, s);
    CHECK(back == d);
}

TEST_CASE("csv strictness") {
    const FeatureSchema s = small_schema();

    auto parse = [&](const std::string& text) {
        std::istringstream is(text);
        return load_csv(is, s);
    };

    CHECK_THROWS_AS(parse("id,label,X,N\nv,Benign ,1,2\n"), ParseError);      // bad label token
    CHECK_THROWS_AS(parse("id,label,X,N\nv,benign,11,2\n"), ParseError);      // out of domain
    CHECK_THROWS_AS(parse("id,label,X,N\nv,benign,1,2.5\n"), ParseError);     // non-integral
    CHECK_THROWS_AS(parse("id,label,X,N\nv,benign,1,2,9\n"), ParseError);     // extra field
    CHECK_THROWS_AS(parse("id,label,X,N\nv,benign,x1,2\n"), ParseError);      // bad number
    CHECK_THROWS_AS(parse("id,label,N,X\n"), SchemaMismatchError);            // wrong header
    CHECK_THROWS_AS(parse("id,label,X,N\r\n"), ParseError);                   // CRLF

    // error carries position
    try {
        parse("id,label,X,N\nv,benign,1,2.5\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("N") != std::string::npos);
    }
}

TEST_CASE("schema + constraints json document round-trips") {
    auto [schema, constraints] = default_schema();
    const json doc = schema_to_json(schema, constraints);
    auto [schema2, constraints2] = schema_from_json(doc);
    CHECK(schema2 == schema);
    CHECK(constraints2 == constraints);

    // frozen entries survive as explicitly empty sets
    ConstraintSet frozen;
    frozen.freeze("URL_length");
    const json doc2 = schema_to_json(schema, frozen);
    auto [schema3, constraints3] = schema_from_json(doc2);
    CHECK(constraints3.semantics_of(schema3, 0).empty());
}
