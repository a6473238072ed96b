#include "evasim/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace evasim {

std::pair<FeatureSchema, ConstraintSet> default_schema() {
    const auto I = FeatureKind::integer;
    const auto C = FeatureKind::continuous;
    FeatureSchema schema({
        {"URL_length", I, Interval::closed(12, 2048)},
        {"Content_length", I, Interval::closed(1, 1000000)},
        {"#Redirect", I, Interval::closed(0, 30)},
        {"#Scripts", I, Interval::closed(0, 500)},
        {"#Embedded_URL", I, Interval::closed(0, 2000)},
        {"#Special_character", I, Interval::closed(0, 200)},
        {"#Iframe", I, Interval::closed(0, 100)},
        {"#JS_function", I, Interval::closed(0, 2000)},
        {"#Long_string", I, Interval::closed(0, 500)},
        {"#Src_app_bytes", I, Interval::closed(0, 10000000)},
        {"#Local_app_packet", I, Interval::closed(0, 10000)},
        {"Dest_app_bytes", I, Interval::closed(0, 100000000)},
        {"Duration", C, Interval::closed(0.01, 300)},
        {"#Dist_remote_tcp_port", I, Interval::closed(0, 1024)},
        {"#Dist_remote_IP", I, Interval::closed(0, 256)},
        {"#DNS_query", I, Interval::closed(0, 256)},
    });

    ConstraintSet constraints;
    // A drive-by-download site keeps at least one script.
    constraints.set_semantics("#Scripts", IntervalSet(Interval::closed(1, 500)));
    // URL and content lengths cannot be made arbitrarily small.
    constraints.set_domain("URL_length", IntervalSet(Interval::closed(12, 2048)));
    constraints.set_domain("Content_length", IntervalSet(Interval::closed(1, 1000000)));
    constraints.validate_against(schema);
    return {std::move(schema), std::move(constraints)};
}

GeneratorParams GeneratorParams::defaults() {
    GeneratorParams p;
    p.per_feature = {
        {40, 12, 110, 35},            // URL_length
        {60000, 20000, 9000, 5000},   // Content_length
        {1, 1, 4, 2},                 // #Redirect
        {12, 6, 45, 15},              // #Scripts
        {35, 15, 160, 60},            // #Embedded_URL
        {4, 2, 16, 6},                // #Special_character
        {1, 1, 7, 3},                 // #Iframe
        {40, 20, 150, 60},            // #JS_function
        {3, 2, 25, 10},               // #Long_string
        {30000, 12000, 90000, 40000}, // #Src_app_bytes
        {60, 25, 180, 70},            // #Local_app_packet
        {400000, 150000, 80000, 40000},  // Dest_app_bytes
        {2.5, 1.0, 9.0, 3.5},         // Duration
        {6, 3, 17, 6},                // #Dist_remote_tcp_port
        {4, 2, 11, 4},                // #Dist_remote_IP
        {5, 2.5, 13, 5},              // #DNS_query
    };
    return p;
}

GeneratorParams& GeneratorParams::with_malicious_count(std::size_t n, double ratio) {
    n_malicious = n;
    n_benign = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
    return *this;
}

namespace {

double truncated_normal(double mean, double sd, const Feature& feature, Rng& rng) {
    const Interval& dom = feature.domain;
    double x = mean;
    for (int attempt = 0; attempt < 64; ++attempt) {
        x = mean + sd * rng.gaussian();
        if (feature.kind == FeatureKind::integer) x = std::nearbyint(x);
        if (dom.contains(x)) return x;
    }
    x = std::clamp(x, dom.lo, dom.hi);
    if (feature.kind == FeatureKind::integer) {
        x = std::clamp(std::nearbyint(x), dom.lo, dom.hi);
    }
    return x;
}

}  // namespace

Dataset generate(const FeatureSchema& schema, const GeneratorParams& params, const Rng& rng) {
    if (params.per_feature.size() != schema.size()) {
        throw std::invalid_argument("generate: per-feature params do not match schema size");
    }
    if (params.class_separation < 0.0) {
        throw std::invalid_argument("generate: class_separation must be >= 0");
    }
    for (const ClassConditional& cc : params.per_feature) {
        if (cc.benign_sd <= 0.0 || cc.malicious_sd <= 0.0) {
            throw std::invalid_argument("generate: spreads must be > 0");
        }
    }

    const std::size_t noisy_from =
        schema.size() -
        std::min(schema.size(),
                 static_cast<std::size_t>(
                     std::llround(params.noise_fraction * static_cast<double>(schema.size()))));

    Dataset out;
    out.schema = schema;
    out.vectors.reserve(params.n_benign + params.n_malicious);

    const auto make_vector = [&](Label label, std::size_t serial, std::uint64_t ordinal) {
        Rng vr = rng.derive(ordinal);
        FeatureVector fv;
        char id[16];
        std::snprintf(id, sizeof id, "%c%06zu", label == Label::benign ? 'b' : 'm', serial);
        fv.id = id;
        fv.label = label;
        fv.values.resize(schema.size());
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const ClassConditional& cc = params.per_feature[f];
            double mean = cc.benign_mean, sd = cc.benign_sd;
            if (label == Label::malicious && f < noisy_from) {
                mean = cc.benign_mean +
                       params.class_separation * (cc.malicious_mean - cc.benign_mean);
                sd = cc.malicious_sd;
            }
            fv.values[f] = truncated_normal(mean, sd, schema.feature(f), vr);
        }
        return fv;
    };

    std::uint64_t ordinal = 0;
    for (std::size_t i = 0; i < params.n_benign; ++i) {
        out.vectors.push_back(make_vector(Label::benign, i + 1, ordinal++));
    }
    for (std::size_t i = 0; i < params.n_malicious; ++i) {
        out.vectors.push_back(make_vector(Label::malicious, i + 1, ordinal++));
    }
    return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double fraction, Rng& rng) {
    if (fraction < 0.0 || fraction > 1.0) {
        throw std::invalid_argument("stratified_split: fraction must be in [0, 1]");
    }
    std::vector<bool> in_first(data.vectors.size(), false);
    for (Label label : {Label::benign, Label::malicious, Label::unlabeled}) {
        std::vector<std::size_t> idx = data.indices_of(label);
        // Fisher-Yates with our own draws, then take the first chunk.
        for (std::size_t i = idx.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(idx[i - 1], idx[j]);
        }
        const auto take = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < take; ++i) in_first[idx[i]] = true;
    }

    Dataset first, second;
    first.schema = data.schema;
    second.schema = data.schema;
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        (in_first[i] ? first : second).vectors.push_back(data.vectors[i]);
    }
    return {std::move(first), std::move(second)};
}

}  // namespace evasim
