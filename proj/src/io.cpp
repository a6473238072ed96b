#include "evasim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evasim/errors.hpp"

namespace evasim {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_csv(const Dataset& data, std::ostream& os) {
    os << "id,label";
    for (const Feature& f : data.schema.features()) os << ',' << f.name;
    os << '\n';
    for (const FeatureVector& fv : data.vectors) {
        os << fv.id << ',' << to_string(fv.label);
        for (double v : fv.values) os << ',' << format_value(v);
        os << '\n';
    }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    save_csv(data, os);
}

std::string to_csv(const Dataset& data) {
    std::ostringstream os;
    save_csv(data, os);
    return os.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

Dataset load_csv(std::istream& is, const FeatureSchema& schema) {
    Dataset data;
    data.schema = schema;

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(is, line)) throw ParseError("missing header row", 1, 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        throw ParseError("CRLF line ending; the format requires LF", line_no, line.size());
    }
    {
        std::string expected = "id,label";
        for (const Feature& f : schema.features()) expected += "," + f.name;
        if (line != expected) {
            throw SchemaMismatchError("CSV header does not match schema: got '" + line + "'");
        }
    }

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            throw ParseError("CRLF line ending; the format requires LF", line_no, line.size());
        }
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != schema.size() + 2) {
            throw ParseError("expected " + std::to_string(schema.size() + 2) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no, 1);
        }
        FeatureVector fv;
        fv.id = fields[0];
        if (fields[1] == "benign") {
            fv.label = Label::benign;
        } else if (fields[1] == "malicious") {
            fv.label = Label::malicious;
        } else {
            throw ParseError("invalid label token '" + fields[1] + "'", line_no, 2);
        }
        fv.values.resize(schema.size());
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const std::string& tok = fields[f + 2];
            double v = 0.0;
            const char* begin = tok.data();
            const char* end = begin + tok.size();
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc{} || ptr != end || tok.empty()) {
                throw ParseError("invalid number '" + tok + "' for feature " +
                                     schema.feature(f).name,
                                 line_no, f + 3);
            }
            const Feature& feature = schema.feature(f);
            if (!feature.domain.contains(v)) {
                throw ParseError("value " + tok + " outside domain " + feature.domain.str() +
                                     " of feature " + feature.name,
                                 line_no, f + 3);
            }
            if (feature.kind == FeatureKind::integer && v != std::floor(v)) {
                throw ParseError("non-integral value " + tok + " for integer feature " +
                                     feature.name,
                                 line_no, f + 3);
            }
            fv.values[f] = v;
        }
        data.vectors.push_back(std::move(fv));
    }
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return load_csv(is, schema);
}

json interval_to_json(const Interval& iv) {
    return json::array({iv.lo, iv.hi, iv.lo_open, iv.hi_open});
}

Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw std::invalid_argument("interval must be [lo, hi, lo_open, hi_open]");
    }
    return Interval{j[0].get<double>(), j[1].get<double>(), j[2].get<bool>(), j[3].get<bool>()};
}

json interval_set_to_json(const IntervalSet& s) {
    json arr = json::array();
    for (const Interval& iv : s.parts()) arr.push_back(interval_to_json(iv));
    return arr;
}

IntervalSet interval_set_from_json(const json& j) {
    std::vector<Interval> parts;
    for (const json& item : j) parts.push_back(interval_from_json(item));
    return IntervalSet::from_parts(std::move(parts));
}

json schema_to_json(const FeatureSchema& schema, const ConstraintSet& constraints) {
    json features = json::array();
    for (const Feature& f : schema.features()) {
        features.push_back(json{{"name", f.name},
                                {"kind", f.kind == FeatureKind::integer ? "integer" : "continuous"},
                                {"domain", interval_to_json(f.domain)}});
    }
    json domain_map = json::object();
    for (const auto& [name, set] : constraints.domain_map()) {
        domain_map[name] = interval_set_to_json(set);
    }
    json semantics_map = json::object();
    for (const auto& [name, set] : constraints.semantics_map()) {
        semantics_map[name] = interval_set_to_json(set);
    }
    return json{{"features", features},
                {"constraints", json{{"domain_map", domain_map},
                                     {"semantics_map", semantics_map}}}};
}

std::pair<FeatureSchema, ConstraintSet> schema_from_json(const json& j) {
    std::vector<Feature> features;
    for (const json& fj : j.at("features")) {
        Feature f;
        f.name = fj.at("name").get<std::string>();
        const std::string kind = fj.at("kind").get<std::string>();
        if (kind == "integer") {
            f.kind = FeatureKind::integer;
        } else if (kind == "continuous") {
            f.kind = FeatureKind::continuous;
        } else {
            throw std::invalid_argument("unknown feature kind: " + kind);
        }
        f.domain = interval_from_json(fj.at("domain"));
        features.push_back(std::move(f));
    }
    FeatureSchema schema(std::move(features));

    ConstraintSet constraints;
    if (j.contains("constraints")) {
        const json& cj = j.at("constraints");
        if (cj.contains("domain_map")) {
            for (const auto& [name, set] : cj.at("domain_map").items()) {
                constraints.set_domain(name, interval_set_from_json(set));
            }
        }
        if (cj.contains("semantics_map")) {
            for (const auto& [name, set] : cj.at("semantics_map").items()) {
                constraints.set_semantics(name, interval_set_from_json(set));
            }
        }
    }
    constraints.validate_against(schema);
    return {std::move(schema), std::move(constraints)};
}

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
        const TreeNode& n = tree.nodes()[i];
        json nj{{"id", i}, {"parent", n.parent}};
        if (n.is_leaf()) {
            nj["kind"] = "leaf";
            nj["class"] = to_string(n.leaf_class);
        } else {
            nj["kind"] = "inner";
            nj["feature"] = n.feature;
            nj["threshold"] = n.threshold;
            nj["left"] = n.left;
            nj["right"] = n.right;
        }
        nj["counts"] = json::array({n.counts[0], n.counts[1]});
        nodes.push_back(std::move(nj));
    }
    json meta{{"training_size", tree.meta().training_size},
              {"min_leaf_size", tree.meta().params.min_leaf_size},
              {"criterion", "gain_ratio"}};
    meta["max_depth"] =
        tree.meta().params.max_depth ? json(*tree.meta().params.max_depth) : json(nullptr);
    return json{{"schema", schema_to_json(tree.schema(), ConstraintSet{})},
                {"root", tree.root()},
                {"nodes", nodes},
                {"meta", meta}};
}

DecisionTree tree_from_json(const json& j) {
    auto [schema, ignored_constraints] = schema_from_json(j.at("schema"));
    const json& njs = j.at("nodes");
    std::vector<TreeNode> nodes(njs.size());
    for (const json& nj : njs) {
        const auto id = nj.at("id").get<std::size_t>();
        if (id >= nodes.size()) throw std::invalid_argument("tree node id out of range");
        TreeNode& n = nodes[id];
        n.parent = nj.at("parent").get<int>();
        if (nj.at("kind").get<std::string>() == "leaf") {
            n.leaf_class = label_from_string(nj.at("class").get<std::string>());
        } else {
            n.feature = nj.at("feature").get<int>();
            n.threshold = nj.at("threshold").get<double>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
        }
        if (nj.contains("counts")) {
            n.counts = {nj.at("counts")[0].get<std::int64_t>(),
                        nj.at("counts")[1].get<std::int64_t>()};
        }
    }
    TreeMeta meta;
    if (j.contains("meta")) {
        const json& mj = j.at("meta");
        meta.training_size = mj.value("training_size", std::size_t{0});
        meta.params.min_leaf_size = mj.value("min_leaf_size", 5);
        if (mj.contains("max_depth") && !mj.at("max_depth").is_null()) {
            meta.params.max_depth = mj.at("max_depth").get<int>();
        }
    }
    return DecisionTree::from_nodes(std::move(schema), std::move(nodes), j.at("root").get<int>(),
                                    std::move(meta));
}

json ensemble_to_json(const Ensemble& ensemble, const json& provenance) {
    json proactive = json::array();
    for (const DecisionTree& tree : ensemble.proactive) proactive.push_back(tree_to_json(tree));
    return json{{"m0", tree_to_json(ensemble.m0)},
                {"proactive", proactive},
                {"provenance", provenance}};
}

Ensemble ensemble_from_json(const json& j) {
    Ensemble e{tree_from_json(j.at("m0")), {}};
    for (const json& tj : j.at("proactive")) e.proactive.push_back(tree_from_json(tj));
    return e;
}

namespace {

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json detection_report_to_json(const DetectionReport& report) {
    return json{{"acc", opt_to_json(report.acc)},
                {"tp", opt_to_json(report.tp)},
                {"fn", opt_to_json(report.fn)},
                {"fp", opt_to_json(report.fp)},
                {"counts",
                 json{{"tp", report.counts.tp},
                      {"fn", report.counts.fn},
                      {"fp", report.counts.fp},
                      {"tn", report.counts.tn}}}};
}

json attack_report_to_json(const AttackReport& report) {
    return json{{"fn", opt_to_json(report.fn_rate)},
                {"mf", opt_to_json(report.mean_manipulated_features)},
                {"fa", opt_to_json(report.failed_attempt_rate)}};
}

json outcome_to_json(const ManipulationOutcome& oc, const FeatureSchema& schema) {
    json changes = json::array();
    for (const FeatureChange& ch : oc.changes) {
        changes.push_back(json{{"feature", schema.feature(static_cast<std::size_t>(ch.feature)).name},
                               {"old", ch.old_value},
                               {"new", ch.new_value}});
    }
    return json{{"id", oc.vector_id},
                {"status", to_string(oc.status)},
                {"changes", changes},
                {"paths_tried", oc.paths_tried},
                {"leaf_escapes", oc.leaf_escapes}};
}

ManipulationOutcome outcome_from_json(const json& j, const FeatureSchema& schema) {
    ManipulationOutcome oc;
    oc.vector_id = j.at("id").get<std::string>();
    oc.status = outcome_status_from_string(j.at("status").get<std::string>());
    for (const json& cj : j.at("changes")) {
        const std::string name = cj.at("feature").get<std::string>();
        const int idx = schema.index_of(name);
        if (idx < 0) throw std::invalid_argument("outcome references unknown feature: " + name);
        oc.changes.push_back(
            FeatureChange{idx, cj.at("old").get<double>(), cj.at("new").get<double>()});
    }
    if (j.contains("paths_tried")) {
        oc.paths_tried = j.at("paths_tried").get<std::vector<int>>();
    }
    oc.leaf_escapes = j.value("leaf_escapes", 0);
    return oc;
}

void save_outcomes_jsonl(std::span<const ManipulationOutcome> outcomes,
                         const FeatureSchema& schema, std::ostream& os) {
    for (const ManipulationOutcome& oc : outcomes) {
        os << outcome_to_json(oc, schema).dump() << '\n';
    }
}

std::vector<ManipulationOutcome> load_outcomes_jsonl(std::istream& is,
                                                     const FeatureSchema& schema) {
    std::vector<ManipulationOutcome> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(outcome_from_json(json::parse(line), schema));
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << text;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

json read_json_file(const std::filesystem::path& path) {
    return json::parse(read_text_file(path));
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace evasim
