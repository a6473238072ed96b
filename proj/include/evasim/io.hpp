#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "evasim/constraints.hpp"
#include "evasim/core.hpp"
#include "evasim/defense.hpp"
#include "evasim/dtree.hpp"
#include "evasim/evasion.hpp"
#include "evasim/metrics.hpp"

namespace evasim {

using nlohmann::json;

// --- dataset CSV -----------------------------------------------------------
// Header `id,label,<feature names in schema order>`, label in
// {benign,malicious}, UTF-8, LF line endings, '.' decimal point, values
// written with 17 significant digits so save/load round-trips exactly.

void save_csv(const Dataset& data, std::ostream& os);
void save_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv(const Dataset& data);

/// Strict parser: exact header, exact label tokens, full-token numbers,
/// domain and integrality checked per value. Throws ParseError with line and
/// column, or SchemaMismatchError when the header disagrees with the schema.
Dataset load_csv(std::istream& is, const FeatureSchema& schema);
Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);

// --- JSON documents ---------------------------------------------------------
// Intervals serialize as [lo, hi, lo_open, hi_open]; interval sets as arrays
// of those. Schema and constraints live in one document.

json interval_to_json(const Interval& iv);
Interval interval_from_json(const json& j);
json interval_set_to_json(const IntervalSet& s);
IntervalSet interval_set_from_json(const json& j);

json schema_to_json(const FeatureSchema& schema, const ConstraintSet& constraints);
std::pair<FeatureSchema, ConstraintSet> schema_from_json(const json& j);

json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const json& j);

json ensemble_to_json(const Ensemble& ensemble, const json& provenance);
Ensemble ensemble_from_json(const json& j);

json detection_report_to_json(const DetectionReport& report);
json attack_report_to_json(const AttackReport& report);

json outcome_to_json(const ManipulationOutcome& oc, const FeatureSchema& schema);
ManipulationOutcome outcome_from_json(const json& j, const FeatureSchema& schema);

/// One JSON object per line.
void save_outcomes_jsonl(std::span<const ManipulationOutcome> outcomes,
                         const FeatureSchema& schema, std::ostream& os);
std::vector<ManipulationOutcome> load_outcomes_jsonl(std::istream& is,
                                                     const FeatureSchema& schema);

// --- file helpers -----------------------------------------------------------

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// FNV-1a 64-bit content hash, hex encoded; used in run manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace evasim
