#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "evasim/interval.hpp"

namespace evasim {

enum class Label : std::uint8_t { benign, malicious, unlabeled };

std::string to_string(Label label);
Label label_from_string(const std::string& s);  // throws std::invalid_argument

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::continuous;
    Interval domain;  // closed, non-empty

    bool operator==(const Feature&) const = default;
};

/// Ordered, typed, bounded feature space. Validated on construction: names
/// unique, domains non-empty and closed, integer domains with integral
/// endpoints.
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<Feature> features);  // throws std::invalid_argument

    std::size_t size() const { return features_.size(); }
    const Feature& feature(std::size_t i) const { return features_[i]; }
    const std::vector<Feature>& features() const { return features_; }

    /// Index of the named feature, or -1.
    int index_of(const std::string& name) const;

    /// The feature's full domain as a one-part set.
    IntervalSet domain_set(std::size_t i) const { return IntervalSet(features_[i].domain); }

    bool operator==(const FeatureSchema&) const = default;

private:
    std::vector<Feature> features_;
    std::unordered_map<std::string, int> index_;
};

struct FeatureVector {
    std::string id;
    std::vector<double> values;  // aligned with schema order
    Label label = Label::unlabeled;

    bool operator==(const FeatureVector&) const = default;
};

/// Violation list is empty iff the vector satisfies every schema invariant
/// (arity, domain membership, integrality).
std::vector<std::string> validate_vector(const FeatureSchema& schema, const FeatureVector& fv);

struct Dataset {
    FeatureSchema schema;
    std::vector<FeatureVector> vectors;

    std::vector<std::size_t> indices_of(Label label) const;
    std::size_t count_of(Label label) const;

    /// Violations across all vectors, prefixed with the vector id.
    std::vector<std::string> validate() const;

    bool operator==(const Dataset&) const = default;
};

}  // namespace evasim
