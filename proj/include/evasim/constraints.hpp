#pragma once

#include <map>
#include <string>

#include "evasim/core.hpp"

namespace evasim {

/// Per-feature manipulation constraints. domain_map bounds where a value may
/// be moved; semantics_map keeps manipulations attack-preserving. In either
/// map, an absent entry means unconstrained (the full schema domain) and an
/// explicitly empty set in semantics_map means the feature is frozen.
class ConstraintSet {
public:
    ConstraintSet() = default;

    void set_domain(const std::string& feature, IntervalSet s) {
        domain_map_[feature] = std::move(s);
    }
    void set_semantics(const std::string& feature, IntervalSet s) {
        semantics_map_[feature] = std::move(s);
    }
    void freeze(const std::string& feature) { semantics_map_[feature] = IntervalSet(); }

    const std::map<std::string, IntervalSet>& domain_map() const { return domain_map_; }
    const std::map<std::string, IntervalSet>& semantics_map() const { return semantics_map_; }

    /// domain_map entry clipped to the schema domain; full domain when absent.
    IntervalSet domain_of(const FeatureSchema& schema, std::size_t feature) const;

    /// semantics_map entry clipped to the schema domain; full domain when absent.
    IntervalSet semantics_of(const FeatureSchema& schema, std::size_t feature) const;

    /// Every referenced feature must exist in the schema and every mapped set
    /// must lie within the feature's domain. Throws std::invalid_argument.
    void validate_against(const FeatureSchema& schema) const;

    bool operator==(const ConstraintSet&) const = default;

private:
    std::map<std::string, IntervalSet> domain_map_;
    std::map<std::string, IntervalSet> semantics_map_;
};

}  // namespace evasim
