#include "evasim/constraints.hpp"

#include <stdexcept>

namespace evasim {

namespace {

IntervalSet lookup(const std::map<std::string, IntervalSet>& m, const FeatureSchema& schema,
                   std::size_t feature) {
    const IntervalSet full = schema.domain_set(feature);
    auto it = m.find(schema.feature(feature).name);
    if (it == m.end()) return full;
    return it->second.intersect(full);
}

}  // namespace

IntervalSet ConstraintSet::domain_of(const FeatureSchema& schema, std::size_t feature) const {
    return lookup(domain_map_, schema, feature);
}

IntervalSet ConstraintSet::semantics_of(const FeatureSchema& schema, std::size_t feature) const {
    return lookup(semantics_map_, schema, feature);
}

void ConstraintSet::validate_against(const FeatureSchema& schema) const {
    auto check = [&](const std::map<std::string, IntervalSet>& m, const char* which) {
        for (const auto& [name, set] : m) {
            const int idx = schema.index_of(name);
            if (idx < 0) {
                throw std::invalid_argument(std::string(which) + " references unknown feature: " +
                                            name);
            }
            const IntervalSet full = schema.domain_set(static_cast<std::size_t>(idx));
            if (!(set.intersect(full) == set)) {
                throw std::invalid_argument(std::string(which) + " entry for " + name +
                                            " exceeds the feature domain");
            }
        }
    };
    check(domain_map_, "domain_map");
    check(semantics_map_, "semantics_map");
}

}  // namespace evasim
