#include "evasim/core.hpp"

#include <cmath>
#include <stdexcept>

namespace evasim {

std::string to_string(Label label) {
    switch (label) {
        case Label::benign: return "benign";
        case Label::malicious: return "malicious";
        case Label::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label label_from_string(const std::string& s) {
    if (s == "benign") return Label::benign;
    if (s == "malicious") return Label::malicious;
    if (s == "unlabeled") return Label::unlabeled;
    throw std::invalid_argument("unknown label: '" + s + "'");
}

FeatureSchema::FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
    for (std::size_t i = 0; i < features_.size(); ++i) {
        const Feature& f = features_[i];
        if (f.name.empty()) throw std::invalid_argument("feature name must not be empty");
        if (!index_.emplace(f.name, static_cast<int>(i)).second) {
            throw std::invalid_argument("duplicate feature name: " + f.name);
        }
        if (f.domain.lo_open || f.domain.hi_open) {
            throw std::invalid_argument("feature domain must be closed: " + f.name);
        }
        if (!(f.domain.lo <= f.domain.hi)) {
            throw std::invalid_argument("feature domain empty: " + f.name);
        }
        if (f.kind == FeatureKind::integer &&
            (f.domain.lo != std::floor(f.domain.lo) || f.domain.hi != std::floor(f.domain.hi))) {
            throw std::invalid_argument("integer feature domain must have integral endpoints: " +
                                        f.name);
        }
    }
}

int FeatureSchema::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> validate_vector(const FeatureSchema& schema, const FeatureVector& fv) {
    std::vector<std::string> violations;
    if (fv.values.size() != schema.size()) {
        violations.push_back("value count " + std::to_string(fv.values.size()) +
                             " does not match schema feature count " +
                             std::to_string(schema.size()));
        return violations;
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const Feature& f = schema.feature(i);
        const double v = fv.values[i];
        if (!std::isfinite(v)) {
            violations.push_back(f.name + ": non-finite value");
            continue;
        }
        if (!f.domain.contains(v)) {
            violations.push_back(f.name + ": value " + std::to_string(v) + " out of domain " +
                                 f.domain.str());
        }
        if (f.kind == FeatureKind::integer && v != std::floor(v)) {
            violations.push_back(f.name + ": non-integral value " + std::to_string(v));
        }
    }
    return violations;
}

std::vector<std::size_t> Dataset::indices_of(Label label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].label == label) out.push_back(i);
    }
    return out;
}

std::size_t Dataset::count_of(Label label) const {
    std::size_t n = 0;
    for (const FeatureVector& fv : vectors) {
        if (fv.label == label) ++n;
    }
    return n;
}

std::vector<std::string> Dataset::validate() const {
    std::vector<std::string> all;
    for (const FeatureVector& fv : vectors) {
        for (std::string& v : validate_vector(schema, fv)) {
            all.push_back(fv.id + ": " + std::move(v));
        }
    }
    return all;
}

}  // namespace evasim
