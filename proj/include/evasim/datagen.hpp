#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "evasim/constraints.hpp"
#include "evasim/core.hpp"
#include "evasim/rng.hpp"

namespace evasim {

/// Class-conditional distribution of one feature: truncated normal within the
/// schema domain, rounded for integer kinds.
struct ClassConditional {
    double benign_mean = 0.0;
    double benign_sd = 1.0;
    double malicious_mean = 0.0;
    double malicious_sd = 1.0;
};

struct GeneratorParams {
    std::size_t n_malicious = 838;
    std::size_t n_benign = 3352;
    /// Scales malicious means toward benign means: 1 keeps the configured
    /// separation, 0 collapses the classes.
    double class_separation = 1.0;
    /// Fraction of features (the last ones in schema order) whose malicious
    /// distribution is replaced by the benign one.
    double noise_fraction = 0.0;
    std::vector<ClassConditional> per_feature;  // aligned with the schema

    /// Defaults tuned for the 16-feature schema of default_schema().
    static GeneratorParams defaults();

    /// Keeps the benign:malicious ratio at `ratio` (paper setting 4:1).
    GeneratorParams& with_malicious_count(std::size_t n, double ratio = 4.0);
};

/// The 16 cross-layer website features with invented positive bounded domains
/// plus the default manipulation constraints (#Scripts cannot be manipulated
/// to 0; URL_length and Content_length carry lower-bounded domains).
std::pair<FeatureSchema, ConstraintSet> default_schema();

/// Seeded synthetic dataset: benign vectors first (ids b000001..), then
/// malicious (m000001..). Deterministic per seed; vectors always validate
/// against the schema.
Dataset generate(const FeatureSchema& schema, const GeneratorParams& params, const Rng& rng);

/// Stratified split by class: first `fraction` of each class (after a seeded
/// shuffle) goes to the first dataset, the remainder to the second. Vector
/// order within each side follows the input order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double fraction, Rng& rng);

}  // namespace evasim
