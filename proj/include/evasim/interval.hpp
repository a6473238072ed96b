#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evasim/errors.hpp"
#include "evasim/rng.hpp"

namespace evasim {

enum class FeatureKind : std::uint8_t { continuous, integer };

/// One interval over the reals with independently open/closed endpoints.
/// An interval is empty when lo > hi, or lo == hi with either side open.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;

    static Interval closed(double lo, double hi) { return {lo, hi, false, false}; }
    static Interval point(double x) { return {x, x, false, false}; }

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi) return lo_open || hi_open;
        return false;
    }

    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && lo_open) return false;
        if (x == hi && hi_open) return false;
        return true;
    }

    double width() const { return hi - lo; }

    bool operator==(const Interval&) const = default;

    std::string str() const;
};

/// Normalized union of disjoint intervals, sorted ascending. Parts never
/// overlap or touch with compatible closedness, so the representation is
/// canonical: equal point sets compare equal. The empty list is the empty set.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(Interval iv) { *this = from_parts({iv}); }

    /// Builds a normalized set from arbitrary parts (drops empties, sorts,
    /// merges overlapping and compatibly-touching neighbors).
    static IntervalSet from_parts(std::vector<Interval> parts);

    const std::vector<Interval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    bool contains(double x) const;

    /// Sum of part widths (point parts contribute zero).
    double measure() const;

    /// Number of integers contained in the set.
    std::int64_t integer_count() const;

    /// k-th contained integer, ascending, 0-based. Requires k < integer_count().
    std::int64_t nth_integer(std::int64_t k) const;

    /// True when sample_from() can produce a value of the given kind.
    bool admits(FeatureKind kind) const {
        if (empty()) return false;
        return kind == FeatureKind::integer ? integer_count() > 0 : true;
    }

    IntervalSet intersect(const IntervalSet& other) const;

    /// domain \ *this. Requires *this subset of domain.
    IntervalSet complement_within(const Interval& domain) const;

    bool operator==(const IntervalSet&) const = default;

    std::string str() const;

private:
    std::vector<Interval> parts_;
};

/// Uniform draw from a set: uniform over total measure for continuous kind
/// (degenerating to a uniform pick among point parts when the measure is
/// zero), uniform over contained integers for integer kind. Open endpoints
/// are rejected and retried up to 64 times, then nudged inward by 1e-9 of the
/// part width.
///
/// Throws EmptySetError when s is empty, NoIntegerError when kind is integer
/// and s contains no integer.
double sample_from(const IntervalSet& s, FeatureKind kind, Rng& rng);

}  // namespace evasim
