#include "evasim/interval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evasim {

std::string Interval::str() const {
    std::ostringstream os;
    os << (lo_open ? '(' : '[') << lo << ", " << hi << (hi_open ? ')' : ']');
    return os.str();
}

IntervalSet IntervalSet::from_parts(std::vector<Interval> parts) {
    std::erase_if(parts, [](const Interval& iv) { return iv.empty(); });
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return !a.lo_open && b.lo_open;  // closed endpoint starts earlier
    });

    IntervalSet out;
    for (const Interval& iv : parts) {
        if (!out.parts_.empty()) {
            Interval& last = out.parts_.back();
            // Merge when the union of `last` and `iv` is a single interval:
            // genuine overlap, or touching endpoints of which at least one is
            // closed (both open leaves a one-point hole).
            const bool overlaps = iv.lo < last.hi;
            const bool touches = iv.lo == last.hi && !(last.hi_open && iv.lo_open);
            if (overlaps || touches) {
                if (iv.hi > last.hi) {
                    last.hi = iv.hi;
                    last.hi_open = iv.hi_open;
                } else if (iv.hi == last.hi) {
                    last.hi_open = last.hi_open && iv.hi_open;
                }
                continue;
            }
        }
        out.parts_.push_back(iv);
    }
    return out;
}

bool IntervalSet::contains(double x) const {
    for (const Interval& iv : parts_) {
        if (x < iv.lo) return false;
        if (iv.contains(x)) return true;
    }
    return false;
}

double IntervalSet::measure() const {
    double total = 0.0;
    for (const Interval& iv : parts_) total += iv.width();
    return total;
}

namespace {

// Smallest / largest integer inside one non-empty interval; lo_i > hi_i when
// the interval contains none.
std::pair<std::int64_t, std::int64_t> integer_bounds(const Interval& iv) {
    double lo = std::ceil(iv.lo);
    if (iv.lo_open && lo == iv.lo) lo += 1.0;
    double hi = std::floor(iv.hi);
    if (iv.hi_open && hi == iv.hi) hi -= 1.0;
    return {static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
}

}  // namespace

std::int64_t IntervalSet::integer_count() const {
    std::int64_t total = 0;
    for (const Interval& iv : parts_) {
        auto [lo, hi] = integer_bounds(iv);
        if (hi >= lo) total += hi - lo + 1;
    }
    return total;
}

std::int64_t IntervalSet::nth_integer(std::int64_t k) const {
    for (const Interval& iv : parts_) {
        auto [lo, hi] = integer_bounds(iv);
        if (hi < lo) continue;
        const std::int64_t count = hi - lo + 1;
        if (k < count) return lo + k;
        k -= count;
    }
    throw EmptySetError("nth_integer: index past the last contained integer");
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    std::vector<Interval> result;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < other.parts_.size()) {
        const Interval& a = parts_[i];
        const Interval& b = other.parts_[j];

        Interval cut;
        if (a.lo > b.lo) {
            cut.lo = a.lo;
            cut.lo_open = a.lo_open;
        } else if (b.lo > a.lo) {
            cut.lo = b.lo;
            cut.lo_open = b.lo_open;
        } else {
            cut.lo = a.lo;
            cut.lo_open = a.lo_open || b.lo_open;
        }
        if (a.hi < b.hi) {
            cut.hi = a.hi;
            cut.hi_open = a.hi_open;
        } else if (b.hi < a.hi) {
            cut.hi = b.hi;
            cut.hi_open = b.hi_open;
        } else {
            cut.hi = a.hi;
            cut.hi_open = a.hi_open || b.hi_open;
        }
        if (!cut.empty()) result.push_back(cut);

        if (a.hi < b.hi || (a.hi == b.hi && a.hi_open)) {
            ++i;
        } else {
            ++j;
        }
    }
    return from_parts(std::move(result));
}

IntervalSet IntervalSet::complement_within(const Interval& domain) const {
    std::vector<Interval> result;
    double cursor = domain.lo;
    bool cursor_open = domain.lo_open;
    for (const Interval& iv : parts_) {
        Interval gap{cursor, iv.lo, cursor_open, !iv.lo_open};
        if (!gap.empty()) result.push_back(gap);
        cursor = iv.hi;
        cursor_open = !iv.hi_open;
    }
    Interval tail{cursor, domain.hi, cursor_open, domain.hi_open};
    if (!tail.empty()) result.push_back(tail);
    return from_parts(std::move(result));
}

std::string IntervalSet::str() const {
    if (parts_.empty()) return "{}";
    std::ostringstream os;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << " u ";
        os << parts_[i].str();
    }
    return os.str();
}

double sample_from(const IntervalSet& s, FeatureKind kind, Rng& rng) {
    if (s.empty()) throw EmptySetError("sample_from: empty interval set");

    if (kind == FeatureKind::integer) {
        const std::int64_t n = s.integer_count();
        if (n == 0) throw NoIntegerError("sample_from: set contains no integer");
        return static_cast<double>(s.nth_integer(rng.uniform_int(0, n - 1)));
    }

    const double total = s.measure();
    if (total == 0.0) {
        // Only point parts: uniform pick among them.
        const auto idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(s.parts().size()) - 1));
        return s.parts()[idx].lo;
    }

    for (int attempt = 0; attempt < 64; ++attempt) {
        double x = rng.uniform_real(0.0, total);
        for (const Interval& iv : s.parts()) {
            if (x <= iv.width()) {
                const double v = iv.lo + x;
                if (iv.contains(v)) return v;
                break;  // landed on an open endpoint; redraw
            }
            x -= iv.width();
        }
    }
    // Measure-zero endpoint hits 64 times in a row: nudge inward.
    for (const Interval& iv : s.parts()) {
        if (iv.width() > 0.0) {
            const double nudge = 1e-9 * iv.width();
            if (iv.contains(iv.lo + nudge)) return iv.lo + nudge;
            return iv.hi - nudge;
        }
    }
    return s.parts().front().lo;
}

}  // namespace evasim
