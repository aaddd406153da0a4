#pragma once

#include "ergoscope/rational.hpp"

#include <vector>

namespace ergoscope {

// Half-open [lo, hi).
struct Interval {
    Rational lo;
    Rational hi;

    Rational length() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x < hi; }
    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

// Finite union of half-open intervals, kept sorted with touching pieces merged.
class IntervalUnion {
public:
    IntervalUnion() = default;
    explicit IntervalUnion(std::vector<Interval> pieces);
    IntervalUnion(const Rational& lo, const Rational& hi);

    const std::vector<Interval>& intervals() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }
    std::size_t size() const { return pieces_.size(); }
    Rational measure() const;
    bool contains(const Rational& x) const;

    IntervalUnion unite(const IntervalUnion& other) const;
    IntervalUnion intersect(const IntervalUnion& other) const;
    IntervalUnion subtract(const IntervalUnion& other) const;
    bool disjoint_from(const IntervalUnion& other) const;

    bool operator==(const IntervalUnion& o) const { return pieces_ == o.pieces_; }

private:
    std::vector<Interval> pieces_;
};

// Sum of piece lengths without merging; equals the union measure iff the pieces are disjoint.
Rational total_length(const std::vector<Interval>& pieces);

}  // namespace ergoscope
