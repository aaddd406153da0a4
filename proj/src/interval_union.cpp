#include "ergoscope/interval_union.hpp"

#include <algorithm>

namespace ergoscope {

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
    std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    std::sort(pieces.begin(), pieces.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (auto& iv : pieces) {
        if (!pieces_.empty() && iv.lo <= pieces_.back().hi) {
            if (iv.hi > pieces_.back().hi) pieces_.back().hi = iv.hi;
        } else {
            pieces_.push_back(std::move(iv));
        }
    }
}

IntervalUnion::IntervalUnion(const Rational& lo, const Rational& hi)
    : IntervalUnion(std::vector<Interval>{{lo, hi}}) {}

Rational IntervalUnion::measure() const { return total_length(pieces_); }

bool IntervalUnion::contains(const Rational& x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](const Rational& v, const Interval& iv) { return v < iv.lo; });
    if (it == pieces_.begin()) return false;
    return std::prev(it)->contains(x);
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
    std::vector<Interval> all = pieces_;
    all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
    return IntervalUnion(std::move(all));
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    const auto& a = pieces_;
    const auto& b = other.pieces_;
    while (i < a.size() && j < b.size()) {
        const Rational& lo = a[i].lo > b[j].lo ? a[i].lo : b[j].lo;
        const Rational& hi = a[i].hi < b[j].hi ? a[i].hi : b[j].hi;
        if (lo < hi) out.push_back({lo, hi});
        if (a[i].hi < b[j].hi)
            ++i;
        else
            ++j;
    }
    return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::subtract(const IntervalUnion& other) const {
    std::vector<Interval> out;
    std::size_t j = 0;
    const auto& b = other.pieces_;
    for (const auto& iv : pieces_) {
        Rational cur = iv.lo;
        while (j < b.size() && b[j].hi <= cur) ++j;
        std::size_t k = j;
        while (k < b.size() && b[k].lo < iv.hi) {
            if (b[k].lo > cur) out.push_back({cur, b[k].lo});
            if (b[k].hi > cur) cur = b[k].hi;
            if (cur >= iv.hi) break;
            ++k;
        }
        if (cur < iv.hi) out.push_back({cur, iv.hi});
    }
    return IntervalUnion(std::move(out));
}

bool IntervalUnion::disjoint_from(const IntervalUnion& other) const {
    return intersect(other).empty();
}

Rational total_length(const std::vector<Interval>& pieces) {
    Rational sum = 0;
    for (const auto& iv : pieces) sum += iv.hi - iv.lo;
    return sum;
}

}  // namespace ergoscope
