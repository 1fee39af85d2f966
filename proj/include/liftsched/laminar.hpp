#pragma once

#include "liftsched/errors.hpp"

namespace liftsched {

// Closed slot interval [begin, end] at a level of the binary decomposition.
struct Interval {
    long begin = 1;
    long end = 1;
    long level = 0;  // root = 0
    long pos = 1;    // 1-based within the level

    long length() const { return end - begin + 1; }
    bool contains(long t) const { return begin <= t && t <= end; }
    bool contains(const Interval& other) const {
        return begin <= other.begin && other.end <= end;
    }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Binary laminar decomposition of a power-of-two horizon. Horizons that are
// not powers of two are padded up and the padding recorded.
class LaminarTree {
public:
    explicit LaminarTree(long horizon) : horizon_(horizon) {
        if (horizon < 1) throw InvalidInstance("horizon must be >= 1");
        padded_ = 1;
        depth_ = 0;
        while (padded_ < horizon) {
            padded_ *= 2;
            ++depth_;
        }
    }

    long horizon() const { return horizon_; }
    long padded() const { return padded_; }
    bool padded_up() const { return padded_ != horizon_; }
    long depth() const { return depth_; }                       // leaf level
    long interval_count() const { return 2 * padded_ - 1; }     // 2^{d+1} - 1
    long level_count() const { return depth_ + 1; }

    Interval root() const { return {1, padded_, 0, 1}; }

    Interval interval(long level, long pos) const {
        if (level < 0 || level > depth_) throw InvalidInstance("level out of range");
        const long len = padded_ >> level;
        if (pos < 1 || pos > (1L << level)) throw InvalidInstance("position out of range");
        return {(pos - 1) * len + 1, pos * len, level, pos};
    }

    Interval left(const Interval& iv) const { return interval(iv.level + 1, 2 * iv.pos - 1); }
    Interval right(const Interval& iv) const { return interval(iv.level + 1, 2 * iv.pos); }

    // Intervals of `parent` at `rel_level` levels below it, left to right.
    std::vector<Interval> level_within(const Interval& parent, long rel_level) const {
        std::vector<Interval> out;
        const long level = parent.level + rel_level;
        if (level > depth_) throw InvalidInstance("relative level beyond leaves");
        const long count = 1L << rel_level;
        const long first = (parent.pos - 1) * count + 1;
        for (long k = 0; k < count; ++k) out.push_back(interval(level, first + k));
        return out;
    }

    // Smallest tree interval containing [lo, hi]; the owner interval of a
    // support that straddles a midpoint.
    Interval smallest_containing(long lo, long hi) const {
        if (lo < 1 || hi > padded_ || lo > hi)
            throw SupportOutsideRoot("support not inside the padded horizon");
        Interval iv = root();
        for (;;) {
            if (iv.level == depth_) return iv;
            Interval l = left(iv), r = right(iv);
            if (l.begin <= lo && hi <= l.end) iv = l;
            else if (r.begin <= lo && hi <= r.end) iv = r;
            else return iv;
        }
    }

private:
    long horizon_ = 1;
    long padded_ = 1;
    long depth_ = 0;
};

}  // namespace liftsched
