#include "cospec/ruler.hpp"

#include <algorithm>
#include <string>

#include "cospec/error.hpp"

namespace cospec {

namespace {

int mod(int a, int n) {
    const int r = a % n;
    return r < 0 ? r + n : r;
}

}  // namespace

CosetPattern::CosetPattern(int period, std::vector<int> marks)
    : period_(period), marks_(std::move(marks)) {
    if (period_ < 1) fail("domain", "pattern period must be positive, got " + std::to_string(period_));
    if (marks_.empty()) fail("domain", "pattern needs at least one mark");
    std::sort(marks_.begin(), marks_.end());
    if (marks_.front() < 0 || marks_.back() >= period_)
        fail("domain", "pattern marks must lie in [0, " + std::to_string(period_ - 1) + "]");
    if (std::adjacent_find(marks_.begin(), marks_.end()) != marks_.end())
        fail("domain", "pattern marks must be distinct");
}

CosetPattern CosetPattern::full(int period) {
    if (period < 1) fail("domain", "pattern period must be positive");
    std::vector<int> marks(static_cast<std::size_t>(period));
    for (int n = 0; n < period; ++n) marks[static_cast<std::size_t>(n)] = n;
    return CosetPattern(period, std::move(marks));
}

int DifferenceSet::size() const {
    return static_cast<int>(std::count(present_.begin(), present_.end(), true));
}

std::vector<int> DifferenceSet::members() const {
    std::vector<int> out;
    for (int d = 0; d < period(); ++d)
        if (contains(d)) out.push_back(d);
    return out;
}

RulerBank::RulerBank(int period, std::vector<CosetPattern> patterns)
    : period_(period), patterns_(std::move(patterns)) {
    if (patterns_.empty()) fail("domain", "a ruler bank needs at least one pattern");
    const int m = patterns_.front().size();
    for (std::size_t z = 0; z < patterns_.size(); ++z) {
        if (patterns_[z].period() != period_)
            fail("domain", "pattern " + std::to_string(z) + " has period " +
                               std::to_string(patterns_[z].period()) + ", bank has " +
                               std::to_string(period_));
        if (patterns_[z].size() != m)
            fail("domain", "pattern " + std::to_string(z) + " has " +
                               std::to_string(patterns_[z].size()) + " marks, expected " +
                               std::to_string(m));
    }
}

DifferenceSet difference_set(const CosetPattern& pattern) {
    const int n = pattern.period();
    DifferenceSet out(n);
    for (int a : pattern.marks())
        for (int b : pattern.marks()) out.insert(mod(a - b, n));
    return out;
}

bool is_complete_circular_ruler(const CosetPattern& pattern) {
    return difference_set(pattern).size() == pattern.period();
}

bool is_incomplete_circular_ruler(const CosetPattern& pattern) {
    return !is_complete_circular_ruler(pattern);
}

bool is_circular_golomb(const CosetPattern& pattern) {
    const int n = pattern.period();
    std::vector<int> multiplicity(static_cast<std::size_t>(n), 0);
    const auto& marks = pattern.marks();
    for (std::size_t i = 0; i < marks.size(); ++i) {
        for (std::size_t j = 0; j < marks.size(); ++j) {
            if (i == j) continue;
            if (++multiplicity[static_cast<std::size_t>(mod(marks[i] - marks[j], n))] > 1)
                return false;
        }
    }
    return true;
}

bool are_non_overlapping(const RulerBank& bank) {
    if (bank.size() < 2) fail("domain", "non-overlap needs at least two patterns");
    std::vector<bool> seen(static_cast<std::size_t>(bank.period()), false);
    for (const auto& pattern : bank.patterns()) {
        const auto omega = difference_set(pattern);
        for (int d = 1; d < bank.period(); ++d) {
            if (!omega.contains(d)) continue;
            if (seen[static_cast<std::size_t>(d)]) return false;
            seen[static_cast<std::size_t>(d)] = true;
        }
    }
    return true;
}

Coverage union_covers(const RulerBank& bank) {
    DifferenceSet all(bank.period());
    for (const auto& pattern : bank.patterns())
        for (int d : difference_set(pattern).members()) all.insert(d);
    Coverage out;
    for (int d = 0; d < bank.period(); ++d)
        if (!all.contains(d)) out.missing.push_back(d);
    out.covered = out.missing.empty();
    return out;
}

int lower_bound_Z(int period, int marks) {
    if (marks < 2) fail("domain", "lower bound needs at least two marks per pattern");
    if (period < 2 || marks > period)
        fail("domain", "lower bound needs N >= 2 and M <= N");
    const int per_pattern = marks * (marks - 1);
    return (period - 1 + per_pattern - 1) / per_pattern;
}

}  // namespace cospec
