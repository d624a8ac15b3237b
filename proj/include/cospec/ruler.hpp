#pragma once

#include <cstddef>
#include <vector>

namespace cospec {

/// The set of M coset indices a sensor group keeps out of every block of N
/// Nyquist samples. Marks are stored sorted, distinct and in [0, N-1].
class CosetPattern {
public:
    /// Marks may be given in any order; duplicates or out-of-range values throw.
    CosetPattern(int period, std::vector<int> marks);

    /// All N cosets, i.e. Nyquist-rate sampling.
    static CosetPattern full(int period);

    int period() const noexcept { return period_; }
    int size() const noexcept { return static_cast<int>(marks_.size()); }
    const std::vector<int>& marks() const noexcept { return marks_; }
    int operator[](std::size_t i) const { return marks_[i]; }

    friend bool operator==(const CosetPattern&, const CosetPattern&) = default;

private:
    int period_;
    std::vector<int> marks_;
};

/// Residues mod N measurable by a pattern (membership only).
class DifferenceSet {
public:
    explicit DifferenceSet(int period) : present_(static_cast<std::size_t>(period), false) {}

    int period() const noexcept { return static_cast<int>(present_.size()); }
    bool contains(int d) const { return present_[static_cast<std::size_t>(d)]; }
    void insert(int d) { present_[static_cast<std::size_t>(d)] = true; }
    int size() const;
    std::vector<int> members() const;

private:
    std::vector<bool> present_;
};

/// Z patterns with a common period and a common number of marks M.
class RulerBank {
public:
    RulerBank(int period, std::vector<CosetPattern> patterns);

    int period() const noexcept { return period_; }
    int marks_per_pattern() const noexcept { return patterns_.front().size(); }
    int size() const noexcept { return static_cast<int>(patterns_.size()); }
    const std::vector<CosetPattern>& patterns() const noexcept { return patterns_; }
    const CosetPattern& operator[](std::size_t z) const { return patterns_[z]; }

    friend bool operator==(const RulerBank&, const RulerBank&) = default;

private:
    int period_;
    std::vector<CosetPattern> patterns_;
};

struct Coverage {
    bool covered = false;
    std::vector<int> missing;  // uncovered residues, ascending
};

DifferenceSet difference_set(const CosetPattern& pattern);

bool is_complete_circular_ruler(const CosetPattern& pattern);
bool is_incomplete_circular_ruler(const CosetPattern& pattern);

/// True iff every nonzero residue is produced by at most one ordered pair.
bool is_circular_golomb(const CosetPattern& pattern);

/// True iff no nonzero residue is measured by two different patterns.
/// Throws Error("domain") when the bank has fewer than two patterns.
bool are_non_overlapping(const RulerBank& bank);

Coverage union_covers(const RulerBank& bank);

/// ceil((N-1) / (M(M-1))): the fewest patterns of M marks that can cover
/// all N-1 nonzero residues.
int lower_bound_Z(int period, int marks);

}  // namespace cospec
