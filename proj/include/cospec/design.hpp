#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cospec/ruler.hpp"

namespace cospec {

/// One committed mark of a construction: the pattern it went into, the coset
/// index, and how many previously uncovered residues it added.
struct GreedyStep {
    int pattern = 0;
    int mark = 0;
    int newly_covered = 0;
};

struct DesignReport {
    RulerBank bank;
    int achieved_Z = 0;
    int lower_bound = 0;
    std::vector<bool> per_pattern_golomb;
    std::optional<bool> non_overlapping;  // only defined for Z >= 2
    bool covered = false;
    std::vector<int> missing;
    std::vector<GreedyStep> greedy_trace;
};

/// Analytic M=2 bank: {0, z+1} for z < ceil((N-1)/2), which for even N ends
/// with the incomplete ruler {0, N/2}. Requires N >= 3.
DesignReport design_m2(int period);

struct GreedyOptions {
    /// Number of patterns to seed up front; 0 means the lower bound. Larger
    /// values fix Z above what coverage alone needs (every pattern still gets
    /// exactly M marks).
    int min_patterns = 0;
    /// Search nodes allowed for the backtracking pass before falling back to
    /// the one-shot greedy that appends patterns until covered.
    std::size_t node_budget = 200000;
};

/// Pattern z is seeded with {0, z+1}; remaining marks are picked to add the
/// most uncovered residues, preferring coset indices not used by any pattern
/// yet, smallest index on ties. The first pass fixes Z at the lower bound
/// (or min_patterns) and backtracks over the greedy ranking when the bound
/// becomes unreachable; if that fails within the node budget the plain
/// greedy is run and patterns are appended until the bank covers.
DesignReport design_greedy(int period, int marks, const GreedyOptions& options = {});

/// Recomputes every report field for an existing bank. The trace is empty.
DesignReport verify_bank(const RulerBank& bank);

}  // namespace cospec
