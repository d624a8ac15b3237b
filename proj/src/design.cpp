#include "cospec/design.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "cospec/error.hpp"

namespace cospec {

namespace {

int mod(int a, int n) {
    const int r = a % n;
    return r < 0 ? r + n : r;
}

// Incremental coverage state shared by the backtracking and one-shot passes.
// residue_count[d] counts ordered pairs (over all patterns) producing d.
class BankBuilder {
public:
    BankBuilder(int period, int marks)
        : n_(period), m_(marks), residue_count_(static_cast<std::size_t>(period), 0),
          index_use_(static_cast<std::size_t>(period), 0), stamp_(static_cast<std::size_t>(period), 0) {}

    int period() const { return n_; }
    int marks() const { return m_; }
    int pattern_count() const { return static_cast<int>(patterns_.size()); }
    const std::vector<int>& pattern(int z) const { return patterns_[static_cast<std::size_t>(z)]; }
    int uncovered() const { return n_ - 1 - covered_; }
    bool covered() const { return uncovered() == 0; }
    const std::vector<GreedyStep>& trace() const { return trace_; }

    int new_pattern() {
        patterns_.emplace_back();
        return pattern_count() - 1;
    }

    bool in_pattern(int z, int c) const {
        const auto& p = pattern(z);
        return std::find(p.begin(), p.end(), c) != p.end();
    }

    bool unused(int c) const { return index_use_[static_cast<std::size_t>(c)] == 0; }

    // Distinct residues that adding c to pattern z would cover for the first time.
    int gain(int z, int c) {
        ++epoch_;
        int fresh = 0;
        for (int a : pattern(z)) {
            for (int d : {mod(c - a, n_), mod(a - c, n_)}) {
                auto& s = stamp_[static_cast<std::size_t>(d)];
                if (s == epoch_) continue;
                s = epoch_;
                if (residue_count_[static_cast<std::size_t>(d)] == 0) ++fresh;
            }
        }
        return fresh;
    }

    int add(int z, int c) {
        auto& p = patterns_[static_cast<std::size_t>(z)];
        int fresh = 0;
        for (int a : p) {
            for (int d : {mod(c - a, n_), mod(a - c, n_)}) {
                if (residue_count_[static_cast<std::size_t>(d)]++ == 0) ++fresh;
            }
        }
        covered_ += fresh;
        p.push_back(c);
        ++index_use_[static_cast<std::size_t>(c)];
        trace_.push_back({z, c, fresh});
        return fresh;
    }

    void remove_last(int z) {
        auto& p = patterns_[static_cast<std::size_t>(z)];
        const int c = p.back();
        p.pop_back();
        for (int a : p) {
            for (int d : {mod(c - a, n_), mod(a - c, n_)}) {
                if (--residue_count_[static_cast<std::size_t>(d)] == 0) --covered_;
            }
        }
        --index_use_[static_cast<std::size_t>(c)];
        trace_.pop_back();
    }

    int smallest_uncovered() const {
        for (int d = 1; d < n_; ++d)
            if (residue_count_[static_cast<std::size_t>(d)] == 0) return d;
        return 0;
    }

    // Candidates for the next mark of pattern z with positive gain, best first:
    // unused indices if any of them helps, otherwise every index.
    std::vector<std::pair<int, int>> ranked_candidates(int z) {
        std::vector<std::pair<int, int>> ranked;
        for (int pass = 0; pass < 2 && ranked.empty(); ++pass) {
            for (int c = 0; c < n_; ++c) {
                if (in_pattern(z, c) || (pass == 0 && !unused(c))) continue;
                const int g = gain(z, c);
                if (g > 0) ranked.emplace_back(-g, c);
            }
        }
        std::sort(ranked.begin(), ranked.end());
        return ranked;
    }

    // Single greedy choice, also defined when nothing adds coverage.
    int pick(int z) {
        int best_unused = -1, best_unused_gain = -1;
        int best_any = -1, best_any_gain = 0;
        for (int c = 0; c < n_; ++c) {
            if (in_pattern(z, c)) continue;
            const int g = gain(z, c);
            if (unused(c) && g > best_unused_gain) {
                best_unused = c;
                best_unused_gain = g;
            }
            if (g > best_any_gain) {
                best_any = c;
                best_any_gain = g;
            }
            if (best_any < 0) best_any = c;
        }
        if (best_unused >= 0 && (best_unused_gain > 0 || best_any_gain == 0)) return best_unused;
        return best_any;
    }

    void fill(int z) {
        while (static_cast<int>(pattern(z).size()) < m_) add(z, pick(z));
    }

    RulerBank bank() const {
        std::vector<CosetPattern> out;
        out.reserve(patterns_.size());
        for (const auto& p : patterns_) out.emplace_back(n_, p);
        return RulerBank(n_, std::move(out));
    }

private:
    int n_;
    int m_;
    std::vector<std::vector<int>> patterns_;
    std::vector<int> residue_count_;
    std::vector<int> index_use_;
    std::vector<unsigned> stamp_;
    unsigned epoch_ = 0;
    int covered_ = 0;
    std::vector<GreedyStep> trace_;
};

void seed(BankBuilder& builder, int z) {
    const int id = builder.new_pattern();
    builder.add(id, 0);
    builder.add(id, z + 1);
}

// Depth-first search over the greedy ranking with Z held fixed.
class FixedZSearch {
public:
    FixedZSearch(BankBuilder& builder, std::size_t budget) : b_(builder), budget_(budget) {
        for (int z = 0; z < b_.pattern_count(); ++z)
            for (int k = static_cast<int>(b_.pattern(z).size()); k < b_.marks(); ++k)
                slots_.push_back({z, 2 * k});
        // cap_[i]: most residues slots i.. can still add (2 per existing mark).
        cap_.assign(slots_.size() + 1, 0);
        for (std::size_t i = slots_.size(); i-- > 0;) cap_[i] = cap_[i + 1] + slots_[i].max_gain;
    }

    bool run() { return visit(0); }

private:
    struct Slot {
        int pattern;
        int max_gain;
    };

    bool visit(std::size_t i) {
        if (b_.covered()) {
            for (; i < slots_.size(); ++i) b_.add(slots_[i].pattern, b_.pick(slots_[i].pattern));
            return true;
        }
        if (i == slots_.size() || b_.uncovered() > cap_[i]) return false;
        if (++nodes_ > budget_) return false;
        const int z = slots_[i].pattern;
        for (const auto& [neg_gain, c] : b_.ranked_candidates(z)) {
            b_.add(z, c);
            if (visit(i + 1)) return true;
            b_.remove_last(z);
            if (nodes_ > budget_) return false;
        }
        return false;
    }

    BankBuilder& b_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    std::vector<Slot> slots_;
    std::vector<int> cap_;
};

DesignReport finish(const BankBuilder& builder) {
    DesignReport report = verify_bank(builder.bank());
    report.greedy_trace = builder.trace();
    return report;
}

}  // namespace

DesignReport design_m2(int period) {
    if (period < 3) fail("domain", "M=2 construction needs N >= 3, got " + std::to_string(period));
    BankBuilder builder(period, 2);
    const int z_count = period / 2;  // ceil((N-1)/2)
    for (int z = 0; z < z_count; ++z) seed(builder, z);
    return finish(builder);
}

DesignReport design_greedy(int period, int marks, const GreedyOptions& options) {
    if (period < 2 || marks < 2 || marks > period)
        fail("domain", "greedy design needs N >= 2 and 2 <= M <= N (got N=" + std::to_string(period) +
                           ", M=" + std::to_string(marks) + ")");
    if (options.min_patterns >= period)
        fail("domain", "cannot seed " + std::to_string(options.min_patterns) +
                           " patterns {0, z+1} with N=" + std::to_string(period));
    const int z_start = std::max(lower_bound_Z(period, marks), options.min_patterns);

    {
        BankBuilder builder(period, marks);
        for (int z = 0; z < z_start; ++z) seed(builder, z);
        if (FixedZSearch(builder, options.node_budget).run()) return finish(builder);
    }

    BankBuilder builder(period, marks);
    for (int z = 0; z < z_start; ++z) seed(builder, z);
    for (int z = 0; z < z_start; ++z) builder.fill(z);
    while (!builder.covered()) {
        const int z = builder.new_pattern();
        builder.add(z, 0);
        int second = z + 1;
        if (second >= period || builder.gain(z, second) == 0) second = builder.smallest_uncovered();
        builder.add(z, second);
        builder.fill(z);
    }
    return finish(builder);
}

DesignReport verify_bank(const RulerBank& bank) {
    const int m = bank.marks_per_pattern();
    if (m < 2) fail("domain", "bank-level design checks need at least two marks per pattern");
    DesignReport report{bank, bank.size(), lower_bound_Z(bank.period(), m), {}, {}, false, {}, {}};
    report.per_pattern_golomb.reserve(static_cast<std::size_t>(bank.size()));
    for (const auto& pattern : bank.patterns()) report.per_pattern_golomb.push_back(is_circular_golomb(pattern));
    if (bank.size() >= 2) report.non_overlapping = are_non_overlapping(bank);
    auto coverage = union_covers(bank);
    report.covered = coverage.covered;
    report.missing = std::move(coverage.missing);
    return report;
}

}  // namespace cospec
