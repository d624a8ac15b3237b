#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "cospec/cli.hpp"
#include "cospec/error.hpp"
#include "cospec/ruler.hpp"
#include "oracles.hpp"

using namespace cospec;

namespace {

std::vector<int> iota_marks(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

std::vector<cli::ReferenceRow> table_rows() {
    std::ifstream in(cli::default_table_path());
    REQUIRE(in.good());
    return cli::read_reference_rows(in);
}

const cli::ReferenceRow& row(const std::vector<cli::ReferenceRow>& rows, int n) {
    auto it = std::find_if(rows.begin(), rows.end(), [n](const auto& r) { return r.N == n; });
    REQUIRE(it != rows.end());
    return *it;
}

}  // namespace

TEST_SUITE("ruler") {

TEST_CASE("pattern validation") {
    CosetPattern p(10, {7, 2, 5});
    CHECK(p.marks() == std::vector<int>{2, 5, 7});
    CHECK_THROWS_AS(CosetPattern(5, {1, 1}), Error);
    CHECK_THROWS_AS(CosetPattern(5, {5}), Error);
    CHECK_THROWS_AS(CosetPattern(5, {-1}), Error);
    CHECK_THROWS_AS(CosetPattern(5, {}), Error);
    CHECK_THROWS_AS(CosetPattern(0, {0}), Error);
    CHECK(CosetPattern::full(4).marks() == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("bank validation") {
    CHECK_THROWS_AS(RulerBank(5, {}), Error);
    CHECK_THROWS_AS(RulerBank(5, {CosetPattern(5, {0, 1}), CosetPattern(5, {0})}), Error);
    CHECK_THROWS_AS(RulerBank(5, {CosetPattern(6, {0, 1})}), Error);
    RulerBank b(5, {CosetPattern(5, {0, 1}), CosetPattern(5, {0, 2})});
    CHECK(b.size() == 2);
    CHECK(b.marks_per_pattern() == 2);
}

TEST_CASE("difference_set examples") {
    CHECK(difference_set(CosetPattern(43, {0, 1, 17})).members() == std::vector<int>{0, 1, 16, 17, 26, 27, 42});
    CHECK(difference_set(CosetPattern(10, {5})).members() == std::vector<int>{0});
    CHECK(difference_set(CosetPattern::full(6)).members() == iota_marks(6));
}

TEST_CASE("completeness examples") {
    CHECK(is_complete_circular_ruler(CosetPattern::full(7)));
    CHECK_FALSE(is_complete_circular_ruler(CosetPattern(43, {0, 1, 17})));
    CHECK(is_complete_circular_ruler(CosetPattern(7, {0, 1, 2, 3})));

    CHECK(is_incomplete_circular_ruler(CosetPattern(43, {0, 1, 17})));
    CHECK(is_incomplete_circular_ruler(CosetPattern(2, {0})));
    CHECK_FALSE(is_incomplete_circular_ruler(CosetPattern(2, {0, 1})));
}

TEST_CASE("golomb examples") {
    CHECK(is_circular_golomb(CosetPattern(43, {0, 1, 17})));
    CHECK_FALSE(is_circular_golomb(CosetPattern(10, {0, 1, 2})));
    CHECK(is_circular_golomb(CosetPattern(5, {0})));
}

TEST_CASE("non-overlap examples") {
    CHECK(are_non_overlapping(RulerBank(5, {CosetPattern(5, {0, 1}), CosetPattern(5, {0, 2})})));
    CHECK_FALSE(are_non_overlapping(RulerBank(5, {CosetPattern(5, {0, 1}), CosetPattern(5, {0, 1})})));
    auto rows = table_rows();
    const auto& r43 = row(rows, 43);
    CHECK(r43.patterns.size() == 7);
    CHECK(are_non_overlapping(RulerBank(43, r43.patterns)));

    try {
        are_non_overlapping(RulerBank(5, {CosetPattern(5, {0, 1})}));
        FAIL("expected domain error");
    } catch (const Error& e) {
        CHECK(e.code() == "domain");
    }
}

TEST_CASE("union_covers examples") {
    auto rows = table_rows();
    auto c103 = union_covers(RulerBank(103, row(rows, 103).patterns));
    CHECK(c103.covered);
    CHECK(c103.missing.empty());

    auto c43 = union_covers(RulerBank(43, {CosetPattern(43, {0, 1, 17})}));
    CHECK_FALSE(c43.covered);
    CHECK(std::find(c43.missing.begin(), c43.missing.end(), 2) != c43.missing.end());
    CHECK(c43.missing.size() == 43 - 7);

    auto full = union_covers(RulerBank(9, {CosetPattern::full(9)}));
    CHECK(full.covered);
    CHECK(full.missing.empty());
}

TEST_CASE("lower_bound_Z examples") {
    CHECK(lower_bound_Z(103, 3) == 17);
    CHECK(lower_bound_Z(5, 2) == 2);
    CHECK(lower_bound_Z(2, 2) == 1);
    CHECK_THROWS_AS(lower_bound_Z(10, 1), Error);
    CHECK_THROWS_AS(lower_bound_Z(1, 2), Error);
    CHECK_THROWS_AS(lower_bound_Z(4, 5), Error);
}

TEST_CASE("property: difference sets contain 0 and are negation closed") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 60)(rng);
        const int m = std::uniform_int_distribution<int>(1, n)(rng);
        CosetPattern p(n, oracle::random_subset(rng, n, m));
        auto ds = difference_set(p);
        CHECK(ds.contains(0));
        CHECK(ds.size() <= m * (m - 1) + 1);
        for (int d : ds.members()) CHECK(ds.contains((n - d) % n));
        const auto brute = oracle::residues(p.marks(), n);
        CHECK(std::vector<int>(brute.begin(), brute.end()) == ds.members());
    }
}

TEST_CASE("property: golomb iff maximal difference set, exhaustive N <= 12") {
    int checked = 0;
    for (int n = 1; n <= 12; ++n) {
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<int> marks;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) marks.push_back(i);
            CosetPattern p(n, marks);
            const int m = p.size();
            bool unique = true;
            for (const auto& [res, count] : oracle::pair_multiplicity(marks, n)) unique = unique && count == 1;
            const bool maximal = difference_set(p).size() == m * (m - 1) + 1;
            REQUIRE(is_circular_golomb(p) == unique);
            REQUIRE(maximal == unique);
            REQUIRE(is_complete_circular_ruler(p) == (static_cast<int>(oracle::residues(marks, n).size()) == n));
            REQUIRE(is_incomplete_circular_ruler(p) == !is_complete_circular_ruler(p));
            ++checked;
        }
    }
    CHECK(checked == (1 << 13) - 2 - 12);
}

TEST_CASE("property: union_covers agrees with brute enumeration") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 40)(rng);
        const int m = std::uniform_int_distribution<int>(1, std::min(n, 6))(rng);
        const int z = std::uniform_int_distribution<int>(1, 5)(rng);
        std::vector<CosetPattern> ps;
        std::vector<std::vector<int>> raw;
        for (int i = 0; i < z; ++i) {
            raw.push_back(oracle::random_subset(rng, n, m));
            ps.emplace_back(n, raw.back());
        }
        const auto all = oracle::bank_residues(raw, n);
        auto cov = union_covers(RulerBank(n, ps));
        CHECK(cov.covered == (static_cast<int>(all.size()) == n));
        std::vector<int> expected_missing;
        for (int d = 0; d < n; ++d)
            if (!all.count(d)) expected_missing.push_back(d);
        CHECK(cov.missing == expected_missing);
    }
}

TEST_CASE("property: non-overlap is symmetric under permutation and matches pairwise intersections") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = std::uniform_int_distribution<int>(5, 50)(rng);
        const int m = std::uniform_int_distribution<int>(2, 3)(rng);
        const int z = std::uniform_int_distribution<int>(2, 5)(rng);
        std::vector<CosetPattern> ps;
        for (int i = 0; i < z; ++i) ps.emplace_back(n, oracle::random_subset(rng, n, m));
        bool disjoint = true;
        for (int a = 0; a < z; ++a)
            for (int b = a + 1; b < z; ++b) {
                auto ra = oracle::residues(ps[static_cast<std::size_t>(a)].marks(), n);
                for (int d : oracle::residues(ps[static_cast<std::size_t>(b)].marks(), n))
                    if (d != 0 && ra.count(d)) disjoint = false;
            }
        const bool base = are_non_overlapping(RulerBank(n, ps));
        CHECK(base == disjoint);
        for (int k = 0; k < 4; ++k) {
            std::shuffle(ps.begin(), ps.end(), rng);
            CHECK(are_non_overlapping(RulerBank(n, ps)) == base);
        }
    }
}

}  // TEST_SUITE
