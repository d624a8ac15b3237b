// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   acceptance            run all criteria
//   acceptance 3 7        run the listed criteria only

#include <boost/math/distributions/students_t.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cospec/cli.hpp"
#include "cospec/design.hpp"
#include "cospec/estimator.hpp"
#include "cospec/io.hpp"
#include "cospec/ruler.hpp"
#include "cospec/sim.hpp"
#include "cospec/system.hpp"
#include "oracles.hpp"

using namespace cospec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<std::vector<int>> raw(const RulerBank& bank) {
    std::vector<std::vector<int>> out;
    for (const auto& p : bank.patterns()) out.push_back(p.marks());
    return out;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

// 1
Outcome ruler_table() {
    std::ifstream in(cli::default_table_path());
    if (!in) return {false, "ruler table missing"};
    const auto rows = cli::read_reference_rows(in);
    const std::vector<int> expected_n{43, 49, 55, 61, 67, 73, 79, 85, 91, 97, 103, 109, 115};
    std::vector<int> seen;
    for (const auto& row : rows) {
        seen.push_back(row.N);
        RulerBank bank(row.N, row.patterns);
        const auto report = verify_bank(bank);
        bool golomb = true;
        for (bool g : report.per_pattern_golomb) golomb = golomb && g;
        // independent oracle: every nonzero residue produced exactly once over the whole row
        std::map<int, int> count;
        for (const auto& p : raw(bank))
            for (const auto& [d, c] : oracle::pair_multiplicity(p, row.N)) count[d] += c;
        bool exact_once = static_cast<int>(count.size()) == row.N - 1;
        for (const auto& [d, c] : count) exact_once = exact_once && c == 1;
        const bool ok = golomb && report.non_overlapping == std::optional<bool>(true) && report.covered &&
                        bank.size() == ceil_div(row.N - 1, 6) && exact_once && cli::check_reference_row(row).passed;
        if (!ok) return {false, fmt("row N=%d fails", row.N)};
    }
    if (seen != expected_n) return {false, fmt("expected 13 rows N=43..115, read %zu", rows.size())};
    return {true, "13 rows golomb, non-overlapping, covering, Z=ceil((N-1)/6)"};
}

// 2
Outcome rank_equivalence() {
    int cases = 0, covering = 0, mismatches = 0;
    auto check = [&](const std::vector<std::vector<int>>& bank_marks, int n) {
        std::vector<CosetPattern> ps;
        for (const auto& m : bank_marks) ps.emplace_back(n, m);
        const bool structural = check_full_column_rank(build_system(RulerBank(n, ps)));
        const bool numerical = oracle::full_column_rank(oracle::materialize(bank_marks, n));
        if (structural != numerical) ++mismatches;
        if (structural) ++covering;
        ++cases;
    };
    for (int n = 2; n <= 10; ++n)
        for (int m = 2; m <= std::min(3, n); ++m)
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if (std::popcount(mask) != m) continue;
                std::vector<int> marks;
                for (int i = 0; i < n; ++i)
                    if (mask & (1u << i)) marks.push_back(i);
                check({marks}, n);
            }
    const int single = cases;
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 500; ++t) {
        const int n = std::uniform_int_distribution<int>(3, 12)(rng);
        const int m = std::uniform_int_distribution<int>(2, 3)(rng);
        check({oracle::random_subset(rng, n, m), oracle::random_subset(rng, n, m)}, n);
    }
    return {mismatches == 0, fmt("%d single-group + 500 two-group banks, %d full rank, %d mismatches", single, covering,
                                 mismatches)};
}

// 3
Outcome exact_inversion() {
    std::mt19937_64 rng(303);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const int n = std::uniform_int_distribution<int>(2, 20)(rng);
        // random covering bank: greedy design, or random patterns redrawn until covering
        RulerBank bank = [&] {
            const int m = std::uniform_int_distribution<int>(2, std::max(2, std::min(n, 5)))(rng);
            if (n == 2) return RulerBank(2, {CosetPattern(2, {0, 1})});
            if (t % 2 == 0) return design_greedy(n, m).bank;
            const int z = std::uniform_int_distribution<int>(lower_bound_Z(n, m), lower_bound_Z(n, m) + 3)(rng);
            while (true) {
                std::vector<CosetPattern> ps;
                for (int i = 0; i < z; ++i) ps.emplace_back(n, oracle::random_subset(rng, n, m));
                RulerBank b(n, ps);
                if (oracle::bank_residues(raw(b), n).size() == static_cast<std::size_t>(n)) return b;
            }
        }();
        std::vector<double> spec(static_cast<std::size_t>(2 * n - 1));
        std::exponential_distribution<double> e(1.0);
        for (auto& v : spec) v = e(rng);
        const auto rx_stack = oracle::inverse_dft(spec);
        const int k = 2 * n - 1;
        auto rx = [&](int lag) { return rx_stack[static_cast<std::size_t>(((lag % k) + k) % k)]; };

        const auto sys = build_system(bank);
        std::vector<double> zero;
        for (const auto& p : bank.patterns())
            for (int m = 0; m < p.size(); ++m) zero.push_back(oracle::coset_correlation(p[m], p[m], 0, n, rx).real());
        std::vector<cplx> stacked;
        for (const auto& row : sys.rows()) {
            const auto& p = bank[static_cast<std::size_t>(row.group)];
            stacked.push_back(oracle::coset_correlation(p[row.m], p[row.m_prime], row.tag == LagTag::zero_plus ? 0 : 1, n, rx));
        }
        const auto out = power_spectrum(assemble_rx(reconstruct_r0(zero), reconstruct_r1(sys, stacked)));
        for (std::size_t b = 0; b < spec.size(); ++b) worst = std::max(worst, std::abs(out.values[b] - spec[b]));
    }
    return {worst < 1e-9, fmt("200 spectra, max abs error %.3g", worst)};
}

// 4
Outcome unbiasedness() {
    const int n = 8, p = 4, l = 512, runs = 2000;
    const CosetPattern pattern(n, {0, 1, 3});
    const bool covers = oracle::residues(pattern.marks(), n).size() == static_cast<std::size_t>(n);
    const std::vector<cplx> h{{0.8, 0.1}, {-0.4, 0.5}, {0.3, -0.2}, {0.1, 0.35}, {-0.15, -0.05}};
    auto rx = [&](int tau) {
        cplx acc{};
        for (int j = 0; j < 5; ++j)
            if (j - tau >= 0 && j - tau < 5) acc += h[static_cast<std::size_t>(j)] * std::conj(h[static_cast<std::size_t>(j - tau)]);
        return acc;
    };
    const int mm = pattern.size();
    const std::size_t stats = static_cast<std::size_t>(2 * mm * mm * 2);  // lag, m, m', re/im
    std::vector<double> sum(stats, 0.0), sq(stats, 0.0);
    std::mt19937_64 rng(404);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<cplx> w(static_cast<std::size_t>(n * l + 4));
    for (int run = 0; run < runs; ++run) {
        std::vector<CompressedSeries> comp;
        for (int s = 0; s < p; ++s) {
            for (auto& v : w) v = {g(rng), g(rng)};
            SensorBlockSeries blocks{0, s, n, l, std::vector<cplx>(static_cast<std::size_t>(n * l))};
            for (std::size_t t = 0; t < blocks.samples.size(); ++t)
                for (std::size_t j = 0; j < 5; ++j) blocks.samples[t] += h[j] * w[t + 4 - j];
            comp.push_back(compress(blocks, pattern));
        }
        for (int lag = 0; lag < 2; ++lag) {
            const auto r = sample_correlations(comp, lag);
            for (int a = 0; a < mm; ++a)
                for (int b = 0; b < mm; ++b) {
                    const cplx v = r.at(a, b);
                    const std::size_t i = static_cast<std::size_t>(((lag * mm + a) * mm + b) * 2);
                    sum[i] += v.real();
                    sq[i] += v.real() * v.real();
                    sum[i + 1] += v.imag();
                    sq[i + 1] += v.imag() * v.imag();
                }
        }
    }
    double worst_z = 0.0;
    int tested = 0, degenerate = 0;
    bool ok = true;
    for (int lag = 0; lag < 2; ++lag)
        for (int a = 0; a < mm; ++a)
            for (int b = 0; b < mm; ++b) {
                const cplx expected = rx(lag * n + pattern[a] - pattern[b]);
                for (int part = 0; part < 2; ++part) {
                    const std::size_t i = static_cast<std::size_t>(((lag * mm + a) * mm + b) * 2 + part);
                    const double mean = sum[i] / runs;
                    const double var = std::max(0.0, (sq[i] - runs * mean * mean) / (runs - 1));
                    const double se = std::sqrt(var / runs);
                    const double e = part ? expected.imag() : expected.real();
                    if (se == 0.0) {
                        // imaginary part of a lag-0 autocorrelation is identically zero
                        ++degenerate;
                        ok = ok && std::abs(mean - e) < 1e-12;
                        continue;
                    }
                    const double z = std::abs(mean - e) / se;
                    worst_z = std::max(worst_z, z);
                    ok = ok && z < 3.0;
                    ++tested;
                }
            }
    return {ok, fmt("%d runs, %d components within %.2f SE (max), %d exact-zero components; pattern {0,1,3} "
                    "covers N=8: %s",
                    runs, tested, worst_z, degenerate, covers ? "yes" : "no (lag 4 unmeasured)")};
}

// 5
Outcome m2_optimality() {
    for (int n = 3; n <= 200; ++n) {
        const auto r = design_m2(n);
        if (!r.covered || r.achieved_Z != ceil_div(n - 1, 2) ||
            oracle::bank_residues(raw(r.bank), n).size() != static_cast<std::size_t>(n))
            return {false, fmt("N=%d: Z=%d covered=%d", n, r.achieved_Z, int(r.covered))};
    }
    return {true, "3 <= N <= 200 all covered at Z=ceil((N-1)/2)"};
}

// 6
Outcome greedy_bound() {
    const auto r = design_greedy(103, 3);
    const bool covered = oracle::bank_residues(raw(r.bank), 103).size() == 103;
    return {covered && r.achieved_Z == 17 && r.bank.marks_per_pattern() == 3,
            fmt("N=103 M=3: Z=%d (bound %d), covered=%d", r.achieved_Z, r.lower_bound, int(covered))};
}

// 7
Outcome nmse_trends() {
    auto loaded = io::load_sim_config(cli::default_table_path().parent_path() / "table1.json");
    sim::SimConfig config = loaded.config;
    config.runs = 100;
    const sim::SweepGrid grid{{3, 11, 19}, {1, 4}, {64, 256}};
    const auto outcome = sim::run_sweep(config, grid);
    if (!outcome.skipped.empty()) return {false, "skipped grid point: " + outcome.skipped.front()};
    auto at = [&](int m, int p, int l) -> const sim::NmseResult& {
        for (const auto& r : outcome.results)
            if (r.M == m && r.P == p && r.L == l) return r;
        throw std::runtime_error("missing grid point");
    };
    const boost::math::students_t t_dist(config.runs - 1);
    const double critical = boost::math::quantile(t_dist, 0.95);
    int tests = 0, failures = 0;
    double weakest = 1e300;
    std::string first_failure;
    auto paired = [&](const sim::NmseResult& worse, const sim::NmseResult& better) {
        const std::size_t n = worse.per_run.size();
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += worse.per_run[i] - better.per_run[i];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = worse.per_run[i] - better.per_run[i] - mean;
            ss += d * d;
        }
        const double t = mean / std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
        weakest = std::min(weakest, t);
        ++tests;
        if (!(t > critical)) {
            ++failures;
            if (first_failure.empty())
                first_failure = fmt(" first: (M=%d,P=%d,L=%d)->(M=%d,P=%d,L=%d) t=%.2f", worse.M, worse.P, worse.L,
                                    better.M, better.P, better.L, t);
        }
    };
    for (int p : grid.P)
        for (int l : grid.L) {
            paired(at(3, p, l), at(11, p, l));
            paired(at(11, p, l), at(19, p, l));
        }
    for (int m : grid.M)
        for (int l : grid.L) paired(at(m, 1, l), at(m, 4, l));
    for (int m : grid.M)
        for (int p : grid.P) paired(at(m, p, 64), at(m, p, 256));
    std::string table;
    for (const auto& r : outcome.results) table += fmt(" %d/%d/%d=%.4f", r.M, r.P, r.L, r.nmse);
    return {failures == 0, fmt("%d paired one-sided t-tests (crit %.3f), weakest t=%.2f, %d failed;", tests, critical,
                               weakest, failures) +
                               first_failure + " NMSE M/P/L:" + table};
}

// 8
Outcome noiseless() {
    double worst = 0.0;
    int banks = 0;
    std::ifstream in(cli::default_table_path());
    auto check = [&](const RulerBank& bank, const sim::SimConfig& c) {
        const auto rx = sim::analytic_autocorrelation(c);
        const auto base = sim::exact_spectrum(RulerBank(c.N, {CosetPattern::full(c.N)}), rx);
        worst = std::max(worst, sim::nmse(sim::exact_spectrum(bank, rx), base));
        ++banks;
    };
    sim::SimConfig c;
    c.users = sim::reference_users();
    for (const auto& row : cli::read_reference_rows(in)) {
        c.N = row.N;
        check(RulerBank(row.N, row.patterns), c);
    }
    c.N = 103;
    for (int m : {3, 11, 19}) check(*sim::bank_for(c, m), c);
    check(design_m2(103).bank, c);
    std::mt19937_64 rng(808);
    for (int t = 0; t < 50; ++t) {
        c.N = std::uniform_int_distribution<int>(8, 60)(rng);
        const int m = std::uniform_int_distribution<int>(2, 6)(rng);
        check(design_greedy(c.N, std::min(m, c.N)).bank, c);
    }
    c.N = 103;
    const auto sweep = sim::run_sweep(c, {{3, 11, 19}, {1, 4}, {64, 256}}, {.exact = true});
    for (const auto& r : sweep.results) worst = std::max(worst, r.nmse);
    return {worst < 1e-9 && sweep.skipped.empty(), fmt("%d banks + exact sweep, max NMSE %.3g", banks, worst)};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double time_limit;  // seconds, 0 for none
    };
    const std::vector<Criterion> criteria{
        {"ruler table validation", ruler_table, 1.0},
        {"structural vs numerical rank", rank_equivalence, 30.0},
        {"exact inversion", exact_inversion, 10.0},
        {"estimator unbiasedness", unbiasedness, 0.0},
        {"M=2 optimality", m2_optimality, 1.0},
        {"greedy bound at N=103", greedy_bound, 0.0},
        {"NMSE trends over M, P, L", nmse_trends, 0.0},
        {"noiseless exact-correlation NMSE", noiseless, 5.0},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].time_limit > 0 && secs > criteria[i].time_limit) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s limit]", criteria[i].time_limit);
        }
        std::printf("%s criterion %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed ? 1 : 0;
}
