#include "cospec/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cospec/design.hpp"
#include "cospec/error.hpp"
#include "cospec/estimator.hpp"
#include "cospec/io.hpp"
#include "cospec/sim.hpp"

#ifndef COSPEC_DATA_DIR
#define COSPEC_DATA_DIR "data"
#endif

namespace cospec::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    int n = 0;
    int m = 0;
    std::optional<int> z;
    std::optional<int> p;
    std::optional<int> l;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::string bank;
    std::string config;
    std::string samples;
    std::string out;
    std::string strategy = "greedy";
    std::vector<std::string> grid;
    bool exact = false;
};

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

fs::path output_dir(const Options& o) {
    fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) fail("io", "cannot create output directory " + dir.string());
    return dir;
}

void write_file(const fs::path& path, auto&& writer) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail("io", "cannot write " + path.string());
    writer(f);
    if (!f) fail("io", "write failed for " + path.string());
}

std::string commented(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out += "# " + line + "\n";
    return out;
}

int run_design(const Options& o, std::ostream& out) {
    DesignReport report = [&] {
        if (o.strategy == "m2") {
            if (o.m != 2) fail("usage", "--strategy m2 requires --m 2");
            return design_m2(o.n);
        }
        if (o.strategy != "greedy") fail("usage", "unknown strategy '" + o.strategy + "' (m2|greedy)");
        return design_greedy(o.n, o.m, {.min_patterns = o.z.value_or(0)});
    }();
    const std::string bank_text = io::format_bank(report.bank);
    if (!o.out.empty()) io::write_text(o.out, bank_text);
    out << bank_text << commented(io::format_report(report));
    return report.covered ? 0 : 1;
}

int run_verify(const Options& o, std::ostream& out, std::ostream& err) {
    const DesignReport report = verify_bank(io::read_bank_file(o.bank));
    out << io::format_report(report);
    if (!report.covered) {
        err << "ERR:uncovered: missing lags " << join(report.missing) << '\n';
        return 1;
    }
    return 0;
}

int run_estimate(const Options& o, std::ostream& out) {
    if (!o.l) fail("usage", "estimate needs --l (or --blocks)");
    const RulerBank bank = io::read_bank_file(o.bank);
    const auto sequences = io::read_samples_dir(o.samples);
    const int k = static_cast<int>(sequences.size());
    const int p = o.p.value_or(k / bank.size());
    if (p < 1 || p * bank.size() != k)
        fail("dimension", std::to_string(k) + " sensors cannot form " + std::to_string(bank.size()) + " groups of P=" +
                              std::to_string(p));
    std::vector<GroupCorrelations> groups;
    for (int z = 0; z < bank.size(); ++z) {
        std::vector<SensorBlockSeries> sensors;
        for (int q = 0; q < p; ++q) {
            const int id = z * p + q;
            sensors.push_back(SensorBlockSeries::from_sequence(z, id, bank.period(), *o.l, sequences[static_cast<std::size_t>(id)]));
        }
        groups.push_back(estimate_group(sensors, bank[static_cast<std::size_t>(z)]));
    }
    const SystemMatrix sys = build_system(bank);
    const AutocorrelationVector rx = fuse(sys, groups);
    const PowerSpectrum spectrum = power_spectrum(rx);

    const fs::path dir = output_dir(o);
    write_file(dir / "group_correlations.csv", [&](std::ostream& f) { io::write_group_correlations_csv(f, groups, bank); });
    write_file(dir / "autocorrelation.csv", [&](std::ostream& f) { io::write_autocorrelation_csv(f, rx); });
    write_file(dir / "spectrum.csv", [&](std::ostream& f) { io::write_spectrum_csv(f, spectrum); });
    out << "sensors=" << k << " groups=" << bank.size() << " P=" << p << " L=" << *o.l << '\n';
    const auto negative = spectrum.negative_bins();
    out << "negative_bins=" << negative.size() << '\n';
    out << "wrote " << (dir / "spectrum.csv").string() << '\n';
    return 0;
}

void apply_overrides(const Options& o, sim::SimConfig& c) {
    if (o.n > 0) c.N = o.n;
    if (o.m > 0) c.M = o.m;
    if (o.z) c.Z = *o.z;
    if (o.p) c.P = *o.p;
    if (o.l) c.L = *o.l;
    if (o.seed) c.rng_seed = *o.seed;
    if (o.runs) c.runs = *o.runs;
    if (!o.bank.empty()) c.bank = io::read_bank_file(o.bank);
    if (c.bank && (c.bank->period() != c.N || c.bank->size() != c.Z || c.bank->marks_per_pattern() != c.M)) {
        if (!o.bank.empty()) fail("domain", "bank does not match N, M and Z");
        c.bank.reset();
    }
    c.validate();
}

void apply_grid(const std::vector<std::string>& specs, sim::SweepGrid& grid) {
    for (const auto& spec : specs) {
        std::string_view rest(spec);
        while (!rest.empty()) {
            const auto semi = rest.find(';');
            const std::string_view item = rest.substr(0, semi);
            rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) fail("usage", "grid entries look like m=3,7,11");
            std::string axis(item.substr(0, eq));
            std::transform(axis.begin(), axis.end(), axis.begin(), [](unsigned char c) { return std::tolower(c); });
            const auto values = io::parse_int_list(item.substr(eq + 1));
            if (axis == "m") grid.M = values;
            else if (axis == "p") grid.P = values;
            else if (axis == "l") grid.L = values;
            else fail("usage", "unknown grid axis '" + axis + "' (m, p or l)");
        }
    }
}

int report_sweep(const sim::SweepOutcome& outcome, const fs::path& dir, std::ostream& out, std::ostream& err) {
    for (const auto& s : outcome.skipped) err << "WARN:skipped: " << s << '\n';
    write_file(dir / "nmse_results.csv", [&](std::ostream& f) { io::write_nmse_csv(f, outcome.results); });
    io::write_nmse_csv(out, outcome.results);
    return outcome.results.empty() ? 1 : 0;
}

int run_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    auto loaded = io::load_sim_config(o.config);
    apply_overrides(o, loaded.config);
    const auto& c = loaded.config;
    const auto bank = sim::bank_for(c, c.M);
    if (!bank) fail("domain", "no covering bank with M=" + std::to_string(c.M) + " and Z=" + std::to_string(c.Z));
    const fs::path dir = output_dir(o);
    sim::SimConfig with_bank = c;
    with_bank.bank = *bank;
    const auto outcome = sim::run_sweep(with_bank, {{c.M}, {c.P}, {c.L}}, {.exact = o.exact});
    if (!o.exact) {
        const auto spectra = sim::simulate_run(c, *bank, 0);
        write_file(dir / "spectrum_estimate_run0.csv", [&](std::ostream& f) { io::write_spectrum_csv(f, spectra.estimate); });
        write_file(dir / "spectrum_baseline_run0.csv", [&](std::ostream& f) { io::write_spectrum_csv(f, spectra.baseline); });
    }
    io::write_text(dir / "bank.txt", io::format_bank(*bank));
    return report_sweep(outcome, dir, out, err);
}

int run_sweep_cmd(const Options& o, std::ostream& out, std::ostream& err) {
    auto loaded = io::load_sim_config(o.config);
    apply_overrides(o, loaded.config);
    apply_grid(o.grid, loaded.grid);
    const fs::path dir = output_dir(o);
    return report_sweep(sim::run_sweep(loaded.config, loaded.grid, {.exact = o.exact}), dir, out, err);
}

int run_table2(const Options& o, std::ostream& out, std::ostream& err) {
    const fs::path path = o.bank.empty() ? default_table_path() : fs::path(o.bank);
    std::ifstream in(path);
    if (!in) fail("io", "cannot open ruler table " + path.string());
    const auto rows = read_reference_rows(in);
    if (rows.empty()) fail("parse", "ruler table " + path.string() + " has no rows");
    std::optional<RowCheck> first_failure;
    for (const auto& row : rows) {
        const RowCheck check = check_reference_row(row);
        out << "N=" << check.N << " Z=" << check.Z << " expected_Z=" << check.expected_Z << ' '
            << (check.passed ? "pass" : "FAIL") << (check.passed ? "" : " " + check.message) << '\n';
        if (!check.passed && !first_failure) first_failure = check;
    }
    if (first_failure) {
        err << "ERR:table2: N=" << first_failure->N << " z="
            << (first_failure->first_failing_pattern >= 0 ? std::to_string(first_failure->first_failing_pattern) : "-")
            << ": " << first_failure->message << '\n';
        return 1;
    }
    out << "all " << rows.size() << " rows pass\n";
    return 0;
}

}  // namespace

std::vector<ReferenceRow> read_reference_rows(std::istream& in) {
    std::vector<ReferenceRow> rows;
    std::string line;
    int remaining = 0;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (line.compare(first, 2, "Z=") == 0) {
            if (remaining > 0) fail("parse", "row N=" + std::to_string(rows.back().N) + " ends early");
            std::istringstream hdr(line.substr(first));
            ReferenceRow row;
            int z = 0;
            std::string tok;
            while (hdr >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) fail("parse", "bad header token '" + tok + "'");
                const int v = io::parse_int_list(tok.substr(eq + 1)).at(0);
                const std::string key = tok.substr(0, eq);
                if (key == "Z") z = v;
                else if (key == "M") row.M = v;
                else if (key == "N") row.N = v;
            }
            if (z < 1 || row.M < 1 || row.N < 2) fail("parse", "bad header '" + line + "'");
            remaining = z;
            rows.push_back(std::move(row));
            continue;
        }
        if (rows.empty() || remaining == 0) fail("parse", "pattern line outside a row: '" + line + "'");
        rows.back().patterns.push_back(io::parse_pattern(line));
        --remaining;
    }
    if (remaining > 0) fail("parse", "last row ends early");
    return rows;
}

RowCheck check_reference_row(const ReferenceRow& row) {
    RowCheck c;
    c.N = row.N;
    c.Z = static_cast<int>(row.patterns.size());
    c.expected_Z = lower_bound_Z(row.N, row.M);
    std::ostringstream msg;
    std::vector<int> owner(static_cast<std::size_t>(row.N), -1);
    DifferenceSet all(row.N);
    for (int z = 0; z < c.Z; ++z) {
        const auto& p = row.patterns[static_cast<std::size_t>(z)];
        bool bad = false;
        if (p.period() != row.N || p.size() != row.M) {
            msg << "pattern " << z << " has N=" << p.period() << " and " << p.size() << " marks, expected N=" << row.N
                << " and M=" << row.M << "; ";
            bad = true;
        }
        if (!is_circular_golomb(p)) {
            c.non_golomb.push_back(z);
            bad = true;
        }
        const auto omega = difference_set(p);
        bool overlaps = false;
        for (int d = 0; d < std::min(row.N, p.period()); ++d) {
            if (!omega.contains(d)) continue;
            all.insert(d);
            if (d == 0) continue;
            auto& o = owner[static_cast<std::size_t>(d)];
            if (o >= 0 && o != z) overlaps = true;
            else o = z;
        }
        if (overlaps) {
            c.overlapping.push_back(z);
            bad = true;
        }
        if (bad && c.first_failing_pattern < 0) c.first_failing_pattern = z;
    }
    for (int d = 0; d < row.N; ++d)
        if (!all.contains(d)) c.missing.push_back(d);
    if (!c.non_golomb.empty()) msg << "not circular Golomb: patterns " << join(c.non_golomb) << "; ";
    if (!c.overlapping.empty()) msg << "overlapping: patterns " << join(c.overlapping) << "; ";
    if (!c.missing.empty()) msg << "missing distances " << join(c.missing) << "; ";
    if (c.Z != c.expected_Z) msg << "Z=" << c.Z << " differs from lower bound " << c.expected_Z << "; ";
    c.message = msg.str();
    if (c.message.size() >= 2) c.message.resize(c.message.size() - 2);
    c.passed = c.message.empty();
    return c;
}

fs::path default_table_path() { return fs::path(COSPEC_DATA_DIR) / "table2.bank"; }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-coset ruler design and cooperative compressive power spectrum estimation", "coset-spectrum"};
    app.require_subcommand(1, 1);
    Options o;

    auto* design = app.add_subcommand("design", "Design a ruler bank covering every lag");
    design->add_option("--n", o.n, "Coset count N (block length)")->required();
    design->add_option("--m", o.m, "Marks per pattern M")->required();
    design->add_option("--strategy", o.strategy, "m2 (analytic, M=2) or greedy")->check(CLI::IsMember({"m2", "greedy"}));
    design->add_option("--z", o.z, "Seed at least this many patterns (greedy)");
    design->add_option("--out", o.out, "Also write the bank to this file");

    auto* verify = app.add_subcommand("verify", "Check coverage, Golomb and non-overlap of a bank file");
    verify->add_option("--bank", o.bank, "Bank file")->required();

    auto* estimate = app.add_subcommand("estimate", "Estimate the power spectrum from sensor sample CSVs");
    estimate->add_option("--bank", o.bank, "Bank file")->required();
    estimate->add_option("--samples", o.samples, "Directory of sensor_id,sample_index,real,imag CSV files")->required();
    estimate->add_option("--l,--blocks", o.l, "Blocks L per sensor");
    estimate->add_option("--p", o.p, "Sensors per group (default: sensors / Z)");
    estimate->add_option("--out", o.out, "Output directory");

    auto add_sim_flags = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON simulation config")->required();
        sub->add_option("--n", o.n, "Override N");
        sub->add_option("--m", o.m, "Override M");
        sub->add_option("--z", o.z, "Override Z");
        sub->add_option("--p", o.p, "Override sensors per group P");
        sub->add_option("--l", o.l, "Override blocks per sensor L");
        sub->add_option("--seed", o.seed, "Override RNG seed");
        sub->add_option("--runs", o.runs, "Override Monte-Carlo runs");
        sub->add_option("--bank", o.bank, "Use this bank instead of designing one");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_flag("--exact", o.exact, "Use analytic correlations instead of samples");
    };
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo NMSE at one (M, P, L) point");
    add_sim_flags(simulate);
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo NMSE over a grid of M, P, L");
    add_sim_flags(sweep);
    sweep->add_option("--grid", o.grid, "Axis values, e.g. m=3,11,19 (repeatable or ';'-separated)");

    auto* table2 = app.add_subcommand("table2-check", "Validate the bundled table of non-overlapping circular Golomb rulers");
    table2->add_option("--bank", o.bank, "Ruler table file (default: bundled)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "ERR:usage: " << e.what() << '\n';
        err << app.help();
        return 2;
    }

    try {
        if (*design) return run_design(o, out);
        if (*verify) return run_verify(o, out, err);
        if (*estimate) return run_estimate(o, out);
        if (*simulate) return run_simulate(o, out, err);
        if (*sweep) return run_sweep_cmd(o, out, err);
        if (*table2) return run_table2(o, out, err);
    } catch (const Error& e) {
        err << "ERR:" << e.code() << ": " << e.what() << '\n';
        return e.code() == "usage" ? 2 : 1;
    } catch (const std::exception& e) {
        err << "ERR:internal: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace cospec::cli
