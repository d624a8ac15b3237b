#include "cospec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cospec/error.hpp"

namespace cospec::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view s, std::string_view what) {
    s = trim(s);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail("parse", "expected an integer for " + std::string(what) + ", got '" + std::string(s) + "'");
    return value;
}

double parse_double(std::string_view s, std::string_view what) {
    s = trim(s);
    const std::string copy(s);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size())
        fail("parse", "expected a number for " + std::string(what) + ", got '" + copy + "'");
    return v;
}

// Value after "key=" inside a line; the key must be present.
std::string_view field(std::string_view line, std::string_view key) {
    const std::string needle = std::string(key) + "=";
    std::size_t pos = 0;
    while ((pos = line.find(needle, pos)) != std::string_view::npos) {
        if (pos == 0 || line[pos - 1] == ' ' || line[pos - 1] == ';' || line[pos - 1] == '\t') break;
        ++pos;
    }
    if (pos == std::string_view::npos) fail("parse", "missing '" + needle + "' in '" + std::string(line) + "'");
    auto rest = line.substr(pos + needle.size());
    const auto stop = rest.find_first_of("; \t");
    return stop == std::string_view::npos ? rest : rest.substr(0, stop);
}

bool skip_line(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_complex_rows(std::ostream& out, const std::vector<cplx>& values, auto label) {
    out << "index,lag_or_bin,real,imag\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << label(static_cast<int>(i)) << ',' << num(values[i].real()) << ',' << num(values[i].imag()) << '\n';
}

std::vector<int> json_int_list(const nlohmann::json& j, std::string_view key) {
    if (j.is_number_integer()) return {j.get<int>()};
    if (j.is_array()) return j.get<std::vector<int>>();
    if (j.is_string()) return parse_int_list(j.get<std::string>());
    fail("parse", "grid axis '" + std::string(key) + "' must be an integer list");
}

double json_angle(const nlohmann::json& j, std::string_view key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_angle(j.get<std::string>());
    fail("parse", "'" + std::string(key) + "' must be a number or an angle string");
}

}  // namespace

std::string format_pattern(const CosetPattern& pattern) {
    std::string out = "N=" + std::to_string(pattern.period()) + "; marks=";
    for (std::size_t i = 0; i < pattern.marks().size(); ++i) {
        if (i) out += ',';
        out += std::to_string(pattern.marks()[i]);
    }
    return out;
}

CosetPattern parse_pattern(std::string_view line) {
    const int n = parse_int(field(line, "N"), "N");
    const auto at = line.find("marks=");
    if (at == std::string_view::npos) fail("parse", "missing 'marks=' in '" + std::string(line) + "'");
    return CosetPattern(n, parse_int_list(line.substr(at + 6)));
}

std::string format_bank(const RulerBank& bank) {
    std::string out = "Z=" + std::to_string(bank.size()) + " M=" + std::to_string(bank.marks_per_pattern()) +
                      " N=" + std::to_string(bank.period()) + "\n";
    for (const auto& p : bank.patterns()) out += format_pattern(p) + "\n";
    return out;
}

std::vector<RulerBank> parse_banks(std::istream& in) {
    std::vector<RulerBank> banks;
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!skip_line(line)) return true;
        }
        return false;
    };
    while (next_line()) {
        const std::string header = line;
        if (trim(header).rfind("Z=", 0) != 0)
            fail("parse", "line " + std::to_string(line_no) + ": expected bank header 'Z=<int> M=<int> N=<int>'");
        const int z = parse_int(field(header, "Z"), "Z");
        const int m = parse_int(field(header, "M"), "M");
        const int n = parse_int(field(header, "N"), "N");
        if (z < 1) fail("parse", "line " + std::to_string(line_no) + ": Z must be positive");
        std::vector<CosetPattern> patterns;
        for (int i = 0; i < z; ++i) {
            if (!next_line()) fail("parse", "bank ends after " + std::to_string(i) + " of " + std::to_string(z) + " patterns");
            try {
                patterns.push_back(parse_pattern(line));
            } catch (const Error& e) {
                fail(e.code().c_str(), "line " + std::to_string(line_no) + ": " + e.what());
            }
            if (patterns.back().period() != n)
                fail("parse", "line " + std::to_string(line_no) + ": pattern N differs from header N=" + std::to_string(n));
            if (patterns.back().size() != m)
                fail("parse", "line " + std::to_string(line_no) + ": pattern has " +
                                  std::to_string(patterns.back().size()) + " marks, header says M=" + std::to_string(m));
        }
        banks.emplace_back(n, std::move(patterns));
    }
    return banks;
}

RulerBank parse_bank(std::istream& in) {
    auto banks = parse_banks(in);
    if (banks.size() != 1) fail("parse", "expected exactly one bank, found " + std::to_string(banks.size()));
    return std::move(banks.front());
}

RulerBank read_bank_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("io", "cannot open bank file " + path.string());
    return parse_bank(in);
}

std::vector<RulerBank> read_bank_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("io", "cannot open bank file " + path.string());
    return parse_banks(in);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io", "cannot write " + path.string());
    out << text;
    if (!out) fail("io", "write failed for " + path.string());
}

std::string format_report(const DesignReport& r) {
    std::ostringstream out;
    const int golomb = static_cast<int>(std::count(r.per_pattern_golomb.begin(), r.per_pattern_golomb.end(), true));
    out << "N=" << r.bank.period() << " M=" << r.bank.marks_per_pattern() << " Z=" << r.achieved_Z
        << " lower_bound=" << r.lower_bound << '\n';
    out << "covered=" << (r.covered ? "yes" : "no") << '\n';
    out << "non_overlapping=" << (r.non_overlapping ? (*r.non_overlapping ? "yes" : "no") : "n/a") << '\n';
    out << "golomb=" << golomb << '/' << r.per_pattern_golomb.size() << " [";
    for (std::size_t z = 0; z < r.per_pattern_golomb.size(); ++z) out << (z ? "," : "") << (r.per_pattern_golomb[z] ? 1 : 0);
    out << "]\n";
    out << "missing=";
    for (std::size_t i = 0; i < r.missing.size(); ++i) out << (i ? "," : "") << r.missing[i];
    out << '\n';
    if (!r.greedy_trace.empty()) out << "greedy_steps=" << r.greedy_trace.size() << '\n';
    return out.str();
}

void write_autocorrelation_csv(std::ostream& out, const AutocorrelationVector& rx) {
    write_complex_rows(out, rx.values, [&](int i) { return AutocorrelationVector::lag_at(i, rx.period); });
}

void write_spectrum_csv(std::ostream& out, const PowerSpectrum& spectrum) {
    write_complex_rows(out, spectrum.values, [](int i) { return i; });
}

void write_group_correlations_csv(std::ostream& out, const std::vector<GroupCorrelations>& groups,
                                  const RulerBank& bank) {
    out << "group,kind,m,m_prime,lag,real,imag\n";
    for (const auto& g : groups) {
        const auto& marks = bank[static_cast<std::size_t>(g.group)].marks();
        const int mm = static_cast<int>(marks.size());
        for (int m = 0; m < mm; ++m)
            out << g.group << ",zero," << m << ',' << m << ",0," << num(g.zero_lag[static_cast<std::size_t>(m)]) << ",0\n";
        std::size_t i = 0;
        for (int mp = 0; mp + 1 < mm; ++mp)
            for (int m = mp + 1; m < mm; ++m, ++i)
                out << g.group << ",plus," << m << ',' << mp << ",0," << num(g.plus_zero_lag[i].real()) << ','
                    << num(g.plus_zero_lag[i].imag()) << '\n';
        i = 0;
        for (int m = 0; m + 1 < mm; ++m)
            for (int mp = m + 1; mp < mm; ++mp, ++i)
                out << g.group << ",minus," << m << ',' << mp << ",1," << num(g.minus_lag_one[i].real()) << ','
                    << num(g.minus_lag_one[i].imag()) << '\n';
    }
}

void write_nmse_csv(std::ostream& out, const std::vector<sim::NmseResult>& results) {
    out << "M,P,L,runs,nmse\n";
    for (const auto& r : results) out << r.M << ',' << r.P << ',' << r.L << ',' << r.runs << ',' << num(r.nmse) << '\n';
}

std::vector<std::vector<cplx>> read_samples_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) fail("io", "samples directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail("io", "no .csv sample files in " + dir.string());

    std::map<int, std::map<long long, cplx>> by_sensor;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) fail("io", "cannot open " + file.string());
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (skip_line(line)) continue;
            if (line_no == 1 && line.find("sensor_id") != std::string::npos) continue;
            std::vector<std::string_view> cols;
            std::string_view rest(line);
            for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
                cols.push_back(rest.substr(0, pos));
            cols.push_back(rest);
            if (cols.size() != 4)
                fail("parse", file.filename().string() + ":" + std::to_string(line_no) + ": expected 4 columns");
            const int sensor = parse_int(cols[0], "sensor_id");
            const long long index = parse_int(cols[1], "sample_index");
            if (sensor < 0 || index < 0) fail("parse", file.filename().string() + ":" + std::to_string(line_no) + ": negative id");
            by_sensor[sensor][index] = cplx(parse_double(cols[2], "real"), parse_double(cols[3], "imag"));
        }
    }
    std::vector<std::vector<cplx>> out;
    int expected = 0;
    for (auto& [sensor, samples] : by_sensor) {
        if (sensor != expected) fail("parse", "sensor ids must be 0..K-1; missing " + std::to_string(expected));
        ++expected;
        std::vector<cplx> seq;
        seq.reserve(samples.size());
        long long next = 0;
        for (const auto& [index, value] : samples) {
            if (index != next) fail("parse", "sensor " + std::to_string(sensor) + " misses sample " + std::to_string(next));
            seq.push_back(value);
            ++next;
        }
        out.push_back(std::move(seq));
    }
    return out;
}

LoadedConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("io", "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sim_config(buf.str(), path.parent_path());
}

LoadedConfig parse_sim_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        fail("parse", std::string("config is not valid JSON: ") + e.what());
    }
    LoadedConfig out;
    auto& c = out.config;
    try {
        c.N = j.value("N", c.N);
        c.M = j.value("M", c.M);
        c.Z = j.value("Z", c.Z);
        c.P = j.value("P", c.P);
        c.L = j.value("L", c.L);
        c.noise_power_dbm = j.value("noise_power_dbm", c.noise_power_dbm);
        c.sensor_offset_samples = j.value("sensor_offset_samples", c.sensor_offset_samples);
        c.rng_seed = j.value("seed", c.rng_seed);
        c.runs = j.value("runs", c.runs);
        if (j.contains("users")) {
            for (const auto& u : j.at("users")) {
                c.users.push_back({json_angle(u.at("band_lo"), "band_lo"), json_angle(u.at("band_hi"), "band_hi"),
                                   u.at("power_dbm").get<double>(), u.value("path_loss_db", 0.0)});
            }
        }
        if (j.contains("bank")) {
            std::filesystem::path bank_path = j.at("bank").get<std::string>();
            if (bank_path.is_relative()) bank_path = base_dir / bank_path;
            c.bank = read_bank_file(bank_path);
        }
        out.grid = {{c.M}, {c.P}, {c.L}};
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("M")) out.grid.M = json_int_list(g.at("M"), "M");
            if (g.contains("P")) out.grid.P = json_int_list(g.at("P"), "P");
            if (g.contains("L")) out.grid.L = json_int_list(g.at("L"), "L");
        }
    } catch (const nlohmann::json::exception& e) {
        fail("parse", std::string("bad config value: ") + e.what());
    }
    c.validate();
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    text = trim(text);
    if (text.empty()) fail("parse", "empty integer list");
    for (std::size_t pos; (pos = text.find(',')) != std::string_view::npos; text.remove_prefix(pos + 1))
        out.push_back(parse_int(text.substr(0, pos), "list entry"));
    out.push_back(parse_int(text, "list entry"));
    return out;
}

double parse_angle(std::string_view text) {
    const std::string_view original = text;
    text = trim(text);
    const auto pi_pos = text.find("pi");
    if (pi_pos == std::string_view::npos) return parse_double(text, "angle");
    auto coef_text = trim(text.substr(0, pi_pos));
    if (!coef_text.empty() && coef_text.back() == '*') coef_text = trim(coef_text.substr(0, coef_text.size() - 1));
    double coef = 1.0;
    if (coef_text == "-") coef = -1.0;
    else if (coef_text == "+") coef = 1.0;
    else if (!coef_text.empty()) coef = parse_double(coef_text, "angle coefficient");
    auto rest = trim(text.substr(pi_pos + 2));
    double denom = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') fail("parse", "cannot read angle '" + std::string(original) + "'");
        denom = parse_double(rest.substr(1), "angle denominator");
        if (denom == 0.0) fail("parse", "zero denominator in angle '" + std::string(original) + "'");
    }
    return coef * std::numbers::pi / denom;
}

}  // namespace cospec::io
