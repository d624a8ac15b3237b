#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cospec/design.hpp"
#include "cospec/estimator.hpp"
#include "cospec/ruler.hpp"
#include "cospec/sim.hpp"
#include "cospec/system.hpp"

namespace cospec::io {

// Text formats
//   pattern:  N=<int>; marks=<a>,<b>,...
//   bank:     Z=<int> M=<int> N=<int>   followed by Z pattern lines
// Blank lines and lines starting with '#' are ignored when reading; a file
// may hold several banks back to back.

std::string format_pattern(const CosetPattern& pattern);
CosetPattern parse_pattern(std::string_view line);

std::string format_bank(const RulerBank& bank);
std::vector<RulerBank> parse_banks(std::istream& in);
RulerBank parse_bank(std::istream& in);  // exactly one bank

RulerBank read_bank_file(const std::filesystem::path& path);
std::vector<RulerBank> read_bank_list(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

std::string format_report(const DesignReport& report);

// CSV: index,lag_or_bin,real,imag
void write_autocorrelation_csv(std::ostream& out, const AutocorrelationVector& rx);
void write_spectrum_csv(std::ostream& out, const PowerSpectrum& spectrum);
// CSV: group,kind,m,m_prime,lag,real,imag (kind: zero, plus, minus)
void write_group_correlations_csv(std::ostream& out, const std::vector<GroupCorrelations>& groups,
                                  const RulerBank& bank);
// CSV: M,P,L,runs,nmse
void write_nmse_csv(std::ostream& out, const std::vector<sim::NmseResult>& results);

/// Reads every *.csv under `dir` (columns sensor_id,sample_index,real,imag,
/// header optional) into one dense sequence per sensor id, ids 0..K-1.
std::vector<std::vector<cplx>> read_samples_dir(const std::filesystem::path& dir);

/// JSON simulation config. Keys: N, M, Z, P, L, noise_power_dbm,
/// sensor_offset_samples, seed, runs, users [{band_lo, band_hi, power_dbm,
/// path_loss_db}], optional bank (path relative to the config file) and
/// optional grid {M: [...], P: [...], L: [...]}. Band edges are numbers in
/// rad/sample or strings such as "-8pi/9".
struct LoadedConfig {
    sim::SimConfig config;
    sim::SweepGrid grid;  // axes default to the config's own M, P, L
};

LoadedConfig load_sim_config(const std::filesystem::path& path);
LoadedConfig parse_sim_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Parses "3,7,11" into integers.
std::vector<int> parse_int_list(std::string_view text);

/// Parses "-8pi/9", "pi", "0.25", "3*pi/9".
double parse_angle(std::string_view text);

}  // namespace cospec::io
