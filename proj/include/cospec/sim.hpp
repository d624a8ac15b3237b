#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cospec/estimator.hpp"
#include "cospec/ruler.hpp"
#include "cospec/system.hpp"

namespace cospec::sim {

/// A primary user occupying [band_lo, band_hi] rad/sample.
struct UserBand {
    double band_lo = 0.0;
    double band_hi = 0.0;
    double power_density_dbm = 0.0;  // per rad/sample
    double path_loss_db = 0.0;       // shadowing included, shared by all sensors
};

struct SimConfig {
    int N = 103;
    int M = 3;
    int Z = 17;
    int P = 1;
    int L = 64;
    std::optional<RulerBank> bank;  // designed on demand when absent
    std::vector<UserBand> users;
    double noise_power_dbm = 16.0;
    int sensor_offset_samples = 14;
    std::uint64_t rng_seed = 1;
    int runs = 100;

    int sensors() const { return Z * P; }
    void validate() const;
};

struct NmseResult {
    int M = 0;
    int P = 0;
    int L = 0;
    int runs = 0;
    double nmse = 0.0;
    std::vector<double> per_run;
    std::string baseline_id;
};

double dbm_to_linear(double dbm);

/// Deterministic child seed for (seed, a, b, c).
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Hamming-windowed complex bandpass FIR with `taps` coefficients, unit gain at
/// the band centre.
std::vector<cplx> bandpass_taps(double band_lo, double band_hi, int taps);

/// One sequence of `length` samples per user: circular complex Gaussian noise
/// of variance 2*pi*density through the user's N-tap bandpass filter, after a
/// burn-in of N filtered samples is dropped. Output variance is 2*pi*density
/// times the filter energy sum |h|^2, close to density times bandwidth.
std::vector<std::vector<cplx>> generate_user_signals(std::span<const UserBand> users, int taps, std::size_t length,
                                                     std::uint64_t seed);

struct ChannelOptions {
    bool unit_fading = false;  // every fading coefficient forced to 1
    bool noise = true;
};

/// L*N samples seen by sensor k = zP + p: user u scaled by a CN(0, path loss)
/// coefficient drawn for (u, k), summed, delayed by k * sensor_offset_samples
/// relative to sensor 0, plus white noise at the configured power. The user
/// signals must hold (sensors()-1)*offset + L*N samples.
std::vector<cplx> apply_channel(std::span<const std::vector<cplx>> user_signals, int sensor, const SimConfig& config,
                                std::uint64_t seed, const ChannelOptions& options = {});

/// Received sequences of every sensor for one Monte-Carlo realization.
std::vector<std::vector<cplx>> generate_realization(const SimConfig& config, std::uint64_t seed,
                                                    const ChannelOptions& options = {});

/// Groups sensor k into group k / P, estimates each group with its bank
/// pattern, fuses and transforms.
PowerSpectrum estimate_spectrum(std::span<const std::vector<cplx>> received, const RulerBank& bank, int P, int L);

/// Same pipeline with every group sampling all N cosets.
PowerSpectrum nyquist_baseline(std::span<const std::vector<cplx>> received, int N, int Z, int P, int L);

/// ||estimate - baseline||^2 / ||baseline||^2.
double nmse(const PowerSpectrum& estimate, const PowerSpectrum& baseline);

/// Expected r_x[0..N-1] of the received signal (fading averaged to the path loss).
std::vector<cplx> analytic_autocorrelation(const SimConfig& config);

/// Spectrum reconstructed from the noise-free coset correlations that r_x
/// implies for every pattern of the bank.
PowerSpectrum exact_spectrum(const RulerBank& bank, std::span<const cplx> rx_lags);

/// The bank used for a sweep point: config.bank when it has M marks,
/// otherwise a greedy design seeded with Z patterns. Empty when no covering
/// bank with exactly Z patterns was found.
std::optional<RulerBank> bank_for(const SimConfig& config, int M);

struct SweepGrid {
    std::vector<int> M;
    std::vector<int> P;
    std::vector<int> L;
};

struct SweepOptions {
    bool exact = false;  // analytic correlations instead of samples
    int threads = 0;     // 0: COSET_SPECTRUM_THREADS or hardware concurrency
};

struct SweepOutcome {
    std::vector<NmseResult> results;  // M-major, then P, then L
    std::vector<std::string> skipped;
};

/// For every run and every (P, L) one realization is drawn from
/// child_seed(seed, run) and shared by the Nyquist baseline and every M.
SweepOutcome run_sweep(const SimConfig& config, const SweepGrid& grid, const SweepOptions& options = {});

/// Spectra of one run at the config's own (M, P, L).
struct RunSpectra {
    PowerSpectrum estimate;
    PowerSpectrum baseline;
    double nmse = 0.0;
};

RunSpectra simulate_run(const SimConfig& config, const RulerBank& bank, int run);

/// Worker count: COSET_SPECTRUM_THREADS when set, else hardware concurrency.
int default_threads();

/// The six users of the reference multiband scenario.
std::vector<UserBand> reference_users();

}  // namespace cospec::sim
