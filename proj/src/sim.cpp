#include "cospec/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "cospec/design.hpp"
#include "cospec/error.hpp"

namespace cospec::sim {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Circular complex Gaussian with E|x|^2 = variance.
class ComplexGaussian {
public:
    ComplexGaussian(std::uint64_t seed, double variance) : rng_(seed), normal_(0.0, std::sqrt(variance / 2.0)) {}
    cplx operator()() {
        const double re = normal_(rng_);
        const double im = normal_(rng_);
        return {re, im};
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

std::vector<SensorBlockSeries> cut_blocks(std::span<const std::vector<cplx>> received, int N, int P, int L) {
    std::vector<SensorBlockSeries> out;
    out.reserve(received.size());
    for (std::size_t k = 0; k < received.size(); ++k)
        out.push_back(SensorBlockSeries::from_sequence(static_cast<int>(k) / P, static_cast<int>(k), N, L, received[k]));
    return out;
}

PowerSpectrum estimate_with(const SystemMatrix& sys, std::span<const SensorBlockSeries> sensors, int P) {
    const auto& bank = sys.bank();
    if (static_cast<int>(sensors.size()) != bank.size() * P)
        fail("dimension", "expected " + std::to_string(bank.size() * P) + " sensors, got " +
                              std::to_string(sensors.size()));
    std::vector<GroupCorrelations> groups;
    groups.reserve(static_cast<std::size_t>(bank.size()));
    for (int z = 0; z < bank.size(); ++z)
        groups.push_back(estimate_group(sensors.subspan(static_cast<std::size_t>(z * P), static_cast<std::size_t>(P)),
                                        bank[static_cast<std::size_t>(z)]));
    return power_spectrum(fuse(sys, groups));
}

RulerBank full_bank(int N, int Z) {
    return RulerBank(N, std::vector<CosetPattern>(static_cast<std::size_t>(Z), CosetPattern::full(N)));
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            (void)t;
            for (int i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

void SimConfig::validate() const {
    if (N < 2) fail("domain", "N must be at least 2");
    if (M < 1 || M > N) fail("domain", "M must lie in [1, N]");
    if (Z < 1 || P < 1) fail("domain", "Z and P must be positive");
    if (L < 2) fail("domain", "need L >= 2 blocks per sensor");
    if (runs < 1) fail("domain", "need at least one run");
    if (sensor_offset_samples < 0) fail("domain", "sensor offset must be non-negative");
    if (bank) {
        if (bank->period() != N) fail("domain", "bank period does not match N");
        if (bank->size() != Z) fail("domain", "bank holds " + std::to_string(bank->size()) + " patterns, Z=" + std::to_string(Z));
    }
    constexpr double eps = 1e-12;
    for (std::size_t u = 0; u < users.size(); ++u) {
        const auto& a = users[u];
        if (a.band_lo < -kPi - eps || a.band_hi > kPi + eps)
            fail("domain", "user " + std::to_string(u) + " band lies outside [-pi, pi]");
        if (!(a.band_hi > a.band_lo)) fail("domain", "user " + std::to_string(u) + " band has no width");
        for (std::size_t v = 0; v < u; ++v) {
            const auto& b = users[v];
            if (a.band_lo < b.band_hi - eps && b.band_lo < a.band_hi - eps)
                fail("domain", "users " + std::to_string(v) + " and " + std::to_string(u) + " overlap");
        }
    }
}

double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return splitmix64(h ^ c);
}

std::vector<cplx> bandpass_taps(double band_lo, double band_hi, int taps) {
    if (taps < 1) fail("domain", "filter needs at least one tap");
    if (band_lo < -kPi - 1e-12 || band_hi > kPi + 1e-12 || !(band_hi > band_lo))
        fail("domain", "band must be a nonempty interval inside [-pi, pi]");
    const double centre = 0.5 * (band_lo + band_hi);
    const double half_width = 0.5 * (band_hi - band_lo);
    const double mid = 0.5 * (taps - 1);
    std::vector<cplx> h(static_cast<std::size_t>(taps));
    double dc = 0.0;
    for (int n = 0; n < taps; ++n) {
        const double t = n - mid;
        const double lowpass = std::abs(t) < 1e-12 ? half_width / kPi : std::sin(half_width * t) / (kPi * t);
        const double window = taps == 1 ? 1.0 : 0.54 - 0.46 * std::cos(2.0 * kPi * n / (taps - 1));
        dc += window * lowpass;
        h[static_cast<std::size_t>(n)] = window * lowpass * std::polar(1.0, centre * t);
    }
    for (auto& c : h) c /= dc;
    return h;
}

std::vector<std::vector<cplx>> generate_user_signals(std::span<const UserBand> users, int taps, std::size_t length,
                                                     std::uint64_t seed) {
    std::vector<std::vector<cplx>> out;
    out.reserve(users.size());
    const auto k = static_cast<std::size_t>(taps);
    const std::size_t burn = k;
    for (std::size_t u = 0; u < users.size(); ++u) {
        const auto h = bandpass_taps(users[u].band_lo, users[u].band_hi, taps);
        ComplexGaussian draw(child_seed(seed, u), 2.0 * kPi * dbm_to_linear(users[u].power_density_dbm));
        std::vector<cplx> white(burn + length + k - 1);
        for (auto& w : white) w = draw();
        std::vector<cplx> y(length);
        for (std::size_t t = 0; t < length; ++t) {
            // y[t] = sum_j h[j] white[burn + t + k - 1 - j]
            const cplx* src = white.data() + burn + t + k - 1;
            cplx acc{};
            for (std::size_t j = 0; j < k; ++j) acc += h[j] * *(src - j);
            y[t] = acc;
        }
        out.push_back(std::move(y));
    }
    return out;
}

std::vector<cplx> apply_channel(std::span<const std::vector<cplx>> user_signals, int sensor, const SimConfig& config,
                                std::uint64_t seed, const ChannelOptions& options) {
    const int sensors = config.sensors();
    if (sensor < 0 || sensor >= sensors) fail("domain", "sensor index out of range");
    const auto len = static_cast<std::size_t>(config.L) * static_cast<std::size_t>(config.N);
    const auto start = static_cast<std::size_t>(sensors - 1 - sensor) * static_cast<std::size_t>(config.sensor_offset_samples);
    if (user_signals.size() != config.users.size()) fail("dimension", "one signal per user expected");
    std::vector<cplx> x(len);
    for (std::size_t u = 0; u < user_signals.size(); ++u) {
        const auto& s = user_signals[u];
        if (s.size() < start + len) fail("dimension", "user signal too short for the sensor stagger");
        ComplexGaussian fading(child_seed(seed, 1, u), dbm_to_linear(config.users[u].path_loss_db));
        const cplx a = options.unit_fading ? cplx(1.0, 0.0) : fading();
        for (std::size_t t = 0; t < len; ++t) x[t] += a * s[start + t];
    }
    if (options.noise) {
        ComplexGaussian noise(child_seed(seed, 2), dbm_to_linear(config.noise_power_dbm));
        for (auto& v : x) v += noise();
    }
    return x;
}

std::vector<std::vector<cplx>> generate_realization(const SimConfig& config, std::uint64_t seed,
                                                    const ChannelOptions& options) {
    const int sensors = config.sensors();
    const std::size_t length = static_cast<std::size_t>(sensors - 1) * static_cast<std::size_t>(config.sensor_offset_samples) +
                               static_cast<std::size_t>(config.L) * static_cast<std::size_t>(config.N);
    const auto users = generate_user_signals(config.users, config.N, length, child_seed(seed, 1));
    std::vector<std::vector<cplx>> received;
    received.reserve(static_cast<std::size_t>(sensors));
    for (int k = 0; k < sensors; ++k)
        received.push_back(apply_channel(users, k, config, child_seed(seed, 2, static_cast<std::uint64_t>(k)), options));
    return received;
}

PowerSpectrum estimate_spectrum(std::span<const std::vector<cplx>> received, const RulerBank& bank, int P, int L) {
    const auto sensors = cut_blocks(received, bank.period(), P, L);
    return estimate_with(build_system(bank), sensors, P);
}

PowerSpectrum nyquist_baseline(std::span<const std::vector<cplx>> received, int N, int Z, int P, int L) {
    return estimate_spectrum(received, full_bank(N, Z), P, L);
}

double nmse(const PowerSpectrum& estimate, const PowerSpectrum& baseline) {
    if (estimate.values.size() != baseline.values.size()) fail("dimension", "spectra differ in length");
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < baseline.values.size(); ++k) {
        err += std::norm(estimate.values[k] - baseline.values[k]);
        ref += std::norm(baseline.values[k]);
    }
    if (ref == 0.0) fail("domain", "baseline spectrum is zero");
    return err / ref;
}

std::vector<cplx> analytic_autocorrelation(const SimConfig& config) {
    const auto n = static_cast<std::size_t>(config.N);
    std::vector<cplx> r(n);
    for (const auto& user : config.users) {
        const auto h = bandpass_taps(user.band_lo, user.band_hi, config.N);
        const double scale = 2.0 * kPi * dbm_to_linear(user.power_density_dbm) * dbm_to_linear(user.path_loss_db);
        for (std::size_t tau = 0; tau < n; ++tau) {
            cplx acc{};
            for (std::size_t j = tau; j < n; ++j) acc += h[j] * std::conj(h[j - tau]);
            r[tau] += scale * acc;
        }
    }
    r[0] += dbm_to_linear(config.noise_power_dbm);
    return r;
}

PowerSpectrum exact_spectrum(const RulerBank& bank, std::span<const cplx> rx_lags) {
    std::vector<GroupCorrelations> groups;
    for (int z = 0; z < bank.size(); ++z)
        groups.push_back(exact_group_correlations(z, bank[static_cast<std::size_t>(z)], rx_lags));
    return power_spectrum(fuse(build_system(bank), groups));
}

std::optional<RulerBank> bank_for(const SimConfig& config, int M) {
    if (config.bank && config.bank->marks_per_pattern() == M && config.bank->size() == config.Z) return config.bank;
    if (M < 2 || M > config.N || config.Z >= config.N) return std::nullopt;
    const DesignReport report = design_greedy(config.N, M, {.min_patterns = config.Z});
    if (!report.covered || report.achieved_Z != config.Z) return std::nullopt;
    return report.bank;
}

SweepOutcome run_sweep(const SimConfig& config, const SweepGrid& grid, const SweepOptions& options) {
    config.validate();
    if (grid.M.empty() || grid.P.empty() || grid.L.empty()) fail("domain", "sweep grid has an empty axis");

    SweepOutcome outcome;
    std::vector<std::pair<int, SystemMatrix>> systems;  // (grid index of M, system)
    for (std::size_t i = 0; i < grid.M.size(); ++i) {
        if (auto bank = bank_for(config, grid.M[i])) {
            systems.emplace_back(static_cast<int>(i), build_system(*bank));
        } else {
            outcome.skipped.push_back("M=" + std::to_string(grid.M[i]) + ": no covering bank with Z=" +
                                      std::to_string(config.Z) + " patterns");
        }
    }

    const int runs = options.exact ? 1 : config.runs;
    const std::size_t n_pl = grid.P.size() * grid.L.size();
    // per_run[(system slot * n_pl + pl) * runs + run]
    std::vector<double> per_run(systems.size() * n_pl * static_cast<std::size_t>(runs), 0.0);

    if (options.exact) {
        const auto rx = analytic_autocorrelation(config);
        const auto baseline = exact_spectrum(full_bank(config.N, config.Z), rx);
        for (std::size_t s = 0; s < systems.size(); ++s) {
            const double value = nmse(exact_spectrum(systems[s].second.bank(), rx), baseline);
            for (std::size_t pl = 0; pl < n_pl; ++pl) per_run[s * n_pl + pl] = value;
        }
    } else {
        const SystemMatrix baseline_sys = build_system(full_bank(config.N, config.Z));
        const int threads = options.threads > 0 ? options.threads : default_threads();
        parallel_for(runs, threads, [&](int run) {
            for (std::size_t ip = 0; ip < grid.P.size(); ++ip) {
                for (std::size_t il = 0; il < grid.L.size(); ++il) {
                    SimConfig point = config;
                    point.P = grid.P[ip];
                    point.L = grid.L[il];
                    point.bank.reset();
                    point.validate();
                    const auto received = generate_realization(point, child_seed(config.rng_seed, static_cast<std::uint64_t>(run)));
                    const auto sensors = cut_blocks(received, point.N, point.P, point.L);
                    const auto baseline = estimate_with(baseline_sys, sensors, point.P);
                    const std::size_t pl = ip * grid.L.size() + il;
                    for (std::size_t s = 0; s < systems.size(); ++s) {
                        const auto est = estimate_with(systems[s].second, sensors, point.P);
                        per_run[(s * n_pl + pl) * static_cast<std::size_t>(runs) + static_cast<std::size_t>(run)] = nmse(est, baseline);
                    }
                }
            }
        });
    }

    for (std::size_t s = 0; s < systems.size(); ++s) {
        for (std::size_t ip = 0; ip < grid.P.size(); ++ip) {
            for (std::size_t il = 0; il < grid.L.size(); ++il) {
                const std::size_t pl = ip * grid.L.size() + il;
                NmseResult r;
                r.M = grid.M[static_cast<std::size_t>(systems[s].first)];
                r.P = grid.P[ip];
                r.L = grid.L[il];
                r.runs = runs;
                const auto first = per_run.begin() + static_cast<std::ptrdiff_t>((s * n_pl + pl) * static_cast<std::size_t>(runs));
                r.per_run.assign(first, first + runs);
                double sum = 0.0;
                for (double v : r.per_run) sum += v;
                r.nmse = sum / runs;
                r.baseline_id = options.exact ? "exact-correlation full-coset" : "nyquist full-coset, shared realization";
                outcome.results.push_back(std::move(r));
            }
        }
    }
    return outcome;
}

RunSpectra simulate_run(const SimConfig& config, const RulerBank& bank, int run) {
    config.validate();
    if (bank.period() != config.N || bank.size() != config.Z) fail("domain", "bank does not match N and Z");
    SimConfig point = config;
    point.bank.reset();
    const auto received = generate_realization(point, child_seed(config.rng_seed, static_cast<std::uint64_t>(run)));
    RunSpectra out{estimate_spectrum(received, bank, config.P, config.L),
                   nyquist_baseline(received, config.N, config.Z, config.P, config.L), 0.0};
    out.nmse = nmse(out.estimate, out.baseline);
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("COSET_SPECTRUM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<UserBand> reference_users() {
    const double s = kPi / 9.0;
    return {
        {-8 * s, -7 * s, 38.0, -18.0}, {-6 * s, -5 * s, 40.0, -19.0}, {1 * s, 2 * s, 34.0, -11.0},
        {3 * s, 4 * s, 34.0, -17.0},   {4 * s, 5 * s, 32.0, -13.0},   {6 * s, 7 * s, 35.0, -19.0},
    };
}

}  // namespace cospec::sim
