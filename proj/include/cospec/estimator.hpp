#pragma once

#include <span>
#include <vector>

#include "cospec/ruler.hpp"
#include "cospec/system.hpp"

namespace cospec {

/// L consecutive blocks of N Nyquist-rate samples from one sensor, row-major
/// (sample lN + n at index l*N + n).
struct SensorBlockSeries {
    int group = 0;
    int sensor = 0;
    int period = 0;
    int blocks = 0;
    std::vector<cplx> samples;

    /// Cuts the first blocks*period samples of a Nyquist sequence.
    static SensorBlockSeries from_sequence(int group, int sensor, int period, int blocks, std::span<const cplx> seq);
};

/// The same blocks after coset selection: L x M, row-major.
struct CompressedSeries {
    int group = 0;
    int sensor = 0;
    int blocks = 0;
    int marks = 0;
    std::vector<cplx> samples;

    cplx at(int l, int m) const { return samples[static_cast<std::size_t>(l * marks + m)]; }
};

/// r^(m,m')[lag] for all pairs of one group, M x M row-major by (m, m').
struct PairCorrelations {
    int lag = 0;
    int marks = 0;
    std::vector<cplx> values;

    cplx at(int m, int m_prime) const { return values[static_cast<std::size_t>(m * marks + m_prime)]; }
};

/// Per-group correlation vector sent to the fusion centre.
struct GroupCorrelations {
    int group = 0;
    std::vector<double> zero_lag;     // r^(m,m)[0], m = 0..M-1
    std::vector<cplx> plus_zero_lag;  // r^(m,m')[0], m > m', pairs (1,0),(2,0),..,(2,1),..
    std::vector<cplx> minus_lag_one;  // r^(m,m')[1], m < m', pairs (0,1),(0,2),..,(1,2),..
    int sensors = 0;
    int blocks = 0;
};

CompressedSeries compress(const SensorBlockSeries& blocks, const CosetPattern& pattern);

/// Unbiased estimate (1/(P(L-|lag|))) sum_p sum_l y^(m)[l] conj(y^(m')[l-lag])
/// for lag in {-1, 0, 1}. Lag -1 is the conjugate transpose of lag 1. Partial
/// sums are reduced in a fixed pairwise tree over 64-block chunks.
PairCorrelations sample_correlations(std::span<const CompressedSeries> series, int lag);

GroupCorrelations stack_group(int group, const PairCorrelations& lag0, const PairCorrelations& lag1);

/// compress + sample_correlations + stack_group for the sensors of one group.
GroupCorrelations estimate_group(std::span<const SensorBlockSeries> sensors, const CosetPattern& pattern);

/// Noise-free correlations implied by a known autocorrelation r_x[0..N-1]:
/// r^(m,m')[l] = r_x[lN + n_m - n_m'].
GroupCorrelations exact_group_correlations(int group, const CosetPattern& pattern, std::span<const cplx> rx_lags);

/// Fusion-centre input: every group's zero-lag values, then the stack that
/// matches SystemMatrix row order.
struct FusionInput {
    std::vector<double> zero_lag;
    std::vector<cplx> stacked;
};

FusionInput stack_for_fusion(const SystemMatrix& sys, std::span<const GroupCorrelations> groups);

/// LS reconstruction of the full autocorrelation from all groups.
AutocorrelationVector fuse(const SystemMatrix& sys, std::span<const GroupCorrelations> groups);

}  // namespace cospec
