#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cospec/ruler.hpp"

namespace cospec {

using cplx = std::complex<double>;

/// Which measured correlation a system row represents: r_y^{(m,m')}[0] with
/// m > m' (lag n_m - n_m'), or r_y^{(m,m')}[1] with m < m'
/// (lag N + n_m - n_m').
enum class LagTag { zero_plus, one_minus };

struct SystemRow {
    int group = 0;
    int m = 0;
    int m_prime = 0;
    LagTag tag = LagTag::zero_plus;
    int column = 0;  // the single 1 of the row; column j holds lag j+1
};

/// Stacked 0/1 matrix linking cross-coset correlations to r_x[1..N-1].
/// Rows are ordered as every group's zero_plus block (group order, pairs
/// (1,0),(2,0),..,(2,1),..), followed by every group's one_minus block
/// (pairs (0,1),(0,2),..,(1,2),..).
class SystemMatrix {
public:
    explicit SystemMatrix(RulerBank bank);

    int period() const noexcept { return bank_.period(); }
    int columns() const noexcept { return bank_.period() - 1; }
    int row_count() const noexcept { return static_cast<int>(rows_.size()); }
    const RulerBank& bank() const noexcept { return bank_; }
    const std::vector<SystemRow>& rows() const noexcept { return rows_; }

    /// Row-major dense copy (row_count x columns).
    std::vector<double> dense() const;

private:
    RulerBank bank_;
    std::vector<SystemRow> rows_;
};

/// r_x stacked as [r_x[0], r_x[1..N-1], r_x[1-N..-1]]; index i holds lag i for
/// i < N and lag i - (2N-1) otherwise.
struct AutocorrelationVector {
    int period = 0;
    std::vector<cplx> values;

    static int lag_at(int index, int period) { return index < period ? index : index - (2 * period - 1); }
    cplx at_lag(int lag) const;
};

struct PowerSpectrum {
    std::vector<cplx> values;  // 2N-1 bins, forward DFT, unnormalized

    std::vector<double> real_part() const;
    /// Bins whose real part is negative (possible with finite-sample estimates).
    std::vector<int> negative_bins() const;
};

SystemMatrix build_system(const RulerBank& bank);

/// Structural rank test: every column has a 1 iff the bank's difference sets
/// cover all residues.
bool check_full_column_rank(const SystemMatrix& sys);

/// LS estimate of r_x[0] from the stacked zero-lag autocorrelations (their mean).
double reconstruct_r0(std::span<const double> zero_lag_estimates);

/// LS estimate of r_x[1..N-1]. The normal equations are diagonal, so each lag
/// is the mean of the measurements mapped onto it. Throws Error("rank") naming
/// the uncovered lags when the system is rank deficient.
std::vector<cplx> reconstruct_r1(const SystemMatrix& sys, std::span<const cplx> stacked);

AutocorrelationVector assemble_rx(double r0, std::span<const cplx> r1);

PowerSpectrum power_spectrum(const AutocorrelationVector& rx);

}  // namespace cospec
