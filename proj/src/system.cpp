#include "cospec/system.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cospec/error.hpp"

namespace cospec {

namespace {

void append_rows(const RulerBank& bank, LagTag tag, std::vector<SystemRow>& rows) {
    const int n = bank.period();
    for (int z = 0; z < bank.size(); ++z) {
        const auto& marks = bank[static_cast<std::size_t>(z)].marks();
        const int m_count = static_cast<int>(marks.size());
        // zero_plus: m' outer, m > m' inner. one_minus: m outer, m' > m inner.
        for (int outer = 0; outer + 1 < m_count; ++outer) {
            for (int inner = outer + 1; inner < m_count; ++inner) {
                SystemRow row;
                row.group = z;
                row.tag = tag;
                if (tag == LagTag::zero_plus) {
                    row.m = inner;
                    row.m_prime = outer;
                    row.column = marks[static_cast<std::size_t>(inner)] - marks[static_cast<std::size_t>(outer)] - 1;
                } else {
                    row.m = outer;
                    row.m_prime = inner;
                    row.column = n + marks[static_cast<std::size_t>(outer)] - marks[static_cast<std::size_t>(inner)] - 1;
                }
                rows.push_back(row);
            }
        }
    }
}

}  // namespace

SystemMatrix::SystemMatrix(RulerBank bank) : bank_(std::move(bank)) {
    if (bank_.period() < 2) fail("domain", "N must be at least 2 to have lags to estimate");
    append_rows(bank_, LagTag::zero_plus, rows_);
    append_rows(bank_, LagTag::one_minus, rows_);
}

std::vector<double> SystemMatrix::dense() const {
    const auto cols = static_cast<std::size_t>(columns());
    std::vector<double> out(rows_.size() * cols, 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) out[r * cols + static_cast<std::size_t>(rows_[r].column)] = 1.0;
    return out;
}

cplx AutocorrelationVector::at_lag(int lag) const {
    if (lag <= -period || lag >= period) fail("domain", "lag " + std::to_string(lag) + " outside the stacked support");
    return values[static_cast<std::size_t>(lag >= 0 ? lag : lag + 2 * period - 1)];
}

std::vector<double> PowerSpectrum::real_part() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.real());
    return out;
}

std::vector<int> PowerSpectrum::negative_bins() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k].real() < 0.0) out.push_back(static_cast<int>(k));
    return out;
}

SystemMatrix build_system(const RulerBank& bank) { return SystemMatrix(bank); }

bool check_full_column_rank(const SystemMatrix& sys) { return union_covers(sys.bank()).covered; }

double reconstruct_r0(std::span<const double> zero_lag_estimates) {
    if (zero_lag_estimates.empty()) fail("dimension", "no zero-lag estimates to average");
    double sum = 0.0;
    for (double v : zero_lag_estimates) sum += v;
    return sum / static_cast<double>(zero_lag_estimates.size());
}

std::vector<cplx> reconstruct_r1(const SystemMatrix& sys, std::span<const cplx> stacked) {
    if (stacked.size() != sys.rows().size())
        fail("dimension", "expected " + std::to_string(sys.row_count()) + " stacked correlations, got " +
                              std::to_string(stacked.size()));
    const auto cols = static_cast<std::size_t>(sys.columns());
    std::vector<cplx> sum(cols);
    std::vector<int> hits(cols, 0);
    for (std::size_t r = 0; r < stacked.size(); ++r) {
        const auto c = static_cast<std::size_t>(sys.rows()[r].column);
        sum[c] += stacked[r];
        ++hits[c];
    }
    std::string missing;
    for (std::size_t c = 0; c < cols; ++c) {
        if (hits[c] == 0) missing += (missing.empty() ? "" : ",") + std::to_string(c + 1);
        else sum[c] /= static_cast<double>(hits[c]);
    }
    if (!missing.empty()) fail("rank", "system is rank deficient; uncovered lags: " + missing);
    return sum;
}

AutocorrelationVector assemble_rx(double r0, std::span<const cplx> r1) {
    const int n = static_cast<int>(r1.size()) + 1;
    if (n < 2) fail("domain", "need at least one nonzero lag");
    AutocorrelationVector rx{n, std::vector<cplx>(static_cast<std::size_t>(2 * n - 1))};
    rx.values[0] = r0;
    for (int tau = 1; tau < n; ++tau) {
        rx.values[static_cast<std::size_t>(tau)] = r1[static_cast<std::size_t>(tau - 1)];
        rx.values[static_cast<std::size_t>(2 * n - 1 - tau)] = std::conj(r1[static_cast<std::size_t>(tau - 1)]);
    }
    return rx;
}

PowerSpectrum power_spectrum(const AutocorrelationVector& rx) {
    const std::size_t len = rx.values.size();
    // twiddle[k] = exp(-j 2 pi k / len); bin k uses twiddle[(i k) mod len].
    std::vector<cplx> twiddle(len);
    for (std::size_t k = 0; k < len; ++k)
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
    PowerSpectrum out{std::vector<cplx>(len)};
    for (std::size_t k = 0; k < len; ++k) {
        cplx acc{};
        std::size_t phase = 0;
        for (std::size_t i = 0; i < len; ++i) {
            acc += rx.values[i] * twiddle[phase];
            phase += k;
            if (phase >= len) phase -= len;
        }
        out.values[k] = acc;
    }
    return out;
}

}  // namespace cospec
