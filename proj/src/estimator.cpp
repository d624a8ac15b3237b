#include "cospec/estimator.hpp"

#include <string>

#include "cospec/error.hpp"

namespace cospec {

namespace {

constexpr int kChunkRows = 64;

// Split-complex M x M accumulator.
struct Accumulator {
    std::vector<double> re;
    std::vector<double> im;

    explicit Accumulator(std::size_t size = 0) : re(size, 0.0), im(size, 0.0) {}

    void merge(const Accumulator& other) {
        for (std::size_t i = 0; i < re.size(); ++i) {
            re[i] += other.re[i];
            im[i] += other.im[i];
        }
    }
};

// Binary-counter pairwise reduction: chunk sums are merged with equal-sized
// neighbours as they arrive, so the tree shape depends only on chunk count.
class PairwiseReducer {
public:
    void push(Accumulator chunk) {
        int level = 0;
        while (!stack_.empty() && stack_.back().level == level) {
            stack_.back().acc.merge(chunk);
            chunk = std::move(stack_.back().acc);
            stack_.pop_back();
            ++level;
        }
        stack_.push_back({level, std::move(chunk)});
    }

    Accumulator finish(std::size_t size) {
        if (stack_.empty()) return Accumulator(size);
        Accumulator total = std::move(stack_.back().acc);
        stack_.pop_back();
        while (!stack_.empty()) {
            stack_.back().acc.merge(total);
            total = std::move(stack_.back().acc);
            stack_.pop_back();
        }
        return total;
    }

private:
    struct Entry {
        int level;
        Accumulator acc;
    };
    std::vector<Entry> stack_;
};

// Sum over rows l in [first, last) of y[l][m] * conj(y[l - lag][m']).
// lag 0 fills only m >= m'.
void accumulate_rows(const CompressedSeries& s, int lag, int first, int last, Accumulator& acc,
                     std::vector<double>& cur_re, std::vector<double>& cur_im, std::vector<double>& prev_re,
                     std::vector<double>& prev_im) {
    const int mm = s.marks;
    for (int l = first; l < last; ++l) {
        for (int m = 0; m < mm; ++m) {
            const cplx v = s.at(l, m);
            cur_re[static_cast<std::size_t>(m)] = v.real();
            cur_im[static_cast<std::size_t>(m)] = v.imag();
            const cplx w = s.at(l - lag, m);
            prev_re[static_cast<std::size_t>(m)] = w.real();
            prev_im[static_cast<std::size_t>(m)] = w.imag();
        }
        for (int m = 0; m < mm; ++m) {
            const double a = cur_re[static_cast<std::size_t>(m)];
            const double b = cur_im[static_cast<std::size_t>(m)];
            double* row_re = acc.re.data() + static_cast<std::size_t>(m * mm);
            double* row_im = acc.im.data() + static_cast<std::size_t>(m * mm);
            const int stop = lag == 0 ? m + 1 : mm;
            for (int mp = 0; mp < stop; ++mp) {
                const double c = prev_re[static_cast<std::size_t>(mp)];
                const double d = prev_im[static_cast<std::size_t>(mp)];
                row_re[mp] += a * c + b * d;
                row_im[mp] += b * c - a * d;
            }
        }
    }
}

PairCorrelations correlate_nonnegative(std::span<const CompressedSeries> series, int lag) {
    const int mm = series.front().marks;
    const int blocks = series.front().blocks;
    const auto size = static_cast<std::size_t>(mm * mm);
    std::vector<double> cur_re(static_cast<std::size_t>(mm)), cur_im(cur_re), prev_re(cur_re), prev_im(cur_re);

    PairwiseReducer reducer;
    for (const auto& s : series) {
        for (int first = lag; first < blocks; first += kChunkRows) {
            Accumulator chunk(size);
            accumulate_rows(s, lag, first, std::min(blocks, first + kChunkRows), chunk, cur_re, cur_im, prev_re,
                            prev_im);
            reducer.push(std::move(chunk));
        }
    }
    const Accumulator total = reducer.finish(size);

    const double scale = 1.0 / (static_cast<double>(series.size()) * static_cast<double>(blocks - lag));
    PairCorrelations out{lag, mm, std::vector<cplx>(size)};
    for (int m = 0; m < mm; ++m) {
        for (int mp = 0; mp < mm; ++mp) {
            const auto i = static_cast<std::size_t>(m * mm + mp);
            if (lag == 0 && mp > m) continue;
            out.values[i] = cplx(total.re[i] * scale, total.im[i] * scale);
        }
    }
    if (lag == 0) {
        for (int m = 0; m < mm; ++m) {
            const auto d = static_cast<std::size_t>(m * mm + m);
            out.values[d] = cplx(out.values[d].real(), 0.0);
            for (int mp = m + 1; mp < mm; ++mp)
                out.values[static_cast<std::size_t>(m * mm + mp)] = std::conj(out.values[static_cast<std::size_t>(mp * mm + m)]);
        }
    }
    return out;
}

}  // namespace

SensorBlockSeries SensorBlockSeries::from_sequence(int group, int sensor, int period, int blocks,
                                                   std::span<const cplx> seq) {
    if (period < 1 || blocks < 1) fail("domain", "period and block count must be positive");
    const auto needed = static_cast<std::size_t>(period) * static_cast<std::size_t>(blocks);
    if (seq.size() < needed)
        fail("dimension", "sensor " + std::to_string(sensor) + " has " + std::to_string(seq.size()) +
                              " samples, need " + std::to_string(needed));
    return {group, sensor, period, blocks, std::vector<cplx>(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(needed))};
}

CompressedSeries compress(const SensorBlockSeries& blocks, const CosetPattern& pattern) {
    if (blocks.period != pattern.period())
        fail("dimension", "blocks have N=" + std::to_string(blocks.period) + " but pattern has N=" +
                              std::to_string(pattern.period()));
    if (blocks.samples.size() != static_cast<std::size_t>(blocks.period) * static_cast<std::size_t>(blocks.blocks))
        fail("dimension", "block series holds " + std::to_string(blocks.samples.size()) + " samples, expected L*N");
    CompressedSeries out{blocks.group, blocks.sensor, blocks.blocks, pattern.size(), {}};
    out.samples.reserve(static_cast<std::size_t>(blocks.blocks) * static_cast<std::size_t>(pattern.size()));
    for (int l = 0; l < blocks.blocks; ++l)
        for (int n : pattern.marks()) out.samples.push_back(blocks.samples[static_cast<std::size_t>(l * blocks.period + n)]);
    return out;
}

PairCorrelations sample_correlations(std::span<const CompressedSeries> series, int lag) {
    if (series.empty()) fail("dimension", "no sensor series to correlate");
    if (lag < -1 || lag > 1) fail("domain", "only lags -1, 0 and 1 are estimated");
    const auto& first = series.front();
    for (const auto& s : series) {
        if (s.blocks != first.blocks || s.marks != first.marks)
            fail("dimension", "all sensors of a group need the same L and pattern");
        if (s.samples.size() != static_cast<std::size_t>(s.blocks) * static_cast<std::size_t>(s.marks))
            fail("dimension", "compressed series holds the wrong number of samples");
    }
    if (first.blocks <= (lag < 0 ? -lag : lag))
        fail("domain", "need L > |lag| blocks, got L=" + std::to_string(first.blocks));
    if (lag >= 0) return correlate_nonnegative(series, lag);

    PairCorrelations plus = correlate_nonnegative(series, 1);
    PairCorrelations out{-1, plus.marks, std::vector<cplx>(plus.values.size())};
    for (int m = 0; m < plus.marks; ++m)
        for (int mp = 0; mp < plus.marks; ++mp)
            out.values[static_cast<std::size_t>(m * plus.marks + mp)] = std::conj(plus.at(mp, m));
    return out;
}

GroupCorrelations stack_group(int group, const PairCorrelations& lag0, const PairCorrelations& lag1) {
    if (lag0.lag != 0 || lag1.lag != 1) fail("domain", "stack_group needs lag-0 and lag-1 correlations");
    if (lag0.marks != lag1.marks) fail("dimension", "lag-0 and lag-1 correlations disagree on M");
    const int mm = lag0.marks;
    GroupCorrelations out;
    out.group = group;
    for (int m = 0; m < mm; ++m) out.zero_lag.push_back(lag0.at(m, m).real());
    for (int mp = 0; mp + 1 < mm; ++mp)
        for (int m = mp + 1; m < mm; ++m) out.plus_zero_lag.push_back(lag0.at(m, mp));
    for (int m = 0; m + 1 < mm; ++m)
        for (int mp = m + 1; mp < mm; ++mp) out.minus_lag_one.push_back(lag1.at(m, mp));
    return out;
}

GroupCorrelations estimate_group(std::span<const SensorBlockSeries> sensors, const CosetPattern& pattern) {
    if (sensors.empty()) fail("dimension", "group has no sensors");
    std::vector<CompressedSeries> compressed;
    compressed.reserve(sensors.size());
    for (const auto& s : sensors) compressed.push_back(compress(s, pattern));
    GroupCorrelations out = stack_group(sensors.front().group, sample_correlations(compressed, 0),
                                        sample_correlations(compressed, 1));
    out.sensors = static_cast<int>(sensors.size());
    out.blocks = sensors.front().blocks;
    return out;
}

GroupCorrelations exact_group_correlations(int group, const CosetPattern& pattern, std::span<const cplx> rx_lags) {
    const int n = pattern.period();
    if (static_cast<int>(rx_lags.size()) < n) fail("dimension", "need r_x at lags 0..N-1");
    const auto& marks = pattern.marks();
    const int mm = pattern.size();
    auto rx = [&](int lag) { return rx_lags[static_cast<std::size_t>(lag)]; };
    GroupCorrelations out;
    out.group = group;
    for (int m = 0; m < mm; ++m) out.zero_lag.push_back(rx(0).real());
    for (int mp = 0; mp + 1 < mm; ++mp)
        for (int m = mp + 1; m < mm; ++m)
            out.plus_zero_lag.push_back(rx(marks[static_cast<std::size_t>(m)] - marks[static_cast<std::size_t>(mp)]));
    for (int m = 0; m + 1 < mm; ++m)
        for (int mp = m + 1; mp < mm; ++mp)
            out.minus_lag_one.push_back(rx(n + marks[static_cast<std::size_t>(m)] - marks[static_cast<std::size_t>(mp)]));
    return out;
}

FusionInput stack_for_fusion(const SystemMatrix& sys, std::span<const GroupCorrelations> groups) {
    const auto& bank = sys.bank();
    if (static_cast<int>(groups.size()) != bank.size())
        fail("dimension", "expected correlations from " + std::to_string(bank.size()) + " groups, got " +
                              std::to_string(groups.size()));
    const auto mm = static_cast<std::size_t>(bank.marks_per_pattern());
    const std::size_t pairs = mm * (mm - 1) / 2;
    FusionInput out;
    for (const auto& g : groups) {
        if (g.zero_lag.size() != mm || g.plus_zero_lag.size() != pairs || g.minus_lag_one.size() != pairs)
            fail("dimension", "group " + std::to_string(g.group) + " correlations do not match M=" + std::to_string(mm));
        out.zero_lag.insert(out.zero_lag.end(), g.zero_lag.begin(), g.zero_lag.end());
    }
    out.stacked.reserve(sys.rows().size());
    for (const auto& row : sys.rows()) {
        const auto& g = groups[static_cast<std::size_t>(row.group)];
        // Row order inside a group matches the stacking order of GroupCorrelations.
        const int outer = row.tag == LagTag::zero_plus ? row.m_prime : row.m;
        const int inner = row.tag == LagTag::zero_plus ? row.m : row.m_prime;
        const auto idx = static_cast<std::size_t>(outer) * mm - static_cast<std::size_t>(outer * (outer + 1) / 2) +
                         static_cast<std::size_t>(inner - outer - 1);
        out.stacked.push_back(row.tag == LagTag::zero_plus ? g.plus_zero_lag[idx] : g.minus_lag_one[idx]);
    }
    return out;
}

AutocorrelationVector fuse(const SystemMatrix& sys, std::span<const GroupCorrelations> groups) {
    const FusionInput in = stack_for_fusion(sys, groups);
    return assemble_rx(reconstruct_r0(in.zero_lag), reconstruct_r1(sys, in.stacked));
}

}  // namespace cospec
