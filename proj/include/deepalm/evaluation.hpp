#ifndef DEEPALM_EVALUATION_HPP
#define DEEPALM_EVALUATION_HPP

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "deepalm/episode.hpp"
#include "deepalm/parallel.hpp"
#include "deepalm/scenarios.hpp"
#include "deepalm/strategies.hpp"

namespace deepalm {

inline constexpr std::array<int, 7> kQuantilePercents = {1, 5, 25, 50, 75, 95, 99};

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
    std::array<double, 7> quantiles{};  // at kQuantilePercents
    double bankrupt_fraction = 0.0;     // share of paths with E_T <= 0
    double roe = 0.0;                   // (mean(E_T) / E_0)^(12/T) - 1
};

struct StrategyOutcome {
    std::string name;
    std::vector<double> terminal;        // E_T^post per scenario
    std::vector<double> liability_paid;  // per scenario
    std::vector<double> penalties;       // per scenario
    double initial_net_worth = 0.0;
    bool all_finite = true;
    Summary summary;
};

// Nearest-rank quantile: the ceil(p n)-th smallest value.
inline double nearest_rank(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty sample");
    const double n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

inline double annualized_roe(double mean_terminal, double initial, int horizon) {
    const double ratio = mean_terminal / initial;
    if (!(ratio > 0.0)) return -1.0;
    return std::pow(ratio, 12.0 / horizon) - 1.0;
}

inline Summary summarize(const std::vector<double>& values, double initial, int horizon) {
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    Summary s;
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t q = 0; q < kQuantilePercents.size(); ++q) {
        s.quantiles[q] = nearest_rank(sorted, kQuantilePercents[q] / 100.0);
    }
    s.bankrupt_fraction =
        static_cast<double>(std::count_if(values.begin(), values.end(), [](double v) { return v <= 0.0; })) / n;
    s.roe = annualized_roe(s.mean, initial, horizon);
    return s;
}

inline StrategyOutcome evaluate(const std::string& name, const Strategy& strategy, const ScenarioBatch& batch,
                                const EpisodeSetup& setup, int horizon, unsigned workers = 1) {
    StrategyOutcome out;
    out.name = name;
    out.terminal.resize(batch.count());
    out.liability_paid.resize(batch.count());
    out.penalties.resize(batch.count());
    std::vector<double> initial(batch.count(), 0.0);
    std::vector<char> finite(batch.count(), 1);
    parallel_for(batch.count(), workers, [&](std::size_t i) {
        const EpisodeOutcome e = run_episode(setup, batch, i, strategy, horizon);
        out.terminal[i] = e.terminal_net_worth;
        out.liability_paid[i] = e.liability_paid;
        out.penalties[i] = e.penalties;
        initial[i] = e.initial_net_worth;
        finite[i] = e.finite ? 1 : 0;
    });
    out.all_finite = std::all_of(finite.begin(), finite.end(), [](char f) { return f != 0; });
    if (batch.count() > 0) {
        out.initial_net_worth = initial.front();
        out.summary = summarize(out.terminal, out.initial_net_worth, horizon);
    }
    return out;
}

struct PairedTest {
    double mean_difference = 0.0;
    double std_error = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;  // one-sided, H1: first > second
};

inline PairedTest paired_test(const std::vector<double>& first, const std::vector<double>& second) {
    if (first.size() != second.size()) throw std::invalid_argument("paired_test: samples differ in size");
    PairedTest r;
    const std::size_t n = first.size();
    if (n < 2) return r;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = first[i] - second[i];
    r.mean_difference = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - r.mean_difference) * (v - r.mean_difference);
    r.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    if (r.std_error == 0.0) {
        r.t_statistic = r.mean_difference > 0.0 ? std::numeric_limits<double>::infinity()
                                                : (r.mean_difference < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
        r.p_value = r.mean_difference > 0.0 ? 0.0 : 1.0;
        return r;
    }
    r.t_statistic = r.mean_difference / r.std_error;
    boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.t_statistic));
    return r;
}

// Paired comparison of two strategies on identical scenario paths.
struct Comparison {
    StrategyOutcome first;
    StrategyOutcome second;
    double excess_roe = 0.0;  // first.roe - second.roe
    PairedTest test;
};

inline Comparison compare(const StrategyOutcome& first, const StrategyOutcome& second) {
    if (first.terminal.size() != second.terminal.size()) {
        throw std::invalid_argument("compare: outcomes come from different batches");
    }
    Comparison c;
    c.first = first;
    c.second = second;
    c.excess_roe = first.summary.roe - second.summary.roe;
    c.test = paired_test(first.terminal, second.terminal);
    return c;
}

struct Histogram {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<std::size_t> counts;

    double width() const { return counts.empty() ? 0.0 : (upper - lower) / static_cast<double>(counts.size()); }
};

// Equal-width bins over [lower, upper]; the upper edge belongs to the last bin.
inline Histogram histogram(const std::vector<double>& values, std::size_t bins, double lower, double upper) {
    if (bins == 0) throw std::invalid_argument("histogram: bin count must be positive");
    Histogram h{lower, upper, std::vector<std::size_t>(bins, 0)};
    const double span = upper - lower;
    for (double v : values) {
        std::size_t b = 0;
        if (span > 0.0) {
            const double pos = (v - lower) / span * static_cast<double>(bins);
            b = pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
        }
        ++h.counts[b];
    }
    return h;
}

inline Histogram histogram(const std::vector<double>& values, std::size_t bins) {
    if (values.empty()) throw std::invalid_argument("histogram: empty sample");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return histogram(values, bins, *lo, *hi);
}

}  // namespace deepalm

#endif  // DEEPALM_EVALUATION_HPP
