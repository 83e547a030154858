#include "shiftscope/switchpoint.hpp"

#include "switchpoint_internal.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace shiftscope {
namespace {

constexpr double NEG_INF = -std::numeric_limits<double>::infinity();

struct LevelFit {
    std::vector<std::size_t> switch_days;
    std::vector<double> rates;
};

// Best placement of `levels` segments maximising the summed per-segment log
// posterior S ln r - (d + alpha) r at r = S / (d + alpha).
LevelFit best_placement(const std::vector<std::int64_t>& prefix, std::size_t levels, std::size_t min_len,
                        double alpha) {
    const std::size_t n = prefix.size() - 1;
    auto score = [&](std::size_t i, std::size_t j) {
        auto s = static_cast<double>(prefix[j] - prefix[i]);
        double denom = static_cast<double>(j - i) + alpha;
        double rate = s / denom;
        return detail::xlogy(s, rate) - denom * rate;
    };
    // best[l][j]: top score for days [0, j) in l + 1 segments; from[l][j]: start of the last one.
    std::vector<std::vector<double>> best(levels, std::vector<double>(n + 1, NEG_INF));
    std::vector<std::vector<std::size_t>> from(levels, std::vector<std::size_t>(n + 1, 0));
    for (std::size_t j = min_len; j <= n; ++j) {
        best[0][j] = score(0, j);
    }
    for (std::size_t l = 1; l < levels; ++l) {
        for (std::size_t j = (l + 1) * min_len; j <= n; ++j) {
            for (std::size_t i = l * min_len; i + min_len <= j; ++i) {
                double value = best[l - 1][i] + score(i, j);
                if (value > best[l][j]) {
                    best[l][j] = value;
                    from[l][j] = i;
                }
            }
        }
    }
    LevelFit fit;
    std::vector<std::size_t> bounds{n};
    std::size_t j = n;
    for (std::size_t l = levels - 1; l >= 1; --l) {
        j = from[l][j];
        bounds.push_back(j);
    }
    bounds.push_back(0);
    for (std::size_t b = bounds.size() - 1; b >= 1; --b) {
        std::size_t first = bounds[b];
        std::size_t last = bounds[b - 1];
        if (first > 0) {
            fit.switch_days.push_back(first);
        }
        fit.rates.push_back(static_cast<double>(prefix[last] - prefix[first]) /
                            (static_cast<double>(last - first) + alpha));
    }
    return fit;
}

double log_likelihood(std::span<const std::int64_t> counts, const LevelFit& fit) {
    double ll = 0.0;
    std::size_t segment = 0;
    for (std::size_t d = 0; d < counts.size(); ++d) {
        while (segment < fit.switch_days.size() && d >= fit.switch_days[segment]) {
            ++segment;
        }
        auto y = static_cast<double>(counts[d]);
        double rate = fit.rates[segment];
        if (y > 0.0 && !(rate > 0.0)) {
            return NEG_INF;
        }
        ll += detail::xlogy(y, rate) - rate - std::lgamma(y + 1.0);
    }
    return ll;
}

} // namespace

MultistateFit fit_multistate(const DailySeries& series, const PriorConfig& prior, std::size_t max_levels,
                             std::size_t min_segment_len) {
    if (max_levels == 0) {
        throw InvalidInputError{"multistate model needs at least one level"};
    }
    const std::size_t len = std::max<std::size_t>(min_segment_len, 1);
    if (series.size() < max_levels * len) {
        throw InvalidInputError{fmt::format("{}-day window cannot hold {} levels of at least {} days", series.size(),
                                            max_levels, len)};
    }
    if (!(prior.alpha > 0.0)) {
        throw InvalidInputError{"prior rate alpha must be positive"};
    }
    const auto prefix = detail::prefix_sums(series.counts());
    const double log_n = std::log(static_cast<double>(series.size()));

    MultistateFit out;
    out.bic = std::numeric_limits<double>::infinity();
    for (std::size_t levels = 1; levels <= max_levels; ++levels) {
        LevelFit fit = best_placement(prefix, levels, len, prior.alpha);
        double ll = log_likelihood(series.counts(), fit);
        double bic = -2.0 * ll + static_cast<double>(2 * levels - 1) * log_n;
        out.bic_by_levels.push_back(bic);
        if (bic < out.bic) {
            out.levels = levels;
            out.switch_days = std::move(fit.switch_days);
            out.level_rates = std::move(fit.rates);
            out.log_likelihood = ll;
            out.bic = bic;
        }
    }
    return out;
}

} // namespace shiftscope
