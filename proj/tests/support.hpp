#pragma once

#include <shiftscope/dates.hpp>
#include <shiftscope/random.hpp>
#include <shiftscope/timeline.hpp>

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace shiftscope::test {

inline Timestamp ts(std::string_view text) {
    return parse_timestamp(text);
}

inline Date day(std::string_view text) {
    return parse_date(text);
}

inline DailySeries series(std::vector<std::int64_t> counts) {
    return DailySeries::from_counts(std::move(counts));
}

/// Poisson counts with the given rate for each run of days.
inline DailySeries poisson_series(const std::vector<std::pair<std::size_t, double>>& runs, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    std::vector<std::int64_t> counts;
    for (auto [days, rate] : runs) {
        std::poisson_distribution<std::int64_t> draw{rate};
        for (std::size_t d = 0; d < days; ++d) {
            counts.push_back(rate > 0.0 ? draw(rng) : 0);
        }
    }
    return series(std::move(counts));
}

inline std::size_t distance(std::size_t a, std::size_t b) {
    return a > b ? a - b : b - a;
}

} // namespace shiftscope::test
