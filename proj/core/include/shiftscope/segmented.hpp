#pragma once

#include "shiftscope/jumps.hpp"
#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace shiftscope {

/// Piecewise-constant rate fit of a daily series.
///
/// `breakpoints[i]` is the index of the first day of segment i + 1 and
/// `rates[i]` is the mean count of segment i, in events per day.
struct SegmentedFit {
    AnalysisWindow window;
    std::vector<std::size_t> breakpoints;
    std::vector<double> rates;
    double rss = 0.0;
    double bic = 0.0;

    std::size_t k() const { return breakpoints.size(); }
};

inline constexpr std::size_t DEFAULT_MIN_SEGMENT_LEN = 7;
inline constexpr std::size_t DEFAULT_MAX_BREAKPOINTS = 5;
/// Lower bound applied to the RSS inside the logarithm of the BIC.
inline constexpr double RSS_FLOOR = 1e-9;

/// n ln(max(rss, RSS_FLOOR) / n) + (2k + 1) ln n.
double segmented_bic(double rss, std::size_t n, std::size_t k);

/// Residual sum of squares of `counts` around its mean, summed directly.
double segment_rss(std::span<const std::int64_t> counts);

/// Globally RSS-optimal placement of exactly `k` breakpoints with every
/// segment at least `min_segment_len` days long. Among placements whose RSS
/// ties, the lexicographically smallest breakpoint vector wins.
/// Throws InvalidInputError if the window is shorter than (k + 1) * min_segment_len.
SegmentedFit fit_segments(const DailySeries& series, std::size_t k,
                          std::size_t min_segment_len = DEFAULT_MIN_SEGMENT_LEN);

/// BIC-optimal fit over k = 0 ... k_max (capped at what the window admits);
/// ties go to the smaller k.
SegmentedFit select_fit(const DailySeries& series, std::size_t k_max = DEFAULT_MAX_BREAKPOINTS,
                        std::size_t min_segment_len = DEFAULT_MIN_SEGMENT_LEN);

/// One jump per breakpoint: (rate after - rate before) / mean_rate.
/// Throws DegenerateInputError unless mean_rate > 0.
std::vector<Jump> relative_jumps(const SegmentedFit& fit, double mean_rate, std::string_view user_id);

/// Fraction of fits with k = 0 ... k_max breakpoints; empty for no fits.
std::vector<double> breakpoint_count_histogram(std::span<const SegmentedFit> fits,
                                               std::size_t k_max = DEFAULT_MAX_BREAKPOINTS);

} // namespace shiftscope
