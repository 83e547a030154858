#pragma once

#include "shiftscope/timeline.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shiftscope {

/// Rate change of one account on one day, relative to the account's mean rate.
struct Jump {
    std::string user_id;
    Date day;
    double magnitude = 0.0;
};

/// Daily population sums of the positive (`plus`, >= 0) and negative
/// (`minus`, <= 0) jumps.
struct JumpSeries {
    AnalysisWindow window;
    std::vector<double> plus;
    std::vector<double> minus;
};

/// Sums jumps per day, separately by sign. The reduction runs over jumps in
/// (day, user_id) order so the result does not depend on input order.
/// Throws InvalidInputError for a jump outside `window` or a non-finite magnitude.
JumpSeries aggregate_jumps(std::span<const Jump> jumps, const AnalysisWindow& window);

/// |minus[d]| / plus[d]; nullopt on days without positive jumps.
std::vector<std::optional<double>> jump_ratio(const JumpSeries& series);

} // namespace shiftscope
