#include "shiftscope/jumps.hpp"

#include "shiftscope/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace shiftscope {

JumpSeries aggregate_jumps(std::span<const Jump> jumps, const AnalysisWindow& window) {
    std::vector<const Jump*> ordered;
    ordered.reserve(jumps.size());
    for (const Jump& jump : jumps) {
        if (!window.contains(jump.day)) {
            throw InvalidInputError{fmt::format("jump of '{}' on {} lies outside the analysis window",
                                                jump.user_id, format_date(jump.day))};
        }
        if (!std::isfinite(jump.magnitude)) {
            throw InvalidInputError{fmt::format("jump of '{}' has a non-finite magnitude", jump.user_id)};
        }
        ordered.push_back(&jump);
    }
    std::sort(ordered.begin(), ordered.end(), [](const Jump* a, const Jump* b) {
        if (a->day != b->day) {
            return a->day < b->day;
        }
        if (a->user_id != b->user_id) {
            return a->user_id < b->user_id;
        }
        return a->magnitude < b->magnitude;
    });

    JumpSeries out{window, std::vector<double>(window.days(), 0.0), std::vector<double>(window.days(), 0.0)};
    for (const Jump* jump : ordered) {
        std::size_t d = window.index_of(jump->day);
        if (jump->magnitude > 0.0) {
            out.plus[d] += jump->magnitude;
        } else if (jump->magnitude < 0.0) {
            out.minus[d] += jump->magnitude;
        }
    }
    return out;
}

std::vector<std::optional<double>> jump_ratio(const JumpSeries& series) {
    std::vector<std::optional<double>> out(series.plus.size());
    for (std::size_t d = 0; d < out.size(); ++d) {
        if (series.plus[d] > 0.0) {
            out[d] = std::abs(series.minus[d]) / series.plus[d];
        }
    }
    return out;
}

} // namespace shiftscope
