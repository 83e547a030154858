#include "shiftscope/segmented.hpp"

#include "shiftscope/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace shiftscope {
namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

class SegmentCosts {
public:
    explicit SegmentCosts(std::span<const std::int64_t> counts)
        : m_Sum(counts.size() + 1, 0.0), m_SumSq(counts.size() + 1, 0.0) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            auto c = static_cast<double>(counts[i]);
            m_Sum[i + 1] = m_Sum[i] + c;
            m_SumSq[i + 1] = m_SumSq[i] + c * c;
        }
    }

    // RSS of [first, last) around its mean.
    double operator()(std::size_t first, std::size_t last) const {
        double s = m_Sum[last] - m_Sum[first];
        double q = m_SumSq[last] - m_SumSq[first];
        return std::max(q - s * s / static_cast<double>(last - first), 0.0);
    }

    // Slack under which two candidate costs count as equal.
    double tolerance() const { return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + m_SumSq.back()); }

private:
    std::vector<double> m_Sum;
    std::vector<double> m_SumSq;
};

std::size_t max_admissible_k(std::size_t n, std::size_t min_len) {
    return n / min_len - 1;
}

SegmentedFit finish_fit(const DailySeries& series, std::vector<std::size_t> breakpoints) {
    SegmentedFit fit{series.window(), std::move(breakpoints), {}, 0.0, 0.0};
    auto counts = series.counts();
    std::size_t first = 0;
    for (std::size_t s = 0; s <= fit.breakpoints.size(); ++s) {
        std::size_t last = s < fit.breakpoints.size() ? fit.breakpoints[s] : counts.size();
        auto segment = counts.subspan(first, last - first);
        double sum = std::accumulate(segment.begin(), segment.end(), 0.0,
                                     [](double acc, std::int64_t c) { return acc + static_cast<double>(c); });
        fit.rates.push_back(sum / static_cast<double>(segment.size()));
        fit.rss += segment_rss(segment);
        first = last;
    }
    fit.bic = segmented_bic(fit.rss, counts.size(), fit.k());
    return fit;
}

} // namespace

double segmented_bic(double rss, std::size_t n, std::size_t k) {
    auto dn = static_cast<double>(n);
    return dn * std::log(std::max(rss, RSS_FLOOR) / dn) + static_cast<double>(2 * k + 1) * std::log(dn);
}

double segment_rss(std::span<const std::int64_t> counts) {
    if (counts.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (std::int64_t c : counts) {
        mean += static_cast<double>(c);
    }
    mean /= static_cast<double>(counts.size());
    double rss = 0.0;
    for (std::int64_t c : counts) {
        double r = static_cast<double>(c) - mean;
        rss += r * r;
    }
    return rss;
}

SegmentedFit fit_segments(const DailySeries& series, std::size_t k, std::size_t min_segment_len) {
    const std::size_t n = series.size();
    const std::size_t len = std::max<std::size_t>(min_segment_len, 1);
    if (n < (k + 1) * len) {
        throw InvalidInputError{fmt::format("{}-day window is too short for {} breakpoints with segments of {} days",
                                            n, k, len)};
    }
    SegmentCosts cost{series.counts()};
    const double tol = cost.tolerance();

    // best[s][i]: minimal RSS of splitting days [i, n) into s + 1 segments.
    // next[s][i]: first day of the second of those segments.
    // Solving from the right and taking the earliest near-optimal split at
    // every step yields the lexicographically smallest optimal placement.
    std::vector<std::vector<double>> best(k + 1, std::vector<double>(n + 1, INF));
    std::vector<std::vector<std::size_t>> next(k + 1, std::vector<std::size_t>(n + 1, n));
    for (std::size_t i = 0; i + len <= n; ++i) {
        best[0][i] = cost(i, n);
    }
    std::vector<double> candidates;
    for (std::size_t s = 1; s <= k; ++s) {
        for (std::size_t i = 0; i + (s + 1) * len <= n; ++i) {
            std::size_t first_j = i + len;
            std::size_t last_j = n - s * len;
            candidates.assign(last_j - first_j + 1, INF);
            double lowest = INF;
            for (std::size_t j = first_j; j <= last_j; ++j) {
                double value = cost(i, j) + best[s - 1][j];
                candidates[j - first_j] = value;
                lowest = std::min(lowest, value);
            }
            for (std::size_t j = first_j; j <= last_j; ++j) {
                if (candidates[j - first_j] <= lowest + tol) {
                    best[s][i] = candidates[j - first_j];
                    next[s][i] = j;
                    break;
                }
            }
        }
    }

    std::vector<std::size_t> breakpoints;
    std::size_t i = 0;
    for (std::size_t s = k; s >= 1; --s) {
        i = next[s][i];
        breakpoints.push_back(i);
    }
    return finish_fit(series, std::move(breakpoints));
}

SegmentedFit select_fit(const DailySeries& series, std::size_t k_max, std::size_t min_segment_len) {
    const std::size_t len = std::max<std::size_t>(min_segment_len, 1);
    if (series.size() < len) {
        throw InvalidInputError{fmt::format("{}-day window is shorter than the minimum segment of {} days",
                                            series.size(), len)};
    }
    std::size_t top = std::min(k_max, max_admissible_k(series.size(), len));
    SegmentedFit chosen = fit_segments(series, 0, len);
    for (std::size_t k = 1; k <= top; ++k) {
        SegmentedFit fit = fit_segments(series, k, len);
        if (fit.bic < chosen.bic) {
            chosen = std::move(fit);
        }
    }
    return chosen;
}

std::vector<Jump> relative_jumps(const SegmentedFit& fit, double mean_rate, std::string_view user_id) {
    if (!(mean_rate > 0.0)) {
        throw DegenerateInputError{fmt::format("relative jumps of '{}' need a positive mean rate", user_id)};
    }
    std::vector<Jump> out;
    out.reserve(fit.k());
    for (std::size_t i = 0; i < fit.k(); ++i) {
        out.push_back(Jump{std::string{user_id}, fit.window.date_at(fit.breakpoints[i]),
                           (fit.rates[i + 1] - fit.rates[i]) / mean_rate});
    }
    return out;
}

std::vector<double> breakpoint_count_histogram(std::span<const SegmentedFit> fits, std::size_t k_max) {
    if (fits.empty()) {
        return {};
    }
    std::size_t top = k_max;
    for (const SegmentedFit& fit : fits) {
        top = std::max(top, fit.k());
    }
    std::vector<double> out(top + 1, 0.0);
    for (const SegmentedFit& fit : fits) {
        out[fit.k()] += 1.0;
    }
    for (double& v : out) {
        v /= static_cast<double>(fits.size());
    }
    return out;
}

} // namespace shiftscope
