#pragma once

// Reference computations used to check the library. They are deliberately
// naive: exhaustive enumeration, exact integer arithmetic and numeric
// quadrature instead of closed forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace shiftscope::oracle {

struct Placement {
    std::vector<std::size_t> breakpoints;
    double rss = 0.0;
};

/// Two-pass residual sum of squares of each segment, summed in order.
inline double placement_rss(std::span<const std::int64_t> counts, const std::vector<std::size_t>& breakpoints) {
    double rss = 0.0;
    std::size_t first = 0;
    for (std::size_t s = 0; s <= breakpoints.size(); ++s) {
        std::size_t last = s < breakpoints.size() ? breakpoints[s] : counts.size();
        double mean = 0.0;
        for (std::size_t i = first; i < last; ++i) {
            mean += static_cast<double>(counts[i]);
        }
        mean /= static_cast<double>(last - first);
        double seg = 0.0;
        for (std::size_t i = first; i < last; ++i) {
            double r = static_cast<double>(counts[i]) - mean;
            seg += r * r;
        }
        rss += seg;
        first = last;
    }
    return rss;
}

/// Exhaustive search over placements of k breakpoints (k <= 2) with segments
/// of at least min_len days. Minimising RSS is maximising sum(S_i^2 / L_i),
/// which is compared exactly over the common denominator L_0 * ... * L_k.
/// Ties keep the lexicographically smallest placement.
inline Placement brute_force_segments(std::span<const std::int64_t> counts, std::size_t k, std::size_t min_len) {
    const std::size_t n = counts.size();
    std::vector<std::int64_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + counts[i];
    }
    auto score = [&](const std::vector<std::size_t>& bps, __int128& num, __int128& den) {
        std::vector<std::size_t> cuts{0};
        cuts.insert(cuts.end(), bps.begin(), bps.end());
        cuts.push_back(n);
        den = 1;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            den *= static_cast<__int128>(cuts[s + 1] - cuts[s]);
        }
        num = 0;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            __int128 len = static_cast<__int128>(cuts[s + 1] - cuts[s]);
            __int128 sum = prefix[cuts[s + 1]] - prefix[cuts[s]];
            num += sum * sum * (den / len);
        }
    };

    std::vector<std::vector<std::size_t>> all;
    if (k == 0) {
        all.push_back({});
    } else if (k == 1) {
        for (std::size_t a = min_len; a + min_len <= n; ++a) {
            all.push_back({a});
        }
    } else {
        for (std::size_t a = min_len; a + 2 * min_len <= n; ++a) {
            for (std::size_t b = a + min_len; b + min_len <= n; ++b) {
                all.push_back({a, b});
            }
        }
    }
    std::vector<std::size_t> best;
    __int128 best_num = -1;
    __int128 best_den = 1;
    for (const auto& bps : all) {
        __int128 num = 0;
        __int128 den = 1;
        score(bps, num, den);
        // num / den > best_num / best_den
        if (best_num < 0 || num * best_den > best_num * den) {
            best = bps;
            best_num = num;
            best_den = den;
        }
    }
    return {best, placement_rss(counts, best)};
}

/// Composite Simpson rule on [a, b] with `intervals` (even) sub-intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals) {
    double h = (b - a) / static_cast<double>(intervals);
    double total = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i) {
        total += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return total * h / 3.0;
}

/// Switch-day posterior of the two-rate Poisson model by direct numeric
/// integration of likelihood x Exponential(alpha) priors over both rates.
inline std::vector<double> quadrature_switch_pmf(std::span<const std::int64_t> counts, double alpha) {
    const std::size_t n = counts.size();
    double upper = 10.0;
    for (std::int64_t c : counts) {
        upper = std::max(upper, 10.0 * static_cast<double>(c) + 10.0);
    }
    auto log_factorial = [](std::int64_t y) { return std::lgamma(static_cast<double>(y) + 1.0); };
    std::vector<double> pmf;
    for (std::size_t t = 1; t < n; ++t) {
        auto segment = [&](std::size_t first, std::size_t last) {
            return simpson(
                [&](double rate) {
                    double log_value = std::log(alpha) - alpha * rate;
                    for (std::size_t i = first; i < last; ++i) {
                        double y = static_cast<double>(counts[i]);
                        log_value += (y == 0.0 ? 0.0 : y * std::log(rate)) - rate - log_factorial(counts[i]);
                    }
                    return std::exp(log_value);
                },
                0.0, upper, 20000);
        };
        pmf.push_back(segment(0, t) * segment(t, n));
    }
    double total = 0.0;
    for (double p : pmf) {
        total += p;
    }
    for (double& p : pmf) {
        p /= total;
    }
    return pmf;
}

/// Mode of a density known up to a constant, by dense grid search and local refinement.
inline double grid_mode(const std::function<double(double)>& log_density, double lo, double hi) {
    double best = lo;
    double best_value = -INFINITY;
    for (int pass = 0; pass < 4; ++pass) {
        const int points = 20000;
        double step = (hi - lo) / points;
        for (int i = 0; i <= points; ++i) {
            double x = lo + step * i;
            double v = log_density(x);
            if (v > best_value) {
                best_value = v;
                best = x;
            }
        }
        lo = std::max(0.0, best - 2 * step);
        hi = best + 2 * step;
    }
    return best;
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d += std::abs(p[i] - q[i]);
    }
    return 0.5 * d;
}

} // namespace shiftscope::oracle
