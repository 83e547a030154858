#include "shiftscope/activity.hpp"

#include "shiftscope/error.hpp"
#include "shiftscope/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace shiftscope {
namespace {

std::size_t count_retweets(const Timeline& timeline) {
    return static_cast<std::size_t>(std::count_if(timeline.events().begin(), timeline.events().end(),
                                                  [](const Event& e) { return e.is_retweet(); }));
}

// Type 7 quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double q) {
    double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median_inplace(std::vector<double>& values) {
    std::size_t n = values.size();
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace

double replicated_fraction(const Timeline& timeline) {
    if (timeline.empty()) {
        throw DegenerateInputError{fmt::format("replicated fraction of empty timeline '{}'", timeline.user_id())};
    }
    return static_cast<double>(count_retweets(timeline)) / static_cast<double>(timeline.size());
}

std::optional<double> source_entropy(const Timeline& timeline) {
    std::map<std::string, std::size_t> per_source;
    std::size_t retweets = 0;
    for (const Event& e : timeline.events()) {
        if (e.is_retweet()) {
            ++per_source[e.source_id()];
            ++retweets;
        }
    }
    if (retweets < 2) {
        return std::nullopt;
    }
    double total = static_cast<double>(retweets);
    double h = 0.0;
    for (const auto& [source, count] : per_source) {
        double p = static_cast<double>(count) / total;
        h -= p * std::log(p);
    }
    // Clamp rounding noise around the two extremes.
    return std::clamp(h / std::log(total), 0.0, 1.0);
}

ActivityPoint activity_point(const Timeline& timeline) {
    ActivityPoint point;
    point.user_id = timeline.user_id();
    point.user_class = timeline.user_class();
    point.messages = timeline.size();
    point.retweets = count_retweets(timeline);
    point.rho = replicated_fraction(timeline);
    point.entropy = source_entropy(timeline);
    return point;
}

Histogram::Histogram(std::vector<double> edges, std::vector<double> probabilities)
    : m_Edges{std::move(edges)}, m_Probabilities{std::move(probabilities)} {
    if (m_Edges.size() != m_Probabilities.size() + 1) {
        throw InvalidInputError{"histogram needs one more edge than bins"};
    }
}

Histogram build_histogram(std::span<const double> values, std::size_t bins, Interval support, double epsilon) {
    if (bins < 2) {
        throw InvalidInputError{"histogram needs at least two bins"};
    }
    if (!(epsilon > 0.0)) {
        throw InvalidInputError{"histogram smoothing epsilon must be positive"};
    }
    if (!(support.low < support.high)) {
        throw InvalidInputError{"histogram support must be a non-empty interval"};
    }
    if (values.empty()) {
        throw DegenerateInputError{"histogram of an empty sample"};
    }
    std::vector<double> edges(bins + 1);
    double width = (support.high - support.low) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) {
        edges[i] = support.low + width * static_cast<double>(i);
    }
    edges.back() = support.high;

    std::vector<double> counts(bins, 0.0);
    for (double v : values) {
        if (!(v >= support.low && v <= support.high)) {
            throw InvalidInputError{fmt::format("value {} outside histogram support [{}, {}]", v, support.low, support.high)};
        }
        auto bin = static_cast<std::size_t>((v - support.low) / width);
        counts[std::min(bin, bins - 1)] += 1.0;
    }
    double n = static_cast<double>(values.size());
    double norm = 1.0 + epsilon * static_cast<double>(bins);
    std::vector<double> probabilities(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        probabilities[i] = (counts[i] / n + epsilon) / norm;
    }
    return Histogram{std::move(edges), std::move(probabilities)};
}

double kl_divergence(const Histogram& p, const Histogram& q) {
    if (!std::equal(p.edges().begin(), p.edges().end(), q.edges().begin(), q.edges().end())) {
        throw InvalidInputError{"KL divergence needs histograms on identical bins"};
    }
    double d = 0.0;
    for (std::size_t i = 0; i < p.bins(); ++i) {
        double pi = p.probabilities()[i];
        double qi = q.probabilities()[i];
        if (pi > 0.0) {
            if (!(qi > 0.0)) {
                throw InvalidInputError{"KL divergence undefined: q vanishes where p does not"};
            }
            d += pi * std::log(pi / qi);
        }
    }
    return std::max(d, 0.0);
}

std::string_view to_string(Metric metric) {
    return metric == Metric::rho ? "rho" : "h";
}

std::vector<double> metric_values(std::span<const ActivityPoint> points, UserClass cls, Metric metric) {
    std::vector<double> out;
    for (const ActivityPoint& point : points) {
        if (point.user_class != cls) {
            continue;
        }
        if (metric == Metric::rho) {
            out.push_back(point.rho);
        } else if (point.entropy) {
            out.push_back(*point.entropy);
        }
    }
    return out;
}

DivergenceMatrix class_divergence_matrix(std::span<const ActivityPoint> points, Metric metric,
                                         const HistogramOptions& options) {
    DivergenceMatrix out;
    std::vector<Histogram> histograms;
    for (UserClass cls : ALL_USER_CLASSES) {
        bool present = std::any_of(points.begin(), points.end(),
                                   [cls](const ActivityPoint& p) { return p.user_class == cls; });
        if (!present) {
            continue;
        }
        std::vector<double> values = metric_values(points, cls, metric);
        if (values.size() < MIN_VALUES_PER_CLASS) {
            throw InvalidInputError{fmt::format("class '{}' has {} defined {} values, need at least {}",
                                                to_string(cls), values.size(), to_string(metric),
                                                MIN_VALUES_PER_CLASS)};
        }
        out.classes.push_back(cls);
        histograms.push_back(build_histogram(values, options.bins, options.support, options.epsilon));
    }
    if (out.classes.size() < 2) {
        throw InvalidInputError{"divergence matrix needs at least two classes"};
    }
    std::size_t k = out.classes.size();
    out.values.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j) {
                out.values[i][j] = kl_divergence(histograms[i], histograms[j]);
            }
        }
    }
    return out;
}

double median(std::span<const double> values) {
    if (values.empty()) {
        throw DegenerateInputError{"median of an empty sample"};
    }
    std::vector<double> copy(values.begin(), values.end());
    return median_inplace(copy);
}

MedianInterval bootstrap_median_ci(std::span<const double> values, std::size_t resamples, double level,
                                   std::uint64_t seed) {
    if (values.empty()) {
        throw DegenerateInputError{"bootstrap of an empty sample"};
    }
    if (resamples == 0) {
        throw InvalidInputError{"bootstrap needs at least one resample"};
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidInputError{"bootstrap confidence level must lie in (0, 1)"};
    }
    MedianInterval out;
    out.median = median(values);

    Rng rng{derive_seed(seed, 0)};
    std::uniform_int_distribution<std::size_t> pick{0, values.size() - 1};
    std::vector<double> medians(resamples);
    std::vector<double> resample(values.size());
    for (std::size_t r = 0; r < resamples; ++r) {
        for (double& v : resample) {
            v = values[pick(rng)];
        }
        medians[r] = median_inplace(resample);
    }
    std::sort(medians.begin(), medians.end());
    double tail = 0.5 * (1.0 - level);
    // The percentile interval is reported so that it always brackets the sample median.
    out.low = std::min(sorted_quantile(medians, tail), out.median);
    out.high = std::max(sorted_quantile(medians, 1.0 - tail), out.median);
    return out;
}

} // namespace shiftscope
