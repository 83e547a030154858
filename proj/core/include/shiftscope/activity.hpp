#pragma once

#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shiftscope {

/// Production-vs-amplification profile of one account.
///
/// `rho` is the fraction of the account's messages that are retweets and
/// `entropy` is the entropy of its retweet sources normalised by ln(R), the
/// entropy of an account that retweets every source once. The normalised
/// entropy is undefined for fewer than two retweets.
struct ActivityPoint {
    std::string user_id;
    UserClass user_class = UserClass::generic;
    std::size_t messages = 0;
    std::size_t retweets = 0;
    double rho = 0.0;
    std::optional<double> entropy;
};

/// Throws DegenerateInputError on an empty timeline.
double replicated_fraction(const Timeline& timeline);

/// Normalised source entropy in nats/nats; nullopt when fewer than two retweets.
std::optional<double> source_entropy(const Timeline& timeline);

/// Throws DegenerateInputError on an empty timeline.
ActivityPoint activity_point(const Timeline& timeline);

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Equal-width histogram with additive smoothing. Probabilities are strictly
/// positive and sum to one.
class Histogram {
public:
    Histogram(std::vector<double> edges, std::vector<double> probabilities);

    std::span<const double> edges() const { return m_Edges; }
    std::span<const double> probabilities() const { return m_Probabilities; }
    std::size_t bins() const { return m_Probabilities.size(); }

private:
    std::vector<double> m_Edges;
    std::vector<double> m_Probabilities;
};

/// Values equal to the upper end of the support land in the last bin.
/// Throws InvalidInputError for bins < 2, epsilon <= 0 or a value outside the
/// support and DegenerateInputError for an empty sample.
Histogram build_histogram(std::span<const double> values, std::size_t bins, Interval support, double epsilon);

/// KL divergence D(P || Q) in nats. Throws InvalidInputError if the bin edges differ.
double kl_divergence(const Histogram& p, const Histogram& q);

enum class Metric { rho, entropy };

std::string_view to_string(Metric metric);

struct HistogramOptions {
    std::size_t bins = 25;
    double epsilon = 1e-9;
    Interval support{0.0, 1.0};
};

/// Row i, column j holds D(class_i || class_j).
struct DivergenceMatrix {
    std::vector<UserClass> classes;
    std::vector<std::vector<double>> values;
};

/// Minimum number of defined metric values a class needs to take part.
inline constexpr std::size_t MIN_VALUES_PER_CLASS = 2;

/// Metric values of the points of one class; undefined entropies are skipped.
std::vector<double> metric_values(std::span<const ActivityPoint> points, UserClass cls, Metric metric);

/// Pairwise divergences between the classes present in `points`, in
/// enumeration order. Throws InvalidInputError if fewer than two classes are
/// present or a class has fewer than MIN_VALUES_PER_CLASS defined values (the
/// message names the class).
DivergenceMatrix class_divergence_matrix(std::span<const ActivityPoint> points, Metric metric,
                                         const HistogramOptions& options = {});

struct MedianInterval {
    double median = 0.0;
    double low = 0.0;
    double high = 0.0;
};

double median(std::span<const double> values);

/// Sample median with a percentile bootstrap interval of the median.
/// Deterministic given `seed`. Throws DegenerateInputError on an empty sample
/// and InvalidInputError for resamples == 0 or level outside (0, 1).
MedianInterval bootstrap_median_ci(std::span<const double> values, std::size_t resamples = 1000,
                                   double level = 0.95, std::uint64_t seed = 0);

} // namespace shiftscope
