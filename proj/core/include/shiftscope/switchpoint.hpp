#pragma once

#include "shiftscope/error.hpp"
#include "shiftscope/jumps.hpp"
#include "shiftscope/mcmc_diagnostics.hpp"
#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace shiftscope {

/// Exponential(alpha) prior on both Poisson rates.
struct PriorConfig {
    double alpha = 1.0;

    /// alpha = 1 / (mean daily count + epsilon): the prior mean rate equals
    /// the empirical mean.
    static PriorConfig data_driven(const DailySeries& series, double epsilon = 1e-9);
};

/// Posterior of the single-switch Poisson model.
///
/// Switch day t (1 <= t <= n - 1) means days [0, t) run at the rate before
/// the switch and days [t, n) at the rate after it. `switch_pmf[i]` is the
/// posterior probability of switch day i + 1. The rate modes are the modes of
/// the marginal posteriors of the two rates.
struct SwitchpointPosterior {
    AnalysisWindow window;
    std::vector<double> switch_pmf;
    double rate_before_mode = 0.0;
    double rate_after_mode = 0.0;
    std::vector<double> rate_before_draws;
    std::vector<double> rate_after_draws;
    std::vector<std::size_t> switch_day_draws;
    std::vector<ParameterDiagnostics> diagnostics;
    std::optional<double> p_value;

    std::size_t days() const { return switch_pmf.size() + 1; }
    static constexpr std::size_t day_of_entry(std::size_t i) { return i + 1; }
    /// Switch day with the largest posterior mass (earliest on ties).
    std::size_t map_switch_day() const;
    Date map_switch_date() const { return window.date_at(map_switch_day()); }
};

/// Closed-form posterior by Gamma-Poisson conjugacy, enumerating every
/// interior switch day. Throws InvalidInputError for fewer than 3 days.
SwitchpointPosterior exact_posterior(const DailySeries& series, const PriorConfig& prior);

struct McmcOptions {
    std::size_t chains = 4;
    std::size_t draws = 1000;
    std::size_t warmup = 500;
    std::uint64_t seed = 0;
    double max_rhat = 1.05;
    double min_ess = 400.0;
};

/// Raised when a sampler fails its convergence checks; carries the diagnostics.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<ParameterDiagnostics> diagnostics)
        : Error{what}, m_Diagnostics{std::move(diagnostics)} {}

    const std::vector<ParameterDiagnostics>& diagnostics() const { return m_Diagnostics; }

private:
    std::vector<ParameterDiagnostics> m_Diagnostics;
};

/// Partially collapsed Gibbs sampler. Each iteration draws the switch day
/// given one rate with the other integrated out, then that other rate from its
/// Gamma conditional, once for each side. The switch-day pmf is the
/// Rao-Blackwell average of the switch-day conditionals. Deterministic given the
/// seed; chains are merged in chain order.
/// Throws InvalidInputError on bad options and ConvergenceError when split
/// R-hat exceeds max_rhat or the ESS falls below min_ess for either rate.
SwitchpointPosterior mcmc_posterior(const DailySeries& series, const PriorConfig& prior,
                                    const McmcOptions& options = {});

/// Mode of the marginal posterior of each rate given a switch-day pmf,
/// i.e. the mode of the mixture over switch days of the conditional Gamma
/// posteriors. Returns {rate before, rate after}.
std::pair<double, double> marginal_rate_modes(const DailySeries& series, std::span<const double> switch_pmf,
                                              const PriorConfig& prior);

inline constexpr double DEFAULT_PMF_FLOOR = 1e-4;

/// Probability-weighted jumps P(t) * (rate after - rate before) / mean_rate,
/// one per switch day whose mass reaches `pmf_floor`.
/// Throws DegenerateInputError unless mean_rate > 0.
std::vector<Jump> switch_jumps(const SwitchpointPosterior& posterior, double mean_rate,
                               std::string_view user_id, double pmf_floor = DEFAULT_PMF_FLOOR);

/// Same reduction as aggregate_jumps; the magnitudes are already probability weighted.
inline JumpSeries aggregate_switch_jumps(std::span<const Jump> jumps, const AnalysisWindow& window) {
    return aggregate_jumps(jumps, window);
}

/// Maximum a posteriori single-switch fit: the switch day with the largest
/// marginal likelihood and the conditional Gamma modes S / (d + alpha).
struct SwitchFit {
    std::size_t switch_day = 1;
    double rate_before = 0.0;
    double rate_after = 0.0;
};

SwitchFit map_switch_fit(std::span<const std::int64_t> counts, const PriorConfig& prior);

/// 2 * sum(y ln(y / mu) - (y - mu)).
double poisson_deviance(std::span<const std::int64_t> counts, std::span<const double> means);

/// Deviance of the series under its own MAP single-switch fit.
double switch_deviance(std::span<const std::int64_t> counts, const PriorConfig& prior);

inline constexpr std::size_t MIN_PPC_REPLICATES = 100;

/// Posterior-predictive p-value: the fraction of replicated series, drawn
/// from the posterior predictive, whose test statistic is at least the
/// observed one. Uses the posterior draws when present, otherwise draws the
/// switch day from the pmf and the rates from their conditionals.
/// Throws InvalidInputError for replicates < MIN_PPC_REPLICATES or a series
/// that does not match the posterior window.
double posterior_predictive_pvalue(const SwitchpointPosterior& posterior, const DailySeries& series,
                                   const PriorConfig& prior, std::size_t replicates, std::uint64_t seed);

struct SigmoidalOptions {
    McmcOptions mcmc;
    /// Scale, in days, of the half-Cauchy prior on the transition width.
    double width_scale = 0.02;
    /// Pins the width instead of sampling it.
    std::optional<double> fixed_width;
};

/// Smooth-transition variant: rate(i) = before + (after - before) * sigmoid((x_i - c) / w)
/// with x_i = i + 1/2 the centre of day i, centre c uniform on (1/2, n - 1/2) and
/// width w = width_fraction * n. The switch day reported for a draw is the
/// first day whose centre lies past c.
struct SigmoidalPosterior {
    SwitchpointPosterior switchpoint;
    std::vector<double> width_draws;
    double width_median = 0.0;
};

/// Slice-within-Gibbs sampler over (rate before, rate after, centre, width).
/// Same error contract as mcmc_posterior.
SigmoidalPosterior fit_sigmoidal(const DailySeries& series, const PriorConfig& prior,
                                 const SigmoidalOptions& options = {});

struct MultistateFit {
    std::size_t levels = 1;
    std::vector<std::size_t> switch_days;
    std::vector<double> level_rates;
    double log_likelihood = 0.0;
    double bic = 0.0;
    /// BIC of the best fit with 1 ... max_levels levels (index L - 1).
    std::vector<double> bic_by_levels;
};

/// MAP fit of L ordered levels for L = 1 ... max_levels, each by dynamic
/// programming over switch placements with per-segment MAP rates
/// S / (d + alpha); returns the L minimising -2 logLik + (2L - 1) ln n (ties
/// to fewer levels). Throws InvalidInputError if max_levels == 0 or the
/// window cannot hold max_levels segments of min_segment_len days.
MultistateFit fit_multistate(const DailySeries& series, const PriorConfig& prior, std::size_t max_levels,
                             std::size_t min_segment_len = 7);

} // namespace shiftscope
