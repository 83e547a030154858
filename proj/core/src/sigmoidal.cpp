#include "shiftscope/switchpoint.hpp"

#include "shiftscope/random.hpp"
#include "switchpoint_internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace shiftscope {
namespace {

constexpr double NEG_INF = -std::numeric_limits<double>::infinity();

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Unconstrained state: log rates, centre in day units, log width fraction.
struct State {
    double log_before;
    double log_after;
    double centre;
    double log_width;
};

class SigmoidalTarget {
public:
    SigmoidalTarget(std::span<const std::int64_t> counts, double alpha, double width_scale)
        : m_Counts{counts}, m_Alpha{alpha}, m_WidthScale{width_scale} {}

    double centre_low() const { return 0.5; }
    double centre_high() const { return static_cast<double>(m_Counts.size()) - 0.5; }

    double operator()(const State& s, bool width_fixed) const {
        if (!(s.centre > centre_low() && s.centre < centre_high())) {
            return NEG_INF;
        }
        double before = std::exp(s.log_before);
        double after = std::exp(s.log_after);
        double fraction = std::exp(s.log_width);
        double scale = fraction * static_cast<double>(m_Counts.size());
        double lp = -m_Alpha * before + s.log_before - m_Alpha * after + s.log_after;
        if (!width_fixed) {
            double ratio = fraction / m_WidthScale;
            lp += -std::log1p(ratio * ratio) + s.log_width;
        }
        for (std::size_t i = 0; i < m_Counts.size(); ++i) {
            double x = static_cast<double>(i) + 0.5;
            double mu = before + (after - before) * logistic((x - s.centre) / scale);
            mu = std::max(mu, std::numeric_limits<double>::min());
            lp += detail::xlogy(static_cast<double>(m_Counts[i]), mu) - mu;
        }
        return std::isfinite(lp) ? lp : NEG_INF;
    }

private:
    std::span<const std::int64_t> m_Counts;
    double m_Alpha;
    double m_WidthScale;
};

// Univariate slice sampler with stepping out and shrinkage (Neal 2003).
template <typename LogDensity>
double slice_step(double x0, double current_lp, double width, double low, double high, LogDensity&& lp, Rng& rng) {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    double level = current_lp + std::log(unit(rng));
    double left = x0 - width * unit(rng);
    double right = left + width;
    for (int steps = 0; steps < 32 && left > low && lp(left) > level; ++steps) {
        left -= width;
    }
    for (int steps = 0; steps < 32 && right < high && lp(right) > level; ++steps) {
        right += width;
    }
    left = std::max(left, low);
    right = std::min(right, high);
    for (int tries = 0; tries < 200; ++tries) {
        double x1 = left + (right - left) * unit(rng);
        if (lp(x1) > level) {
            return x1;
        }
        if (x1 < x0) {
            left = x1;
        } else {
            right = x1;
        }
    }
    return x0;
}

// Mode of a sample through a Gaussian kernel density on a fixed grid.
double sample_mode(const std::vector<double>& draws) {
    auto [lo_it, hi_it] = std::minmax_element(draws.begin(), draws.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi - lo <= 0.0) {
        return lo;
    }
    double mean = 0.0;
    for (double v : draws) {
        mean += v;
    }
    mean /= static_cast<double>(draws.size());
    double var = 0.0;
    for (double v : draws) {
        var += (v - mean) * (v - mean);
    }
    double sd = std::sqrt(var / static_cast<double>(draws.size() - 1));
    double bandwidth = 1.06 * sd * std::pow(static_cast<double>(draws.size()), -0.2);
    constexpr std::size_t grid = 512;
    double best_x = lo;
    double best = -1.0;
    for (std::size_t g = 0; g < grid; ++g) {
        double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid - 1);
        double density = 0.0;
        for (double v : draws) {
            double z = (x - v) / bandwidth;
            if (std::abs(z) < 6.0) {
                density += std::exp(-0.5 * z * z);
            }
        }
        if (density > best) {
            best = density;
            best_x = x;
        }
    }
    return best_x;
}

} // namespace

SigmoidalPosterior fit_sigmoidal(const DailySeries& series, const PriorConfig& prior, const SigmoidalOptions& options) {
    if (series.size() < 3) {
        throw InvalidInputError{fmt::format("switchpoint model needs at least 3 days, got {}", series.size())};
    }
    detail::check_mcmc_options(options.mcmc);
    if (!(prior.alpha > 0.0) || !(options.width_scale > 0.0)) {
        throw InvalidInputError{"sigmoidal model needs positive alpha and width scale"};
    }
    if (options.fixed_width && !(*options.fixed_width > 0.0)) {
        throw InvalidInputError{"fixed sigmoid width must be positive"};
    }
    const std::size_t n = series.size();
    const bool width_fixed = options.fixed_width.has_value();
    SigmoidalTarget target{series.counts(), prior.alpha, options.width_scale / static_cast<double>(n)};
    const double mean_count = total_and_mean_rate(series).mean;

    // Independence proposal for the centre: a day drawn from the hard-switch
    // posterior mixed with a uniform day, then a uniform offset within it.
    // Lets the chain hop between separated modes that slice moves cross slowly.
    std::vector<double> proposal = exact_posterior(series, prior).switch_pmf;
    for (double& p : proposal) {
        p = 0.8 * p + 0.2 / static_cast<double>(n - 1);
    }
    std::discrete_distribution<std::size_t> propose_day{proposal.begin(), proposal.end()};
    auto log_proposal = [&](double centre) {
        auto day = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(centre + 0.5)), 1, n - 1);
        return std::log(proposal[day - 1]);
    };

    std::vector<double> before;
    std::vector<double> after;
    std::vector<double> centres;
    std::vector<double> widths;
    std::vector<std::size_t> day_draws;

    for (std::size_t chain = 0; chain < options.mcmc.chains; ++chain) {
        Rng rng = make_rng(options.mcmc.seed ^ 0x5167a0d1ULL, chain);
        std::uniform_real_distribution<double> unit{0.0, 1.0};
        State s{std::log(mean_count + 0.5) + (unit(rng) - 0.5), std::log(mean_count + 0.5) + (unit(rng) - 0.5),
                target.centre_low() + (target.centre_high() - target.centre_low()) * unit(rng),
                std::log(width_fixed ? *options.fixed_width : options.width_scale / static_cast<double>(n))};
        double lp = target(s, width_fixed);

        auto update = [&](double State::*field, double width, double low, double high) {
            auto density = [&](double v) {
                State trial = s;
                trial.*field = v;
                return target(trial, width_fixed);
            };
            s.*field = slice_step(s.*field, lp, width, low, high, density, rng);
            lp = target(s, width_fixed);
        };

        const double inf = std::numeric_limits<double>::infinity();
        for (std::size_t iter = 0; iter < options.mcmc.warmup + options.mcmc.draws; ++iter) {
            update(&State::log_before, 0.5, -inf, inf);
            update(&State::log_after, 0.5, -inf, inf);
            update(&State::centre, std::max(2.0, 0.05 * static_cast<double>(n)), target.centre_low(),
                   target.centre_high());
            {
                State trial = s;
                trial.centre = static_cast<double>(propose_day(rng)) + 0.5 + unit(rng);
                trial.centre = std::clamp(trial.centre, target.centre_low(), target.centre_high());
                double trial_lp = target(trial, width_fixed);
                double log_ratio = trial_lp - lp + log_proposal(s.centre) - log_proposal(trial.centre);
                if (std::log(unit(rng)) < log_ratio) {
                    s = trial;
                    lp = trial_lp;
                }
            }
            if (!width_fixed) {
                update(&State::log_width, 1.0, -inf, inf);
            }
            if (iter >= options.mcmc.warmup) {
                before.push_back(std::exp(s.log_before));
                after.push_back(std::exp(s.log_after));
                centres.push_back(s.centre);
                widths.push_back(width_fixed ? *options.fixed_width : std::exp(s.log_width));
                auto day = static_cast<std::size_t>(std::floor(s.centre + 0.5));
                day_draws.push_back(std::clamp<std::size_t>(day, 1, n - 1));
            }
        }
    }

    std::vector<double> pmf(n - 1, 0.0);
    for (std::size_t t : day_draws) {
        pmf[t - 1] += 1.0;
    }
    for (double& p : pmf) {
        p /= static_cast<double>(day_draws.size());
    }

    std::vector<ParameterDiagnostics> diagnostics{
        diagnose("rate_before", detail::by_chain(before, options.mcmc.chains)),
        diagnose("rate_after", detail::by_chain(after, options.mcmc.chains)),
        diagnose("centre", detail::by_chain(centres, options.mcmc.chains)),
    };
    if (!width_fixed) {
        diagnostics.push_back(diagnose("width", detail::by_chain(widths, options.mcmc.chains)));
    }
    detail::require_convergence(diagnostics, options.mcmc, "sigmoidal");

    std::vector<double> sorted = widths;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    double width_median = sorted[sorted.size() / 2];
    SigmoidalPosterior out{
        SwitchpointPosterior{series.window(), std::move(pmf), sample_mode(before), sample_mode(after),
                             std::move(before), std::move(after), std::move(day_draws), std::move(diagnostics),
                             std::nullopt},
        std::move(widths), width_median};
    return out;
}

} // namespace shiftscope
