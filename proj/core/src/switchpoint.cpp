#include "shiftscope/switchpoint.hpp"

#include "shiftscope/random.hpp"
#include "switchpoint_internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace shiftscope {
namespace detail {

std::vector<std::int64_t> prefix_sums(std::span<const std::int64_t> counts) {
    std::vector<std::int64_t> prefix(counts.size() + 1, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        prefix[i + 1] = prefix[i] + counts[i];
    }
    return prefix;
}

double log_switch_evidence(const std::vector<std::int64_t>& prefix, std::size_t t, double alpha) {
    const std::size_t n = prefix.size() - 1;
    auto s1 = static_cast<double>(prefix[t]);
    auto s2 = static_cast<double>(prefix[n] - prefix[t]);
    auto d1 = static_cast<double>(t);
    auto d2 = static_cast<double>(n - t);
    return std::lgamma(s1 + 1.0) - (s1 + 1.0) * std::log(d1 + alpha) + std::lgamma(s2 + 1.0) -
           (s2 + 1.0) * std::log(d2 + alpha);
}

void softmax_inplace(std::vector<double>& log_weights) {
    double top = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    for (double& v : log_weights) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : log_weights) {
        v /= total;
    }
}

double xlogy(double s, double rate) {
    return s == 0.0 ? 0.0 : s * std::log(rate);
}

void check_mcmc_options(const McmcOptions& options) {
    if (options.chains < 2) {
        throw InvalidInputError{"MCMC needs at least two chains"};
    }
    if (options.draws < 1000) {
        throw InvalidInputError{"MCMC needs at least 1000 draws per chain after warm-up"};
    }
}

ChainDraws by_chain(const std::vector<double>& merged, std::size_t chains) {
    ChainDraws out(chains);
    std::size_t per = merged.size() / chains;
    for (std::size_t c = 0; c < chains; ++c) {
        out[c].assign(merged.begin() + static_cast<std::ptrdiff_t>(c * per),
                      merged.begin() + static_cast<std::ptrdiff_t>((c + 1) * per));
    }
    return out;
}

void require_convergence(const std::vector<ParameterDiagnostics>& diagnostics, const McmcOptions& options,
                         std::string_view model) {
    for (const ParameterDiagnostics& d : diagnostics) {
        if (d.parameter.rfind("rate", 0) != 0) {
            continue;
        }
        if (!(d.rhat <= options.max_rhat) || !(d.ess >= options.min_ess)) {
            throw ConvergenceError{fmt::format("{} sampler did not converge: {} has R-hat {:.4f} and ESS {:.1f}",
                                               model, d.parameter, d.rhat, d.ess),
                                   diagnostics};
        }
    }
}

} // namespace detail

namespace {

struct GammaComponent {
    double weight;
    double shape;
    double rate;
    double log_norm;
};

double log_mixture_density(const std::vector<GammaComponent>& comps, double x) {
    double top = -std::numeric_limits<double>::infinity();
    thread_local std::vector<double> terms;
    terms.resize(comps.size());
    double log_x = x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const GammaComponent& c = comps[i];
        double kernel = c.shape == 1.0 ? 0.0 : (c.shape - 1.0) * log_x;
        terms[i] = std::log(c.weight) + c.log_norm + kernel - c.rate * x;
        top = std::max(top, terms[i]);
    }
    if (!std::isfinite(top)) {
        return top;
    }
    double total = 0.0;
    for (double t : terms) {
        total += std::exp(t - top);
    }
    return top + std::log(total);
}

// Derivative of the log mixture density at x > 0.
double log_mixture_slope(const std::vector<GammaComponent>& comps, double x) {
    double top = -std::numeric_limits<double>::infinity();
    thread_local std::vector<double> terms;
    terms.resize(comps.size());
    double log_x = std::log(x);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const GammaComponent& c = comps[i];
        terms[i] = std::log(c.weight) + c.log_norm + (c.shape - 1.0) * log_x - c.rate * x;
        top = std::max(top, terms[i]);
    }
    double weight = 0.0;
    double slope = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double w = std::exp(terms[i] - top);
        weight += w;
        slope += w * ((comps[i].shape - 1.0) / x - comps[i].rate);
    }
    return slope / weight;
}

double mixture_mode(std::vector<GammaComponent> comps) {
    double heaviest = 0.0;
    for (const auto& c : comps) {
        heaviest = std::max(heaviest, c.weight);
    }
    std::erase_if(comps, [heaviest](const GammaComponent& c) { return c.weight < 1e-12 * heaviest; });
    for (auto& c : comps) {
        c.log_norm = c.shape * std::log(c.rate) - std::lgamma(c.shape);
    }

    // The global mode lies near one of the component modes.
    double best_x = 0.0;
    double best_value = -std::numeric_limits<double>::infinity();
    double best_sd = 0.0;
    for (const auto& c : comps) {
        double x = (c.shape - 1.0) / c.rate;
        double value = log_mixture_density(comps, x);
        if (value > best_value) {
            best_value = value;
            best_x = x;
            best_sd = std::sqrt(c.shape) / c.rate;
        }
    }

    // Golden-section refinement around the best candidate.
    double lo = std::max(0.0, best_x - 3.0 * best_sd);
    double hi = best_x + 3.0 * best_sd;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = log_mixture_density(comps, a);
    double fb = log_mixture_density(comps, b);
    for (int iter = 0; iter < 100 && hi - lo > 1e-12 * (1.0 + hi); ++iter) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = log_mixture_density(comps, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = log_mixture_density(comps, a);
        }
    }
    double refined = 0.5 * (lo + hi);
    if (!(log_mixture_density(comps, refined) > best_value)) {
        return best_x;
    }
    // The density is flat to rounding near its peak; finish on the sign of the slope.
    double left = refined * (1.0 - 1e-6);
    double right = refined * (1.0 + 1e-6);
    if (refined > 0.0 && log_mixture_slope(comps, left) > 0.0 && log_mixture_slope(comps, right) < 0.0) {
        for (int iter = 0; iter < 60; ++iter) {
            double mid = 0.5 * (left + right);
            (log_mixture_slope(comps, mid) > 0.0 ? left : right) = mid;
        }
        refined = 0.5 * (left + right);
    }
    return refined;
}

void check_posterior_series(const DailySeries& series) {
    if (series.size() < 3) {
        throw InvalidInputError{fmt::format("switchpoint model needs at least 3 days, got {}", series.size())};
    }
}

} // namespace

PriorConfig PriorConfig::data_driven(const DailySeries& series, double epsilon) {
    return PriorConfig{1.0 / (total_and_mean_rate(series).mean + epsilon)};
}

std::size_t SwitchpointPosterior::map_switch_day() const {
    auto it = std::max_element(switch_pmf.begin(), switch_pmf.end());
    return day_of_entry(static_cast<std::size_t>(it - switch_pmf.begin()));
}

std::pair<double, double> marginal_rate_modes(const DailySeries& series, std::span<const double> switch_pmf,
                                              const PriorConfig& prior) {
    const std::size_t n = series.size();
    if (switch_pmf.size() + 1 != n) {
        throw InvalidInputError{"switch pmf does not match the series length"};
    }
    auto prefix = detail::prefix_sums(series.counts());
    std::vector<GammaComponent> before;
    std::vector<GammaComponent> after;
    for (std::size_t i = 0; i < switch_pmf.size(); ++i) {
        if (!(switch_pmf[i] > 0.0)) {
            continue;
        }
        std::size_t t = SwitchpointPosterior::day_of_entry(i);
        auto s1 = static_cast<double>(prefix[t]);
        auto s2 = static_cast<double>(prefix[n] - prefix[t]);
        before.push_back({switch_pmf[i], s1 + 1.0, static_cast<double>(t) + prior.alpha, 0.0});
        after.push_back({switch_pmf[i], s2 + 1.0, static_cast<double>(n - t) + prior.alpha, 0.0});
    }
    if (before.empty()) {
        throw InvalidInputError{"switch pmf carries no mass"};
    }
    return {mixture_mode(std::move(before)), mixture_mode(std::move(after))};
}

SwitchpointPosterior exact_posterior(const DailySeries& series, const PriorConfig& prior) {
    check_posterior_series(series);
    if (!(prior.alpha > 0.0)) {
        throw InvalidInputError{"prior rate alpha must be positive"};
    }
    const std::size_t n = series.size();
    auto prefix = detail::prefix_sums(series.counts());
    std::vector<double> pmf(n - 1);
    for (std::size_t t = 1; t < n; ++t) {
        pmf[t - 1] = detail::log_switch_evidence(prefix, t, prior.alpha);
    }
    detail::softmax_inplace(pmf);

    SwitchpointPosterior out{series.window(), std::move(pmf), 0.0, 0.0, {}, {}, {}, {}, std::nullopt};
    std::tie(out.rate_before_mode, out.rate_after_mode) = marginal_rate_modes(series, out.switch_pmf, prior);
    return out;
}

SwitchpointPosterior mcmc_posterior(const DailySeries& series, const PriorConfig& prior, const McmcOptions& options) {
    check_posterior_series(series);
    detail::check_mcmc_options(options);
    if (!(prior.alpha > 0.0)) {
        throw InvalidInputError{"prior rate alpha must be positive"};
    }
    const std::size_t n = series.size();
    const auto prefix = detail::prefix_sums(series.counts());
    const auto total = static_cast<double>(prefix[n]);
    const double alpha = prior.alpha;
    constexpr double tiny = std::numeric_limits<double>::min();

    std::vector<double> pmf(n - 1, 0.0);
    std::vector<double> before;
    std::vector<double> after;
    std::vector<double> days;
    std::vector<std::size_t> day_draws;
    std::vector<double> conditional(n - 1);

    // Log evidence of each side with its rate integrated out, per switch day.
    std::vector<double> collapsed_before(n - 1);
    std::vector<double> collapsed_after(n - 1);
    for (std::size_t s = 1; s < n; ++s) {
        auto s1 = static_cast<double>(prefix[s]);
        collapsed_before[s - 1] = std::lgamma(s1 + 1.0) - (s1 + 1.0) * std::log(static_cast<double>(s) + alpha);
        collapsed_after[s - 1] =
            std::lgamma(total - s1 + 1.0) - (total - s1 + 1.0) * std::log(static_cast<double>(n - s) + alpha);
    }

    for (std::size_t chain = 0; chain < options.chains; ++chain) {
        Rng rng = make_rng(options.seed, chain);
        auto draw_rate = [&](double shape, double rate) {
            return std::max(std::gamma_distribution<double>{shape, 1.0 / rate}(rng), tiny);
        };
        std::uniform_real_distribution<double> unit{0.0, 1.0};
        auto draw_day = [&] {
            detail::softmax_inplace(conditional);
            double u = unit(rng);
            double acc = 0.0;
            for (std::size_t s = 1; s < n; ++s) {
                acc += conditional[s - 1];
                if (u < acc) {
                    return s;
                }
            }
            return n - 1;
        };
        auto draw_before = [&](std::size_t t) {
            return draw_rate(static_cast<double>(prefix[t]) + 1.0, static_cast<double>(t) + alpha);
        };
        auto draw_after = [&](std::size_t t) {
            return draw_rate(total - static_cast<double>(prefix[t]) + 1.0, static_cast<double>(n - t) + alpha);
        };

        std::size_t t = std::uniform_int_distribution<std::size_t>{1, n - 1}(rng);
        double rate1 = draw_before(t);
        double rate2 = draw_after(t);
        std::vector<double> averaged(n - 1);

        // Partially collapsed Gibbs: (day, rate after) given the rate before,
        // then (day, rate before) given the rate after.
        for (std::size_t iter = 0; iter < options.warmup + options.draws; ++iter) {
            double log1 = std::log(rate1);
            for (std::size_t s = 1; s < n; ++s) {
                conditional[s - 1] =
                    static_cast<double>(prefix[s]) * log1 - static_cast<double>(s) * rate1 + collapsed_after[s - 1];
            }
            t = draw_day();
            averaged = conditional;
            rate2 = draw_after(t);

            double log2 = std::log(rate2);
            for (std::size_t s = 1; s < n; ++s) {
                conditional[s - 1] = collapsed_before[s - 1] + (total - static_cast<double>(prefix[s])) * log2 -
                                     static_cast<double>(n - s) * rate2;
            }
            t = draw_day();
            rate1 = draw_before(t);

            if (iter >= options.warmup) {
                for (std::size_t s = 0; s + 1 < n; ++s) {
                    pmf[s] += 0.5 * (averaged[s] + conditional[s]);
                }
                before.push_back(rate1);
                after.push_back(rate2);
                days.push_back(static_cast<double>(t));
                day_draws.push_back(t);
            }
        }
    }
    double norm = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    for (double& p : pmf) {
        p /= norm;
    }

    std::vector<ParameterDiagnostics> diagnostics{
        diagnose("rate_before", detail::by_chain(before, options.chains)),
        diagnose("rate_after", detail::by_chain(after, options.chains)),
        diagnose("switch_day", detail::by_chain(days, options.chains)),
    };
    detail::require_convergence(diagnostics, options, "switchpoint");

    SwitchpointPosterior out{series.window(), std::move(pmf), 0.0, 0.0, std::move(before), std::move(after),
                             std::move(day_draws), std::move(diagnostics), std::nullopt};
    std::tie(out.rate_before_mode, out.rate_after_mode) = marginal_rate_modes(series, out.switch_pmf, prior);
    return out;
}

std::vector<Jump> switch_jumps(const SwitchpointPosterior& posterior, double mean_rate, std::string_view user_id,
                               double pmf_floor) {
    if (!(mean_rate > 0.0)) {
        throw DegenerateInputError{fmt::format("switch jumps of '{}' need a positive mean rate", user_id)};
    }
    const double relative = (posterior.rate_after_mode - posterior.rate_before_mode) / mean_rate;
    std::vector<Jump> out;
    for (std::size_t i = 0; i < posterior.switch_pmf.size(); ++i) {
        double p = posterior.switch_pmf[i];
        if (p >= pmf_floor) {
            out.push_back(Jump{std::string{user_id},
                               posterior.window.date_at(SwitchpointPosterior::day_of_entry(i)), p * relative});
        }
    }
    return out;
}

SwitchFit map_switch_fit(std::span<const std::int64_t> counts, const PriorConfig& prior) {
    const std::size_t n = counts.size();
    if (n < 2) {
        throw InvalidInputError{"a switch needs at least two days"};
    }
    auto prefix = detail::prefix_sums(counts);
    std::size_t best = 1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t < n; ++t) {
        double value = detail::log_switch_evidence(prefix, t, prior.alpha);
        if (value > best_value) {
            best_value = value;
            best = t;
        }
    }
    return SwitchFit{best, static_cast<double>(prefix[best]) / (static_cast<double>(best) + prior.alpha),
                     static_cast<double>(prefix[n] - prefix[best]) / (static_cast<double>(n - best) + prior.alpha)};
}

double poisson_deviance(std::span<const std::int64_t> counts, std::span<const double> means) {
    double dev = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        auto y = static_cast<double>(counts[i]);
        double mu = means[i];
        if (y > 0.0) {
            if (!(mu > 0.0)) {
                return std::numeric_limits<double>::infinity();
            }
            dev += y * std::log(y / mu);
        }
        dev -= y - mu;
    }
    return 2.0 * dev;
}

double switch_deviance(std::span<const std::int64_t> counts, const PriorConfig& prior) {
    SwitchFit fit = map_switch_fit(counts, prior);
    std::vector<double> means(counts.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        means[i] = i < fit.switch_day ? fit.rate_before : fit.rate_after;
    }
    return poisson_deviance(counts, means);
}

double posterior_predictive_pvalue(const SwitchpointPosterior& posterior, const DailySeries& series,
                                   const PriorConfig& prior, std::size_t replicates, std::uint64_t seed) {
    if (replicates < MIN_PPC_REPLICATES) {
        throw InvalidInputError{fmt::format("posterior predictive check needs at least {} replicates",
                                            MIN_PPC_REPLICATES)};
    }
    if (posterior.days() != series.size() || !(posterior.window == series.window())) {
        throw InvalidInputError{"posterior and series cover different windows"};
    }
    const std::size_t n = series.size();
    const auto prefix = detail::prefix_sums(series.counts());
    const double observed = switch_deviance(series.counts(), prior);
    const bool has_draws = !posterior.switch_day_draws.empty();

    Rng rng = make_rng(seed, 0);
    std::discrete_distribution<std::size_t> pick_entry{posterior.switch_pmf.begin(), posterior.switch_pmf.end()};
    std::uniform_int_distribution<std::size_t> pick_draw{0, has_draws ? posterior.switch_day_draws.size() - 1 : 0};
    auto gamma = [&](double shape, double rate) { return std::gamma_distribution<double>{shape, 1.0 / rate}(rng); };

    std::vector<std::int64_t> replica(n);
    std::size_t extreme = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
        std::size_t t = 0;
        double rate1 = 0.0;
        double rate2 = 0.0;
        if (has_draws) {
            std::size_t k = pick_draw(rng);
            t = posterior.switch_day_draws[k];
            rate1 = posterior.rate_before_draws[k];
            rate2 = posterior.rate_after_draws[k];
        } else {
            t = SwitchpointPosterior::day_of_entry(pick_entry(rng));
            rate1 = gamma(static_cast<double>(prefix[t]) + 1.0, static_cast<double>(t) + prior.alpha);
            rate2 = gamma(static_cast<double>(prefix[n] - prefix[t]) + 1.0, static_cast<double>(n - t) + prior.alpha);
        }
        std::poisson_distribution<std::int64_t> first{std::max(rate1, 1e-300)};
        std::poisson_distribution<std::int64_t> second{std::max(rate2, 1e-300)};
        for (std::size_t d = 0; d < n; ++d) {
            replica[d] = d < t ? first(rng) : second(rng);
        }
        if (switch_deviance(replica, prior) >= observed) {
            ++extreme;
        }
    }
    return static_cast<double>(extreme) / static_cast<double>(replicates);
}

} // namespace shiftscope
