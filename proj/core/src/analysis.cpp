#include "shiftscope/analysis.hpp"

#include "parallel.hpp"
#include "shiftscope/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace shiftscope {
namespace {

struct UserResult {
    bool excluded = false;
    std::optional<ActivityPoint> point;
    std::optional<ActivityPoint> before;
    std::optional<ActivityPoint> after;
    UserChanges changes;
    std::vector<Jump> ssr_jumps;
    std::vector<Jump> bayes_jumps;
    std::vector<UserError> errors;
};

UserResult analyse_user(const RunConfig& config, const AnalysisParts& parts, const Timeline& timeline) {
    UserResult out;
    const std::string& id = timeline.user_id();
    out.changes.user_id = id;
    out.changes.user_class = timeline.user_class();

    Timeline in_window = restrict_to(timeline, config.window);
    DailySeries series = bin_daily(in_window, config.window);
    RateSummary summary = total_and_mean_rate(series);
    out.changes.events = summary.total;
    out.changes.mean_rate = summary.mean;
    if (summary.total == 0) {
        out.excluded = true;
        return out;
    }
    const std::uint64_t user_seed = derive_seed(config.seed, stable_hash(id));

    if (parts.metrics) {
        try {
            out.point = activity_point(in_window);
            auto [before, after] = split_at(in_window, config.split_date);
            if (!before.empty()) {
                out.before = activity_point(before);
            }
            if (!after.empty()) {
                out.after = activity_point(after);
            }
        } catch (const std::exception& e) {
            out.errors.push_back({id, "metrics", e.what()});
        }
    }
    if (parts.ssr) {
        try {
            SegmentedFit fit = select_fit(series, config.k_max, config.min_segment_len);
            out.ssr_jumps = relative_jumps(fit, summary.mean, id);
            out.changes.ssr = std::move(fit);
        } catch (const std::exception& e) {
            out.errors.push_back({id, "ssr", e.what()});
        }
    }
    if (parts.bayes) {
        try {
            PriorConfig prior = config.alpha ? PriorConfig{*config.alpha} : PriorConfig::data_driven(series);
            SwitchpointPosterior posterior = [&] {
                if (config.solver == Solver::exact) {
                    return exact_posterior(series, prior);
                }
                McmcOptions mcmc = config.mcmc;
                mcmc.seed = user_seed;
                return mcmc_posterior(series, prior, mcmc);
            }();
            if (config.pvalue_replicates > 0) {
                posterior.p_value = posterior_predictive_pvalue(posterior, series, prior, config.pvalue_replicates,
                                                                derive_seed(user_seed, 1));
            }
            out.bayes_jumps = switch_jumps(posterior, summary.mean, id, config.pmf_floor);
            std::size_t map_day = posterior.map_switch_day();
            out.changes.bayes = BayesSummary{posterior.window.date_at(map_day), posterior.switch_pmf[map_day - 1],
                                             posterior.rate_before_mode, posterior.rate_after_mode,
                                             posterior.p_value};
        } catch (const std::exception& e) {
            out.errors.push_back({id, "bayes", e.what()});
        }
    }
    return out;
}

std::vector<UserClass> classes_present(std::span<const Timeline> timelines) {
    std::vector<UserClass> out;
    for (UserClass cls : ALL_USER_CLASSES) {
        if (std::any_of(timelines.begin(), timelines.end(), [cls](const Timeline& t) { return t.user_class() == cls; })) {
            out.push_back(cls);
        }
    }
    return out;
}

std::optional<DivergenceMatrix> divergence_for(const std::vector<ActivityPoint>& points, Metric metric,
                                               const HistogramOptions& options, std::vector<std::string>& notes) {
    std::vector<ActivityPoint> eligible;
    std::size_t classes = 0;
    for (UserClass cls : ALL_USER_CLASSES) {
        std::vector<double> values = metric_values(points, cls, metric);
        bool present = std::any_of(points.begin(), points.end(),
                                   [cls](const ActivityPoint& p) { return p.user_class == cls; });
        if (!present) {
            continue;
        }
        if (values.size() < MIN_VALUES_PER_CLASS) {
            notes.push_back(fmt::format("kl_{}: class {} skipped, {} defined values", to_string(metric),
                                        to_string(cls), values.size()));
            continue;
        }
        ++classes;
        for (const ActivityPoint& p : points) {
            if (p.user_class == cls) {
                eligible.push_back(p);
            }
        }
    }
    if (classes < 2) {
        notes.push_back(fmt::format("kl_{}: fewer than two eligible classes, matrix not computed", to_string(metric)));
        return std::nullopt;
    }
    return class_divergence_matrix(eligible, metric, options);
}

std::vector<LabelledJumps> aggregate_by_class(const std::vector<UserResult>& results,
                                              const std::vector<UserClass>& classes, const AnalysisWindow& window,
                                              std::vector<Jump> UserResult::*member) {
    std::vector<LabelledJumps> out;
    std::vector<Jump> everyone;
    for (UserClass cls : classes) {
        std::vector<Jump> jumps;
        for (const UserResult& r : results) {
            if (r.changes.user_class == cls) {
                jumps.insert(jumps.end(), (r.*member).begin(), (r.*member).end());
            }
        }
        everyone.insert(everyone.end(), jumps.begin(), jumps.end());
        out.push_back({std::string{to_string(cls)}, aggregate_jumps(jumps, window)});
    }
    out.push_back({"all", aggregate_jumps(everyone, window)});
    return out;
}

} // namespace

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ReportBundle run_analysis(const RunConfig& config, std::span<const Timeline> timelines, AnalysisParts parts) {
    if (timelines.empty()) {
        throw DegenerateInputError{"analysis needs at least one timeline"};
    }
    std::vector<std::size_t> order(timelines.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return timelines[a].user_id() < timelines[b].user_id();
    });

    std::vector<UserResult> results(timelines.size());
    detail::parallel_for(order.size(), config.workers, [&](std::size_t i) {
        try {
            results[i] = analyse_user(config, parts, timelines[order[i]]);
        } catch (const std::exception& e) {
            results[i].changes.user_id = timelines[order[i]].user_id();
            results[i].changes.user_class = timelines[order[i]].user_class();
            results[i].errors.push_back({timelines[order[i]].user_id(), "setup", e.what()});
        }
    });

    ReportBundle bundle;
    bundle.config = config;
    bundle.parts = parts;
    bundle.users = timelines.size();
    std::size_t failed = 0;
    for (UserResult& r : results) {
        if (r.excluded) {
            bundle.excluded_users.push_back(r.changes.user_id);
            continue;
        }
        if (!r.errors.empty()) {
            ++failed;
        }
        bundle.errors.insert(bundle.errors.end(), r.errors.begin(), r.errors.end());
        if (r.point) {
            bundle.activity.push_back(*r.point);
        }
        bundle.changes.push_back(r.changes);
    }
    if (static_cast<double>(failed) > config.max_failure_fraction * static_cast<double>(bundle.users)) {
        throw AnalysisFailed{fmt::format("{} of {} users failed", failed, bundle.users), bundle.errors};
    }

    const std::vector<UserClass> classes = classes_present(timelines);

    if (parts.metrics) {
        bundle.kl_rho = divergence_for(bundle.activity, Metric::rho, config.histogram, bundle.notes);
        bundle.kl_h = divergence_for(bundle.activity, Metric::entropy, config.histogram, bundle.notes);

        for (UserClass cls : classes) {
            for (Metric metric : {Metric::rho, Metric::entropy}) {
                for (const char* period : {"before", "after"}) {
                    std::vector<ActivityPoint> points;
                    for (const UserResult& r : results) {
                        const auto& p = std::string_view{period} == "before" ? r.before : r.after;
                        if (p && p->user_class == cls) {
                            points.push_back(*p);
                        }
                    }
                    std::vector<double> values = metric_values(points, cls, metric);
                    if (values.empty()) {
                        continue;
                    }
                    std::uint64_t seed = derive_seed(
                        config.seed, stable_hash(fmt::format("{}/{}/{}", to_string(cls), to_string(metric), period)));
                    bundle.before_after.push_back(
                        {cls, metric, period, values.size(),
                         bootstrap_median_ci(values, config.bootstrap_resamples, config.confidence_level, seed)});
                }
            }
        }
    }
    if (parts.ssr) {
        bundle.ssr_jumps = aggregate_by_class(results, classes, config.window, &UserResult::ssr_jumps);
        std::vector<SegmentedFit> all_fits;
        for (UserClass cls : classes) {
            std::vector<SegmentedFit> fits;
            for (const UserChanges& c : bundle.changes) {
                if (c.user_class == cls && c.ssr) {
                    fits.push_back(*c.ssr);
                }
            }
            all_fits.insert(all_fits.end(), fits.begin(), fits.end());
            bundle.breakpoint_histograms.emplace_back(std::string{to_string(cls)},
                                                      breakpoint_count_histogram(fits, config.k_max));
        }
        bundle.breakpoint_histograms.emplace_back("all", breakpoint_count_histogram(all_fits, config.k_max));
    }
    if (parts.bayes) {
        bundle.bayes_jumps = aggregate_by_class(results, classes, config.window, &UserResult::bayes_jumps);
    }
    return bundle;
}

} // namespace shiftscope
