#include <shiftscope/analysis.hpp>
#include <shiftscope/random.hpp>
#include <shiftscope/segmented.hpp>
#include <shiftscope/switchpoint.hpp>
#include <shiftscope/synthetic.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace shiftscope;

namespace {

DailySeries switched(std::size_t days, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    std::vector<std::int64_t> counts(days);
    std::poisson_distribution<std::int64_t> low{2.0};
    std::poisson_distribution<std::int64_t> high{6.0};
    for (std::size_t d = 0; d < days; ++d) {
        counts[d] = d < days / 2 ? low(rng) : high(rng);
    }
    return DailySeries::from_counts(std::move(counts));
}

void BM_select_fit(benchmark::State& state) {
    DailySeries s = switched(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_fit(s));
    }
}
BENCHMARK(BM_select_fit)->Arg(180)->Arg(500);

void BM_exact_posterior(benchmark::State& state) {
    DailySeries s = switched(static_cast<std::size_t>(state.range(0)), 2);
    PriorConfig prior = PriorConfig::data_driven(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_posterior(s, prior));
    }
}
BENCHMARK(BM_exact_posterior)->Arg(180)->Arg(500);

void BM_mcmc_posterior(benchmark::State& state) {
    DailySeries s = switched(static_cast<std::size_t>(state.range(0)), 3);
    PriorConfig prior = PriorConfig::data_driven(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mcmc_posterior(s, prior));
    }
}
BENCHMARK(BM_mcmc_posterior)->Arg(180)->Unit(benchmark::kMillisecond);

void BM_pvalue(benchmark::State& state) {
    DailySeries s = switched(180, 4);
    PriorConfig prior = PriorConfig::data_driven(s);
    SwitchpointPosterior post = exact_posterior(s, prior);
    for (auto _ : state) {
        benchmark::DoNotOptimize(posterior_predictive_pvalue(post, s, prior, 200, 5));
    }
}
BENCHMARK(BM_pvalue)->Unit(benchmark::kMillisecond);

void BM_run_analysis(benchmark::State& state) {
    AnalysisWindow window{Date{std::chrono::year{2020} / 1 / 1}, Date{std::chrono::year{2020} / 7 / 1}};
    RateSchedule schedule{window, {{window.start(), 2.0, 0.3}, {window.date_at(90), 6.0, 0.5}}};
    auto population = generate_population(
        std::vector<PopulationSpec>{{schedule, static_cast<std::size_t>(state.range(0)), UserClass::journalist}}, 6);
    RunConfig config;
    config.window = window;
    config.split_date = window.date_at(90);
    config.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_analysis(config, population));
    }
}
BENCHMARK(BM_run_analysis)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
