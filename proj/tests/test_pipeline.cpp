#include "support.hpp"

#include <shiftscope/analysis.hpp>
#include <shiftscope/records.hpp>
#include <shiftscope/report.hpp>
#include <shiftscope/synthetic.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shiftscope;
using shiftscope::test::day;
using shiftscope::test::distance;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in{path, std::ios::binary};
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "shiftscope_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig quick_config(AnalysisWindow window) {
    RunConfig config;
    config.window = window;
    config.pvalue_replicates = 0;
    config.bootstrap_resamples = 300;
    return config;
}

std::vector<Timeline> switching_population(const AnalysisWindow& window, std::size_t switch_day, std::size_t users,
                                           std::uint64_t seed) {
    RateSchedule schedule{window, {{window.start(), 2.0}, {window.date_at(switch_day), 6.0}}};
    return generate_population(std::vector<PopulationSpec>{{schedule, users, UserClass::journalist}}, seed);
}

} // namespace

TEST_CASE("three-user fixture produces the hand-checked activity points", "[pipeline]") {
    IngestResult ingested = ingest_file(SHIFTSCOPE_FIXTURES "/three_users.jsonl");
    REQUIRE(ingested.issues.empty());
    RunConfig config = load_config(SHIFTSCOPE_FIXTURES "/three_users.conf").run;
    ReportBundle bundle = run_analysis(config, ingested.timelines);
    CHECK(bundle.users == 4);
    CHECK(bundle.excluded_users == std::vector<std::string>{"z9"});
    CHECK(bundle.errors.empty());

    fs::path out = scratch("three_users");
    emit(bundle, out);
    CHECK(slurp(out / "activity_points.csv") == slurp(SHIFTSCOPE_FIXTURES "/three_users.activity_points.csv"));
    std::string run = slurp(out / "run.json");
    CHECK(run.find("\"z9\"") != std::string::npos);
    CHECK(run.find("\"window_start\": \"2020-03-01\"") != std::string::npos);
    CHECK(slurp(out / "kl_rho.csv") == "class\n");
}

TEST_CASE("reruns are byte-identical regardless of worker count", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-05-01")};
    auto population = switching_population(window, 60, 24, 4);
    RunConfig config = quick_config(window);
    config.pvalue_replicates = 100;
    config.workers = 1;
    fs::path a = scratch("rerun_a");
    emit(run_analysis(config, population), a);
    config.workers = 4;
    std::reverse(population.begin(), population.end());
    fs::path b = scratch("rerun_b");
    emit(run_analysis(config, population), b);
    for (const auto& entry : fs::directory_iterator(a)) {
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
}

TEST_CASE("a common switch day dominates the population jumps", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-06-01")};
    ReportBundle bundle = run_analysis(quick_config(window), switching_population(window, 70, 60, 8));
    for (const auto* jumps : {&bundle.ssr_jumps, &bundle.bayes_jumps}) {
        auto all = std::find_if(jumps->begin(), jumps->end(), [](const LabelledJumps& j) { return j.label == "all"; });
        REQUIRE(all != jumps->end());
        const auto& plus = all->series.plus;
        auto peak = static_cast<std::size_t>(std::max_element(plus.begin(), plus.end()) - plus.begin());
        CHECK(distance(peak, 70) <= 2);
    }
}

TEST_CASE("constant-rate users leave the jump series nearly empty", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-07-01")};
    RateSchedule schedule{window, {{window.start(), 3.0}}};
    auto population = generate_population(std::vector<PopulationSpec>{{schedule, 30, UserClass::politician}}, 2);
    ReportBundle bundle = run_analysis(quick_config(window), population);
    const JumpSeries& all = bundle.ssr_jumps.back().series;
    auto active = std::count_if(all.plus.begin(), all.plus.end(), [](double v) { return v > 0.0; });
    CHECK(active <= 3);
}

TEST_CASE("empty jump series produce header-only files", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-03-01")};
    std::vector<Timeline> flat;
    for (int u = 0; u < 3; ++u) {
        std::vector<Event> events;
        for (std::size_t d = 0; d < window.days(); ++d) {
            events.push_back(Event::original(Timestamp{window.date_at(d)} + std::chrono::hours{u}));
        }
        flat.emplace_back("u" + std::to_string(u), UserClass::generic, events);
    }
    AnalysisParts parts{false, true, false};
    fs::path out = scratch("header_only");
    auto written = emit(run_analysis(quick_config(window), flat, parts), out);
    CHECK(slurp(out / "jumps_ssr.csv") == "date,class,j_plus,j_minus,ratio\n");
    CHECK_FALSE(fs::exists(out / "jumps_bayes.csv"));
    CHECK_FALSE(fs::exists(out / "activity_points.csv"));
    CHECK(written.size() == 3);
}

TEST_CASE("raised replication after the split shows in the medians", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-05-01")};
    RunConfig config = quick_config(window);
    config.split_date = day("2020-03-09");
    RateSchedule schedule{window, {{window.start(), 3.0, 0.3}, {config.split_date, 3.0, 0.6}}};
    auto population = generate_population(std::vector<PopulationSpec>{{schedule, 60, UserClass::politician}}, 31);
    ReportBundle bundle = run_analysis(config, population, AnalysisParts{true, false, false});
    auto row = [&](const char* period) {
        auto it = std::find_if(bundle.before_after.begin(), bundle.before_after.end(), [&](const BeforeAfterRow& r) {
            return r.metric == Metric::rho && r.period == period && r.user_class == UserClass::politician;
        });
        REQUIRE(it != bundle.before_after.end());
        return it->interval;
    };
    MedianInterval before = row("before");
    MedianInterval after = row("after");
    CHECK(after.median > before.median);
    CHECK(after.low > before.high);
}

TEST_CASE("per-user failures are isolated and counted", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-04-01")};
    auto population = switching_population(window, 45, 10, 6);
    RunConfig config = quick_config(window);

    ReportBundle base = run_analysis(config, population);
    auto extended = population;
    RateSchedule odd{window, {{window.start(), 0.2}}};
    extended.push_back(generate(odd, 1, "zzz", UserClass::generic));
    ReportBundle more = run_analysis(config, extended);
    for (std::size_t i = 0; i < base.changes.size(); ++i) {
        CHECK(base.changes[i].user_id == more.changes[i].user_id);
        CHECK(base.changes[i].ssr->breakpoints == more.changes[i].ssr->breakpoints);
        CHECK(base.changes[i].bayes->map_date == more.changes[i].bayes->map_date);
    }

    config.min_segment_len = 200;
    CHECK_THROWS_AS(run_analysis(config, population), AnalysisFailed);
    config.max_failure_fraction = 1.0;
    ReportBundle failed = run_analysis(config, population);
    CHECK(failed.errors.size() == population.size());
    CHECK(std::all_of(failed.errors.begin(), failed.errors.end(), [](const UserError& e) { return e.stage == "ssr"; }));
    CHECK(std::all_of(failed.changes.begin(), failed.changes.end(), [](const UserChanges& c) { return c.bayes.has_value(); }));
    CHECK_THROWS_AS(run_analysis(config, std::vector<Timeline>{}), DegenerateInputError);
}

TEST_CASE("emit removes staged files when writing fails", "[pipeline]") {
    AnalysisWindow window{day("2020-01-01"), day("2020-03-01")};
    ReportBundle bundle = run_analysis(quick_config(window), switching_population(window, 30, 3, 1));
    fs::path out = scratch("blocked");
    fs::create_directories(out / "run.json" / "occupied");
    CHECK_THROWS_AS(emit(bundle, out), Error);
    for (const auto& entry : fs::directory_iterator(out)) {
        CHECK(entry.path().extension() != ".tmp");
    }
}

TEST_CASE("floats are written with six significant digits", "[pipeline]") {
    CHECK(format_float(0.5) == "0.5");
    CHECK(format_float(-0.0) == "0");
    CHECK(format_float(1234567.0) == "1.23457e+06");
    CHECK(format_float(1.0 / 3.0) == "0.333333");
    CHECK(format_float(-0.6) == "-0.6");
}
