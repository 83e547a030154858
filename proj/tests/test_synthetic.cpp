#include "support.hpp"

#include <shiftscope/error.hpp>
#include <shiftscope/jumps.hpp>
#include <shiftscope/segmented.hpp>
#include <shiftscope/synthetic.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace shiftscope;
using shiftscope::test::day;
using shiftscope::test::distance;

namespace {

AnalysisWindow hundred_days() {
    return AnalysisWindow{day("2020-01-01"), day("2020-01-01") + std::chrono::days{100}};
}

} // namespace

TEST_CASE("zero rate generates an empty timeline", "[synthetic]") {
    AnalysisWindow w = hundred_days();
    CHECK(generate(RateSchedule{w, {{w.start(), 0.0}}}, 1).empty());
}

TEST_CASE("daily totals match the Poisson mean", "[synthetic]") {
    AnalysisWindow w = hundred_days();
    RateSchedule schedule{w, {{w.start(), 4.0}}};
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        total += static_cast<double>(generate(schedule, seed).size());
    }
    double mean = total / 200.0;
    CHECK(std::abs(mean - 400.0) <= 3.0 * std::sqrt(400.0 * 200.0) / 200.0);
}

TEST_CASE("generated timelines respect the window and schedule", "[synthetic]") {
    AnalysisWindow w = hundred_days();
    RateSchedule schedule{w, {{w.start(), 2.0, 0.0}, {w.date_at(40), 6.0, 0.5}}, SourcePool{10, 1.0}};
    Timeline t = generate(schedule, 3, "x", UserClass::journalist);
    CHECK(t.user_id() == "x");
    CHECK(t.user_class() == UserClass::journalist);
    CHECK(std::is_sorted(t.events().begin(), t.events().end(),
                         [](const Event& a, const Event& b) { return a.timestamp() < b.timestamp(); }));
    std::set<std::string> sources;
    for (const Event& e : t.events()) {
        Date d = day_of(e.timestamp());
        REQUIRE(w.contains(d));
        if (e.is_retweet()) {
            CHECK(w.index_of(d) >= 40);
            sources.insert(e.source_id());
        }
    }
    CHECK(sources.size() <= 10);
    CHECK(sources.size() >= 2);
}

TEST_CASE("piece means converge to the piece rates", "[synthetic]") {
    AnalysisWindow w = hundred_days();
    RateSchedule schedule{w, {{w.start(), 1.5, 0.0}, {w.date_at(30), 4.0, 0.3}}};
    double early = 0.0;
    double late = 0.0;
    double late_rt = 0.0;
    const int users = 300;
    for (const Timeline& t : generate_population(std::vector<PopulationSpec>{{schedule, users}}, 12)) {
        DailySeries s = bin_daily(t, w);
        for (std::size_t d = 0; d < s.size(); ++d) {
            (d < 30 ? early : late) += static_cast<double>(s[d]);
        }
        for (const Event& e : t.events()) {
            late_rt += e.is_retweet();
        }
    }
    double early_days = 30.0 * users;
    double late_days = 70.0 * users;
    CHECK(std::abs(early / early_days - 1.5) <= 3.0 * std::sqrt(1.5 / early_days));
    CHECK(std::abs(late / late_days - 4.0) <= 3.0 * std::sqrt(4.0 / late_days));
    double fraction = late_rt / late;
    CHECK(std::abs(fraction - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / late));
}

TEST_CASE("schedules are validated", "[synthetic]") {
    AnalysisWindow w = hundred_days();
    CHECK_THROWS_AS(RateSchedule(w, {}), InvalidInputError);
    CHECK_THROWS_AS(RateSchedule(w, {{w.date_at(1), 1.0}}), InvalidInputError);
    CHECK_THROWS_AS(RateSchedule(w, {{w.start(), -1.0}}), InvalidInputError);
    CHECK_THROWS_AS(RateSchedule(w, {{w.start(), 1.0}, {w.start(), 2.0}}), InvalidInputError);
    CHECK_THROWS_AS(RateSchedule(w, {{w.start(), 1.0}, {w.end(), 2.0}}), InvalidInputError);
    CHECK_THROWS_AS(RateSchedule(w, {{w.start(), 1.0, 1.5}}), InvalidInputError);
}

TEST_CASE("validation scenarios", "[synthetic]") {
    auto scenarios = appendix_scenarios();
    REQUIRE(scenarios.size() == 2);
    const RateSchedule& a = scenarios[0].schedule;
    const RateSchedule& b = scenarios[1].schedule;
    CHECK(scenarios[0].name == "A");
    CHECK(a.pieces().size() == 3);
    CHECK(a.pieces()[1].start == day("2019-01-12"));
    CHECK(a.pieces()[2].start == day("2020-03-02"));
    CHECK(b.pieces()[1].start == day("2019-10-12"));
    CHECK(a.pieces().back().rate == 2.0);
    CHECK(b.pieces().back().rate == 2.0);
    CHECK(a.pieces()[0].rate == 1.0);
    CHECK(a.pieces()[1].rate == 5.0);

    DailySeries s = bin_daily(generate(a, 4), a.window());
    std::size_t first = a.window().index_of(a.pieces()[1].start);
    std::size_t second = a.window().index_of(a.pieces()[2].start);
    double low = 0.0;
    double high = 0.0;
    for (std::size_t d = 0; d < first; ++d) {
        low += static_cast<double>(s[d]);
    }
    for (std::size_t d = first; d < second; ++d) {
        high += static_cast<double>(s[d]);
    }
    CHECK(std::abs(low / static_cast<double>(first) - 1.0) < 0.4);
    CHECK(std::abs(high / static_cast<double>(second - first) - 5.0) < 0.4);
}

TEST_CASE("populations are reproducible with distinct ids", "[synthetic]") {
    AnalysisWindow w = hundred_days();
    RateSchedule schedule{w, {{w.start(), 3.0}}};
    std::vector<PopulationSpec> specs{{schedule, 3, UserClass::politician}};
    auto a = generate_population(specs, 5);
    REQUIRE(a.size() == 3);
    CHECK(a[0].user_id() != a[1].user_id());
    CHECK(a[1].user_id() != a[2].user_id());
    CHECK(std::is_sorted(a.begin(), a.end(), [](const Timeline& x, const Timeline& y) { return x.user_id() < y.user_id(); }));
    auto b = generate_population(specs, 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::equal(a[i].events().begin(), a[i].events().end(), b[i].events().begin(), b[i].events().end()));
    }
    CHECK(generate_population(std::vector<PopulationSpec>{{schedule, 0}}, 5).empty());
}

TEST_CASE("a common switch shows up as the population jump peak", "[synthetic]") {
    AnalysisWindow w{day("2020-01-01"), day("2020-01-01") + std::chrono::days{200}};
    RateSchedule schedule{w, {{w.start(), 2.0}, {w.date_at(100), 6.0}}};
    std::vector<Jump> jumps;
    for (const Timeline& t : generate_population(std::vector<PopulationSpec>{{schedule, 500}}, 99)) {
        DailySeries s = bin_daily(t, w);
        auto user = relative_jumps(select_fit(s), total_and_mean_rate(s).mean, t.user_id());
        jumps.insert(jumps.end(), user.begin(), user.end());
    }
    JumpSeries agg = aggregate_jumps(jumps, w);
    auto peak = static_cast<std::size_t>(std::max_element(agg.plus.begin(), agg.plus.end()) - agg.plus.begin());
    CHECK(distance(peak, 100) <= 2);
}
