#include "support.hpp"

#include <shiftscope/config.hpp>
#include <shiftscope/error.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

using namespace shiftscope;
using shiftscope::test::day;

TEST_CASE("defaults", "[config]") {
    RunConfig run = parse_config("").run;
    CHECK(run.split_date == day("2020-03-09"));
    CHECK(run.k_max == 5);
    CHECK(run.min_segment_len == 7);
    CHECK_FALSE(run.alpha);
    CHECK(run.histogram.bins == 25);
    CHECK(run.histogram.epsilon == 1e-9);
    CHECK(run.bootstrap_resamples == 1000);
    CHECK(run.solver == Solver::exact);
}

TEST_CASE("every key overrides its default", "[config]") {
    ConfigDocument doc = parse_config(R"(
# comment line
window_start = 2019-01-01
window_end = 2019-07-01   # trailing comment
split_date = 2019-03-01
k_max = 3
min_segment_len = 10
alpha = 0.5
bins = 10
epsilon = 1e-6
bootstrap_resamples = 250
confidence_level = 0.9
seed = 99
solver = mcmc
mcmc_chains = 3
mcmc_draws = 2000
mcmc_warmup = 100
pvalue_replicates = 0
pmf_floor = 0
workers = 2
max_failure_fraction = 0.25
)");
    const RunConfig& run = doc.run;
    CHECK(run.window == AnalysisWindow{day("2019-01-01"), day("2019-07-01")});
    CHECK(run.split_date == day("2019-03-01"));
    CHECK(run.k_max == 3);
    CHECK(run.min_segment_len == 10);
    CHECK(*run.alpha == 0.5);
    CHECK(run.histogram.bins == 10);
    CHECK(run.histogram.epsilon == 1e-6);
    CHECK(run.bootstrap_resamples == 250);
    CHECK(run.confidence_level == 0.9);
    CHECK(run.seed == 99);
    CHECK(run.solver == Solver::mcmc);
    CHECK(run.mcmc.chains == 3);
    CHECK(run.mcmc.draws == 2000);
    CHECK(run.mcmc.warmup == 100);
    CHECK(run.pvalue_replicates == 0);
    CHECK(run.pmf_floor == 0.0);
    CHECK(run.workers == 2);
    CHECK(run.max_failure_fraction == 0.25);

    auto described = describe(run);
    auto find = [&](const std::string& key) {
        auto it = std::find_if(described.begin(), described.end(), [&](const auto& kv) { return kv.first == key; });
        REQUIRE(it != described.end());
        return it->second;
    };
    CHECK(find("window_start") == "2019-01-01");
    CHECK(find("alpha") == "0.5");
    CHECK(find("solver") == "mcmc");
    CHECK(find("seed") == "99");
}

TEST_CASE("malformed documents are rejected", "[config]") {
    CHECK_THROWS_AS(parse_config("colour = blue"), ParseError);
    CHECK_THROWS_AS(parse_config("k_max = 3\nk_max = 4"), ParseError);
    CHECK_THROWS_AS(parse_config("k_max = -1"), ParseError);
    CHECK_THROWS_AS(parse_config("k_max"), ParseError);
    CHECK_THROWS_AS(parse_config("alpha = fast"), ParseError);
    CHECK_THROWS_AS(parse_config("solver = magic"), ParseError);
    CHECK_THROWS_AS(parse_config("window_start = 2020-06-01\nwindow_end = 2020-05-01"), ParseError);
    CHECK_THROWS_AS(parse_config("synth.scenario = C"), ParseError);
    CHECK_THROWS_AS(parse_config("synth.group = journalist, 3"), ParseError);
    try {
        parse_config("seed = 1\n\nbins = x");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string{e.what()}.find("line 3") != std::string::npos);
    }
}

TEST_CASE("synthetic populations from config", "[config]") {
    ConfigDocument doc = parse_config(R"(
window_start = 2020-01-01
window_end = 2020-04-01
synth.sources = 20, 1.5
synth.group = journalist, 4, 2020-01-01:2:0.3; 2020-02-15:6:0.6
synth.group = politician, 2, 2020-01-01:1
synth.scenario = A
)");
    REQUIRE(doc.synth.groups.size() == 3);
    CHECK(doc.synth.groups[0].users == 1);
    CHECK(doc.synth.groups[0].schedule.pieces().size() == 3);
    const PopulationSpec& journalists = doc.synth.groups[1];
    CHECK(journalists.user_class == UserClass::journalist);
    CHECK(journalists.users == 4);
    REQUIRE(journalists.schedule.pieces().size() == 2);
    CHECK(journalists.schedule.pieces()[1].start == day("2020-02-15"));
    CHECK(journalists.schedule.pieces()[1].rate == 6.0);
    CHECK(journalists.schedule.pieces()[1].retweet_fraction == 0.6);
    CHECK(journalists.schedule.sources().pool_size == 20);
    CHECK(doc.synth.groups[2].user_class == UserClass::politician);

    CHECK_THROWS_AS(parse_config("synth.group = journalist, 1, 2019-12-01:2"), ParseError);
}

TEST_CASE("missing config files are an error", "[config]") {
    CHECK_THROWS_AS(load_config(SHIFTSCOPE_FIXTURES "/missing.conf"), Error);
    CHECK(load_config(SHIFTSCOPE_FIXTURES "/three_users.conf").run.min_segment_len == 3);
}
