#include "mock_client.hpp"
#include "support.hpp"

#include <shiftscope/sampling.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <fmt/format.h>

#include <map>
#include <set>

using namespace shiftscope;
using shiftscope::test::MockClient;
using shiftscope::test::no_sleep;
using shiftscope::test::ts;

namespace {

/// 100 qualifying authors, each with 20 followers and 20 friends drawn from
/// overlapping pools so duplicates occur.
MockClient universe() {
    MockClient client;
    std::vector<LocatedTweet> batch;
    for (int a = 0; a < 100; ++a) {
        std::string author = fmt::format("author{}", a);
        batch.push_back({author, 100, 200, 5000});
        for (int k = 0; k < 20; ++k) {
            client.followers[author].push_back(fmt::format("f{}", (a * 7 + k) % 150));
            client.friends[author].push_back(fmt::format("g{}", (a * 3 + k) % 120));
        }
    }
    client.batches = {batch};
    return client;
}

RandomSampleOptions options_for(std::size_t target, std::uint64_t seed) {
    RandomSampleOptions options;
    options.target = target;
    options.seed = seed;
    options.max_rounds = 50;
    options.retry = no_sleep();
    return options;
}

} // namespace

TEST_CASE("thresholds are strict", "[sampling]") {
    ActivityThresholds t;
    CHECK(t.followers == 55);
    CHECK(t.friends == 95);
    CHECK(t.actions == 1000);
    CHECK(passes_thresholds({"a", 56, 96, 1001}, t));
    CHECK_FALSE(passes_thresholds({"a", 55, 96, 1001}, t));
    CHECK_FALSE(passes_thresholds({"a", 56, 95, 1001}, t));
    CHECK_FALSE(passes_thresholds({"a", 56, 96, 1000}, t));
}

TEST_CASE("authors at the threshold are never sampled from", "[sampling]") {
    MockClient client;
    client.batches = {{{"edge", 55, 500, 5000}, {"ok", 56, 96, 1001}}};
    client.followers = {{"edge", {"fe"}}, {"ok", {"fo"}}};
    client.friends = {{"edge", {"ge"}}, {"ok", {"go"}}};
    RandomSample sample = sample_random_users(client, options_for(1, 0));
    CHECK(sample.followers == std::vector<std::string>{"fo"});
    CHECK(sample.friends == std::vector<std::string>{"go"});
    CHECK(std::find(client.neighbour_queries.begin(), client.neighbour_queries.end(), "edge") ==
          client.neighbour_queries.end());
}

TEST_CASE("one follower and one friend per qualifying author", "[sampling]") {
    MockClient client;
    client.batches = {{{"a", 60, 100, 2000}}};
    client.followers = {{"a", {"follower"}}};
    client.friends = {{"a", {"friend"}}};
    RandomSample sample = sample_random_users(client, options_for(1, 3));
    CHECK(sample.followers == std::vector<std::string>{"follower"});
    CHECK(sample.friends == std::vector<std::string>{"friend"});
    CHECK(sample.rounds == 1);
}

TEST_CASE("sampling reaches the target without duplicates", "[sampling]") {
    MockClient a = universe();
    RandomSample first = sample_random_users(a, options_for(50, 11));
    CHECK(first.followers.size() == 50);
    CHECK(first.friends.size() == 50);
    CHECK(std::set<std::string>(first.followers.begin(), first.followers.end()).size() == 50);
    CHECK(std::set<std::string>(first.friends.begin(), first.friends.end()).size() == 50);

    MockClient b = universe();
    RandomSample second = sample_random_users(b, options_for(50, 11));
    CHECK(second.followers == first.followers);
    CHECK(second.friends == first.friends);

    MockClient c = universe();
    RandomSample other = sample_random_users(c, options_for(50, 12));
    CHECK(other.followers != first.followers);
}

TEST_CASE("sampling stops after max_rounds when the source runs dry", "[sampling]") {
    MockClient client;
    client.batches = {{{"a", 60, 100, 2000}}};
    client.followers = {{"a", {"x", "y"}}};
    client.friends = {{"a", {"z"}}};
    RandomSampleOptions options = options_for(10, 0);
    options.max_rounds = 7;
    RandomSample sample = sample_random_users(client, options);
    CHECK(sample.rounds == 7);
    CHECK(sample.followers.size() <= 2);
    CHECK(sample.friends == std::vector<std::string>{"z"});
}

TEST_CASE("transient failures are retried with growing backoff", "[sampling]") {
    MockClient client = universe();
    client.failures = 3;
    std::vector<std::chrono::milliseconds> slept;
    RandomSampleOptions options = options_for(5, 1);
    options.retry = no_sleep(&slept);
    RandomSample sample = sample_random_users(client, options);
    CHECK(sample.followers.size() == 5);
    CHECK(slept == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds{250}, std::chrono::milliseconds{500},
                                                          std::chrono::milliseconds{1000}});
}

TEST_CASE("persistent failures abort with progress preserved", "[sampling]") {
    class Flaky : public MockClient {
    public:
        std::vector<std::string> followers_of(const std::string& user, std::size_t limit) override {
            if (++m_Count > 3) {
                throw SourceError{"gone"};
            }
            return MockClient::followers_of(user, limit);
        }

    private:
        std::size_t m_Count = 0;
    };
    Flaky client;
    MockClient base = universe();
    client.batches = base.batches;
    for (const LocatedTweet& t : base.batches.front()) {
        // Disjoint neighbours so every successful call adds a new id.
        client.followers[t.author_id] = {t.author_id + "/follower"};
        client.friends[t.author_id] = {t.author_id + "/friend"};
    }
    try {
        sample_random_users(client, options_for(50, 2));
        FAIL("expected SamplingAborted");
    } catch (const SamplingAborted& e) {
        CHECK(e.progress().random_followers.size() == 3);
        CHECK(e.progress().random_friends.size() == 3);
    }
}

TEST_CASE("bio matching is case-insensitive on stems", "[sampling]") {
    auto stems = default_journalist_stems();
    CHECK(bio_matches("Periodista en El País", stems));
    CHECK(bio_matches("periodista en …", {"periodista"}));
    CHECK(bio_matches("Freelance JOURNALIST", stems));
    CHECK(bio_matches("Xornalista galega", stems));
    CHECK(bio_matches("Kazetaria", stems));
    CHECK_FALSE(bio_matches("Fotógrafo y viajero", stems));
    CHECK_FALSE(bio_matches("", stems));
    CHECK(default_media_handles().size() == 19);
}

TEST_CASE("journalists are friends of media accounts with a matching bio", "[sampling]") {
    MockClient client;
    client.friends = {{"el_pais", {"j1", "x1", "j2"}}, {"rtve", {"j2", "j3"}}};
    client.bios = {{"j1", "Periodista en el_pais"}, {"j2", "journalist"}, {"j3", "PERIODISTA"}, {"x1", "chef"}};
    JournalistSampleOptions options;
    options.media_handles = {"el_pais", "rtve"};
    options.retry = no_sleep();
    CHECK(sample_journalists(client, options) == std::vector<std::string>{"j1", "j2", "j3"});

    options.bio_stems = {"chef"};
    CHECK(sample_journalists(client, options) == std::vector<std::string>{"x1"});
}

TEST_CASE("collected timelines keep the most recent posts", "[sampling]") {
    MockClient client;
    std::vector<Event> events;
    for (int i = 0; i < 10; ++i) {
        events.push_back(Event::original(ts("2020-03-01T00:00:00Z") + std::chrono::hours{i}));
    }
    client.timelines["u"] = events;
    auto timelines = collect_timelines(client, {"u"}, UserClass::politician, 4, no_sleep());
    REQUIRE(timelines.size() == 1);
    CHECK(timelines[0].size() == 4);
    CHECK(timelines[0].events().front().timestamp() == events[6].timestamp());
    CHECK(timelines[0].user_class() == UserClass::politician);
}

TEST_CASE("snapshot client serves a recorded source", "[sampling]") {
    SnapshotClient client = SnapshotClient::parse(R"({
        "located_tweets": [{"author": "a", "followers": 60, "friends": 100, "statuses": 2000},
                           {"author": "b", "followers": 10, "friends": 100, "statuses": 2000}],
        "users": {"a": {"bio": "", "followers": ["f"], "friends": ["g"]},
                  "g": {"bio": "periodista", "tweets": [{"ts": "2020-03-01T00:00:00Z", "rt": false, "src": null}]}}
    })");
    RandomSampleOptions options = options_for(1, 0);
    RandomSample sample = sample_random_users(client, options);
    CHECK(sample.followers == std::vector<std::string>{"f"});
    CHECK(sample.friends == std::vector<std::string>{"g"});
    CHECK(client.profile_bio("g") == "periodista");
    CHECK(client.user_timeline("g", UserClass::journalist, 10).size() == 1);
    CHECK(client.profile_bio("nobody").empty());
    CHECK(client.friends_of("nobody", 10).empty());
    CHECK_THROWS_AS(SnapshotClient::parse("{"), ParseError);
}
