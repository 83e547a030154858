#include "shiftscope/sampling.hpp"

#include "records_internal.hpp"
#include "shiftscope/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace shiftscope {
namespace {

template <typename Call>
auto with_retry(const RetryPolicy& policy, const SamplingProgress& progress, std::string_view what, Call&& call) {
    auto backoff = policy.initial_backoff;
    std::size_t attempts = std::max<std::size_t>(policy.max_attempts, 1);
    for (std::size_t attempt = 1;; ++attempt) {
        try {
            return call();
        } catch (const SourceError& e) {
            if (attempt >= attempts) {
                throw SamplingAborted{fmt::format("{} failed after {} attempts: {}", what, attempts, e.what()),
                                      progress};
            }
        }
        if (policy.sleep) {
            policy.sleep(backoff);
        } else {
            std::this_thread::sleep_for(backoff);
        }
        auto next = std::chrono::duration<double, std::milli>(backoff) * policy.multiplier;
        backoff = std::min(policy.max_backoff, std::chrono::duration_cast<std::chrono::milliseconds>(next));
    }
}

// Insertion-ordered set of ids.
class IdSet {
public:
    bool insert(const std::string& id) {
        if (!m_Seen.insert(id).second) {
            return false;
        }
        m_Ordered.push_back(id);
        return true;
    }
    std::size_t size() const { return m_Ordered.size(); }
    const std::vector<std::string>& ids() const { return m_Ordered; }

private:
    std::set<std::string> m_Seen;
    std::vector<std::string> m_Ordered;
};

std::string lower_ascii(std::string_view text) {
    std::string out{text};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

bool passes_thresholds(const LocatedTweet& tweet, const ActivityThresholds& thresholds) {
    return tweet.followers > thresholds.followers && tweet.friends > thresholds.friends &&
           tweet.statuses > thresholds.actions;
}

RandomSample sample_random_users(SourceClient& client, const RandomSampleOptions& options) {
    Rng rng = make_rng(options.seed, 0);
    IdSet followers;
    IdSet friends;
    RandomSample out;
    auto progress = [&] { return SamplingProgress{followers.ids(), friends.ids(), {}}; };
    auto full = [&] { return followers.size() >= options.target && friends.size() >= options.target; };
    auto pick = [&](const std::vector<std::string>& ids) -> const std::string* {
        if (ids.empty()) {
            return nullptr;
        }
        return &ids[std::uniform_int_distribution<std::size_t>{0, ids.size() - 1}(rng)];
    };

    while (!full() && out.rounds < options.max_rounds) {
        ++out.rounds;
        auto tweets = with_retry(options.retry, progress(), "location query",
                                 [&] { return client.recent_tweets_by_location(options.query); });
        for (const LocatedTweet& tweet : tweets) {
            if (full()) {
                break;
            }
            if (!passes_thresholds(tweet, options.thresholds)) {
                continue;
            }
            if (followers.size() < options.target) {
                auto ids = with_retry(options.retry, progress(), "followers query",
                                      [&] { return client.followers_of(tweet.author_id, options.neighbour_limit); });
                if (const std::string* id = pick(ids)) {
                    followers.insert(*id);
                }
            }
            if (friends.size() < options.target) {
                auto ids = with_retry(options.retry, progress(), "friends query",
                                      [&] { return client.friends_of(tweet.author_id, options.neighbour_limit); });
                if (const std::string* id = pick(ids)) {
                    friends.insert(*id);
                }
            }
        }
    }
    out.followers = followers.ids();
    out.friends = friends.ids();
    return out;
}

bool bio_matches(std::string_view bio, const std::vector<std::string>& stems) {
    std::string haystack = lower_ascii(bio);
    return std::any_of(stems.begin(), stems.end(), [&](const std::string& stem) {
        return !stem.empty() && haystack.find(lower_ascii(stem)) != std::string::npos;
    });
}

std::vector<std::string> default_media_handles() {
    return {"el_pais",      "JotDownSpain", "eldiarioes",  "elespanolcom", "revistamongolia",
            "la_ser",       "_infoLibre",   "EFEnoticias", "elmundoes",    "elconfidencial",
            "indpcom",      "ctxt_es",      "publico_es",  "ondacero_es",  "cuatro",
            "LaVanguardia", "europapress",  "laSextaTV",   "rtve"};
}

std::vector<std::string> default_journalist_stems() {
    return {"periodist", "journalist", "xornalist", "kazetari"};
}

std::vector<std::string> sample_journalists(SourceClient& client, const JournalistSampleOptions& options) {
    IdSet journalists;
    std::set<std::string> checked;
    auto progress = [&] { return SamplingProgress{{}, {}, journalists.ids()}; };
    for (const std::string& media : options.media_handles) {
        auto friends = with_retry(options.retry, progress(), fmt::format("friends of '{}'", media),
                                  [&] { return client.friends_of(media, options.friend_limit); });
        for (const std::string& id : friends) {
            if (!checked.insert(id).second) {
                continue;
            }
            auto bio = with_retry(options.retry, progress(), fmt::format("bio of '{}'", id),
                                  [&] { return client.profile_bio(id); });
            if (bio_matches(bio, options.bio_stems)) {
                journalists.insert(id);
            }
        }
    }
    return journalists.ids();
}

std::vector<Timeline> collect_timelines(SourceClient& client, const std::vector<std::string>& ids, UserClass cls,
                                        std::size_t cap, const RetryPolicy& retry) {
    cap = std::min(cap, MAX_TIMELINE_CAP);
    std::vector<Timeline> out;
    for (const std::string& id : ids) {
        Timeline t = with_retry(retry, SamplingProgress{}, fmt::format("timeline of '{}'", id),
                                [&] { return client.user_timeline(id, cls, cap); });
        if (t.size() > cap) {
            auto events = t.events();
            t = Timeline{t.user_id(), t.user_class(),
                         std::vector<Event>(events.end() - static_cast<std::ptrdiff_t>(cap), events.end())};
        }
        out.push_back(std::move(t));
    }
    return out;
}

SnapshotClient SnapshotClient::load(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw Error{fmt::format("cannot open snapshot '{}'", path.string())};
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

SnapshotClient SnapshotClient::parse(std::string_view json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError{fmt::format("invalid snapshot JSON: {}", e.what())};
    }
    SnapshotClient client;
    try {
        const nlohmann::json located = doc.value("located_tweets", nlohmann::json::array());
        const nlohmann::json users = doc.value("users", nlohmann::json::object());
        for (const auto& t : located) {
            client.m_Located.push_back(LocatedTweet{t.at("author").get<std::string>(), t.at("followers").get<std::uint64_t>(),
                                                    t.at("friends").get<std::uint64_t>(),
                                                    t.at("statuses").get<std::uint64_t>()});
        }
        for (const auto& [id, user] : users.items()) {
            Profile p;
            p.bio = user.value("bio", "");
            p.followers = user.value("followers", std::vector<std::string>{});
            p.friends = user.value("friends", std::vector<std::string>{});
            if (user.contains("tweets")) {
                p.events = detail::parse_tweets(user.at("tweets"));
                std::stable_sort(p.events.begin(), p.events.end(),
                                 [](const Event& a, const Event& b) { return a.timestamp() < b.timestamp(); });
            }
            client.m_Profiles.emplace(id, std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError{fmt::format("malformed snapshot: {}", e.what())};
    }
    return client;
}

const SnapshotClient::Profile& SnapshotClient::profile(const std::string& user) const {
    static const Profile unrecorded;
    auto it = m_Profiles.find(user);
    return it == m_Profiles.end() ? unrecorded : it->second;
}

std::vector<LocatedTweet> SnapshotClient::recent_tweets_by_location(const LocationQuery& query) {
    std::vector<LocatedTweet> out;
    if (m_Located.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < std::min(query.count, m_Located.size()); ++i) {
        out.push_back(m_Located[m_Cursor]);
        m_Cursor = (m_Cursor + 1) % m_Located.size();
    }
    return out;
}

std::vector<std::string> SnapshotClient::followers_of(const std::string& user, std::size_t limit) {
    const auto& ids = profile(user).followers;
    return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(limit, ids.size()))};
}

std::vector<std::string> SnapshotClient::friends_of(const std::string& user, std::size_t limit) {
    const auto& ids = profile(user).friends;
    return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(limit, ids.size()))};
}

std::string SnapshotClient::profile_bio(const std::string& user) {
    return profile(user).bio;
}

Timeline SnapshotClient::user_timeline(const std::string& user, UserClass cls, std::size_t cap) {
    const auto& events = profile(user).events;
    std::size_t keep = std::min({cap, MAX_TIMELINE_CAP, events.size()});
    return Timeline{user, cls, std::vector<Event>(events.end() - static_cast<std::ptrdiff_t>(keep), events.end())};
}

} // namespace shiftscope
