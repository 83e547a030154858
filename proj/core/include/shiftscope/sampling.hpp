#pragma once

#include "shiftscope/error.hpp"
#include "shiftscope/timeline.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace shiftscope {

/// A recent geolocated tweet together with its author's profile counters.
struct LocatedTweet {
    std::string author_id;
    std::uint64_t followers = 0;
    std::uint64_t friends = 0;
    /// Total statuses posted; read as the "actions" of the author.
    std::uint64_t statuses = 0;
};

struct LocationQuery {
    std::string location = "Spain";
    std::size_t count = 100;
};

inline constexpr std::size_t MAX_TIMELINE_CAP = 3200;

/// Read-only view of a social-media source. Implementations throw
/// SourceError on transient or permanent upstream failures.
class SourceClient {
public:
    virtual ~SourceClient() = default;

    virtual std::vector<LocatedTweet> recent_tweets_by_location(const LocationQuery& query) = 0;
    /// At most `limit` follower ids of `user`.
    virtual std::vector<std::string> followers_of(const std::string& user, std::size_t limit) = 0;
    /// At most `limit` ids of accounts `user` follows.
    virtual std::vector<std::string> friends_of(const std::string& user, std::size_t limit) = 0;
    virtual std::string profile_bio(const std::string& user) = 0;
    /// Most recent posts of `user`, at most `cap` (itself at most MAX_TIMELINE_CAP).
    virtual Timeline user_timeline(const std::string& user, UserClass cls, std::size_t cap) = 0;
};

struct RetryPolicy {
    std::size_t max_attempts = 4;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{8000};
    /// Defaults to std::this_thread::sleep_for; tests inject a no-op.
    std::function<void(std::chrono::milliseconds)> sleep;
};

/// Ids collected so far by a sampling procedure.
struct SamplingProgress {
    std::vector<std::string> random_followers;
    std::vector<std::string> random_friends;
    std::vector<std::string> journalists;
};

/// The source kept failing after all retries; `progress()` holds what had
/// been collected.
class SamplingAborted : public SourceError {
public:
    SamplingAborted(const std::string& what, SamplingProgress progress)
        : SourceError{what}, m_Progress{std::move(progress)} {}

    const SamplingProgress& progress() const { return m_Progress; }

private:
    SamplingProgress m_Progress;
};

/// Authors must exceed every threshold strictly.
struct ActivityThresholds {
    std::uint64_t followers = 55;
    std::uint64_t friends = 95;
    std::uint64_t actions = 1000;
};

bool passes_thresholds(const LocatedTweet& tweet, const ActivityThresholds& thresholds);

struct RandomSampleOptions {
    ActivityThresholds thresholds;
    std::size_t target = 8000;
    std::uint64_t seed = 0;
    LocationQuery query;
    /// Follower/friend ids fetched per qualifying author before picking one.
    std::size_t neighbour_limit = 5000;
    /// Upper bound on location queries.
    std::size_t max_rounds = 10000;
    RetryPolicy retry;
};

struct RandomSample {
    std::vector<std::string> followers;
    std::vector<std::string> friends;
    std::size_t rounds = 0;
};

/// Repeats: pull recent located tweets; keep authors above all thresholds;
/// add one uniformly chosen follower and one uniformly chosen friend of each
/// such author; until both sets hold `target` distinct ids or max_rounds
/// queries were made. Throws SamplingAborted when retries are exhausted.
RandomSample sample_random_users(SourceClient& client, const RandomSampleOptions& options);

/// Case-insensitive substring match of any stem against the bio.
bool bio_matches(std::string_view bio, const std::vector<std::string>& stems);

std::vector<std::string> default_media_handles();
/// Stems covering "journalist" in Spanish, Catalan, Galician, Basque and English.
std::vector<std::string> default_journalist_stems();

struct JournalistSampleOptions {
    std::vector<std::string> media_handles = default_media_handles();
    std::vector<std::string> bio_stems = default_journalist_stems();
    std::size_t friend_limit = 5000;
    RetryPolicy retry;
};

/// Friends of the media accounts whose bio matches a stem, deduplicated, in
/// first-seen order. Throws SamplingAborted when retries are exhausted.
std::vector<std::string> sample_journalists(SourceClient& client, const JournalistSampleOptions& options);

/// Timelines of `ids`, each truncated to its `cap` most recent posts
/// (cap is clamped to MAX_TIMELINE_CAP). Throws SamplingAborted.
std::vector<Timeline> collect_timelines(SourceClient& client, const std::vector<std::string>& ids, UserClass cls,
                                        std::size_t cap = MAX_TIMELINE_CAP, const RetryPolicy& retry = {});

/// Offline source backed by a JSON snapshot:
///
///   {"located_tweets": [{"author": "a", "followers": 60, "friends": 100, "statuses": 2000}],
///    "users": {"a": {"bio": "...", "followers": ["f"], "friends": ["g"],
///                     "tweets": [{"ts": "...", "rt": false, "src": null}]}}}
///
/// Every call to recent_tweets_by_location returns the next `count` located
/// tweets, cycling through the list. Accounts missing from "users" have no
/// bio, neighbours or posts.
class SnapshotClient : public SourceClient {
public:
    /// Throws ParseError / Error.
    static SnapshotClient load(const std::filesystem::path& path);
    static SnapshotClient parse(std::string_view json);

    std::vector<LocatedTweet> recent_tweets_by_location(const LocationQuery& query) override;
    std::vector<std::string> followers_of(const std::string& user, std::size_t limit) override;
    std::vector<std::string> friends_of(const std::string& user, std::size_t limit) override;
    std::string profile_bio(const std::string& user) override;
    Timeline user_timeline(const std::string& user, UserClass cls, std::size_t cap) override;

private:
    struct Profile {
        std::string bio;
        std::vector<std::string> followers;
        std::vector<std::string> friends;
        std::vector<Event> events;
    };

    const Profile& profile(const std::string& user) const;

    std::vector<LocatedTweet> m_Located;
    std::map<std::string, Profile> m_Profiles;
    std::size_t m_Cursor = 0;
};

} // namespace shiftscope
