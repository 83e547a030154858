#pragma once

#include "shiftscope/dates.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shiftscope {

enum class EventKind { original, retweet };

/// One post of a timeline. A retweet always carries the id of the amplified
/// account; an original never does.
class Event {
public:
    static Event original(Timestamp ts) { return Event{ts, EventKind::original, {}}; }
    static Event retweet(Timestamp ts, std::string source_id);

    Timestamp timestamp() const { return m_Timestamp; }
    EventKind kind() const { return m_Kind; }
    bool is_retweet() const { return m_Kind == EventKind::retweet; }
    /// Empty for originals.
    const std::string& source_id() const { return m_SourceId; }

    friend bool operator==(const Event&, const Event&) = default;

private:
    Event(Timestamp ts, EventKind kind, std::string source)
        : m_Timestamp{ts}, m_Kind{kind}, m_SourceId{std::move(source)} {}

    Timestamp m_Timestamp;
    EventKind m_Kind;
    std::string m_SourceId;
};

enum class UserClass { journalist, politician, random_follower, random_friend, generic };

inline constexpr UserClass ALL_USER_CLASSES[] = {
    UserClass::journalist, UserClass::politician, UserClass::random_follower,
    UserClass::random_friend, UserClass::generic};

std::string_view to_string(UserClass cls);
/// Throws ParseError on an unknown name.
UserClass parse_user_class(std::string_view name);

/// Time-ordered events of one account.
class Timeline {
public:
    /// Throws InvalidInputError if `user_id` is empty or `events` is not
    /// sorted by timestamp.
    Timeline(std::string user_id, UserClass cls, std::vector<Event> events);

    /// Stable-sorts `events` before construction.
    static Timeline from_unsorted(std::string user_id, UserClass cls, std::vector<Event> events);

    const std::string& user_id() const { return m_UserId; }
    UserClass user_class() const { return m_Class; }
    std::span<const Event> events() const { return m_Events; }
    std::size_t size() const { return m_Events.size(); }
    bool empty() const { return m_Events.empty(); }

private:
    std::string m_UserId;
    UserClass m_Class;
    std::vector<Event> m_Events;
};

/// Half-open range of UTC days [start, end).
class AnalysisWindow {
public:
    /// Throws InvalidInputError unless start < end.
    AnalysisWindow(Date start, Date end);

    Date start() const { return m_Start; }
    Date end() const { return m_End; }
    std::size_t days() const { return static_cast<std::size_t>((m_End - m_Start).count()); }
    bool contains(Date day) const { return day >= m_Start && day < m_End; }
    /// Index of `day`; caller guarantees contains(day).
    std::size_t index_of(Date day) const { return static_cast<std::size_t>((day - m_Start).count()); }
    Date date_at(std::size_t index) const { return m_Start + std::chrono::days{index}; }

    friend bool operator==(const AnalysisWindow&, const AnalysisWindow&) = default;

private:
    Date m_Start;
    Date m_End;
};

/// Events per day over an analysis window.
class DailySeries {
public:
    /// Throws InvalidInputError if the length does not match the window or a
    /// count is negative.
    DailySeries(AnalysisWindow window, std::vector<std::int64_t> counts);

    /// Series over consecutive days starting at `start` (2020-01-01 by default).
    static DailySeries from_counts(std::vector<std::int64_t> counts,
                                   std::optional<Date> start = std::nullopt);

    const AnalysisWindow& window() const { return m_Window; }
    std::span<const std::int64_t> counts() const { return m_Counts; }
    std::size_t size() const { return m_Counts.size(); }
    std::int64_t operator[](std::size_t day) const { return m_Counts[day]; }

private:
    AnalysisWindow m_Window;
    std::vector<std::int64_t> m_Counts;
};

DailySeries bin_daily(const Timeline& timeline, const AnalysisWindow& window);

/// Events strictly before 00:00 UTC of `date`, and the rest.
std::pair<Timeline, Timeline> split_at(const Timeline& timeline, Date date);

/// Events of `timeline` whose day lies in `window`.
Timeline restrict_to(const Timeline& timeline, const AnalysisWindow& window);

struct RateSummary {
    std::int64_t total = 0;
    double mean = 0.0;
};

/// Total count and mean events per day.
RateSummary total_and_mean_rate(const DailySeries& series);

} // namespace shiftscope
