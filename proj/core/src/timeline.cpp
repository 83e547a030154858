#include "shiftscope/timeline.hpp"

#include "shiftscope/error.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace shiftscope {

Event Event::retweet(Timestamp ts, std::string source_id) {
    if (source_id.empty()) {
        throw InvalidInputError{"retweet event requires a source id"};
    }
    return Event{ts, EventKind::retweet, std::move(source_id)};
}

std::string_view to_string(UserClass cls) {
    switch (cls) {
    case UserClass::journalist:
        return "journalist";
    case UserClass::politician:
        return "politician";
    case UserClass::random_follower:
        return "random_follower";
    case UserClass::random_friend:
        return "random_friend";
    case UserClass::generic:
        return "generic";
    }
    return "generic";
}

UserClass parse_user_class(std::string_view name) {
    for (UserClass cls : ALL_USER_CLASSES) {
        if (to_string(cls) == name) {
            return cls;
        }
    }
    throw ParseError{fmt::format("unknown user class '{}'", name)};
}

Timeline::Timeline(std::string user_id, UserClass cls, std::vector<Event> events)
    : m_UserId{std::move(user_id)}, m_Class{cls}, m_Events{std::move(events)} {
    if (m_UserId.empty()) {
        throw InvalidInputError{"timeline user_id must be non-empty"};
    }
    auto by_time = [](const Event& a, const Event& b) { return a.timestamp() < b.timestamp(); };
    if (!std::is_sorted(m_Events.begin(), m_Events.end(), by_time)) {
        throw InvalidInputError{fmt::format("events of '{}' are not sorted by timestamp", m_UserId)};
    }
}

Timeline Timeline::from_unsorted(std::string user_id, UserClass cls, std::vector<Event> events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp() < b.timestamp(); });
    return Timeline{std::move(user_id), cls, std::move(events)};
}

AnalysisWindow::AnalysisWindow(Date start, Date end) : m_Start{start}, m_End{end} {
    if (!(start < end)) {
        throw InvalidInputError{fmt::format("analysis window [{}, {}) is empty", format_date(start), format_date(end))};
    }
}

DailySeries::DailySeries(AnalysisWindow window, std::vector<std::int64_t> counts)
    : m_Window{window}, m_Counts{std::move(counts)} {
    if (m_Counts.size() != m_Window.days()) {
        throw InvalidInputError{fmt::format("series has {} counts for a {}-day window", m_Counts.size(), m_Window.days())};
    }
    if (std::any_of(m_Counts.begin(), m_Counts.end(), [](std::int64_t c) { return c < 0; })) {
        throw InvalidInputError{"daily counts must be non-negative"};
    }
}

DailySeries DailySeries::from_counts(std::vector<std::int64_t> counts, std::optional<Date> start) {
    Date first = start.value_or(Date{std::chrono::year{2020} / 1 / 1});
    if (counts.empty()) {
        throw InvalidInputError{"daily series needs at least one day"};
    }
    AnalysisWindow window{first, first + std::chrono::days{counts.size()}};
    return DailySeries{window, std::move(counts)};
}

DailySeries bin_daily(const Timeline& timeline, const AnalysisWindow& window) {
    std::vector<std::int64_t> counts(window.days(), 0);
    for (const Event& event : timeline.events()) {
        Date day = day_of(event.timestamp());
        if (window.contains(day)) {
            ++counts[window.index_of(day)];
        }
    }
    return DailySeries{window, std::move(counts)};
}

std::pair<Timeline, Timeline> split_at(const Timeline& timeline, Date date) {
    auto events = timeline.events();
    auto mid = std::partition_point(events.begin(), events.end(),
                                    [cut = Timestamp{date}](const Event& e) { return e.timestamp() < cut; });
    return {Timeline{timeline.user_id(), timeline.user_class(), std::vector<Event>(events.begin(), mid)},
            Timeline{timeline.user_id(), timeline.user_class(), std::vector<Event>(mid, events.end())}};
}

Timeline restrict_to(const Timeline& timeline, const AnalysisWindow& window) {
    std::vector<Event> kept;
    for (const Event& event : timeline.events()) {
        if (window.contains(day_of(event.timestamp()))) {
            kept.push_back(event);
        }
    }
    return Timeline{timeline.user_id(), timeline.user_class(), std::move(kept)};
}

RateSummary total_and_mean_rate(const DailySeries& series) {
    if (series.size() == 0) {
        throw DegenerateInputError{"mean rate of an empty window"};
    }
    RateSummary out;
    for (std::int64_t c : series.counts()) {
        out.total += c;
    }
    out.mean = static_cast<double>(out.total) / static_cast<double>(series.size());
    return out;
}

} // namespace shiftscope
