#include "shiftscope/records.hpp"

#include "records_internal.hpp"
#include "shiftscope/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>

namespace shiftscope {
namespace detail {

std::vector<Event> parse_tweets(const nlohmann::json& tweets) {
    if (!tweets.is_array()) {
        throw ParseError{"'tweets' must be an array"};
    }
    std::vector<Event> events;
    events.reserve(tweets.size());
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        const auto& tweet = tweets[i];
        if (!tweet.is_object()) {
            throw ParseError{fmt::format("tweet {} is not an object", i)};
        }
        auto ts = tweet.find("ts");
        auto rt = tweet.find("rt");
        if (ts == tweet.end() || !ts->is_string()) {
            throw ParseError{fmt::format("tweet {} lacks a string 'ts'", i)};
        }
        if (rt == tweet.end() || !rt->is_boolean()) {
            throw ParseError{fmt::format("tweet {} lacks a boolean 'rt'", i)};
        }
        Timestamp when = parse_timestamp(ts->get_ref<const std::string&>());
        auto src = tweet.find("src");
        bool has_src = src != tweet.end() && !src->is_null();
        if (has_src && !src->is_string()) {
            throw ParseError{fmt::format("tweet {} has a non-string 'src'", i)};
        }
        if (rt->get<bool>()) {
            if (!has_src || src->get_ref<const std::string&>().empty()) {
                throw ParseError{fmt::format("tweet {} is a retweet without a source", i)};
            }
            events.push_back(Event::retweet(when, src->get<std::string>()));
        } else {
            if (has_src) {
                throw ParseError{fmt::format("tweet {} is an original but names a source", i)};
            }
            events.push_back(Event::original(when));
        }
    }
    return events;
}

nlohmann::json tweets_to_json(const Timeline& timeline) {
    auto tweets = nlohmann::json::array();
    for (const Event& e : timeline.events()) {
        tweets.push_back({{"ts", format_timestamp(e.timestamp())},
                          {"rt", e.is_retweet()},
                          {"src", e.is_retweet() ? nlohmann::json(e.source_id()) : nlohmann::json(nullptr)}});
    }
    return tweets;
}

} // namespace detail

Timeline parse_timeline_record(std::string_view line) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError{fmt::format("invalid JSON: {}", e.what())};
    }
    if (!doc.is_object()) {
        throw ParseError{"record must be a JSON object"};
    }
    auto id = doc.find("user_id");
    if (id == doc.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
        throw ParseError{"record lacks a non-empty string 'user_id'"};
    }
    auto cls = doc.find("class");
    if (cls == doc.end() || !cls->is_string()) {
        throw ParseError{"record lacks a string 'class'"};
    }
    auto tweets = doc.find("tweets");
    if (tweets == doc.end()) {
        throw ParseError{"record lacks 'tweets'"};
    }
    try {
        return Timeline::from_unsorted(id->get<std::string>(), parse_user_class(cls->get_ref<const std::string&>()),
                                       detail::parse_tweets(*tweets));
    } catch (const InvalidInputError& e) {
        throw ParseError{e.what()};
    }
}

std::string to_record(const Timeline& timeline) {
    nlohmann::ordered_json doc;
    doc["user_id"] = timeline.user_id();
    doc["class"] = std::string{to_string(timeline.user_class())};
    doc["tweets"] = detail::tweets_to_json(timeline);
    return doc.dump();
}

IngestResult ingest(std::istream& input) {
    IngestResult out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(input, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ++out.records;
        try {
            out.timelines.push_back(parse_timeline_record(line));
        } catch (const ParseError& e) {
            out.issues.push_back({number, e.what()});
        }
    }
    if (input.bad()) {
        throw Error{fmt::format("read error after line {}", number)};
    }
    return out;
}

IngestResult ingest_file(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw Error{fmt::format("cannot open '{}'", path.string())};
    }
    return ingest(in);
}

void write_records(std::ostream& output, std::span<const Timeline> timelines) {
    for (const Timeline& t : timelines) {
        output << to_record(t) << '\n';
    }
}

} // namespace shiftscope
