#pragma once

#include "shiftscope/timeline.hpp"

#include <json.hpp>

#include <vector>

namespace shiftscope::detail {

/// Events of a `tweets` array (unsorted). Throws ParseError.
std::vector<Event> parse_tweets(const nlohmann::json& tweets);

nlohmann::json tweets_to_json(const Timeline& timeline);

} // namespace shiftscope::detail
