#pragma once

#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shiftscope {

// Line-delimited timeline records, one account per line:
//
//   {"user_id": "u1", "class": "journalist",
//    "tweets": [{"ts": "2020-03-10T08:15:00Z", "rt": true, "src": "el_pais"}, ...]}
//
// `src` is a string when `rt` is true and null (or absent) otherwise.
// Tweets may appear in any order; they are sorted on ingestion.

/// Throws ParseError describing the first problem found.
Timeline parse_timeline_record(std::string_view line);

/// Compact single-line record; tweets in timeline order.
std::string to_record(const Timeline& timeline);

struct IngestIssue {
    std::size_t line = 0;
    std::string message;
};

struct IngestResult {
    std::vector<Timeline> timelines;
    std::vector<IngestIssue> issues;
    std::size_t records = 0;
};

/// Parses every non-blank line; malformed records are reported with their
/// 1-based line number and skipped.
IngestResult ingest(std::istream& input);

/// Throws Error if the file cannot be opened or read.
IngestResult ingest_file(const std::filesystem::path& path);

void write_records(std::ostream& output, std::span<const Timeline> timelines);

} // namespace shiftscope
