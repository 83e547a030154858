#include "shiftscope/dates.hpp"

#include "shiftscope/error.hpp"

#include <fmt/format.h>

#include <charconv>

namespace shiftscope {
namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) {
        throw ParseError{fmt::format("truncated date/time '{}'", whole)};
    }
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError{fmt::format("malformed date/time '{}'", whole)};
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) {
        throw ParseError{fmt::format("malformed date/time '{}'", whole)};
    }
}

Date make_date(int y, int m, int d, std::string_view whole) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw ParseError{fmt::format("invalid calendar date '{}'", whole)};
    }
    return std::chrono::sys_days{ymd};
}

Date parse_date_prefix(std::string_view text, std::string_view whole) {
    int y = read_int(text, 0, 4, whole);
    expect(text, 4, '-', whole);
    int m = read_int(text, 5, 2, whole);
    expect(text, 7, '-', whole);
    int d = read_int(text, 8, 2, whole);
    return make_date(y, m, d, whole);
}

} // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10) {
        throw ParseError{fmt::format("expected YYYY-MM-DD, got '{}'", text)};
    }
    return parse_date_prefix(text, text);
}

Timestamp parse_timestamp(std::string_view text) {
    Date day = parse_date_prefix(text, text);
    if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ')) {
        throw ParseError{fmt::format("expected YYYY-MM-DDTHH:MM:SS, got '{}'", text)};
    }
    int hh = read_int(text, 11, 2, text);
    expect(text, 13, ':', text);
    int mm = read_int(text, 14, 2, text);
    expect(text, 16, ':', text);
    int ss = read_int(text, 17, 2, text);
    if (hh > 23 || mm > 59 || ss > 60) {
        throw ParseError{fmt::format("time of day out of range in '{}'", text)};
    }
    std::string_view rest = text.substr(19);
    if (!rest.empty() && rest.front() == '.') {
        std::size_t i = 1;
        while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') {
            ++i;
        }
        if (i == 1) {
            throw ParseError{fmt::format("malformed fractional seconds in '{}'", text)};
        }
        rest.remove_prefix(i);
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) {
        throw ParseError{fmt::format("only UTC timestamps are accepted, got '{}'", text)};
    }
    return Timestamp{day} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::string format_date(Date date) {
    std::chrono::year_month_day ymd{date};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(Timestamp ts) {
    Date day = day_of(ts);
    auto secs = (ts - Timestamp{day}).count();
    return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", format_date(day), secs / 3600, (secs / 60) % 60, secs % 60);
}

} // namespace shiftscope
