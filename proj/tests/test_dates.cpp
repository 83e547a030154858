#include "support.hpp"

#include <shiftscope/error.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace shiftscope;
using namespace std::chrono;

TEST_CASE("dates round-trip through ISO-8601", "[dates]") {
    Date d = parse_date("2020-03-09");
    CHECK(d == sys_days{year{2020} / 3 / 9});
    CHECK(format_date(d) == "2020-03-09");
    CHECK(format_date(parse_date("2019-12-31") + days{1}) == "2020-01-01");
}

TEST_CASE("timestamps accept the common UTC spellings", "[dates]") {
    Timestamp expected = sys_days{year{2020} / 3 / 10} + hours{8} + minutes{15} + seconds{30};
    CHECK(parse_timestamp("2020-03-10T08:15:30Z") == expected);
    CHECK(parse_timestamp("2020-03-10T08:15:30+00:00") == expected);
    CHECK(parse_timestamp("2020-03-10 08:15:30") == expected);
    CHECK(parse_timestamp("2020-03-10T08:15:30.999Z") == expected);
    CHECK(format_timestamp(expected) == "2020-03-10T08:15:30Z");
}

TEST_CASE("malformed dates and non-UTC offsets are rejected", "[dates]") {
    CHECK_THROWS_AS(parse_date("2020-3-9"), ParseError);
    CHECK_THROWS_AS(parse_date("2020-02-30"), ParseError);
    CHECK_THROWS_AS(parse_date("20200309xx"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2020-03-10T25:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2020-03-10T08:15:30+01:00"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2020-03-10"), ParseError);
    CHECK_THROWS_AS(parse_timestamp("2020-03-10T08:15:30."), ParseError);
}

TEST_CASE("day_of uses left-inclusive UTC days", "[dates]") {
    CHECK(day_of(parse_timestamp("2020-03-10T00:00:00Z")) == parse_date("2020-03-10"));
    CHECK(day_of(parse_timestamp("2020-03-09T23:59:59Z")) == parse_date("2020-03-09"));
}
