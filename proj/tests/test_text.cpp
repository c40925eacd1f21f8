// Copyright 2026 resprof contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "resprof/text.hpp"

using namespace resprof;

TEST_CASE("trim strips surrounding whitespace only") {
    REQUIRE(text::trim("  abc  ") == "abc");
    REQUIRE(text::trim("\tabc\r\n") == "abc");
    REQUIRE(text::trim("a b") == "a b");
    REQUIRE(text::trim("") == "");
    REQUIRE(text::trim("   ") == "");
}

TEST_CASE("split_ws splits on runs of spaces and tabs") {
    auto f = text::split_ws("  a\t\tbb   c ");
    REQUIRE(f.size() == 3);
    REQUIRE(f[0] == "a");
    REQUIRE(f[1] == "bb");
    REQUIRE(f[2] == "c");
    REQUIRE(text::split_ws("").empty());
    REQUIRE(text::split_ws(" \t ").empty());
}

TEST_CASE("split_lines handles trailing newline and CRLF") {
    auto lines = text::split_lines("a\nb\r\nc\n");
    REQUIRE(lines.size() == 3);
    REQUIRE(lines[0] == "a");
    REQUIRE(lines[1] == "b");
    REQUIRE(lines[2] == "c");
    REQUIRE(text::split_lines("").empty());
    auto single = text::split_lines("only");
    REQUIRE(single.size() == 1);
    REQUIRE(single[0] == "only");
}

TEST_CASE("to_u64 accepts whole decimal tokens only") {
    REQUIRE(text::to_u64("0") == 0);
    REQUIRE(text::to_u64("18446744073709551615") == 18446744073709551615ULL);
    REQUIRE_FALSE(text::to_u64("").has_value());
    REQUIRE_FALSE(text::to_u64("-1").has_value());
    REQUIRE_FALSE(text::to_u64("12x").has_value());
    REQUIRE_FALSE(text::to_u64("1.5").has_value());
    REQUIRE_FALSE(text::to_u64("18446744073709551616").has_value()); // overflow
}

TEST_CASE("to_double accepts whole floating tokens only") {
    REQUIRE(text::to_double("0.52") == Catch::Approx(0.52));
    REQUIRE(text::to_double("-3") == Catch::Approx(-3.0));
    REQUIRE_FALSE(text::to_double("").has_value());
    REQUIRE_FALSE(text::to_double("1.2.3").has_value());
    REQUIRE_FALSE(text::to_double("abc").has_value());
}

TEST_CASE("starts_with") {
    REQUIRE(text::starts_with("cpu 1 2", "cpu "));
    REQUIRE_FALSE(text::starts_with("cpu0 1 2", "cpu "));
    REQUIRE_FALSE(text::starts_with("cp", "cpu"));
}
