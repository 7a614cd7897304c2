#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdr/util.hpp"

using namespace hdr;

TEST_CASE("date parsing and formatting round-trip") {
    auto d = parse_date("2026-03-15");
    REQUIRE(d.has_value());
    CHECK(format_date(*d) == "2026-03-15");
    CHECK_FALSE(parse_date("2026-13-01").has_value());
    CHECK_FALSE(parse_date("2026-02-30").has_value());
    CHECK_FALSE(parse_date("not-a-date").has_value());
}

TEST_CASE("timestamp parsing accepts bare dates and full times") {
    auto t = parse_timestamp("2026-03-15T04:30:05Z");
    REQUIRE(t.has_value());
    CHECK(format_timestamp(*t) == "2026-03-15T04:30:05Z");
    auto d = parse_timestamp("2026-03-15");
    REQUIRE(d.has_value());
    CHECK(format_timestamp(*d) == "2026-03-15T00:00:00Z");
}

TEST_CASE("calendar arithmetic") {
    Date now = *parse_date("2026-03-15");
    CHECK(format_date(add_months(now, -3)) == "2025-12-15");
    CHECK(format_date(add_months(*parse_date("2026-03-31"), -1)) == "2026-02-28");
    CHECK(days_between(*parse_date("2026-03-01"), now) == 14);
    CHECK(days_between(now, *parse_date("2026-03-01")) == -14);
    CHECK(format_date(add_days(*parse_date("2025-01-01"), -1)) == "2024-12-31");
}

TEST_CASE("tokenize lowercases alphanumeric runs") {
    auto toks = tokenize("BYD's Blade-Battery 2026!");
    CHECK(toks == std::vector<std::string>{"byd", "s", "blade", "battery", "2026"});
    CHECK(tokenize("").empty());
}

TEST_CASE("normalize_content collapses whitespace and case") {
    CHECK(normalize_content("  BYD   makes\tbatteries \n") == "byd makes batteries");
    CHECK(normalize_content("") == "");
}

TEST_CASE("token_overlap is the fraction of distinct query tokens present") {
    CHECK(token_overlap(tokenize("byd battery"), tokenize("BYD produces battery cells")) == doctest::Approx(1.0));
    CHECK(token_overlap(tokenize("byd solar"), tokenize("BYD makes cars")) == doctest::Approx(0.5));
    CHECK(token_overlap({}, tokenize("anything")) == 0.0);
}

TEST_CASE("tf_cosine basics") {
    CHECK(tf_cosine(tokenize("a b"), tokenize("a b")) == doctest::Approx(1.0));
    CHECK(tf_cosine(tokenize("a"), tokenize("b")) == 0.0);
    CHECK(tf_cosine({}, tokenize("a")) == 0.0);
    double sim = tf_cosine(tokenize("battery ev"), tokenize("battery plants expand"));
    CHECK(sim > 0.0);
    CHECK(sim < 1.0);
}

TEST_CASE("contains_phrase requires token boundaries") {
    CHECK(contains_phrase("the BYD report", "byd"));
    CHECK_FALSE(contains_phrase("the HYBYDRID report", "byd"));
    CHECK(contains_phrase("Blade Battery news", "blade battery"));
    CHECK_FALSE(contains_phrase("anything", ""));
}

TEST_CASE("entity_tokens keeps capitalized non-stopwords") {
    auto toks = entity_tokens("The BYD Seal outsold Tesla in Europe");
    CHECK(toks == std::vector<std::string>{"byd", "seal", "tesla", "europe"});
}

TEST_CASE("normalize_url lowers scheme and host, strips fragment and trailing slash") {
    CHECK(normalize_url("HTTPS://Example.COM/Path/") == "https://example.com/Path");
    CHECK(normalize_url("https://example.com/a#frag") == "https://example.com/a");
    CHECK(normalize_url("https://example.com/a?x=1&y=2#f") == "https://example.com/a?x=1&y=2");
    CHECK(normalize_url("https://example.com/") == "https://example.com");
    SUBCASE("idempotent") {
        const char* urls[] = {"https://Example.com/A/?q=1#f", "http://x.org", "https://a.b/c/d/"};
        for (auto u : urls) {
            auto once = normalize_url(u);
            CHECK(normalize_url(once) == once);
        }
    }
}

TEST_CASE("url_valid wants scheme://host") {
    CHECK(url_valid("https://example.com/x"));
    CHECK_FALSE(url_valid("example.com/x"));
    CHECK_FALSE(url_valid("://nohost"));
    CHECK_FALSE(url_valid("https://"));
}

TEST_CASE("md5 matches the reference test vectors") {
    CHECK(md5_hex("") == "d41d8cd98f00b204e9800998ecf8427e");
    CHECK(md5_hex("abc") == "900150983cd24fb0d6963f7d28e17f72");
    CHECK(md5_hex("message digest") == "f96b697d7cb7938d525a2f31aaf161d0");
}
