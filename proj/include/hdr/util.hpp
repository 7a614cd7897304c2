#pragma once
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Calendar date (UTC, day resolution) and second-resolution timestamp.
using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_seconds;

std::optional<Date> parse_date(std::string_view text);      // "YYYY-MM-DD"
std::string format_date(const Date& d);
std::optional<Timestamp> parse_timestamp(std::string_view text);  // date or "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(const Timestamp& t);
Date date_of(const Timestamp& t);
Timestamp midnight(const Date& d);
long days_between(const Date& from, const Date& to);        // signed, to - from
Date add_days(const Date& d, long n);
Date add_months(const Date& d, int n);                      // day-of-month clamped into target month

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() = 0;
    Date today() { return date_of(now()); }
};

class SystemClock final : public Clock {
public:
    Timestamp now() override;
};

class FakeClock final : public Clock {
public:
    explicit FakeClock(Timestamp start) : now_(start) {}
    explicit FakeClock(const Date& d) : now_(midnight(d)) {}
    Timestamp now() override { return now_; }
    void set(Timestamp t) { now_ = t; }
    void advance_seconds(std::int64_t secs) { now_ += std::chrono::seconds(secs); }

private:
    Timestamp now_;
};

// Lowercased ASCII alphanumeric token runs.
std::vector<std::string> tokenize(std::string_view text);
std::string to_lower(std::string_view text);
// Lowercase, collapse whitespace runs to single spaces, trim ends. Shared
// canonical form for content hashing and description dedup.
std::string normalize_content(std::string_view text);
// |query ∩ text| / |query| over distinct tokens; 0 when query is empty.
double token_overlap(const std::vector<std::string>& query_tokens,
                     const std::vector<std::string>& text_tokens);
// Term-frequency cosine similarity; 0 when either side has no tokens.
double tf_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b);
// Case-insensitive phrase occurrence with token boundaries on both ends.
bool contains_phrase(std::string_view text, std::string_view phrase);
bool is_stopword(std::string_view lower_token);
// Capitalized words (len >= 2) minus stopwords, lowercased. Used for
// contradiction-candidate blocking and the entity-mention heuristic.
std::vector<std::string> entity_tokens(std::string_view text);

// Lowercase scheme+host, strip fragment and trailing slash, keep query string.
std::string normalize_url(std::string_view url);
bool url_valid(std::string_view url);

std::string md5_hex(std::string_view data);

void set_log_verbose(bool on);
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

std::optional<std::string> env_var(const char* name);

}  // namespace hdr
