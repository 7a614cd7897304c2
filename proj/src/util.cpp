#include "hdr/util.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>

namespace hdr {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() < 10) return std::nullopt;
    text = text.substr(0, 10);
    if (text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
    Date date = std::chrono::year(std::stoi(std::string(y))) /
                std::chrono::month(static_cast<unsigned>(std::stoi(std::string(m)))) /
                std::chrono::day(static_cast<unsigned>(std::stoi(std::string(d))));
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()), unsigned(d.day()));
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    auto date = parse_date(text);
    if (!date) return std::nullopt;
    Timestamp ts = midnight(*date);
    if (text.size() >= 19 && (text[10] == 'T' || text[10] == ' ')) {
        auto hh = text.substr(11, 2), mm = text.substr(14, 2), ss = text.substr(17, 2);
        if (text[13] == ':' && text[16] == ':' && all_digits(hh) && all_digits(mm) && all_digits(ss)) {
            ts += std::chrono::hours(std::stoi(std::string(hh))) +
                  std::chrono::minutes(std::stoi(std::string(mm))) +
                  std::chrono::seconds(std::stoi(std::string(ss)));
        }
    }
    return ts;
}

std::string format_timestamp(const Timestamp& t) {
    auto days = std::chrono::floor<std::chrono::days>(t);
    Date d{days};
    auto rest = std::chrono::duration_cast<std::chrono::seconds>(t - days).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", int(d.year()), unsigned(d.month()),
                  unsigned(d.day()), static_cast<long long>(rest / 3600), static_cast<long long>(rest / 60 % 60),
                  static_cast<long long>(rest % 60));
    return buf;
}

Date date_of(const Timestamp& t) { return Date{std::chrono::floor<std::chrono::days>(t)}; }

Timestamp midnight(const Date& d) { return std::chrono::sys_days(d); }

long days_between(const Date& from, const Date& to) {
    return (std::chrono::sys_days(to) - std::chrono::sys_days(from)).count();
}

Date add_days(const Date& d, long n) { return Date{std::chrono::sys_days(d) + std::chrono::days(n)}; }

Date add_months(const Date& d, int n) {
    auto shifted = d + std::chrono::months(n);
    if (!shifted.ok()) shifted = shifted.year() / shifted.month() / std::chrono::last;
    return shifted;
}

Timestamp SystemClock::now() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string normalize_content(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

double token_overlap(const std::vector<std::string>& query_tokens, const std::vector<std::string>& text_tokens) {
    if (query_tokens.empty()) return 0.0;
    std::vector<std::string> q(query_tokens);
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    std::size_t hit = 0;
    for (const auto& t : q) {
        if (std::find(text_tokens.begin(), text_tokens.end(), t) != text_tokens.end()) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(q.size());
}

double tf_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::map<std::string, int> fa, fb;
    for (const auto& t : a) ++fa[t];
    for (const auto& t : b) ++fb[t];
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, n] : fa) {
        na += double(n) * n;
        auto it = fb.find(t);
        if (it != fb.end()) dot += double(n) * it->second;
    }
    for (const auto& [t, n] : fb) nb += double(n) * n;
    if (dot == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool contains_phrase(std::string_view text, std::string_view phrase) {
    if (phrase.empty()) return false;
    std::string lt = to_lower(text), lp = to_lower(phrase);
    std::size_t pos = 0;
    while ((pos = lt.find(lp, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(lt[pos - 1]));
        std::size_t end = pos + lp.size();
        bool right_ok = end >= lt.size() || !std::isalnum(static_cast<unsigned char>(lt[end]));
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool is_stopword(std::string_view w) {
    static const std::vector<std::string_view> kStop = {
        "the",  "a",     "an",    "and",  "or",    "of",    "in",   "on",    "at",    "to",    "for",   "with",
        "by",   "from",  "as",    "is",   "are",   "was",   "were", "be",    "been",  "this",  "that",  "these",
        "those", "it",   "its",   "their", "his",  "her",   "our",  "your",  "my",    "we",    "you",   "they",
        "he",   "she",   "but",   "not",  "no",    "do",    "does", "did",   "has",   "have",  "had",   "will",
        "would", "can",  "could", "may",  "might", "about", "into", "over",  "after", "before", "between",
        "during", "through", "per", "also", "than", "then", "when", "what",  "which", "who",   "how",   "why",
        "where", "while", "if",   "because", "so", "such",  "both", "each",  "more",  "most",  "some",  "any",
        "all",  "same",  "too",   "very", "just",  "now"};
    return std::find(kStop.begin(), kStop.end(), w) != kStop.end();
}

std::vector<std::string> entity_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    bool cap = false;
    auto flush = [&] {
        if (cap && cur.size() >= 2 && !is_stopword(cur) &&
            std::find(out.begin(), out.end(), cur) == out.end()) {
            out.push_back(cur);
        }
        cur.clear();
        cap = false;
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (cur.empty()) cap = std::isupper(c);
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::string normalize_url(std::string_view url) {
    std::string s(url);
    auto scheme_end = s.find("://");
    if (scheme_end == std::string::npos) return to_lower(s);
    std::string scheme = to_lower(s.substr(0, scheme_end));
    std::size_t host_begin = scheme_end + 3;
    std::size_t host_end = s.find_first_of("/?#", host_begin);
    if (host_end == std::string::npos) host_end = s.size();
    std::string host = to_lower(s.substr(host_begin, host_end - host_begin));
    std::string rest = s.substr(host_end);
    auto frag = rest.find('#');
    if (frag != std::string::npos) rest.resize(frag);
    std::string path = rest, query;
    auto qm = rest.find('?');
    if (qm != std::string::npos) {
        path = rest.substr(0, qm);
        query = rest.substr(qm);
    }
    while (!path.empty() && path.back() == '/') path.pop_back();
    return scheme + "://" + host + path + query;
}

bool url_valid(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return false;
    for (char c : url.substr(0, scheme_end)) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return false;
    }
    auto host = url.substr(scheme_end + 3);
    auto host_end = host.find_first_of("/?#");
    if (host_end != std::string_view::npos) host = host.substr(0, host_end);
    return !host.empty();
}

std::string md5_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_md5(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {
std::atomic<bool> g_verbose{false};
std::mutex g_log_mutex;
}  // namespace

void set_log_verbose(bool on) { g_verbose = on; }

void log_warn(const std::string& msg) {
    std::lock_guard lock(g_log_mutex);
    std::fprintf(stderr, "[hdr] warn: %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
    if (!g_verbose) return;
    std::lock_guard lock(g_log_mutex);
    std::fprintf(stderr, "[hdr] %s\n", msg.c_str());
}

std::optional<std::string> env_var(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

}  // namespace hdr
