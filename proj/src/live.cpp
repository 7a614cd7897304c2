#include "hdr/live.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace hdr {

namespace {

// cpp-httplib wants host and path separately.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_begin = url.find('/', host_begin);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

httplib::Client make_client(const std::string& host, long timeout_ms, const std::string& token) {
    httplib::Client client(host);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    if (!token.empty()) client.set_bearer_token_auth(token);
    return client;
}

}  // namespace

HttpLlmProvider::HttpLlmProvider(std::string base_url, long timeout_ms, std::string bearer_token)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms), bearer_token_(std::move(bearer_token)) {}

std::string HttpLlmProvider::complete(const std::string& rendered_prompt, const PromptRequest& request) {
    auto [host, path] = split_url(base_url_);
    auto client = make_client(host, timeout_ms_, bearer_token_);
    nlohmann::json body = {{"prompt", rendered_prompt},
                           {"template_id", template_name(request.template_id)},
                           {"temperature", request.temperature},
                           {"max_output_chars", request.max_output_chars}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
            throw ProviderTimeout("llm endpoint timed out: " + base_url_);
        }
        throw ProviderError("llm endpoint unreachable: " + base_url_);
    }
    if (res->status != 200) throw ProviderError("llm endpoint status " + std::to_string(res->status));
    try {
        auto doc = nlohmann::json::parse(res->body);
        return doc.at("text").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw ProviderError("llm endpoint returned malformed body");
    }
}

HttpSearchProvider::HttpSearchProvider(std::string base_url, long timeout_ms, std::string bearer_token)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms), bearer_token_(std::move(bearer_token)) {}

std::vector<RawSearchResult> HttpSearchProvider::search(const SearchRequest& request) {
    auto [host, path] = split_url(base_url_);
    auto client = make_client(host, timeout_ms_, bearer_token_);
    httplib::Params params{{"q", request.query}, {"max", std::to_string(request.max_results)}};
    if (request.after_date) params.emplace("after", format_date(*request.after_date));
    if (request.site_restrict) params.emplace("site", *request.site_restrict);
    auto res = client.Get(path, params, httplib::Headers{});
    if (!res) {
        auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
            throw ProviderTimeout("search endpoint timed out: " + base_url_);
        }
        throw ProviderError("search endpoint unreachable: " + base_url_);
    }
    if (res->status != 200) throw ProviderError("search endpoint status " + std::to_string(res->status));
    std::vector<RawSearchResult> out;
    try {
        auto doc = nlohmann::json::parse(res->body);
        for (const auto& j : doc.value("results", nlohmann::json::array())) {
            RawSearchResult r;
            r.title = j.value("title", "");
            r.url = j.at("url").get<std::string>();
            r.snippet = j.value("snippet", "");
            r.provider_id = base_url_;
            if (j.contains("published_at")) r.published_at = parse_date(j.at("published_at").get<std::string>());
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception&) {
        throw ProviderError("search endpoint returned malformed body");
    }
    return out;
}

LiveProviders providers_from_env(const GatewayConfig& config) {
    LiveProviders live;
    auto token = env_var("HDR_API_TOKEN").value_or("");
    if (auto url = env_var("HDR_LLM_PRIMARY_URL")) {
        live.primary = std::make_shared<HttpLlmProvider>(*url, config.primary_timeout_ms, token);
    }
    if (auto url = env_var("HDR_LLM_FALLBACK_URL")) {
        live.fallback = std::make_shared<HttpLlmProvider>(*url, config.fallback_timeout_ms, token);
    }
    if (auto list = env_var("HDR_SEARCH_PROVIDERS")) {
        std::string rest = *list;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            std::string url = rest.substr(0, comma);
            rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
            if (!url.empty()) {
                live.searchers.push_back(
                    std::make_shared<HttpSearchProvider>(url, config.primary_timeout_ms, token));
            }
        }
    }
    return live;
}

}  // namespace hdr
