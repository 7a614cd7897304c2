#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hdr/providers.hpp"

namespace hdr {

// POSTs {"prompt","temperature","max_output_chars"} to the endpoint and
// reads {"text": "..."} back. Bearer token is the only supported auth.
class HttpLlmProvider final : public LlmProvider {
public:
    HttpLlmProvider(std::string base_url, long timeout_ms, std::string bearer_token = "");
    std::string complete(const std::string& rendered_prompt, const PromptRequest& request) override;

private:
    std::string base_url_;
    long timeout_ms_;
    std::string bearer_token_;
};

// GETs /search?q=...&max=...[&after=...][&site=...] and reads
// {"results": [{"title","url","snippet","published_at"}]}.
class HttpSearchProvider final : public SearchProvider {
public:
    HttpSearchProvider(std::string base_url, long timeout_ms, std::string bearer_token = "");
    std::vector<RawSearchResult> search(const SearchRequest& request) override;
    std::string id() const override { return base_url_; }

private:
    std::string base_url_;
    long timeout_ms_;
    std::string bearer_token_;
};

// Builds providers from HDR_LLM_PRIMARY_URL, HDR_LLM_FALLBACK_URL and
// HDR_SEARCH_PROVIDERS (comma-separated endpoint list).
struct LiveProviders {
    std::shared_ptr<LlmProvider> primary;
    std::shared_ptr<LlmProvider> fallback;
    std::vector<std::shared_ptr<SearchProvider>> searchers;
};
LiveProviders providers_from_env(const GatewayConfig& config = {});

}  // namespace hdr
