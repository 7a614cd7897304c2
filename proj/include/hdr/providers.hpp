#pragma once
#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hdr/prompts.hpp"
#include "hdr/util.hpp"

namespace hdr {

enum class Channel { Primary, Fallback };

struct ProviderResponse {
    std::string text;
    Channel channel = Channel::Primary;
    long latency_ms = 0;
};

struct SearchRequest {
    std::string query;
    std::optional<Date> after_date;
    std::optional<std::string> site_restrict;
    int max_results = 10;
};

struct RawSearchResult {
    std::string title;
    std::string url;
    std::string snippet;
    std::optional<Date> published_at;
    std::string provider_id;
};

class ProviderError : public Error {
public:
    using Error::Error;
};

class ProviderTimeout : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class BothChannelsFailed : public Error {
public:
    BothChannelsFailed(std::string primary_cause, std::string fallback_cause)
        : Error("both channels failed; primary: " + primary_cause + "; fallback: " + fallback_cause),
          primary_cause(std::move(primary_cause)),
          fallback_cause(std::move(fallback_cause)) {}
    std::string primary_cause;
    std::string fallback_cause;
};

class AllProvidersFailed : public Error {
public:
    using Error::Error;
};

// One LLM channel. Implementations enforce their own timeout and surface it
// as ProviderTimeout.
class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string complete(const std::string& rendered_prompt, const PromptRequest& request) = 0;
};

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::vector<RawSearchResult> search(const SearchRequest& request) = 0;
    virtual std::string id() const = 0;
};

struct GatewayConfig {
    long primary_timeout_ms = 30000;
    int primary_retries = 1;
    long fallback_timeout_ms = 60000;
    int fallback_retries = 0;
};

struct GatewayStats {
    long completions = 0;
    long search_calls = 0;  // one per provider per query
};

// Single entry point for all nondeterminism. Handles the primary/fallback
// transition for completions and the fan-out/merge for searches. Shareable
// across concurrent pipeline tasks; per-call state lives in the providers.
class ProviderGateway {
public:
    ProviderGateway(std::shared_ptr<LlmProvider> primary, std::shared_ptr<LlmProvider> fallback,
                    std::vector<std::shared_ptr<SearchProvider>> searchers,
                    PromptRegistry prompts = PromptRegistry::builtin(), GatewayConfig config = {});

    // Fallback is attempted iff the primary channel errors or times out.
    ProviderResponse complete(const PromptRequest& request);
    // Union of all providers' results, deduplicated by normalized URL,
    // ordered by provider priority then provider rank. Partial provider
    // failure is logged, not an error.
    std::vector<RawSearchResult> search(const SearchRequest& request);

    const PromptRegistry& prompts() const { return prompts_; }
    GatewayStats stats() const { return {completions_.load(), search_calls_.load()}; }
    const GatewayConfig& config() const { return config_; }

private:
    std::shared_ptr<LlmProvider> primary_;
    std::shared_ptr<LlmProvider> fallback_;
    std::vector<std::shared_ptr<SearchProvider>> searchers_;
    PromptRegistry prompts_;
    GatewayConfig config_;
    std::atomic<long> completions_{0};
    std::atomic<long> search_calls_{0};
};

}  // namespace hdr
