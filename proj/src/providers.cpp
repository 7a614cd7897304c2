#include "hdr/providers.hpp"

#include <chrono>
#include <set>

namespace hdr {

ProviderGateway::ProviderGateway(std::shared_ptr<LlmProvider> primary, std::shared_ptr<LlmProvider> fallback,
                                 std::vector<std::shared_ptr<SearchProvider>> searchers,
                                 PromptRegistry prompts, GatewayConfig config)
    : primary_(std::move(primary)),
      fallback_(std::move(fallback)),
      searchers_(std::move(searchers)),
      prompts_(std::move(prompts)),
      config_(config) {}

ProviderResponse ProviderGateway::complete(const PromptRequest& request) {
    if (!primary_ && !fallback_) throw Error("no completion channel configured");
    std::string rendered = prompts_.render(request);
    ++completions_;

    auto attempt = [&](LlmProvider& provider, Channel channel) -> ProviderResponse {
        auto start = std::chrono::steady_clock::now();
        std::string text = provider.complete(rendered, request);
        if (text.empty()) throw ProviderError("empty completion text");
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        return ProviderResponse{std::move(text), channel, static_cast<long>(elapsed)};
    };

    std::string primary_cause = "not configured";
    if (primary_) {
        for (int tries = 1 + config_.primary_retries; tries > 0; --tries) {
            try {
                return attempt(*primary_, Channel::Primary);
            } catch (const ProviderError& e) {
                primary_cause = e.what();
            }
        }
    }
    std::string fallback_cause = "not configured";
    if (fallback_) {
        for (int tries = 1 + config_.fallback_retries; tries > 0; --tries) {
            try {
                return attempt(*fallback_, Channel::Fallback);
            } catch (const ProviderError& e) {
                fallback_cause = e.what();
            }
        }
    }
    throw BothChannelsFailed(primary_cause, fallback_cause);
}

std::vector<RawSearchResult> ProviderGateway::search(const SearchRequest& request) {
    if (searchers_.empty()) throw Error("no search provider configured");
    if (request.query.empty()) throw Error("search query must be non-empty");

    std::vector<RawSearchResult> merged;
    std::set<std::string> seen;
    std::size_t failures = 0;
    std::string last_cause;
    for (const auto& provider : searchers_) {
        ++search_calls_;
        std::vector<RawSearchResult> batch;
        try {
            batch = provider->search(request);
        } catch (const ProviderError& e) {
            ++failures;
            last_cause = e.what();
            log_warn("search provider " + provider->id() + " failed: " + last_cause);
            continue;
        }
        for (auto& r : batch) {
            if (!url_valid(r.url)) {
                log_warn("dropping result with invalid url: " + r.url);
                continue;
            }
            if (seen.insert(normalize_url(r.url)).second) merged.push_back(std::move(r));
        }
    }
    if (failures == searchers_.size()) {
        throw AllProvidersFailed("all search providers failed; last cause: " + last_cause);
    }
    return merged;
}

}  // namespace hdr
