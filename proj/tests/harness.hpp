#pragma once
// Shared fixture plumbing for the test suites.
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "hdr/providers.hpp"
#include "hdr/script.hpp"

namespace harness {

struct ScriptedGateway {
    hdr::ScriptBundle bundle;
    std::unique_ptr<hdr::ProviderGateway> gateway;

    hdr::ProviderGateway& operator*() { return *gateway; }
    hdr::ProviderGateway* operator->() { return gateway.get(); }
};

inline ScriptedGateway gateway_from_json(const nlohmann::json& script) {
    ScriptedGateway g;
    g.bundle = hdr::parse_script(script);
    g.gateway = std::make_unique<hdr::ProviderGateway>(g.bundle.primary, g.bundle.fallback,
                                                       g.bundle.searchers, hdr::PromptRegistry::builtin());
    return g;
}

inline ScriptedGateway gateway_from_text(const std::string& script_text) {
    return gateway_from_json(nlohmann::json::parse(script_text));
}

// One completion entry answering any call on a template.
inline nlohmann::json completion(const std::string& template_id, const nlohmann::json& response,
                                 bool repeat = false) {
    nlohmann::json entry = {{"template_id", template_id}, {"response", response}};
    if (repeat) entry["repeat"] = true;
    return entry;
}

inline nlohmann::json search_entry(const std::string& query_match, const nlohmann::json& results) {
    return {{"query_match", query_match}, {"results", results}};
}

inline nlohmann::json result(const std::string& title, const std::string& url, const std::string& snippet,
                             const std::string& published_at = "") {
    nlohmann::json r = {{"title", title}, {"url", url}, {"snippet", snippet}};
    if (!published_at.empty()) r["published_at"] = published_at;
    return r;
}

}  // namespace harness
