#pragma once
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdr/providers.hpp"

namespace hdr {

class ScriptParse : public Error {
public:
    using Error::Error;
};

// Raised at call time when no scripted entry matches; deliberately not a
// ProviderError so the gateway surfaces it instead of falling back.
class ScriptMiss : public Error {
public:
    using Error::Error;
};

// Replayable provider fixtures. Completion entries are matched by
// (template_id, match, channel, temperature); search entries by
// (provider, query_match). `match` is exact or "prefix:"-sigiled and is
// tested against every bound template variable. Entries are consumed in
// declaration order unless marked repeat.
struct ScriptBundle {
    std::shared_ptr<LlmProvider> primary;
    std::shared_ptr<LlmProvider> fallback;
    std::vector<std::shared_ptr<SearchProvider>> searchers;
    std::optional<Date> now;  // pins the injected clock when present
};

ScriptBundle parse_script(const nlohmann::json& doc);
ScriptBundle load_script(const std::filesystem::path& path);

}  // namespace hdr
