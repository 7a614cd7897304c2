#pragma once
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hdr {

// Lenient parse of an LLM reply: tries the whole text, then the outermost
// {...} or [...] slice (models like to wrap JSON in prose or code fences).
inline std::optional<nlohmann::json> parse_json_reply(std::string_view text) {
    auto try_parse = [](std::string_view s) -> std::optional<nlohmann::json> {
        auto doc = nlohmann::json::parse(s, nullptr, false);
        if (doc.is_discarded()) return std::nullopt;
        return doc;
    };
    if (auto doc = try_parse(text)) return doc;
    for (char open : {'{', '['}) {
        char close = open == '{' ? '}' : ']';
        auto begin = text.find(open);
        auto end = text.rfind(close);
        if (begin == std::string_view::npos || end == std::string_view::npos || end <= begin) continue;
        if (auto doc = try_parse(text.substr(begin, end - begin + 1))) return doc;
    }
    return std::nullopt;
}

}  // namespace hdr
