#include "hdr/script.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

namespace hdr {

namespace {

enum class Applies { Primary, Fallback, Any };
enum class Fault { None, Timeout, Failure };

struct CompletionEntry {
    TemplateId template_id;
    std::string match;  // empty = any; "prefix:" sigil for prefix match
    Applies channel = Applies::Any;
    std::string response;
    Fault fault = Fault::None;
    std::optional<double> temperature;
    bool repeat = false;
    bool consumed = false;
};

struct SearchEntry {
    std::string provider;
    std::string match;
    std::vector<RawSearchResult> results;
    Fault fault = Fault::None;
    bool repeat = false;
    bool consumed = false;
};

bool text_matches(const std::string& pattern, const std::string& value) {
    constexpr std::string_view kPrefix = "prefix:";
    if (pattern.rfind(kPrefix, 0) == 0) {
        return value.rfind(pattern.substr(kPrefix.size()), 0) == 0;
    }
    return value == pattern;
}

bool entry_matches(const CompletionEntry& e, const PromptRequest& req, Channel channel) {
    if (e.template_id != req.template_id) return false;
    if (e.channel == Applies::Primary && channel != Channel::Primary) return false;
    if (e.channel == Applies::Fallback && channel != Channel::Fallback) return false;
    if (e.temperature && std::fabs(*e.temperature - req.temperature) > 1e-9) return false;
    if (e.match.empty()) return true;
    for (const auto& [name, value] : req.variables) {
        if (text_matches(e.match, value)) return true;
    }
    return false;
}

Fault parse_fault(const nlohmann::json& entry) {
    if (!entry.contains("error")) return Fault::None;
    auto kind = entry.at("error").get<std::string>();
    if (kind == "timeout") return Fault::Timeout;
    if (kind == "failure") return Fault::Failure;
    throw ScriptParse("unknown error kind '" + kind + "' (expected timeout|failure)");
}

// Shared, internally synchronized state so primary/fallback channels and all
// search providers consume one entry sequence.
struct ScriptState {
    std::mutex mutex;
    std::vector<CompletionEntry> completions;
    std::vector<SearchEntry> searches;
    std::map<TemplateId, int> completion_ordinals;
    std::map<std::string, int> search_ordinals;

    std::string take_completion(const PromptRequest& req, Channel channel) {
        std::lock_guard lock(mutex);
        int ordinal = ++completion_ordinals[req.template_id];
        for (auto& e : completions) {
            if (e.consumed || !entry_matches(e, req, channel)) continue;
            if (!e.repeat) e.consumed = true;
            switch (e.fault) {
                case Fault::Timeout: throw ProviderTimeout("scripted timeout");
                case Fault::Failure: throw ProviderError("scripted failure");
                case Fault::None: break;
            }
            return e.response;
        }
        throw ScriptMiss("no scripted completion for template " +
                         std::string(template_name(req.template_id)) + ", call ordinal " +
                         std::to_string(ordinal));
    }

    std::vector<RawSearchResult> take_search(const std::string& provider, const SearchRequest& req) {
        std::lock_guard lock(mutex);
        int ordinal = ++search_ordinals[req.query];
        for (auto& e : searches) {
            if (e.consumed || e.provider != provider) continue;
            if (!e.match.empty() && !text_matches(e.match, req.query)) continue;
            if (!e.repeat) e.consumed = true;
            switch (e.fault) {
                case Fault::Timeout: throw ProviderTimeout("scripted timeout");
                case Fault::Failure: throw ProviderError("scripted failure");
                case Fault::None: break;
            }
            auto out = e.results;
            if (static_cast<int>(out.size()) > req.max_results) out.resize(req.max_results);
            return out;
        }
        throw ScriptMiss("no scripted search for query \"" + req.query + "\" (provider " + provider +
                         ", call ordinal " + std::to_string(ordinal) + ")");
    }
};

class ScriptedLlm final : public LlmProvider {
public:
    ScriptedLlm(std::shared_ptr<ScriptState> state, Channel channel)
        : state_(std::move(state)), channel_(channel) {}
    std::string complete(const std::string&, const PromptRequest& request) override {
        return state_->take_completion(request, channel_);
    }

private:
    std::shared_ptr<ScriptState> state_;
    Channel channel_;
};

class ScriptedSearch final : public SearchProvider {
public:
    ScriptedSearch(std::shared_ptr<ScriptState> state, std::string provider)
        : state_(std::move(state)), provider_(std::move(provider)) {}
    std::vector<RawSearchResult> search(const SearchRequest& request) override {
        return state_->take_search(provider_, request);
    }
    std::string id() const override { return provider_; }

private:
    std::shared_ptr<ScriptState> state_;
    std::string provider_;
};

RawSearchResult parse_result(const nlohmann::json& j, const std::string& provider) {
    RawSearchResult r;
    r.title = j.value("title", "");
    r.url = j.at("url").get<std::string>();
    r.snippet = j.value("snippet", "");
    r.provider_id = j.value("provider_id", provider);
    if (j.contains("published_at")) {
        auto d = parse_date(j.at("published_at").get<std::string>());
        if (!d) throw ScriptParse("bad published_at date: " + j.at("published_at").dump());
        r.published_at = d;
    }
    return r;
}

}  // namespace

ScriptBundle parse_script(const nlohmann::json& doc) {
    auto state = std::make_shared<ScriptState>();
    ScriptBundle bundle;

    if (doc.contains("now")) {
        bundle.now = parse_date(doc.at("now").get<std::string>());
        if (!bundle.now) throw ScriptParse("bad 'now' date: " + doc.at("now").dump());
    }

    for (const auto& j : doc.value("completions", nlohmann::json::array())) {
        CompletionEntry e;
        auto name = j.at("template_id").get<std::string>();
        auto id = template_from_name(name);
        if (!id) throw ScriptParse("unknown template_id '" + name + "'");
        e.template_id = *id;
        e.match = j.value("match", "");
        if (j.contains("channel")) {
            auto c = j.at("channel").get<std::string>();
            if (c == "primary") e.channel = Applies::Primary;
            else if (c == "fallback") e.channel = Applies::Fallback;
            else if (c == "any") e.channel = Applies::Any;
            else throw ScriptParse("unknown channel '" + c + "'");
        }
        e.fault = parse_fault(j);
        if (e.fault == Fault::None) {
            const auto& resp = j.at("response");
            e.response = resp.is_string() ? resp.get<std::string>() : resp.dump();
        }
        if (j.contains("temperature")) {
            double t = j.at("temperature").get<double>();
            if (t < 0.0 || t > 1.0) {
                throw ScriptParse("temperature " + std::to_string(t) + " out of range [0,1]");
            }
            e.temperature = t;
        }
        e.repeat = j.value("repeat", false);
        state->completions.push_back(std::move(e));
    }

    std::vector<std::string> provider_order;
    for (const auto& j : doc.value("searches", nlohmann::json::array())) {
        SearchEntry e;
        e.provider = j.value("provider", "scripted");
        e.match = j.value("query_match", "");
        e.fault = parse_fault(j);
        if (e.fault == Fault::None) {
            for (const auto& rj : j.value("results", nlohmann::json::array())) {
                e.results.push_back(parse_result(rj, e.provider));
            }
        }
        e.repeat = j.value("repeat", false);
        if (std::find(provider_order.begin(), provider_order.end(), e.provider) == provider_order.end()) {
            provider_order.push_back(e.provider);
        }
        state->searches.push_back(std::move(e));
    }
    if (provider_order.empty()) provider_order.push_back("scripted");

    bundle.primary = std::make_shared<ScriptedLlm>(state, Channel::Primary);
    bundle.fallback = std::make_shared<ScriptedLlm>(state, Channel::Fallback);
    for (auto& p : provider_order) {
        bundle.searchers.push_back(std::make_shared<ScriptedSearch>(state, p));
    }
    return bundle;
}

ScriptBundle load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScriptParse("cannot open script file: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ScriptParse("script JSON malformed: " + std::string(e.what()));
    }
    try {
        return parse_script(doc);
    } catch (const nlohmann::json::exception& e) {
        throw ScriptParse("script schema invalid: " + std::string(e.what()));
    }
}

}  // namespace hdr
