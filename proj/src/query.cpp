#include "hdr/query.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hdr/jsonish.hpp"

namespace hdr {

namespace {

const std::vector<std::pair<Intent, std::string_view>> kIntentNames = {
    {Intent::Fact, "fact"},         {Intent::Trend, "trend"},
    {Intent::Comparison, "comparison"}, {Intent::Causal, "causal"},
    {Intent::Prediction, "prediction"}, {Intent::Comprehensive, "comprehensive"},
};

const std::vector<std::pair<TemporalCategory, std::string_view>> kCategoryNames = {
    {TemporalCategory::Current, "current"},   {TemporalCategory::Recent, "recent"},
    {TemporalCategory::ThisYear, "this_year"}, {TemporalCategory::Future, "future"},
    {TemporalCategory::Past, "past"},         {TemporalCategory::After, "after"},
    {TemporalCategory::Before, "before"},     {TemporalCategory::None, "none"},
};

std::optional<Intent> intent_from_name(std::string_view name) {
    std::string n = to_lower(name);
    for (auto& [intent, s] : kIntentNames) {
        if (n == s) return intent;
    }
    // Accept the long-form labels the paper uses.
    if (n == "fact_query" || n == "factquery") return Intent::Fact;
    if (n == "trend_analysis" || n == "trendanalysis") return Intent::Trend;
    if (n == "causal_analysis" || n == "causalanalysis") return Intent::Causal;
    return std::nullopt;
}

std::optional<TemporalCategory> category_from_name(std::string_view name) {
    std::string n = to_lower(name);
    for (auto& [cat, s] : kCategoryNames) {
        if (n == s) return cat;
    }
    if (n == "thisyear" || n == "this year") return TemporalCategory::ThisYear;
    return std::nullopt;
}

// Extracts the year or full date following an "after"/"before"-style keyword.
std::optional<Date> date_after_keyword(const std::string& lower_text, const std::string& keyword,
                                       bool* year_only) {
    std::size_t pos = 0;
    while ((pos = lower_text.find(keyword, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(lower_text[pos - 1]));
        std::size_t end = pos + keyword.size();
        bool right_ok = end >= lower_text.size() || !std::isalnum(static_cast<unsigned char>(lower_text[end]));
        if (!left_ok || !right_ok) {
            ++pos;
            continue;
        }
        std::size_t i = end;
        while (i < lower_text.size() && std::isspace(static_cast<unsigned char>(lower_text[i]))) ++i;
        auto is_digit = [&](std::size_t k) {
            return k < lower_text.size() && std::isdigit(static_cast<unsigned char>(lower_text[k]));
        };
        if (is_digit(i) && is_digit(i + 1) && is_digit(i + 2) && is_digit(i + 3)) {
            if (auto full = parse_date(std::string_view(lower_text).substr(i, 10))) {
                *year_only = false;
                return full;
            }
            if (i + 4 >= lower_text.size() || !std::isdigit(static_cast<unsigned char>(lower_text[i + 4]))) {
                int year = std::stoi(lower_text.substr(i, 4));
                *year_only = true;
                return std::chrono::year(year) / 1 / 1;
            }
        }
        pos = end;
    }
    return std::nullopt;
}

std::optional<TemporalContext> resolve_category(TemporalCategory cat, const std::string& lower_text,
                                                const std::string& phrase, Date now) {
    TemporalContext ctx;
    ctx.category = cat;
    ctx.reference_date = now;
    switch (cat) {
        case TemporalCategory::Recent:
            ctx.start_date = add_months(now, -3);  // "recently" maps to the past 3 months
            ctx.end_date = now;
            return ctx;
        case TemporalCategory::ThisYear:
            ctx.start_date = now.year() / 1 / 1;
            ctx.end_date = now;
            return ctx;
        case TemporalCategory::Current:
            return ctx;
        case TemporalCategory::Future:
            ctx.start_date = now;
            return ctx;
        case TemporalCategory::Past:
            ctx.end_date = now;
            return ctx;
        case TemporalCategory::After: {
            bool year_only = false;
            auto d = date_after_keyword(lower_text, phrase, &year_only);
            if (!d) return std::nullopt;  // keyword without a date resolves nothing
            ctx.start_date = d;
            return ctx;
        }
        case TemporalCategory::Before: {
            bool year_only = false;
            auto d = date_after_keyword(lower_text, phrase, &year_only);
            if (!d) return std::nullopt;
            ctx.end_date = add_days(*d, -1);  // exclusive bound
            return ctx;
        }
        case TemporalCategory::None:
            return std::nullopt;
    }
    return std::nullopt;
}

TemporalContext temporal_from_reply(const nlohmann::json& temporal, Date now) {
    TemporalContext ctx;
    if (!temporal.is_object() || !temporal.contains("category")) return ctx;
    auto cat = category_from_name(temporal.at("category").get<std::string>());
    if (!cat || *cat == TemporalCategory::None) return ctx;
    ctx.category = *cat;
    ctx.reference_date = now;
    if (temporal.contains("start")) ctx.start_date = parse_date(temporal.at("start").get<std::string>());
    if (temporal.contains("end")) ctx.end_date = parse_date(temporal.at("end").get<std::string>());
    if (!ctx.start_date && !ctx.end_date) {
        // Category without bounds: fall back to the rule resolution.
        if (auto resolved = resolve_category(*cat, "", "", now)) return *resolved;
        ctx.category = TemporalCategory::None;
        ctx.reference_date.reset();
    }
    if (ctx.start_date && ctx.end_date && days_between(*ctx.start_date, *ctx.end_date) < 0) {
        std::swap(ctx.start_date, ctx.end_date);
    }
    return ctx;
}

// Distinct comma/semicolon/" and "-separated segments of the query.
int aspect_count(const std::string& text) {
    std::string work = text;
    // Treat " and " as a separator on par with commas.
    std::size_t pos = 0;
    std::string lower = to_lower(work);
    while ((pos = lower.find(" and ", pos)) != std::string::npos) {
        work.replace(pos, 5, " ; ");
        lower.replace(pos, 5, " ; ");
        pos += 3;
    }
    std::set<std::string> distinct;
    std::string cur;
    auto flush = [&] {
        auto norm = normalize_content(cur);
        if (!norm.empty()) distinct.insert(norm);
        cur.clear();
    };
    for (char c : work) {
        if (c == ',' || c == ';') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return static_cast<int>(distinct.size());
}

const std::vector<std::string>& depth_cues() {
    static const std::vector<std::string> cues = {"comprehensive", "in-depth",   "in depth", "detailed",
                                                  "thorough",      "exhaustive", "deep dive", "deep analysis"};
    return cues;
}

std::vector<std::string> heuristic_entities(const std::string& text) {
    // Consecutive capitalized words merge into one mention; the leading word
    // of the text is skipped (sentence-case noise).
    std::vector<std::string> mentions;
    std::string cur;
    bool first_token = true;
    std::string token;
    bool token_cap = false;
    auto end_mention = [&] {
        if (!cur.empty()) {
            if (std::find(mentions.begin(), mentions.end(), cur) == mentions.end()) mentions.push_back(cur);
            cur.clear();
        }
    };
    auto end_token = [&] {
        if (token.empty()) return;
        bool keep = token_cap && !first_token && token.size() >= 2 && !is_stopword(to_lower(token));
        if (keep) {
            if (!cur.empty()) cur += ' ';
            cur += token;
        } else {
            end_mention();
        }
        first_token = false;
        token.clear();
        token_cap = false;
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (token.empty()) token_cap = std::isupper(static_cast<unsigned char>(c));
            token.push_back(c);
        } else {
            end_token();
            if (c != ' ') end_mention();
        }
    }
    end_token();
    end_mention();
    return mentions;
}

}  // namespace

std::string_view intent_name(Intent i) {
    for (auto& [intent, s] : kIntentNames) {
        if (intent == i) return s;
    }
    return "comprehensive";
}

std::string_view temporal_category_name(TemporalCategory c) {
    for (auto& [cat, s] : kCategoryNames) {
        if (cat == c) return s;
    }
    return "none";
}

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::MultiStepResearch: return "multi_step_research";
        case Strategy::TemporalAnalysis: return "temporal_analysis";
        case Strategy::Standard: return "standard";
    }
    return "standard";
}

TemporalLexicon TemporalLexicon::builtin() {
    TemporalLexicon lex;
    lex.phrases_ = {
        {TemporalCategory::After, {"after", "since"}},
        {TemporalCategory::Before, {"before", "until", "prior to"}},
        {TemporalCategory::ThisYear, {"this year"}},
        {TemporalCategory::Recent,
         {"recent", "recently", "lately", "last few months", "past few months", "past three months"}},
        {TemporalCategory::Current, {"current", "currently", "now", "present", "today", "latest"}},
        {TemporalCategory::Future,
         {"future", "upcoming", "next year", "forecast", "outlook", "prospects"}},
        {TemporalCategory::Past, {"history", "historical", "past", "previously", "formerly"}},
    };
    return lex;
}

TemporalLexicon TemporalLexicon::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open temporal lexicon: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in);
    TemporalLexicon lex = builtin();
    for (auto& [key, value] : doc.items()) {
        auto cat = category_from_name(key);
        if (!cat || *cat == TemporalCategory::None) continue;
        lex.phrases_[*cat] = value.get<std::vector<std::string>>();
    }
    return lex;
}

const std::vector<std::string>& TemporalLexicon::phrases(TemporalCategory c) const {
    static const std::vector<std::string> empty;
    auto it = phrases_.find(c);
    return it == phrases_.end() ? empty : it->second;
}

IntentResult classify_intent(const std::string& text, ProviderGateway& llm) {
    if (text.empty()) throw Error("query text must be non-empty");
    auto resp = llm.complete(make_prompt(TemplateId::IntentClassify, {{"query", text}}));
    IntentResult result;  // defaults are the declared fallback
    auto doc = parse_json_reply(resp.text);
    if (!doc) return result;
    if (doc->contains("intent") && doc->at("intent").is_string()) {
        if (auto intent = intent_from_name(doc->at("intent").get<std::string>())) {
            result.intent = *intent;
            result.confidence = std::clamp(doc->value("confidence", 0.5), 0.0, 1.0);
        }
    }
    if (doc->contains("entities") && doc->at("entities").is_array()) {
        for (const auto& e : doc->at("entities")) {
            if (e.is_string() && !e.get<std::string>().empty()) result.entities.push_back(e.get<std::string>());
        }
    }
    if (doc->contains("domain") && doc->at("domain").is_string() && !doc->at("domain").get<std::string>().empty()) {
        result.domain = to_lower(doc->at("domain").get<std::string>());
    }
    return result;
}

TemporalContext extract_temporal(const std::string& text, Date now, const TemporalLexicon& lexicon,
                                 ProviderGateway* llm, std::optional<Intent> intent) {
    std::string lower = to_lower(text);
    // Fixed category precedence; within a category, declaration order.
    static const TemporalCategory kOrder[] = {
        TemporalCategory::After,   TemporalCategory::Before, TemporalCategory::ThisYear,
        TemporalCategory::Recent,  TemporalCategory::Current, TemporalCategory::Future,
        TemporalCategory::Past,
    };
    for (auto cat : kOrder) {
        for (const auto& phrase : lexicon.phrases(cat)) {
            if (!contains_phrase(lower, phrase)) continue;
            if (auto ctx = resolve_category(cat, lower, phrase, now)) return *ctx;
        }
    }
    if (llm && intent && (*intent == Intent::Trend || *intent == Intent::Prediction)) {
        auto resp = llm->complete(
            make_prompt(TemplateId::IntentClassify, {{"query", text}, {"mode", "temporal"}}));
        if (auto doc = parse_json_reply(resp.text)) {
            if (doc->contains("temporal")) return temporal_from_reply(doc->at("temporal"), now);
        }
    }
    return {};
}

double combine_complexity(double breadth, double depth, double temporal_span) {
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    return (clamp01(breadth) + clamp01(depth) + clamp01(temporal_span)) / 3.0;
}

std::pair<int, int> parameters_for_sigma(double sigma) {
    if (sigma < 0.34) return {1, 4};
    if (sigma <= 0.67) return {2, 8};
    return {3, 12};
}

Strategy strategy_for(Intent intent) {
    if (intent == Intent::Trend) return Strategy::TemporalAnalysis;
    if (intent == Intent::Comprehensive) return Strategy::MultiStepResearch;
    return Strategy::Standard;
}

ComplexityResult assess_complexity(const std::string& text, Intent intent, const TemporalContext& temporal) {
    ComplexityResult r;
    r.breadth = std::min(1.0, aspect_count(text) / 5.0);

    std::string lower = to_lower(text);
    int cues = 0;
    for (const auto& cue : depth_cues()) {
        if (contains_phrase(lower, cue)) ++cues;
    }
    r.depth = cues == 0 ? 0.0 : (cues == 1 ? 0.5 : 1.0);

    if (temporal.category == TemporalCategory::None) {
        r.temporal_span = 0.0;
    } else if (temporal.start_date && temporal.end_date) {
        r.temporal_span = 1.0;
    } else {
        r.temporal_span = 0.5;  // single-sided or category-only
    }

    r.sigma = combine_complexity(r.breadth, r.depth, r.temporal_span);
    std::tie(r.d_max, r.n_tasks) = parameters_for_sigma(r.sigma);
    r.strategy = strategy_for(intent);
    return r;
}

QueryUnderstanding understand_query(const std::string& text, Date now, ProviderGateway& llm,
                                    const TemporalLexicon& lexicon) {
    QueryUnderstanding u;
    u.query.text = text;

    auto intent = classify_intent(text, llm);
    u.query.type = intent.intent;
    u.query.domain = intent.domain;
    u.intent_confidence = intent.confidence;

    u.temporal = extract_temporal(text, now, lexicon, &llm, intent.intent);

    u.entities = intent.entities;
    for (const auto& mention : heuristic_entities(text)) {
        if (std::find(u.entities.begin(), u.entities.end(), mention) == u.entities.end()) {
            u.entities.push_back(mention);
        }
    }

    auto complexity = assess_complexity(text, intent.intent, u.temporal);
    u.complexity_sigma = complexity.sigma;
    u.recommended_d_max = complexity.d_max;
    u.recommended_n_tasks = complexity.n_tasks;
    u.strategy = complexity.strategy;
    return u;
}

}  // namespace hdr
