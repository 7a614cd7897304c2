#include "hdr/plan.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hdr/jsonish.hpp"

namespace hdr {

namespace {

std::optional<Hypothesis> validate_hypothesis(const nlohmann::json& item) {
    if (!item.is_object()) return std::nullopt;
    Hypothesis h;
    auto field = [&](const char* name, std::string& out) {
        if (!item.contains(name) || !item.at(name).is_string()) return false;
        out = item.at(name).get<std::string>();
        return !normalize_content(out).empty();
    };
    if (!field("statement", h.statement)) return std::nullopt;
    if (!field("rationale", h.rationale)) return std::nullopt;
    if (!field("verification_method", h.verification_method)) return std::nullopt;
    if (!field("expected_outcomes", h.expected_outcomes)) return std::nullopt;
    return h;
}

std::vector<Hypothesis> parse_hypotheses(const std::string& reply) {
    std::vector<Hypothesis> out;
    auto doc = parse_json_reply(reply);
    if (!doc) return out;
    const nlohmann::json* list = nullptr;
    if (doc->is_array()) {
        list = &*doc;
    } else if (doc->is_object() && doc->contains("hypotheses") && doc->at("hypotheses").is_array()) {
        list = &doc->at("hypotheses");
    }
    if (!list) return out;
    for (const auto& item : *list) {
        if (auto h = validate_hypothesis(item)) out.push_back(std::move(*h));
    }
    return out;
}

double score_or_default(const nlohmann::json& doc, const char* name) {
    if (doc.contains(name) && doc.at(name).is_number()) {
        double v = doc.at(name).get<double>();
        if (v >= 0.0 && v <= 1.0) return v;
    }
    return 0.5;  // parse fallback
}

}  // namespace

std::string_view hypothesis_status_name(HypothesisStatus s) {
    switch (s) {
        case HypothesisStatus::Unverified: return "unverified";
        case HypothesisStatus::Partial: return "partial";
        case HypothesisStatus::Confirmed: return "confirmed";
        case HypothesisStatus::Refuted: return "refuted";
    }
    return "unverified";
}

SourceCatalog SourceCatalog::defaults() {
    SourceCatalog c;
    c.entries_ = {
        {".gov", 1.0, "government"},        {".gov.cn", 1.0, "government"},
        {".mil", 1.0, "government"},        {".court.gov", 1.0, "judicial"},
        {".edu", 0.85, "academic"},         {".org", 0.85, "industry"},
        {"reuters.com", 0.85, "industry"},  {"bloomberg.com", 0.85, "industry"},
        {"ft.com", 0.85, "industry"},       {"nikkei.com", 0.85, "industry"},
        {"caixin.com", 0.85, "industry"},   {"sec.gov", 1.0, "government"},
    };
    return c;
}

SourceCatalog SourceCatalog::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open source catalog: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in);
    SourceCatalog c;
    for (const auto& j : doc) {
        Entry e;
        e.pattern = j.at("pattern").get<std::string>();
        e.authority = j.at("authority").get<double>();
        if (e.authority < 0.0 || e.authority > 1.0) throw Error("catalog authority out of [0,1]");
        e.category = j.value("category", "general");
        c.entries_.push_back(std::move(e));
    }
    return c;
}

const SourceCatalog::Entry* SourceCatalog::match(std::string_view url_or_domain) const {
    std::string host(url_or_domain);
    auto scheme = host.find("://");
    if (scheme != std::string::npos) host = host.substr(scheme + 3);
    auto slash = host.find_first_of("/?#");
    if (slash != std::string::npos) host.resize(slash);
    auto port = host.find(':');
    if (port != std::string::npos) host.resize(port);
    host = to_lower(host);

    const Entry* best = nullptr;
    for (const auto& e : entries_) {
        if (host.size() < e.pattern.size()) continue;
        if (host.compare(host.size() - e.pattern.size(), e.pattern.size(), e.pattern) != 0) continue;
        if (!best || e.pattern.size() > best->pattern.size()) best = &e;
    }
    return best;
}

double SourceCatalog::authority_for(std::string_view url_or_domain) const {
    const Entry* e = match(url_or_domain);
    return e ? e->authority : 0.5;
}

std::string SourceCatalog::category_for(std::string_view url_or_domain) const {
    const Entry* e = match(url_or_domain);
    return e ? e->category : "general";
}

std::vector<std::string> SourceCatalog::categories() const {
    std::set<std::string> uniq{"general"};
    for (const auto& e : entries_) uniq.insert(e.category);
    return {uniq.begin(), uniq.end()};
}

std::vector<Hypothesis> generate_hypotheses(const QueryUnderstanding& understanding,
                                            const std::string& references, ProviderGateway& llm) {
    std::map<std::string, std::string> vars = {
        {"query", understanding.query.text},
        {"context", understanding.query.context.empty() ? "(none)" : understanding.query.context},
        {"references", references.empty() ? "(none)" : references},
    };
    std::size_t valid = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto resp = llm.complete(make_prompt(TemplateId::HypothesisGen, vars));
        auto hypotheses = parse_hypotheses(resp.text);
        valid = hypotheses.size();
        if (valid >= 3) {
            if (hypotheses.size() > 5) hypotheses.resize(5);
            for (std::size_t i = 0; i < hypotheses.size(); ++i) {
                hypotheses[i].id = "h" + std::to_string(i + 1);
            }
            return hypotheses;
        }
    }
    throw HypothesisShortfall("only " + std::to_string(valid) + " valid hypotheses after regeneration");
}

ResearchPlan plan_research(const std::vector<Hypothesis>& hypotheses, const QueryUnderstanding& understanding,
                           const SourceCatalog& catalog, ProviderGateway& llm) {
    if (hypotheses.empty()) throw Error("plan_research requires at least one hypothesis");

    // Budget sizing: two tasks per hypothesis only when they all fit, and a
    // capacity floor of |H| so every hypothesis keeps a task.
    int n_tasks = understanding.recommended_n_tasks;
    std::size_t per_hypothesis = (2 * hypotheses.size() <= static_cast<std::size_t>(n_tasks)) ? 2 : 1;
    std::size_t capacity = std::max<std::size_t>(n_tasks, hypotheses.size());

    auto target_sources = catalog.categories();
    std::vector<ResearchTaskSpec> tasks;
    for (const auto& h : hypotheses) {
        auto resp = llm.complete(make_prompt(TemplateId::DecisionRecommendation,
                                             {{"query", understanding.query.text},
                                              {"statement", h.statement},
                                              {"verification_method", h.verification_method}}));
        std::vector<std::string> queries;
        double importance = 0.5, feasibility = 0.5;
        if (auto doc = parse_json_reply(resp.text); doc && doc->is_object()) {
            importance = score_or_default(*doc, "importance");
            feasibility = score_or_default(*doc, "feasibility");
            if (doc->contains("queries") && doc->at("queries").is_array()) {
                for (const auto& q : doc->at("queries")) {
                    if (q.is_string() && !q.get<std::string>().empty()) queries.push_back(q.get<std::string>());
                }
            }
        }
        if (queries.empty()) queries.push_back(h.verification_method);
        if (queries.size() > per_hypothesis) queries.resize(per_hypothesis);

        double priority = 0.6 * importance + 0.4 * feasibility;
        for (const auto& q : queries) {
            ResearchTaskSpec t;
            t.id = "t" + std::to_string(tasks.size() + 1);
            t.queries = {q};
            t.target_sources = target_sources;
            t.hypothesis_id = h.id;
            t.priority = priority;
            tasks.push_back(std::move(t));
        }
    }

    std::stable_sort(tasks.begin(), tasks.end(),
                     [](const ResearchTaskSpec& a, const ResearchTaskSpec& b) { return a.priority > b.priority; });
    if (tasks.size() > capacity) tasks.resize(capacity);
    return ResearchPlan{std::move(tasks)};
}

Hypothesis update_hypothesis_status(Hypothesis h, const std::vector<HypothesisEvidence>& evidence) {
    int accepted_support = 0, accepted_refute = 0;
    double conf_sum = 0.0;
    int conf_count = 0;
    for (const auto& e : evidence) {
        if (!e.accepted) continue;
        if (e.supports) ++accepted_support;
        if (e.refutes) ++accepted_refute;
        conf_sum += e.confidence;
        ++conf_count;
    }
    if (accepted_support >= 2 && accepted_refute == 0) {
        h.status = HypothesisStatus::Confirmed;
    } else if (accepted_refute >= 2 && accepted_support == 0) {
        h.status = HypothesisStatus::Refuted;
    } else if (accepted_support + accepted_refute >= 1) {
        h.status = HypothesisStatus::Partial;
    } else {
        h.status = HypothesisStatus::Unverified;
    }
    if (conf_count > 0) h.confidence = conf_sum / conf_count;
    return h;
}

}  // namespace hdr
