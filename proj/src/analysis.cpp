#include "hdr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "hdr/jsonish.hpp"

namespace hdr {

namespace {

std::optional<Stance> stance_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "supports" || n == "support") return Stance::Supports;
    if (n == "refutes" || n == "refute") return Stance::Refutes;
    if (n == "neutral") return Stance::Neutral;
    return std::nullopt;
}

std::optional<double> strength_for_certainty(std::string_view certainty) {
    std::string c = to_lower(certainty);
    if (c == "certain") return 0.95;
    if (c == "probable") return 0.8;
    if (c == "possible") return 0.6;
    return std::nullopt;
}

std::string numbered_facts(const std::vector<Fact>& facts) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < facts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f", facts[i].confidence);
        out += std::to_string(i + 1) + ". " + facts[i].content + " (confidence " + buf + ")\n";
    }
    return out;
}

}  // namespace

std::string_view stance_name(Stance s) {
    switch (s) {
        case Stance::Supports: return "supports";
        case Stance::Refutes: return "refutes";
        case Stance::Neutral: return "neutral";
    }
    return "neutral";
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Accept: return "accept";
        case Verdict::Verify: return "verify";
        case Verdict::Reject: return "reject";
    }
    return "reject";
}

std::string_view contradiction_kind_name(ContradictionKind k) {
    switch (k) {
        case ContradictionKind::Direct: return "direct";
        case ContradictionKind::Indirect: return "indirect";
        case ContradictionKind::Temporal: return "temporal";
    }
    return "direct";
}

std::string_view resolution_strategy_name(ResolutionStrategy s) {
    switch (s) {
        case ResolutionStrategy::TemporalPriority: return "temporal_priority";
        case ResolutionStrategy::AuthorityPriority: return "authority_priority";
        case ResolutionStrategy::CorroborationPriority: return "corroboration_priority";
        case ResolutionStrategy::AnnotatedUnresolved: return "annotated_unresolved";
    }
    return "annotated_unresolved";
}

Verdict verdict_for(double conf) {
    if (conf >= kAcceptThreshold) return Verdict::Accept;
    if (conf >= kRejectThreshold) return Verdict::Verify;
    return Verdict::Reject;
}

ValidationOutcome validation_from_counts(std::string fact_id, int confirming, int addressing, double sigma) {
    ValidationOutcome v;
    v.fact_id = std::move(fact_id);
    v.confirming_sources = confirming;
    v.addressing_sources = addressing;
    v.conf = addressing > 0 ? static_cast<double>(confirming) / static_cast<double>(addressing) : sigma;
    v.verdict = verdict_for(v.conf);
    return v;
}

std::vector<Fact> extract_facts(const std::vector<ScoredResult>& results, const SubjectProfile& profile,
                                const ResearchPlan& plan, ProviderGateway& llm, IdGen& ids) {
    std::map<std::string, std::string> task_hypothesis;
    for (const auto& t : plan.tasks) task_hypothesis[t.id] = t.hypothesis_id;

    std::vector<Fact> out;
    for (const auto& sr : results) {
        std::string payload =
            "Title: " + sr.raw.title + "\nURL: " + sr.raw.url + "\nSnippet: " + sr.raw.snippet;
        auto resp = llm.complete(make_prompt(TemplateId::FactExtraction,
                                             {{"subject", profile.canonical_name},
                                              {"mode", "extract"},
                                              {"payload", payload},
                                              {"title", sr.raw.title},
                                              {"url", sr.raw.url},
                                              {"snippet", sr.raw.snippet}}));
        auto doc = parse_json_reply(resp.text);
        if (!doc || !doc->is_object() || !doc->contains("facts") || !doc->at("facts").is_array()) {
            log_warn("unparseable extraction reply for result: " + sr.raw.url);
            continue;
        }
        for (const auto& item : doc->at("facts")) {
            if (!item.is_object() || !item.contains("content") || !item.at("content").is_string()) continue;
            Fact f;
            f.content = item.at("content").get<std::string>();
            if (normalize_content(f.content).empty()) continue;
            if (subject_relevance_text(f.content, profile) < profile.theta_s) continue;
            f.source_url = sr.raw.url;
            f.source_title = sr.raw.title;
            f.timestamp = sr.raw.published_at;
            f.confidence = sr.quality.composite;
            auto mapped = task_hypothesis.find(sr.originating_task);
            f.hypothesis_id = mapped == task_hypothesis.end() ? "" : mapped->second;
            if (item.contains("hypothesis") && item.at("hypothesis").is_string()) {
                f.hypothesis_id = item.at("hypothesis").get<std::string>();
            }
            if (item.contains("stance") && item.at("stance").is_string()) {
                if (auto st = stance_from_name(item.at("stance").get<std::string>())) f.stance = *st;
            }
            f.id = ids.next_fact();
            out.push_back(std::move(f));
        }
    }
    return out;
}

std::vector<DerivedFact> derive_facts(const std::vector<Fact>& explicit_facts, ProviderGateway& llm, IdGen& ids,
                                      const std::string& subject) {
    if (explicit_facts.empty()) throw Error("derive_facts requires explicit facts");
    auto resp = llm.complete(make_prompt(
        TemplateId::Reasoning, {{"subject", subject}, {"facts", numbered_facts(explicit_facts)}}));
    std::vector<DerivedFact> out;
    auto doc = parse_json_reply(resp.text);
    if (!doc || !doc->is_object() || !doc->contains("derived") || !doc->at("derived").is_array()) {
        log_warn("unparseable reasoning reply");
        return out;
    }
    for (const auto& item : doc->at("derived")) {
        if (!item.is_object()) continue;
        DerivedFact d;
        if (!item.contains("content") || !item.at("content").is_string()) continue;
        d.content = item.at("content").get<std::string>();
        if (normalize_content(d.content).empty()) continue;
        d.reasoning_logic = item.value("reasoning", "");
        auto strength = strength_for_certainty(item.value("certainty", ""));
        if (!strength) continue;
        d.strength = *strength;

        if (!item.contains("basis") || !item.at("basis").is_array() || item.at("basis").empty()) continue;
        bool dangling = false;
        double min_basis = 1.0;
        for (const auto& b : item.at("basis")) {
            if (!b.is_number_integer()) {
                dangling = true;
                break;
            }
            long idx = b.get<long>();
            if (idx < 1 || idx > static_cast<long>(explicit_facts.size())) {
                dangling = true;
                break;
            }
            const Fact& basis = explicit_facts[static_cast<std::size_t>(idx - 1)];
            d.basis_ids.push_back(basis.id);
            min_basis = std::min(min_basis, basis.confidence);
        }
        if (dangling) continue;
        d.confidence = d.strength * min_basis;
        d.id = ids.next_derived();
        out.push_back(std::move(d));
    }
    return out;
}

ValidationOutcome cross_validate(const Fact& fact, const std::vector<ScoredResult>& corpus,
                                 ProviderGateway& llm) {
    ValidationOutcome v;
    v.fact_id = fact.id;
    if (!corpus.empty()) {
        std::string sources;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            sources += std::to_string(i + 1) + ". [" + corpus[i].raw.title + "] " + corpus[i].raw.snippet +
                       " (" + corpus[i].raw.url + ")\n";
        }
        auto resp = llm.complete(make_prompt(TemplateId::RumorVerification,
                                             {{"fact_content", fact.content}, {"sources", sources}}));
        if (auto doc = parse_json_reply(resp.text);
            doc && doc->is_object() && doc->contains("classifications") && doc->at("classifications").is_array()) {
            std::size_t n = std::min(corpus.size(), doc->at("classifications").size());
            for (std::size_t i = 0; i < n; ++i) {
                const auto& c = doc->at("classifications")[i];
                if (!c.is_string()) continue;
                std::string kind = to_lower(c.get<std::string>());
                if (kind == "confirms" || kind == "confirm") {
                    ++v.confirming_sources;
                    ++v.addressing_sources;
                } else if (kind == "contradicts" || kind == "contradict") {
                    ++v.addressing_sources;
                }
            }
        }
    }
    // Vacuous corpus keeps the source-quality prior.
    return validation_from_counts(fact.id, v.confirming_sources, v.addressing_sources, fact.confidence);
}

std::vector<Contradiction> detect_contradictions(std::vector<Fact>& facts, const SourceCatalog& catalog,
                                                 const std::map<std::string, ValidationOutcome>& validations,
                                                 ProviderGateway& llm, int* compared_pairs,
                                                 const std::string& subject) {
    std::vector<std::set<std::string>> tokens;
    tokens.reserve(facts.size());
    for (const auto& f : facts) {
        auto toks = entity_tokens(f.content);
        tokens.emplace_back(toks.begin(), toks.end());
    }

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        for (std::size_t j = i + 1; j < facts.size(); ++j) {
            bool shared = std::any_of(tokens[i].begin(), tokens[i].end(),
                                      [&](const std::string& t) { return tokens[j].count(t) > 0; });
            if (shared) candidates.emplace_back(i, j);
        }
    }
    if (compared_pairs) *compared_pairs = static_cast<int>(candidates.size());
    if (candidates.empty()) return {};

    std::string pair_list;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& [i, j] = candidates[k];
        pair_list += std::to_string(k + 1) + ". [" + facts[i].id + "] " + facts[i].content + " ||| [" +
                     facts[j].id + "] " + facts[j].content + "\n";
    }
    auto resp = llm.complete(
        make_prompt(TemplateId::ImpactInference, {{"subject", subject}, {"pairs", pair_list}}));
    auto doc = parse_json_reply(resp.text);
    if (!doc || !doc->is_object() || !doc->contains("pairs") || !doc->at("pairs").is_array()) {
        log_warn("unparseable contradiction reply");
        return {};
    }

    std::vector<Contradiction> out;
    for (const auto& item : doc->at("pairs")) {
        if (!item.is_object() || !item.contains("index") || !item.at("index").is_number_integer()) continue;
        long idx = item.at("index").get<long>();
        if (idx < 1 || idx > static_cast<long>(candidates.size())) continue;
        std::string kind = to_lower(item.value("kind", "none"));
        ContradictionKind ck;
        if (kind == "direct") ck = ContradictionKind::Direct;
        else if (kind == "indirect") ck = ContradictionKind::Indirect;
        else if (kind == "temporal") ck = ContradictionKind::Temporal;
        else continue;

        auto [i, j] = candidates[static_cast<std::size_t>(idx - 1)];
        Fact& a = facts[i];
        Fact& b = facts[j];
        Contradiction c;
        c.kind = ck;
        c.fact_ids = {a.id, b.id};

        long gap = (a.timestamp && b.timestamp) ? std::labs(days_between(*a.timestamp, *b.timestamp)) : 0;
        double auth_a = catalog.authority_for(a.source_url);
        double auth_b = catalog.authority_for(b.source_url);
        auto confirming = [&](const Fact& f) {
            auto it = validations.find(f.id);
            return it == validations.end() ? 0 : it->second.confirming_sources;
        };

        if (a.timestamp && b.timestamp && gap > 90) {
            const Fact& newer = days_between(*a.timestamp, *b.timestamp) > 0 ? b : a;
            const Fact& older = &newer == &a ? b : a;
            c.strategy_used = ResolutionStrategy::TemporalPriority;
            c.resolution_fact_id = newer.id;
            c.annotation = "superseded: " + older.id + " reflects " + format_date(*older.timestamp) +
                           "; kept " + newer.id + " from " + format_date(*newer.timestamp);
        } else if (auth_a != auth_b) {
            c.strategy_used = ResolutionStrategy::AuthorityPriority;
            c.resolution_fact_id = auth_a > auth_b ? a.id : b.id;
        } else if (confirming(a) != confirming(b)) {
            c.strategy_used = ResolutionStrategy::CorroborationPriority;
            c.resolution_fact_id = confirming(a) > confirming(b) ? a.id : b.id;
        } else {
            c.strategy_used = ResolutionStrategy::AnnotatedUnresolved;
            c.annotation = "single-perspective contested claims; both retained at reduced confidence";
            a.confidence *= 0.75;
            b.confidence *= 0.75;
        }
        out.push_back(std::move(c));
    }
    return out;
}

KnowledgeGraphFragment build_knowledge_graph(const std::vector<Fact>& facts, ProviderGateway& llm,
                                             const std::string& subject) {
    KnowledgeGraphFragment graph;
    if (facts.empty()) return graph;
    auto resp = llm.complete(make_prompt(
        TemplateId::FactExtraction, {{"subject", subject}, {"mode", "graph"}, {"payload", numbered_facts(facts)}}));
    auto doc = parse_json_reply(resp.text);
    if (!doc || !doc->is_object()) {
        log_warn("unparseable graph reply");
        return graph;
    }
    std::set<std::string> names;
    for (const auto& e : doc->value("entities", nlohmann::json::array())) {
        if (!e.is_object() || !e.contains("name") || !e.at("name").is_string()) continue;
        std::string name = e.at("name").get<std::string>();
        if (name.empty() || !names.insert(name).second) continue;
        graph.entities.push_back({name, e.value("type", "entity")});
    }
    for (const auto& r : doc->value("relationships", nlohmann::json::array())) {
        if (!r.is_object()) continue;
        KnowledgeGraphFragment::Relationship rel;
        rel.from = r.value("from", "");
        rel.to = r.value("to", "");
        rel.relation = r.value("relation", "related");
        if (!names.count(rel.from) || !names.count(rel.to)) continue;
        if (!r.contains("fact") || !r.at("fact").is_number_integer()) continue;
        long idx = r.at("fact").get<long>();
        if (idx < 1 || idx > static_cast<long>(facts.size())) continue;  // dangling citation
        rel.fact_id = facts[static_cast<std::size_t>(idx - 1)].id;
        graph.relationships.push_back(std::move(rel));
    }
    return graph;
}

double propagated_confidence(double strength, const std::vector<double>& basis_confidences) {
    if (basis_confidences.empty()) throw Error("propagation requires at least one basis");
    double m = basis_confidences.front();
    for (double c : basis_confidences) m = std::min(m, c);
    return strength * m;
}

namespace {

// Topological order of derived facts over basis edges; throws on cycles or
// bases that resolve to neither a fact nor a derived fact.
std::vector<std::size_t> topo_order(const std::vector<DerivedFact>& derived,
                                    const std::map<std::string, double>& fact_conf) {
    std::map<std::string, std::size_t> derived_index;
    for (std::size_t i = 0; i < derived.size(); ++i) derived_index[derived[i].id] = i;

    std::vector<int> indegree(derived.size(), 0);
    std::vector<std::vector<std::size_t>> dependents(derived.size());
    for (std::size_t i = 0; i < derived.size(); ++i) {
        for (const auto& b : derived[i].basis_ids) {
            if (fact_conf.count(b)) continue;
            auto it = derived_index.find(b);
            if (it == derived_index.end()) throw Error("derived fact " + derived[i].id + " cites unknown basis " + b);
            dependents[it->second].push_back(i);
            ++indegree[i];
        }
    }
    std::vector<std::size_t> ready, order;
    for (std::size_t i = 0; i < derived.size(); ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    while (!ready.empty()) {
        std::size_t n = ready.back();
        ready.pop_back();
        order.push_back(n);
        for (std::size_t dep : dependents[n]) {
            if (--indegree[dep] == 0) ready.push_back(dep);
        }
    }
    if (order.size() != derived.size()) throw Error("derivation links contain a cycle");
    return order;
}

}  // namespace

void recompute_derived_confidences(std::vector<DerivedFact>& derived, const std::vector<Fact>& facts) {
    std::map<std::string, double> conf;
    for (const auto& f : facts) conf[f.id] = f.confidence;
    auto order = topo_order(derived, conf);
    for (std::size_t idx : order) {
        DerivedFact& d = derived[idx];
        std::vector<double> basis;
        basis.reserve(d.basis_ids.size());
        for (const auto& b : d.basis_ids) basis.push_back(conf.at(b));
        d.confidence = propagated_confidence(d.strength, basis);
        conf[d.id] = d.confidence;
    }
}

bool derivation_acyclic(const std::vector<DerivedFact>& derived) {
    // Treat every basis that is not a derived id as an external fact.
    std::map<std::string, double> conf;
    std::set<std::string> derived_ids;
    for (const auto& d : derived) derived_ids.insert(d.id);
    for (const auto& d : derived) {
        for (const auto& b : d.basis_ids) {
            if (!derived_ids.count(b)) conf[b] = 1.0;
        }
    }
    try {
        topo_order(derived, conf);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace hdr
