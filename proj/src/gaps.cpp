#include "hdr/gaps.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "hdr/jsonish.hpp"

namespace hdr {

namespace {

int importance_rank(GapImportance i) {
    switch (i) {
        case GapImportance::High: return 0;
        case GapImportance::Medium: return 1;
        case GapImportance::Low: return 2;
    }
    return 2;
}

std::optional<GapKind> kind_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "logical") return GapKind::Logical;
    if (n == "informational") return GapKind::Informational;
    return std::nullopt;
}

std::optional<GapImportance> importance_from_name(std::string_view name) {
    std::string n = to_lower(name);
    if (n == "high") return GapImportance::High;
    if (n == "medium") return GapImportance::Medium;
    if (n == "low") return GapImportance::Low;
    return std::nullopt;
}

std::string hypotheses_block(const std::vector<Hypothesis>& hypotheses) {
    std::string out;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        out += std::to_string(i + 1) + ". [" + std::string(hypothesis_status_name(hypotheses[i].status)) +
               "] " + hypotheses[i].statement + "\n";
    }
    return out.empty() ? "(none)\n" : out;
}

std::string facts_block(const std::vector<Fact>& facts) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < facts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f", facts[i].confidence);
        out += std::to_string(i + 1) + ". " + facts[i].content + " (confidence " + buf + ")\n";
    }
    return out.empty() ? "(none)\n" : out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string_view gap_kind_name(GapKind k) {
    return k == GapKind::Logical ? "logical" : "informational";
}

std::string_view gap_importance_name(GapImportance i) {
    switch (i) {
        case GapImportance::High: return "high";
        case GapImportance::Medium: return "medium";
        case GapImportance::Low: return "low";
    }
    return "low";
}

std::vector<ResearchGap> identify_gaps(const ResearchQuery& query, const ResearchPlan&,
                                       const AnalysisState& state, const SourceCatalog& catalog,
                                       ProviderGateway& llm) {
    auto resp = llm.complete(make_prompt(TemplateId::GapIdentify,
                                         {{"query", query.text},
                                          {"hypotheses", hypotheses_block(state.hypotheses)},
                                          {"facts_summary", facts_block(state.facts)},
                                          {"source_categories", join(catalog.categories(), ", ")}}));
    std::vector<ResearchGap> out;
    auto doc = parse_json_reply(resp.text);
    if (!doc || !doc->is_object() || !doc->contains("gaps") || !doc->at("gaps").is_array()) {
        log_warn("unparseable gap reply");
        return out;
    }
    for (const auto& item : doc->at("gaps")) {
        if (!item.is_object()) continue;
        ResearchGap g;
        g.name = item.value("name", "");
        if (normalize_content(g.name).empty()) continue;
        auto kind = kind_from_name(item.value("kind", ""));
        auto importance = importance_from_name(item.value("importance", ""));
        if (!kind || !importance) continue;
        g.kind = *kind;
        g.importance = *importance;
        g.reason = item.value("reason", "");
        g.inferable = item.value("inferable", false);
        if (item.contains("queries") && item.at("queries").is_array()) {
            for (const auto& q : item.at("queries")) {
                if (q.is_string() && !q.get<std::string>().empty()) g.queries.push_back(q.get<std::string>());
            }
        }
        if (g.queries.empty()) continue;
        out.push_back(std::move(g));
    }
    std::stable_sort(out.begin(), out.end(), [](const ResearchGap& a, const ResearchGap& b) {
        return importance_rank(a.importance) < importance_rank(b.importance);
    });
    return out;
}

MergeOutcome merge_analysis(AnalysisState& state, std::vector<Fact> new_facts) {
    MergeOutcome outcome;
    if (new_facts.empty()) return outcome;  // identity merge skips recomputation

    std::map<std::string, std::size_t> by_hash;
    for (std::size_t i = 0; i < state.facts.size(); ++i) {
        by_hash[md5_hex(normalize_content(state.facts[i].content))] = i;
    }
    for (auto& nf : new_facts) {
        std::string hash = md5_hex(normalize_content(nf.content));
        auto it = by_hash.find(hash);
        if (it == by_hash.end()) {
            by_hash[hash] = state.facts.size();
            outcome.changed_fact_ids.push_back(nf.id);
            state.facts.push_back(std::move(nf));
        } else if (nf.confidence > state.facts[it->second].confidence) {
            state.facts[it->second].confidence = nf.confidence;
            outcome.changed_fact_ids.push_back(state.facts[it->second].id);
        }
    }
    if (!outcome.changed_fact_ids.empty() && !state.derived.empty()) {
        recompute_derived_confidences(state.derived, state.facts);
    }
    return outcome;
}

GapLoopResult run_gap_iterations(const GapEngineContext& ctx, AnalysisState state,
                                 const IterationBudget& budget, ProviderGateway& gateway) {
    GapLoopResult result;
    IdGen local_ids;
    IdGen* ids = ctx.ids ? ctx.ids : &local_ids;

    for (int iteration = 1; iteration <= budget.max_iterations; ++iteration) {
        GapIterationRecord record;
        record.iteration = iteration;

        std::vector<ResearchGap> gaps;
        try {
            gaps = identify_gaps(ctx.query, ctx.plan, state, ctx.catalog, gateway);
        } catch (const Error& e) {
            log_warn("gap identification failed: " + std::string(e.what()));
            result.degraded = true;
            break;
        }
        record.gaps_found = static_cast<int>(gaps.size());
        result.remaining_gaps = gaps;

        std::vector<ResearchGap> actionable;
        for (const auto& g : gaps) {
            if (g.importance != GapImportance::Low) actionable.push_back(g);
        }
        record.gaps_actionable = static_cast<int>(actionable.size());
        if (actionable.empty()) {
            result.log.push_back(std::move(record));
            break;  // no significant gaps remain
        }

        // Union of gap queries: importance order, then declaration order,
        // deduplicated, truncated to the fixed per-iteration budget.
        std::vector<std::string> queries;
        for (const auto& g : actionable) {
            for (const auto& q : g.queries) {
                if (std::find(queries.begin(), queries.end(), q) == queries.end()) queries.push_back(q);
            }
        }
        if (queries.size() > IterationBudget::kMaxQueriesPerIteration) {
            queries.resize(IterationBudget::kMaxQueriesPerIteration);
        }

        bool aborted = false;
        std::vector<Fact> gathered;
        for (const auto& q : queries) {
            std::vector<RawSearchResult> raw;
            try {
                raw = gateway.search({q, std::nullopt, std::nullopt, 10});
            } catch (const Error& e) {
                log_warn("supplementary search failed for \"" + q + "\": " + std::string(e.what()));
                result.degraded = true;
                aborted = true;
                break;
            }
            record.queries_fired.push_back(q);

            std::vector<ScoredResult> scored;
            for (auto& r : raw) {
                double rho = subject_relevance(r, ctx.profile);
                if (rho < ctx.profile.theta_s) continue;  // subject filter stays active
                QualityScore quality = score_result(r, q, ctx.profile, ctx.catalog, ctx.now);
                scored.push_back(ScoredResult{std::move(r), quality, rho, "", 0});
            }
            try {
                auto extracted = extract_facts(scored, ctx.profile, ctx.plan, gateway, *ids);
                gathered.insert(gathered.end(), extracted.begin(), extracted.end());
            } catch (const Error& e) {
                log_warn("supplementary extraction failed: " + std::string(e.what()));
                result.degraded = true;
                aborted = true;
                break;
            }
            for (auto& sr : scored) state.corpus.push_back(std::move(sr));
        }

        auto merged = merge_analysis(state, std::move(gathered));
        record.facts_added = static_cast<int>(merged.changed_fact_ids.size());

        // Re-validate only facts whose corpus changed: new or updated ones.
        if (!merged.changed_fact_ids.empty()) {
            std::set<std::string> changed(merged.changed_fact_ids.begin(), merged.changed_fact_ids.end());
            try {
                for (const auto& f : state.facts) {
                    if (!changed.count(f.id)) continue;
                    state.validations[f.id] = cross_validate(f, state.corpus, gateway);
                }
            } catch (const Error& e) {
                log_warn("re-validation failed: " + std::string(e.what()));
                result.degraded = true;
                aborted = true;
            }
            for (auto& h : state.hypotheses) {
                std::vector<HypothesisEvidence> evidence;
                for (const auto& f : state.facts) {
                    if (f.hypothesis_id != h.id) continue;
                    auto it = state.validations.find(f.id);
                    if (it == state.validations.end()) continue;
                    evidence.push_back(HypothesisEvidence{f.stance == Stance::Supports,
                                                          f.stance == Stance::Refutes,
                                                          it->second.verdict == Verdict::Accept, f.confidence});
                }
                h = update_hypothesis_status(h, evidence);
            }
        }

        result.log.push_back(std::move(record));
        if (aborted) break;
    }

    result.state = std::move(state);
    return result;
}

}  // namespace hdr
