#include "hdr/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "hdr/jsonish.hpp"

namespace hdr {

namespace {

std::vector<std::string> significant_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) {
        if (t.size() >= 3 && !is_stopword(t)) out.push_back(std::move(t));
    }
    return out;
}

// A fact supports a requirement either through hypothesis linkage or, for
// aspect requirements, by covering at least half the description's
// significant tokens.
bool supports_requirement(const Requirement& req, const std::vector<std::string>& req_tokens, const Fact& f) {
    if (!req.hypothesis_id.empty()) {
        return f.hypothesis_id == req.hypothesis_id && f.stance != Stance::Refutes;
    }
    if (req_tokens.empty()) return false;
    auto fact_tokens = tokenize(f.content);
    std::size_t hit = 0;
    for (const auto& t : req_tokens) {
        if (std::find(fact_tokens.begin(), fact_tokens.end(), t) != fact_tokens.end()) ++hit;
    }
    return hit * 2 >= req_tokens.size();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string hypotheses_prompt_block(const std::vector<Hypothesis>& hypotheses) {
    std::string out;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        out += std::to_string(i + 1) + ". " + hypotheses[i].statement + "\n";
    }
    return out;
}

}  // namespace

std::string_view coverage_status_name(CoverageStatus s) {
    switch (s) {
        case CoverageStatus::Covered: return "covered";
        case CoverageStatus::Partial: return "partial";
        case CoverageStatus::Missing: return "missing";
    }
    return "missing";
}

std::vector<Requirement> derive_requirements(const QueryUnderstanding& understanding,
                                             const std::vector<Hypothesis>& hypotheses, ProviderGateway& llm) {
    if (hypotheses.empty()) throw Error("derive_requirements needs hypotheses");
    std::vector<Requirement> out;
    std::set<std::string> seen;
    auto push = [&](std::string description, std::string hypothesis_id) {
        std::string key = normalize_content(description);
        if (key.empty() || !seen.insert(key).second) return;
        Requirement r;
        r.id = "r" + std::to_string(out.size() + 1);
        r.description = std::move(description);
        r.hypothesis_id = std::move(hypothesis_id);
        out.push_back(std::move(r));
    };
    for (const auto& h : hypotheses) {
        push("Verify: " + h.statement, h.id);
    }
    auto resp = llm.complete(make_prompt(TemplateId::ReportCompose,
                                         {{"query", understanding.query.text},
                                          {"hypotheses", hypotheses_prompt_block(hypotheses)}}));
    if (auto doc = parse_json_reply(resp.text); doc && doc->is_object() && doc->contains("aspects") &&
                                                doc->at("aspects").is_array()) {
        for (const auto& a : doc->at("aspects")) {
            if (a.is_string()) push(a.get<std::string>(), "");
        }
    }
    return out;
}

double coverage_score(const std::vector<CoverageStatus>& statuses) {
    if (statuses.empty()) throw EmptyRequirements("coverage needs at least one requirement");
    double sum = 0.0;
    for (auto s : statuses) {
        if (s == CoverageStatus::Covered) sum += 1.0;
        if (s == CoverageStatus::Partial) sum += 0.5;
    }
    return sum / static_cast<double>(statuses.size());
}

double objective_composite(double c, double a, double t, double alpha, double beta, double gamma) {
    return alpha * c + beta * a + gamma * t;
}

CoverageMatrix compute_coverage(std::vector<Requirement> requirements, const AnalysisState& state) {
    if (requirements.empty()) throw EmptyRequirements("coverage needs at least one requirement");
    std::vector<CoverageStatus> statuses;
    for (auto& req : requirements) {
        auto req_tokens = significant_tokens(req.description);
        std::vector<std::string> accepted, verify;
        for (const auto& f : state.facts) {
            if (!supports_requirement(req, req_tokens, f)) continue;
            auto it = state.validations.find(f.id);
            if (it == state.validations.end()) continue;
            if (it->second.verdict == Verdict::Accept) accepted.push_back(f.id);
            if (it->second.verdict == Verdict::Verify) verify.push_back(f.id);
        }
        if (accepted.size() >= 2) {
            req.status = CoverageStatus::Covered;
        } else if (accepted.size() == 1 || !verify.empty()) {
            req.status = CoverageStatus::Partial;
        } else {
            req.status = CoverageStatus::Missing;
        }
        req.supporting_fact_ids = std::move(accepted);
        req.supporting_fact_ids.insert(req.supporting_fact_ids.end(), verify.begin(), verify.end());
        statuses.push_back(req.status);
    }
    CoverageMatrix m;
    m.cov_score = coverage_score(statuses);
    m.requirements = std::move(requirements);
    return m;
}

QualityTriple compute_quality_triple(const CoverageMatrix& matrix, const AnalysisState& state, double alpha,
                                     double beta, double gamma) {
    if (std::fabs(alpha + beta + gamma - 1.0) > 1e-9) {
        throw WeightSumInvalid("quality weights must sum to 1");
    }
    QualityTriple q;
    q.alpha = alpha;
    q.beta = beta;
    q.gamma = gamma;
    q.completeness = matrix.cov_score;

    std::size_t accepted = 0;
    for (const auto& f : state.facts) {
        auto it = state.validations.find(f.id);
        if (it != state.validations.end() && it->second.verdict == Verdict::Accept) ++accepted;
    }
    q.accuracy = state.facts.empty() ? 0.0 : static_cast<double>(accepted) / state.facts.size();

    std::set<std::string> known_ids;
    for (const auto& f : state.facts) known_ids.insert(f.id);
    std::size_t traceable = 0, claims = state.facts.size() + state.derived.size();
    for (const auto& f : state.facts) {
        if (!f.source_url.empty()) ++traceable;
    }
    for (const auto& d : state.derived) {
        bool resolvable = !d.basis_ids.empty() &&
                          std::all_of(d.basis_ids.begin(), d.basis_ids.end(), [&](const std::string& b) {
                              return known_ids.count(b) > 0;
                          });
        if (resolvable) ++traceable;
        known_ids.insert(d.id);
    }
    q.traceability = claims == 0 ? 0.0 : static_cast<double>(traceable) / claims;
    q.composite = objective_composite(q.completeness, q.accuracy, q.traceability, alpha, beta, gamma);
    return q;
}

namespace {

const char* kDefaultTemplate = R"(# {title}

{degraded_note}
## Summary

{summary}

## Hypotheses

{hypotheses}

## Verified Facts

{facts}

## Derived Facts

{derived_facts}

## Contradictions

{contradictions}

## Coverage Matrix

{coverage}

## Gap Analysis

{gaps}

## Research Quality

{quality}

---
Generated at {generated_at}.
{footer}
)";

const char* kEnterpriseTemplate = R"(# {title}

{degraded_note}
## Executive Summary

{summary}

## Strategic Hypotheses

{hypotheses}

## Verified Facts

{facts}

## Derived Insights

{derived_facts}

## Conflicting Information

{contradictions}

## Coverage Matrix

{coverage}

## Open Questions

{gaps}

## Research Quality

{quality}

---
Generated at {generated_at}.
{footer}
)";

std::string substitute(const std::string& tpl, const std::map<std::string, std::string>& sections) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            std::size_t j = tpl.find('}', i);
            if (j != std::string::npos) {
                auto it = sections.find(tpl.substr(i + 1, j - i - 1));
                if (it != sections.end()) {
                    out += it->second;
                    i = j + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i++]);
    }
    return out;
}

}  // namespace

ReportTemplateSet ReportTemplateSet::builtin() {
    ReportTemplateSet set;
    set.templates_ = {
        {"default", kDefaultTemplate},
        {"enterprise", kEnterpriseTemplate},
        {"business", kEnterpriseTemplate},
    };
    return set;
}

void ReportTemplateSet::load_overrides(const std::filesystem::path& dir) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.path().extension() != ".md") continue;
        std::ifstream in(entry.path());
        if (!in) continue;
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        templates_[entry.path().stem().string()] = std::move(body);
    }
}

const std::string& ReportTemplateSet::for_domain(const std::string& domain) const {
    auto it = templates_.find(to_lower(domain));
    if (it != templates_.end()) return it->second;
    return templates_.at("default");
}

RenderedReport render_report(const ReportDocument& doc, const ReportTemplateSet& templates) {
    nlohmann::json j;
    j["title"] = doc.title;
    j["summary"] = doc.summary;
    j["generated_at"] = format_timestamp(doc.generated_at);
    j["degraded"] = doc.degraded;
    j["query"] = {{"text", doc.understanding.query.text},
                  {"intent", std::string(intent_name(doc.understanding.query.type))},
                  {"domain", doc.domain},
                  {"strategy", std::string(strategy_name(doc.understanding.strategy))},
                  {"complexity", doc.understanding.complexity_sigma}};

    j["hypotheses"] = nlohmann::json::array();
    for (const auto& h : doc.hypotheses) {
        j["hypotheses"].push_back({{"id", h.id},
                                   {"statement", h.statement},
                                   {"rationale", h.rationale},
                                   {"verification_method", h.verification_method},
                                   {"expected_outcomes", h.expected_outcomes},
                                   {"confidence", h.confidence},
                                   {"status", std::string(hypothesis_status_name(h.status))}});
    }

    j["facts"] = nlohmann::json::array();
    for (const auto& f : doc.facts) {
        nlohmann::json fj = {{"id", f.id},
                             {"content", f.content},
                             {"source_url", f.source_url},
                             {"source_title", f.source_title},
                             {"confidence", f.confidence},
                             {"stance", std::string(stance_name(f.stance))}};
        if (f.timestamp) fj["timestamp"] = format_date(*f.timestamp);
        if (!f.hypothesis_id.empty()) fj["hypothesis_id"] = f.hypothesis_id;
        auto it = doc.validations.find(f.id);
        if (it != doc.validations.end()) {
            fj["verdict"] = std::string(verdict_name(it->second.verdict));
            fj["validation_confidence"] = it->second.conf;
            fj["confirming_sources"] = it->second.confirming_sources;
            fj["addressing_sources"] = it->second.addressing_sources;
            fj["needs_verification"] = it->second.verdict == Verdict::Verify;
        }
        j["facts"].push_back(std::move(fj));
    }

    j["derived_facts"] = nlohmann::json::array();
    for (const auto& d : doc.derived_facts) {
        j["derived_facts"].push_back({{"id", d.id},
                                      {"content", d.content},
                                      {"basis_ids", d.basis_ids},
                                      {"reasoning_logic", d.reasoning_logic},
                                      {"strength", d.strength},
                                      {"confidence", d.confidence}});
    }

    j["contradictions"] = nlohmann::json::array();
    for (const auto& c : doc.contradictions) {
        nlohmann::json cj = {{"kind", std::string(contradiction_kind_name(c.kind))},
                             {"fact_ids", c.fact_ids},
                             {"strategy", std::string(resolution_strategy_name(c.strategy_used))}};
        if (!c.resolution_fact_id.empty()) cj["resolution_fact_id"] = c.resolution_fact_id;
        if (!c.annotation.empty()) cj["annotation"] = c.annotation;
        j["contradictions"].push_back(std::move(cj));
    }

    j["coverage"] = {{"score", doc.coverage.cov_score}, {"requirements", nlohmann::json::array()}};
    for (const auto& r : doc.coverage.requirements) {
        j["coverage"]["requirements"].push_back({{"id", r.id},
                                                 {"description", r.description},
                                                 {"status", std::string(coverage_status_name(r.status))},
                                                 {"supporting_fact_ids", r.supporting_fact_ids}});
    }

    j["gaps"] = nlohmann::json::array();
    for (const auto& g : doc.gaps) {
        j["gaps"].push_back({{"name", g.name},
                             {"kind", std::string(gap_kind_name(g.kind))},
                             {"importance", std::string(gap_importance_name(g.importance))},
                             {"reason", g.reason},
                             {"inferable", g.inferable},
                             {"suggested_queries", g.queries}});
    }

    j["iterations"] = nlohmann::json::array();
    for (const auto& it : doc.iteration_log) {
        j["iterations"].push_back({{"iteration", it.iteration},
                                   {"gaps_found", it.gaps_found},
                                   {"gaps_actionable", it.gaps_actionable},
                                   {"queries_fired", it.queries_fired},
                                   {"facts_added", it.facts_added}});
    }

    j["knowledge_graph"] = {{"entities", nlohmann::json::array()}, {"relationships", nlohmann::json::array()}};
    for (const auto& e : doc.graph.entities) {
        j["knowledge_graph"]["entities"].push_back({{"name", e.name}, {"type", e.type}});
    }
    for (const auto& r : doc.graph.relationships) {
        j["knowledge_graph"]["relationships"].push_back(
            {{"from", r.from}, {"to", r.to}, {"relation", r.relation}, {"fact_id", r.fact_id}});
    }

    j["quality"] = {{"c", doc.quality.completeness},
                    {"a", doc.quality.accuracy},
                    {"t", doc.quality.traceability},
                    {"composite", doc.quality.composite},
                    {"weights", {{"alpha", doc.quality.alpha}, {"beta", doc.quality.beta}, {"gamma", doc.quality.gamma}}}};

    // Markdown sections mirror the JSON content.
    std::map<std::string, std::string> sections;
    sections["title"] = doc.title;
    sections["summary"] = doc.summary;
    sections["generated_at"] = format_timestamp(doc.generated_at);
    sections["degraded_note"] =
        doc.degraded ? "> Degraded run: the gap-driven loop aborted early; findings may be incomplete.\n" : "";

    std::string hyp_md;
    for (const auto& h : doc.hypotheses) {
        hyp_md += "- **" + h.id + "** [" + std::string(hypothesis_status_name(h.status)) + ", confidence " +
                  fmt(h.confidence) + "] " + h.statement + "\n";
    }
    sections["hypotheses"] = hyp_md.empty() ? "(none)\n" : hyp_md;

    std::string facts_md;
    for (const auto& f : doc.facts) {
        std::string line = "- **" + f.id + "** " + f.content + " (confidence " + fmt(f.confidence);
        auto it = doc.validations.find(f.id);
        if (it != doc.validations.end()) {
            line += ", verdict " + std::string(verdict_name(it->second.verdict));
            if (it->second.verdict == Verdict::Verify) line += "; needs verification";
        }
        line += ") — [" + (f.source_title.empty() ? f.source_url : f.source_title) + "](" + f.source_url + ")";
        if (f.timestamp) line += " (" + format_date(*f.timestamp) + ")";
        facts_md += line + "\n";
    }
    sections["facts"] = facts_md.empty() ? "(none)\n" : facts_md;

    std::string derived_md;
    for (const auto& d : doc.derived_facts) {
        std::string basis;
        for (std::size_t i = 0; i < d.basis_ids.size(); ++i) {
            if (i) basis += ", ";
            basis += d.basis_ids[i];
        }
        derived_md += "- **" + d.id + "** " + d.content + " (confidence " + fmt(d.confidence) + ", strength " +
                      fmt(d.strength) + "; basis: " + basis + ")\n  - reasoning: " + d.reasoning_logic + "\n";
    }
    sections["derived_facts"] = derived_md.empty() ? "(none)\n" : derived_md;

    std::string contr_md;
    for (const auto& c : doc.contradictions) {
        std::string ids;
        for (std::size_t i = 0; i < c.fact_ids.size(); ++i) {
            if (i) ids += " vs ";
            ids += c.fact_ids[i];
        }
        contr_md += "- [" + std::string(contradiction_kind_name(c.kind)) + "] " + ids + " — " +
                    std::string(resolution_strategy_name(c.strategy_used));
        if (!c.resolution_fact_id.empty()) contr_md += ", kept " + c.resolution_fact_id;
        if (!c.annotation.empty()) contr_md += "; " + c.annotation;
        contr_md += "\n";
        if (c.strategy_used == ResolutionStrategy::AnnotatedUnresolved) {
            for (const auto& id : c.fact_ids) {
                contr_md += "  - " + id + " retained with source-perspective annotation\n";
            }
        }
    }
    sections["contradictions"] = contr_md.empty() ? "(none detected)\n" : contr_md;

    std::string cov_md = "Score: " + fmt(doc.coverage.cov_score) + "\n\n";
    for (const auto& r : doc.coverage.requirements) {
        cov_md += "- [" + std::string(coverage_status_name(r.status)) + "] " + r.id + ": " + r.description;
        if (!r.supporting_fact_ids.empty()) {
            cov_md += " (facts:";
            for (const auto& id : r.supporting_fact_ids) cov_md += " " + id;
            cov_md += ")";
        }
        cov_md += "\n";
    }
    sections["coverage"] = cov_md;

    std::string gaps_md;
    for (const auto& g : doc.gaps) {
        gaps_md += "- [" + std::string(gap_importance_name(g.importance)) + "/" +
                   std::string(gap_kind_name(g.kind)) + "] " + g.name + " — " + g.reason +
                   (g.inferable ? " (inferable from existing facts)" : "") + "\n";
        for (const auto& q : g.queries) gaps_md += "  - further research: " + q + "\n";
    }
    for (const auto& it : doc.iteration_log) {
        gaps_md += "- iteration " + std::to_string(it.iteration) + ": " + std::to_string(it.gaps_found) +
                   " gap(s) found, " + std::to_string(it.queries_fired.size()) + " supplementary quer" +
                   (it.queries_fired.size() == 1 ? "y" : "ies") + ", " + std::to_string(it.facts_added) +
                   " fact(s) added\n";
    }
    sections["gaps"] = gaps_md.empty() ? "(no gaps identified)\n" : gaps_md;

    sections["quality"] = "Completeness " + fmt(doc.quality.completeness) + " | Accuracy " +
                          fmt(doc.quality.accuracy) + " | Traceability " + fmt(doc.quality.traceability) +
                          " | Composite " + fmt(doc.quality.composite) + "\n";
    sections["footer"] =
        "Accuracy is operationalized as the fraction of facts accepted by multi-source validation; "
        "no external ground truth is consulted.";

    RenderedReport rendered;
    rendered.json = std::move(j);
    rendered.markdown = substitute(templates.for_domain(doc.domain), sections);
    return rendered;
}

}  // namespace hdr
