#include "hdr/prompts.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hdr {

namespace {

struct NameRow {
    TemplateId id;
    std::string_view name;
};

constexpr std::array<NameRow, 9> kNames{{
    {TemplateId::FactExtraction, "fact_extraction"},
    {TemplateId::ImpactInference, "impact_inference"},
    {TemplateId::DecisionRecommendation, "decision_recommendation"},
    {TemplateId::RumorVerification, "rumor_verification"},
    {TemplateId::HypothesisGen, "hypothesis_gen"},
    {TemplateId::Reasoning, "reasoning"},
    {TemplateId::GapIdentify, "gap_identify"},
    {TemplateId::IntentClassify, "intent_classify"},
    {TemplateId::ReportCompose, "report_compose"},
}};

const char* kIntentClassify = R"([intent_classify v1]
You analyze research queries.

Query: {query}

Classify the query and respond with a single JSON object:
- "intent": one of "fact", "trend", "comparison", "causal", "prediction", "comprehensive"
- "confidence": number between 0 and 1
- "entities": array of subject entity names mentioned in the query
- "domain": short knowledge-area label
- "temporal": optional object with "category" (one of "current", "recent",
  "this_year", "future", "past", "after", "before"), "start", "end" (ISO dates)
)";

const char* kHypothesisGen = R"([hypothesis_gen v1]
You are a research strategist. Generate 3 to 5 testable research hypotheses
for the query below. Each hypothesis must be specific, verifiable through
web research, and cover a distinct aspect.

Query: {query}
Background: {context}
Reference material: {references}

Respond with a JSON array; each element is an object with the keys
"statement", "rationale", "verification_method", "expected_outcomes".
)";

const char* kDecisionRecommendation = R"([decision_recommendation v1]
You plan verification work for a research hypothesis.

Research query: {query}
Hypothesis: {statement}
Verification method: {verification_method}

Propose one or two concrete web search queries that would retrieve the
evidence this verification method needs, and rate the hypothesis.
Respond with a JSON object:
- "queries": array of 1-2 search query strings
- "importance": number in [0,1], how much the hypothesis matters to the query
- "feasibility": number in [0,1], how likely web search can verify it
)";

const char* kFactExtraction = R"([fact_extraction v1]
Extract verifiable facts about {subject} as Subject-Action-Object statements.
Only report facts directly about the target subject; ignore similarly named
entities. Mode: {mode}

Material:
{payload}

For mode "extract", respond with JSON: {"facts": [{"content": "...",
"stance": "supports"|"refutes"|"neutral", "hypothesis": "optional id"}]}.
For mode "graph", respond with JSON: {"entities": [{"name": "...", "type":
"..."}], "relationships": [{"from": "...", "to": "...", "relation": "...",
"fact": <1-based fact number>}]}.
)";

const char* kReasoning = R"([reasoning v1]
You derive implicit facts from explicit evidence about {subject}.
Numbered evidence:
{facts}

Derive non-obvious conclusions that follow from combining the evidence.
Respond with JSON: {"derived": [{"content": "...", "basis": [<1-based fact
numbers>], "reasoning": "...", "certainty": "certain"|"probable"|"possible"}]}.
)";

const char* kRumorVerification = R"([rumor_verification v1]
Fact-check the claim below against each numbered source. For every source
decide whether it confirms the claim, contradicts it, or is neutral
(does not address it).

Claim: {fact_content}

Sources:
{sources}

Respond with JSON: {"classifications": ["confirms"|"contradicts"|"neutral",
... one entry per source, in order]}.
)";

const char* kImpactInference = R"([impact_inference v1]
You compare pairs of factual statements about {subject} and classify whether
they conflict.

Numbered pairs:
{pairs}

For each pair decide: "direct" (explicitly conflicting claims), "indirect"
(logically inconsistent together), "temporal" (conflict explained by
different time periods), or "none".
Respond with JSON: {"pairs": [{"index": <1-based pair number>, "kind":
"direct"|"indirect"|"temporal"|"none"}]}.
)";

const char* kGapIdentify = R"([gap_identify v1]
You audit research completeness.

Research query: {query}
Hypotheses:
{hypotheses}
Facts gathered so far:
{facts_summary}
Authoritative source categories available: {source_categories}

Identify informational gaps (missing facts needed to support or refute a
hypothesis) and logical gaps (missing reasoning links between known facts).
Prefer supplementary queries that target the authoritative source categories.
Respond with JSON: {"gaps": [{"name": "...", "kind":
"informational"|"logical", "importance": "high"|"medium"|"low", "reason":
"...", "queries": ["..."], "inferable": true|false}]}.
)";

const char* kReportCompose = R"([report_compose v1]
Decompose the research query into the distinct requirements a complete
report must address, beyond verifying the listed hypotheses.

Query: {query}
Hypotheses:
{hypotheses}

Respond with JSON: {"aspects": ["requirement description", ...]}.
)";

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::string_view template_name(TemplateId id) {
    for (const auto& row : kNames) {
        if (row.id == id) return row.name;
    }
    return "unknown";
}

std::optional<TemplateId> template_from_name(std::string_view name) {
    for (const auto& row : kNames) {
        if (row.name == name) return row.id;
    }
    return std::nullopt;
}

double default_temperature(TemplateId id) {
    switch (id) {
        case TemplateId::HypothesisGen: return 0.4;
        case TemplateId::Reasoning: return 0.3;
        default: return 0.2;
    }
}

PromptRequest make_prompt(TemplateId id, std::map<std::string, std::string> variables,
                          std::optional<double> temperature) {
    PromptRequest req;
    req.template_id = id;
    req.variables = std::move(variables);
    req.temperature = temperature.value_or(default_temperature(id));
    if (req.temperature < 0.0 || req.temperature > 1.0) {
        throw Error("temperature out of range [0,1]");
    }
    return req;
}

PromptRegistry PromptRegistry::builtin() {
    PromptRegistry reg;
    reg.texts_ = {
        {TemplateId::IntentClassify, kIntentClassify},
        {TemplateId::HypothesisGen, kHypothesisGen},
        {TemplateId::DecisionRecommendation, kDecisionRecommendation},
        {TemplateId::FactExtraction, kFactExtraction},
        {TemplateId::Reasoning, kReasoning},
        {TemplateId::RumorVerification, kRumorVerification},
        {TemplateId::ImpactInference, kImpactInference},
        {TemplateId::GapIdentify, kGapIdentify},
        {TemplateId::ReportCompose, kReportCompose},
    };
    return reg;
}

void PromptRegistry::load_overrides(const std::filesystem::path& dir) {
    for (const auto& row : kNames) {
        auto path = dir / (std::string(row.name) + ".txt");
        std::ifstream in(path);
        if (!in) continue;
        std::ostringstream body;
        body << in.rdbuf();
        texts_[row.id] = body.str();
    }
}

const std::string& PromptRegistry::text(TemplateId id) const { return texts_.at(id); }

std::string PromptRegistry::render(const PromptRequest& req) const {
    const std::string& tpl = text(req.template_id);
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        char c = tpl[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < tpl.size() && ident_char(tpl[j])) ++j;
        if (j > i + 1 && j < tpl.size() && tpl[j] == '}') {
            std::string name = tpl.substr(i + 1, j - i - 1);
            auto it = req.variables.find(name);
            if (it == req.variables.end()) {
                throw TemplateUnbound("template " + std::string(template_name(req.template_id)) +
                                      " references unbound variable {" + name + "}");
            }
            out += it->second;
            i = j + 1;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

}  // namespace hdr
