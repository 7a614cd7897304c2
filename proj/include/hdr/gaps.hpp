#pragma once
#include <map>
#include <string>
#include <vector>

#include "hdr/analysis.hpp"

namespace hdr {

enum class GapKind { Logical, Informational };
enum class GapImportance { High, Medium, Low };
std::string_view gap_kind_name(GapKind k);
std::string_view gap_importance_name(GapImportance i);

struct ResearchGap {
    std::string name;
    GapKind kind = GapKind::Informational;
    GapImportance importance = GapImportance::Low;
    std::string reason;
    std::vector<std::string> queries;  // >= 1
    bool inferable = false;            // surfaced in the report's gap analysis
};

struct IterationBudget {
    int max_iterations = 2;
    static constexpr int kMaxQueriesPerIteration = 4;
};

// The evolving analysis result A* plus the evidence corpus it validates
// against.
struct AnalysisState {
    std::vector<Fact> facts;
    std::vector<DerivedFact> derived;
    std::map<std::string, ValidationOutcome> validations;
    std::vector<Contradiction> contradictions;
    std::vector<Hypothesis> hypotheses;
    std::vector<ScoredResult> corpus;
};

struct GapIterationRecord {
    int iteration = 0;
    int gaps_found = 0;
    int gaps_actionable = 0;  // importance >= Medium
    std::vector<std::string> queries_fired;
    int facts_added = 0;
};

struct GapLoopResult {
    AnalysisState state;
    std::vector<GapIterationRecord> log;
    std::vector<ResearchGap> remaining_gaps;  // last identify output, for the report
    bool degraded = false;
};

// Structured gap identification; malformed items drop; output sorted
// High -> Medium -> Low. The prompt names the catalog's source categories so
// supplementary queries target authoritative sources.
std::vector<ResearchGap> identify_gaps(const ResearchQuery& query, const ResearchPlan& plan,
                                       const AnalysisState& state, const SourceCatalog& catalog,
                                       ProviderGateway& llm);

struct MergeOutcome {
    std::vector<std::string> changed_fact_ids;  // new or confidence-raised
};

// Content-hash dedup (MD5 of lowercased, whitespace-collapsed content);
// collisions keep the max confidence; derived confidences recomputed.
MergeOutcome merge_analysis(AnalysisState& state, std::vector<Fact> new_facts);

struct GapEngineContext {
    ResearchQuery query;
    ResearchPlan plan;
    SubjectProfile profile;
    SourceCatalog catalog;
    QueryUnderstanding understanding;
    Date now;
    IdGen* ids = nullptr;
};

// Alg. 4: at most budget.max_iterations rounds of identify -> filter
// (importance >= Medium) -> search (<= 4 union queries) -> extract -> merge
// -> re-validate changed facts. Provider failure aborts the round and
// returns the best state so far, flagged degraded.
GapLoopResult run_gap_iterations(const GapEngineContext& ctx, AnalysisState state,
                                 const IterationBudget& budget, ProviderGateway& gateway);

}  // namespace hdr
