#pragma once
#include <string>
#include <vector>

#include "hdr/plan.hpp"
#include "hdr/providers.hpp"
#include "hdr/query.hpp"

namespace hdr {

struct SubjectProfile {
    std::string canonical_name;
    std::vector<std::string> aliases;
    std::vector<std::string> descriptors;  // disambiguating context terms
    double theta_s = 0.5;
    double lambda = 0.4;
};

// Default profile: first extracted entity (or the query itself), with the
// query's significant tokens as descriptors.
SubjectProfile default_subject(const QueryUnderstanding& understanding);

struct QualityWeights {
    double relevance = 0.4;
    double authority = 0.3;
    double freshness = 0.2;
    double completeness = 0.1;
};

struct QualityScore {
    double relevance = 0.0;
    double authority = 0.0;
    double freshness = 0.0;
    double completeness = 0.0;
    double composite = 0.0;
};

struct ScoredResult {
    RawSearchResult raw;
    QualityScore quality;
    double subject_rho = 0.0;
    std::string originating_task;
    int depth = 0;
};

// Alg. 2. Always returns the input query first; queries that already carry
// advanced syntax (site:, after:, quoted phrase) pass through alone.
std::vector<std::string> optimize_query(const std::string& query, const QueryUnderstanding& understanding);
bool has_advanced_syntax(const std::string& query);

// rho = lambda * lex + (1 - lambda) * sem over title+snippet (or bare text).
double subject_score(double lex, double sem, double lambda);
double subject_relevance(const RawSearchResult& result, const SubjectProfile& profile);
double subject_relevance_text(std::string_view text, const SubjectProfile& profile);

double composite_quality(const QualityScore& dimensions, const QualityWeights& weights);

QualityScore score_result(const RawSearchResult& result, const std::string& query,
                          const SubjectProfile& profile, const SourceCatalog& catalog, Date now,
                          const QualityWeights& weights = {});

struct SearchBudget {
    int d_max = 2;
    double recursion_threshold = 0.8;  // reuse of the Accept threshold
    int max_results_per_query = 10;
};

// Executes every task's optimized variants, scores, subject-filters,
// deduplicates by normalized URL keeping the highest-Q instance, and digs
// one level deeper (result title as follow-up query) for results at or above
// the recursion threshold until depth reaches d_max.
std::vector<ScoredResult> execute_plan(const ResearchPlan& plan, const SubjectProfile& profile,
                                       ProviderGateway& gateway, const QueryUnderstanding& understanding,
                                       const SourceCatalog& catalog, Date now, const SearchBudget& budget);

}  // namespace hdr
