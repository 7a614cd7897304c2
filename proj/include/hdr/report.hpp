#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdr/gaps.hpp"

namespace hdr {

enum class CoverageStatus { Covered, Partial, Missing };
std::string_view coverage_status_name(CoverageStatus s);

struct Requirement {
    std::string id;
    std::string description;
    std::string hypothesis_id;  // empty for aspect requirements
    CoverageStatus status = CoverageStatus::Missing;
    std::vector<std::string> supporting_fact_ids;
};

struct CoverageMatrix {
    std::vector<Requirement> requirements;
    double cov_score = 0.0;  // (1/|R|) * sum(1 for C, 0.5 for P)
};

struct QualityTriple {
    double completeness = 0.0;
    double accuracy = 0.0;
    double traceability = 0.0;
    double alpha = 1.0 / 3.0;
    double beta = 1.0 / 3.0;
    double gamma = 1.0 / 3.0;
    double composite = 0.0;
};

class EmptyRequirements : public Error {
public:
    using Error::Error;
};

class WeightSumInvalid : public Error {
public:
    using Error::Error;
};

// One requirement per hypothesis plus LLM-decomposed query aspects,
// deduplicated by normalized description. Empty decomposition falls back to
// the per-hypothesis floor.
std::vector<Requirement> derive_requirements(const QueryUnderstanding& understanding,
                                             const std::vector<Hypothesis>& hypotheses, ProviderGateway& llm);

// Covered: >=2 Accepted supporting facts; Partial: exactly 1 Accepted or
// >=1 Verify-level fact; else Missing.
CoverageMatrix compute_coverage(std::vector<Requirement> requirements, const AnalysisState& state);

// (1/|R|) * sum over statuses of 1 for Covered, 0.5 for Partial.
double coverage_score(const std::vector<CoverageStatus>& statuses);
double objective_composite(double c, double a, double t, double alpha, double beta, double gamma);

// C = cov_score; A = Accept fraction of facts; T = fraction of claims with
// resolvable source/basis links. Weights must sum to 1 (+-1e-9).
QualityTriple compute_quality_triple(const CoverageMatrix& matrix, const AnalysisState& state, double alpha,
                                     double beta, double gamma);

struct ReportDocument {
    std::string title;
    std::string summary;
    std::string domain = "general";
    QueryUnderstanding understanding;
    std::vector<Hypothesis> hypotheses;
    std::vector<Fact> facts;
    std::map<std::string, ValidationOutcome> validations;
    std::vector<DerivedFact> derived_facts;
    std::vector<Contradiction> contradictions;
    CoverageMatrix coverage;
    std::vector<ResearchGap> gaps;
    std::vector<GapIterationRecord> iteration_log;
    KnowledgeGraphFragment graph;
    QualityTriple quality;
    Timestamp generated_at{};
    bool degraded = false;
};

// Markdown skeletons with {section} placeholders, selected by query domain;
// unmatched domains take the default skeleton.
class ReportTemplateSet {
public:
    static ReportTemplateSet builtin();
    void load_overrides(const std::filesystem::path& dir);  // <domain>.md files
    const std::string& for_domain(const std::string& domain) const;

private:
    std::map<std::string, std::string> templates_;
};

struct RenderedReport {
    nlohmann::json json;
    std::string markdown;
};

// Deterministic: same document renders to byte-identical output.
RenderedReport render_report(const ReportDocument& doc,
                             const ReportTemplateSet& templates = ReportTemplateSet::builtin());

}  // namespace hdr
