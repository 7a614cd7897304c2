#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "hdr/providers.hpp"
#include "hdr/query.hpp"

namespace hdr {

enum class HypothesisStatus { Unverified, Partial, Confirmed, Refuted };
std::string_view hypothesis_status_name(HypothesisStatus s);

struct Hypothesis {
    std::string id;
    std::string statement;
    std::string rationale;
    std::string verification_method;
    std::string expected_outcomes;
    double confidence = 0.5;  // maximal-uncertainty prior
    HypothesisStatus status = HypothesisStatus::Unverified;
};

struct ResearchTaskSpec {
    std::string id;
    std::vector<std::string> queries;
    std::vector<std::string> target_sources;
    std::string hypothesis_id;
    double priority = 0.5;
};

struct ResearchPlan {
    std::vector<ResearchTaskSpec> tasks;
};

// Domain-suffix -> (authority, category). Longest matching suffix wins;
// unmatched domains score the general default 0.5.
class SourceCatalog {
public:
    struct Entry {
        std::string pattern;
        double authority = 0.5;
        std::string category = "general";
    };

    static SourceCatalog defaults();
    static SourceCatalog from_file(const std::filesystem::path& path);

    double authority_for(std::string_view url_or_domain) const;
    std::string category_for(std::string_view url_or_domain) const;
    std::vector<std::string> categories() const;  // sorted unique
    const std::vector<Entry>& entries() const { return entries_; }

private:
    const Entry* match(std::string_view url_or_domain) const;
    std::vector<Entry> entries_;
};

class HypothesisShortfall : public Error {
public:
    using Error::Error;
};

// Alg. 1: LLM generation at temperature 0.4, structural validation, one
// regeneration attempt when fewer than 3 items survive.
std::vector<Hypothesis> generate_hypotheses(const QueryUnderstanding& understanding,
                                            const std::string& references, ProviderGateway& llm);

ResearchPlan plan_research(const std::vector<Hypothesis>& hypotheses, const QueryUnderstanding& understanding,
                           const SourceCatalog& catalog, ProviderGateway& llm);

// One validated fact linked to a hypothesis, as seen by status updates.
struct HypothesisEvidence {
    bool supports = false;  // stance Supports vs Refutes; Neutral carries neither flag
    bool refutes = false;
    bool accepted = false;  // verdict Accept; Verify facts never count toward status
    double confidence = 0.0;
};

Hypothesis update_hypothesis_status(Hypothesis h, const std::vector<HypothesisEvidence>& evidence);

}  // namespace hdr
