#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdr/plan.hpp"
#include "hdr/search.hpp"

namespace hdr {

enum class Stance { Supports, Refutes, Neutral };
enum class Verdict { Accept, Verify, Reject };
std::string_view stance_name(Stance s);
std::string_view verdict_name(Verdict v);

struct Fact {
    std::string id;
    std::string content;
    std::string source_url;
    std::string source_title;
    std::optional<Date> timestamp;
    double confidence = 0.0;       // starts as the originating result's composite Q
    std::string hypothesis_id;     // empty when unlinked
    Stance stance = Stance::Neutral;
};

struct DerivedFact {
    std::string id;
    std::string content;
    std::vector<std::string> basis_ids;  // facts or earlier derived facts
    std::string reasoning_logic;
    double strength = 0.0;   // r, from categorical certainty
    double confidence = 0.0; // r * min(basis confidences), exact
};

struct ValidationOutcome {
    std::string fact_id;
    double conf = 0.0;
    Verdict verdict = Verdict::Reject;
    int confirming_sources = 0;
    int addressing_sources = 0;
};

// theta_h / theta_l from the validation rule; both boundaries inclusive
// on the upper band (conf = 0.8 accepts, conf = 0.5 verifies).
constexpr double kAcceptThreshold = 0.8;
constexpr double kRejectThreshold = 0.5;
Verdict verdict_for(double conf);
// conf = confirming/addressing; an unaddressed fact keeps its own sigma.
ValidationOutcome validation_from_counts(std::string fact_id, int confirming, int addressing, double sigma);

enum class ContradictionKind { Direct, Indirect, Temporal };
enum class ResolutionStrategy { TemporalPriority, AuthorityPriority, CorroborationPriority, AnnotatedUnresolved };
std::string_view contradiction_kind_name(ContradictionKind k);
std::string_view resolution_strategy_name(ResolutionStrategy s);

struct Contradiction {
    ContradictionKind kind = ContradictionKind::Direct;
    std::vector<std::string> fact_ids;     // >= 2
    std::string resolution_fact_id;        // empty for AnnotatedUnresolved
    std::string annotation;
    ResolutionStrategy strategy_used = ResolutionStrategy::AnnotatedUnresolved;
};

struct KnowledgeGraphFragment {
    struct Entity {
        std::string name;
        std::string type;
    };
    struct Relationship {
        std::string from;
        std::string to;
        std::string relation;
        std::string fact_id;
    };
    std::vector<Entity> entities;
    std::vector<Relationship> relationships;
};

// Monotonically numbered ids shared across a whole run so supplementary
// extraction never reuses an id.
class IdGen {
public:
    std::string next_fact() { return "f" + std::to_string(++facts_); }
    std::string next_derived() { return "d" + std::to_string(++derived_); }

private:
    int facts_ = 0;
    int derived_ = 0;
};

// Level-1 extraction per result; initial sigma = composite Q; contents that
// fail the subject token test are dropped. Unparseable replies skip the
// batch with a warning.
std::vector<Fact> extract_facts(const std::vector<ScoredResult>& results, const SubjectProfile& profile,
                                const ResearchPlan& plan, ProviderGateway& llm, IdGen& ids);

// Alg. 3 at temperature 0.3. Certainty maps to r: certain 0.95,
// probable 0.8, possible 0.6. Items citing out-of-range basis indices drop.
std::vector<DerivedFact> derive_facts(const std::vector<Fact>& explicit_facts, ProviderGateway& llm, IdGen& ids,
                                      const std::string& subject = "the research subject");

// Classifies every corpus source as confirms/contradicts/neutral in one
// call; conf = confirming/addressing, falling back to the fact's own sigma
// when nothing addresses it.
ValidationOutcome cross_validate(const Fact& fact, const std::vector<ScoredResult>& corpus, ProviderGateway& llm);

// Candidate pairs share at least one entity token (blocking); one batch
// classification call when any candidates exist. Resolution cascade:
// temporal (>90 days apart) -> authority -> corroboration -> annotated
// unresolved with both confidences scaled by 0.75.
std::vector<Contradiction> detect_contradictions(std::vector<Fact>& facts, const SourceCatalog& catalog,
                                                 const std::map<std::string, ValidationOutcome>& validations,
                                                 ProviderGateway& llm, int* compared_pairs = nullptr,
                                                 const std::string& subject = "the research subject");

KnowledgeGraphFragment build_knowledge_graph(const std::vector<Fact>& facts, ProviderGateway& llm,
                                             const std::string& subject = "the research subject");

// Confidence propagation over the derivation DAG (bases may be explicit or
// derived). Throws on cycles or dangling bases.
double propagated_confidence(double strength, const std::vector<double>& basis_confidences);
void recompute_derived_confidences(std::vector<DerivedFact>& derived, const std::vector<Fact>& facts);
bool derivation_acyclic(const std::vector<DerivedFact>& derived);

}  // namespace hdr
