#pragma once
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdr/providers.hpp"
#include "hdr/util.hpp"

namespace hdr {

enum class Intent { Fact, Trend, Comparison, Causal, Prediction, Comprehensive };
enum class TemporalCategory { Current, Recent, ThisYear, Future, Past, After, Before, None };
enum class Strategy { MultiStepResearch, TemporalAnalysis, Standard };

std::string_view intent_name(Intent i);
std::string_view temporal_category_name(TemporalCategory c);
std::string_view strategy_name(Strategy s);

struct TemporalContext {
    TemporalCategory category = TemporalCategory::None;
    std::optional<Date> start_date;
    std::optional<Date> end_date;
    std::optional<Date> reference_date;  // the `now` bounds were resolved against
};

struct QueryConstraints {
    std::optional<std::string> target_domain;  // drives the site: query variant
    std::optional<std::string> exact_phrase;   // drives the quoted variant
};

struct ResearchQuery {
    std::string text;
    Intent type = Intent::Comprehensive;
    std::string domain = "general";
    QueryConstraints constraints;
    std::string context;
};

struct QueryUnderstanding {
    ResearchQuery query;
    double intent_confidence = 0.0;
    TemporalContext temporal;
    std::vector<std::string> entities;
    double complexity_sigma = 0.0;
    int recommended_d_max = 1;
    int recommended_n_tasks = 4;
    Strategy strategy = Strategy::Standard;
};

// Per-language keyword lists, loadable from a JSON map category -> phrases.
class TemporalLexicon {
public:
    static TemporalLexicon builtin();
    static TemporalLexicon from_file(const std::filesystem::path& path);
    const std::vector<std::string>& phrases(TemporalCategory c) const;

private:
    std::map<TemporalCategory, std::vector<std::string>> phrases_;
};

struct IntentResult {
    Intent intent = Intent::Comprehensive;
    double confidence = 0.3;
    std::vector<std::string> entities;
    std::string domain = "general";
};

// LLM classification with the declared fallback: unparseable or empty
// replies yield Comprehensive at confidence 0.3. Provider failures propagate.
IntentResult classify_intent(const std::string& text, ProviderGateway& llm);

// Rule pass first; the LLM pass runs only when rules match nothing and the
// query is typed Trend or Prediction. Pure given (text, now) on the rule path.
TemporalContext extract_temporal(const std::string& text, Date now,
                                 const TemporalLexicon& lexicon = TemporalLexicon::builtin(),
                                 ProviderGateway* llm = nullptr,
                                 std::optional<Intent> intent = std::nullopt);

struct ComplexityResult {
    double sigma = 0.0;
    double breadth = 0.0;
    double depth = 0.0;
    double temporal_span = 0.0;
    int d_max = 1;
    int n_tasks = 4;
    Strategy strategy = Strategy::Standard;
};

// sigma = (breadth + depth + temporal_span) / 3, each sub-score in [0,1].
double combine_complexity(double breadth, double depth, double temporal_span);
// sigma < 0.34 -> (1,4); 0.34..0.67 -> (2,8); > 0.67 -> (3,12).
std::pair<int, int> parameters_for_sigma(double sigma);
Strategy strategy_for(Intent intent);
ComplexityResult assess_complexity(const std::string& text, Intent intent, const TemporalContext& temporal);

QueryUnderstanding understand_query(const std::string& text, Date now, ProviderGateway& llm,
                                    const TemporalLexicon& lexicon = TemporalLexicon::builtin());

}  // namespace hdr
