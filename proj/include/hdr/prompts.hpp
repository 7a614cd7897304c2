#pragma once
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hdr/util.hpp"

namespace hdr {

enum class TemplateId {
    FactExtraction,
    ImpactInference,
    DecisionRecommendation,
    RumorVerification,
    HypothesisGen,
    Reasoning,
    GapIdentify,
    IntentClassify,
    ReportCompose,
};

std::string_view template_name(TemplateId id);
std::optional<TemplateId> template_from_name(std::string_view name);
// HypothesisGen 0.4 and Reasoning 0.3 are fixed defaults; everything else
// runs analytic at 0.2.
double default_temperature(TemplateId id);

struct PromptRequest {
    TemplateId template_id = TemplateId::IntentClassify;
    std::map<std::string, std::string> variables;
    double temperature = 0.2;
    int max_output_chars = 8192;
};

PromptRequest make_prompt(TemplateId id, std::map<std::string, std::string> variables,
                          std::optional<double> temperature = std::nullopt);

class TemplateUnbound : public Error {
public:
    using Error::Error;
};

// Versioned prompt texts with {name} placeholders. A placeholder is exactly
// "{identifier}"; any other brace sequence is literal text. Files in an
// override directory named "<template_name>.txt" replace the built-in body.
class PromptRegistry {
public:
    static PromptRegistry builtin();
    void load_overrides(const std::filesystem::path& dir);
    const std::string& text(TemplateId id) const;
    // Substitutes variables; throws TemplateUnbound when the template
    // references a variable the request does not bind. Unreferenced extra
    // variables are allowed (scripted providers match on them).
    std::string render(const PromptRequest& req) const;

private:
    std::map<TemplateId, std::string> texts_;
};

}  // namespace hdr
