#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "harness.hpp"
#include "hdr/script.hpp"

using namespace hdr;
using nlohmann::json;

namespace {

PromptRequest intent_request(const std::string& query) {
    return make_prompt(TemplateId::IntentClassify, {{"query", query}});
}

}  // namespace

TEST_CASE("prompt rendering substitutes placeholders and rejects unbound ones") {
    auto reg = PromptRegistry::builtin();
    auto req = intent_request("What is BYD?");
    auto text = reg.render(req);
    CHECK(text.find("What is BYD?") != std::string::npos);
    CHECK(text.find("{query}") == std::string::npos);

    PromptRequest missing = make_prompt(TemplateId::HypothesisGen, {{"query", "x"}});
    CHECK_THROWS_AS(reg.render(missing), TemplateUnbound);
}

TEST_CASE("JSON braces in template bodies are not placeholders") {
    auto reg = PromptRegistry::builtin();
    auto req = make_prompt(TemplateId::RumorVerification, {{"fact_content", "claim"}, {"sources", "1. s"}});
    auto text = reg.render(req);
    CHECK(text.find("\"classifications\"") != std::string::npos);
}

TEST_CASE("shipped prompt files match the built-in registry") {
    auto reg = PromptRegistry::builtin();
    for (auto id : {TemplateId::FactExtraction, TemplateId::ImpactInference, TemplateId::DecisionRecommendation,
                    TemplateId::RumorVerification, TemplateId::HypothesisGen, TemplateId::Reasoning,
                    TemplateId::GapIdentify, TemplateId::IntentClassify, TemplateId::ReportCompose}) {
        auto path = std::filesystem::path(HDR_SOURCE_DIR) / "prompts" /
                    (std::string(template_name(id)) + ".txt");
        std::ifstream in(path);
        REQUIRE_MESSAGE(in.good(), path.string());
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK_MESSAGE(body == reg.text(id), "drifted: ", path.string());
    }
}

TEST_CASE("default temperatures follow the fixed table") {
    CHECK(default_temperature(TemplateId::HypothesisGen) == doctest::Approx(0.4));
    CHECK(default_temperature(TemplateId::Reasoning) == doctest::Approx(0.3));
    CHECK(make_prompt(TemplateId::HypothesisGen, {}).temperature == doctest::Approx(0.4));
    CHECK(make_prompt(TemplateId::HypothesisGen, {}, 0.9).temperature == doctest::Approx(0.9));
    CHECK_THROWS_AS(make_prompt(TemplateId::Reasoning, {}, 1.5), Error);
}

TEST_CASE("healthy primary serves the completion") {
    auto g = harness::gateway_from_json(
        {{"completions", {harness::completion("intent_classify", "{\"intent\":\"fact\"}")}}});
    auto resp = g->complete(intent_request("q"));
    CHECK(resp.channel == Channel::Primary);
    CHECK(resp.text == "{\"intent\":\"fact\"}");
}

TEST_CASE("primary timeout falls back to the fallback channel") {
    auto g = harness::gateway_from_json(
        {{"completions",
          {json{{"template_id", "intent_classify"}, {"channel", "primary"}, {"error", "timeout"}, {"repeat", true}},
           json{{"template_id", "intent_classify"}, {"channel", "fallback"}, {"response", "ok"}}}}});
    auto resp = g->complete(intent_request("q"));
    CHECK(resp.channel == Channel::Fallback);
    CHECK(resp.text == "ok");
}

TEST_CASE("both channels failing raises BothChannelsFailed with both causes") {
    auto g = harness::gateway_from_json(
        {{"completions",
          {json{{"template_id", "intent_classify"}, {"error", "failure"}, {"repeat", true}}}}});
    try {
        g->complete(intent_request("q"));
        FAIL("expected BothChannelsFailed");
    } catch (const BothChannelsFailed& e) {
        CHECK(e.primary_cause.find("scripted failure") != std::string::npos);
        CHECK(e.fallback_cause.find("scripted failure") != std::string::npos);
    }
}

TEST_CASE("empty completion text counts as a channel failure") {
    auto g = harness::gateway_from_json(
        {{"completions",
          {json{{"template_id", "intent_classify"}, {"channel", "primary"}, {"response", ""}},
           json{{"template_id", "intent_classify"}, {"channel", "fallback"}, {"response", "fallback text"}}}}});
    auto resp = g->complete(intent_request("q"));
    CHECK(resp.channel == Channel::Fallback);
}

TEST_CASE("script miss surfaces instead of masking as channel failure") {
    auto g = harness::gateway_from_json(
        {{"completions", {harness::completion("hypothesis_gen", "unused")}}});
    CHECK_THROWS_WITH_AS(g->complete(intent_request("q")),
                         doctest::Contains("intent_classify, call ordinal 1"), ScriptMiss);
}

TEST_CASE("script exhaustion names the template and ordinal") {
    auto g = harness::gateway_from_json(
        {{"completions", {harness::completion("intent_classify", "once")}}});
    CHECK(g->complete(intent_request("q")).text == "once");
    CHECK_THROWS_WITH_AS(g->complete(intent_request("q")), doctest::Contains("call ordinal 2"), ScriptMiss);
}

TEST_CASE("completion match tests exact and prefix forms against variables") {
    auto g = harness::gateway_from_json(
        {{"completions",
          {json{{"template_id", "intent_classify"}, {"match", "prefix:Analysis of"}, {"response", "prefixed"}},
           json{{"template_id", "intent_classify"}, {"match", "exact query"}, {"response", "exact"}}}}});
    CHECK(g->complete(intent_request("exact query")).text == "exact");
    CHECK(g->complete(intent_request("Analysis of AI trends")).text == "prefixed");
}

TEST_CASE("temperature-qualified entries only match that temperature") {
    auto g = harness::gateway_from_json(
        {{"completions",
          {json{{"template_id", "hypothesis_gen"}, {"temperature", 0.4}, {"response", "ok"}}}}});
    auto req = make_prompt(TemplateId::HypothesisGen, {{"query", "q"}, {"context", "c"}, {"references", "r"}});
    CHECK(g->complete(req).text == "ok");
}

TEST_CASE("out-of-range scripted temperature is a parse error") {
    json doc = {{"completions",
                 {json{{"template_id", "intent_classify"}, {"temperature", 1.5}, {"response", "x"}}}}};
    CHECK_THROWS_AS(parse_script(doc), ScriptParse);
}

TEST_CASE("unknown template id is a parse error") {
    json doc = {{"completions", {json{{"template_id", "nonsense"}, {"response", "x"}}}}};
    CHECK_THROWS_AS(parse_script(doc), ScriptParse);
}

TEST_CASE("load_script rejects missing and malformed files") {
    CHECK_THROWS_AS(load_script("/nonexistent/script.json"), ScriptParse);
    auto path = std::filesystem::temp_directory_path() / "hdr_bad_script.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_script(path), ScriptParse);
    std::filesystem::remove(path);
}

TEST_CASE("search merges disjoint provider batches in priority order") {
    auto g = harness::gateway_from_json(
        {{"searches",
          {json{{"provider", "alpha"},
                {"query_match", "q"},
                {"results",
                 {harness::result("A1", "https://a.example/1", "s"), harness::result("A2", "https://a.example/2", "s"),
                  harness::result("A3", "https://a.example/3", "s")}}},
           json{{"provider", "beta"},
                {"query_match", "q"},
                {"results",
                 {harness::result("B1", "https://b.example/1", "s"),
                  harness::result("B2", "https://b.example/2", "s")}}}}}});
    auto results = g->search({"q", std::nullopt, std::nullopt, 10});
    REQUIRE(results.size() == 5);
    CHECK(results[0].title == "A1");
    CHECK(results[4].title == "B2");
}

TEST_CASE("duplicate normalized urls collapse to the first provider's entry") {
    auto g = harness::gateway_from_json(
        {{"searches",
          {json{{"provider", "alpha"},
                {"query_match", "q"},
                {"results", {harness::result("first", "https://Example.com/x/", "s")}}},
           json{{"provider", "beta"},
                {"query_match", "q"},
                {"results", {harness::result("second", "https://example.com/x", "s")}}}}}});
    auto results = g->search({"q", std::nullopt, std::nullopt, 10});
    REQUIRE(results.size() == 1);
    CHECK(results[0].title == "first");
}

TEST_CASE("partial provider failure is tolerated") {
    auto g = harness::gateway_from_json(
        {{"searches",
          {json{{"provider", "alpha"}, {"query_match", "q"}, {"error", "failure"}},
           json{{"provider", "beta"},
                {"query_match", "q"},
                {"results",
                 {harness::result("B1", "https://b.example/1", "s"), harness::result("B2", "https://b.example/2", "s"),
                  harness::result("B3", "https://b.example/3", "s"),
                  harness::result("B4", "https://b.example/4", "s")}}}}}});
    auto results = g->search({"q", std::nullopt, std::nullopt, 10});
    CHECK(results.size() == 4);
}

TEST_CASE("all providers failing raises AllProvidersFailed") {
    auto g = harness::gateway_from_json(
        {{"searches", {json{{"query_match", "q"}, {"error", "failure"}, {"repeat", true}}}}});
    CHECK_THROWS_AS(g->search({"q", std::nullopt, std::nullopt, 10}), AllProvidersFailed);
}

TEST_CASE("invalid result urls are dropped with a warning") {
    auto g = harness::gateway_from_json(
        {{"searches",
          {harness::search_entry("q", {harness::result("ok", "https://x.example/a", "s"),
                                       harness::result("bad", "not a url", "s")})}}});
    auto results = g->search({"q", std::nullopt, std::nullopt, 10});
    REQUIRE(results.size() == 1);
    CHECK(results[0].title == "ok");
}

TEST_CASE("max_results caps each provider batch") {
    auto g = harness::gateway_from_json(
        {{"searches",
          {harness::search_entry("q", {harness::result("1", "https://x.example/1", "s"),
                                       harness::result("2", "https://x.example/2", "s"),
                                       harness::result("3", "https://x.example/3", "s")})}}});
    CHECK(g->search({"q", std::nullopt, std::nullopt, 2}).size() == 2);
}

TEST_CASE("scripted runs are deterministic across identical call sequences") {
    json script = {{"completions", {harness::completion("intent_classify", "{\"intent\":\"trend\"}", true)}},
                   {"searches",
                    {json{{"query_match", "q"},
                          {"results", {harness::result("T", "https://x.example/t", "snippet", "2026-01-02")}},
                          {"repeat", true}}}}};
    auto run = [&] {
        auto g = harness::gateway_from_json(script);
        std::string out = g->complete(intent_request("q")).text;
        for (const auto& r : g->search({"q", std::nullopt, std::nullopt, 5})) {
            out += "|" + r.title + "|" + r.url + "|" + (r.published_at ? format_date(*r.published_at) : "-");
        }
        return out;
    };
    CHECK(run() == run());
}

TEST_CASE("gateway counts provider calls for budget assertions") {
    auto g = harness::gateway_from_json(
        {{"searches", {json{{"query_match", ""}, {"results", json::array()}, {"repeat", true}}}},
         {"completions", {harness::completion("intent_classify", "x", true)}}});
    g->search({"a", std::nullopt, std::nullopt, 5});
    g->search({"b", std::nullopt, std::nullopt, 5});
    g->complete(intent_request("q"));
    CHECK(g->stats().search_calls == 2);
    CHECK(g->stats().completions == 1);
}
