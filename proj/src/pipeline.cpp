#include "hdr/pipeline.hpp"

#include <algorithm>

namespace hdr {

namespace {

std::string digest_of(const nlohmann::json& payload) { return md5_hex(payload.dump()).substr(0, 12); }

std::string title_for(const QueryUnderstanding& u) {
    std::string subject = u.entities.empty() ? u.query.text : u.entities.front();
    return "Research Report: " + subject;
}

std::string summary_for(const AnalysisState& state, const CoverageMatrix& coverage) {
    int confirmed = 0;
    for (const auto& h : state.hypotheses) {
        if (h.status == HypothesisStatus::Confirmed) ++confirmed;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", coverage.cov_score);
    return std::to_string(state.facts.size()) + " verified facts and " + std::to_string(state.derived.size()) +
           " derived facts across " + std::to_string(state.hypotheses.size()) + " hypotheses (" +
           std::to_string(confirmed) + " confirmed); requirement coverage " + buf + ".";
}

}  // namespace

Orchestrator::Orchestrator(ProviderGateway& gateway, Store& store, Clock& clock, PipelineConfig config)
    : gateway_(gateway), store_(store), clock_(clock), config_(std::move(config)) {}

RunResult Orchestrator::execute(const TaskRow& task, const HeartbeatSink& heartbeat) {
    RunRecord record;
    record.task_id = task.id;

    auto log_event = [&](int stage, const std::string& event, const nlohmann::json& payload) {
        record.decision_log.push_back({stage, event, digest_of(payload)});
    };
    auto enter_stage = [&](int stage, const char* name) {
        if (heartbeat) heartbeat(stage);
        store_.record_progress(task.id, stage, clock_.now().time_since_epoch().count());
        log_event(stage, std::string("stage_started:") + name, nlohmann::json{{"stage", stage}});
    };
    int current_stage = 0;
    auto guard = [&](int stage, auto&& fn) {
        current_stage = stage;
        try {
            return fn();
        } catch (const StageFailure&) {
            throw;
        } catch (const Error& e) {
            throw StageFailure(stage, e.what());
        }
    };

    Date today = clock_.today();

    // Stage 1: query understanding.
    enter_stage(1, "query_understanding");
    QueryUnderstanding understanding = guard(1, [&] {
        return understand_query(task.query, today, gateway_, config_.lexicon);
    });
    if (config_.d_max_override) understanding.recommended_d_max = *config_.d_max_override;
    SubjectProfile profile = config_.subject_override.value_or(default_subject(understanding));
    record.stage_outputs[1] = {{"intent", std::string(intent_name(understanding.query.type))},
                               {"intent_confidence", understanding.intent_confidence},
                               {"temporal", std::string(temporal_category_name(understanding.temporal.category))},
                               {"entities", understanding.entities},
                               {"sigma", understanding.complexity_sigma},
                               {"d_max", understanding.recommended_d_max},
                               {"n_tasks", understanding.recommended_n_tasks},
                               {"strategy", std::string(strategy_name(understanding.strategy))},
                               {"subject", profile.canonical_name}};
    log_event(1, "query_understood", record.stage_outputs[1]);

    // Stage 2: hypothesis generation.
    enter_stage(2, "hypothesis_generation");
    std::vector<Hypothesis> hypotheses = guard(2, [&] {
        return generate_hypotheses(understanding, config_.references, gateway_);
    });
    record.stage_outputs[2] = {{"count", hypotheses.size()}};
    log_event(2, "hypotheses_generated", nlohmann::json{{"count", hypotheses.size()}});

    // Stage 3: research planning.
    enter_stage(3, "research_planning");
    ResearchPlan plan = guard(3, [&] {
        return plan_research(hypotheses, understanding, config_.catalog, gateway_);
    });
    record.stage_outputs[3] = {{"tasks", plan.tasks.size()}};
    log_event(3, "plan_built", record.stage_outputs[3]);

    // Stage 4: intelligent search.
    enter_stage(4, "intelligent_search");
    SearchBudget budget;
    budget.d_max = understanding.recommended_d_max;
    std::vector<ScoredResult> corpus = guard(4, [&] {
        return execute_plan(plan, profile, gateway_, understanding, config_.catalog, today, budget);
    });
    record.stage_outputs[4] = {{"results", corpus.size()}};
    log_event(4, "search_completed", record.stage_outputs[4]);

    // Stage 5: fact extraction.
    enter_stage(5, "fact_extraction");
    IdGen ids;
    AnalysisState state;
    state.hypotheses = hypotheses;
    state.corpus = corpus;
    guard(5, [&] {
        auto extracted = extract_facts(corpus, profile, plan, gateway_, ids);
        merge_analysis(state, std::move(extracted));
        return 0;
    });
    record.stage_outputs[5] = {{"facts", state.facts.size()}};
    log_event(5, "facts_extracted", record.stage_outputs[5]);

    // Stage 6: analytical reasoning plus the gap-driven loop.
    enter_stage(6, "analytical_reasoning");
    GapLoopResult loop = guard(6, [&] {
        if (!state.facts.empty()) {
            state.derived = derive_facts(state.facts, gateway_, ids, profile.canonical_name);
            for (const auto& f : state.facts) {
                state.validations[f.id] = cross_validate(f, state.corpus, gateway_);
            }
            int compared = 0;
            state.contradictions = detect_contradictions(state.facts, config_.catalog, state.validations,
                                                         gateway_, &compared, profile.canonical_name);
            log_event(6, "contradictions_checked",
                      nlohmann::json{{"pairs_compared", compared},
                                     {"found", state.contradictions.size()}});
        }
        for (auto& h : state.hypotheses) {
            std::vector<HypothesisEvidence> evidence;
            for (const auto& f : state.facts) {
                if (f.hypothesis_id != h.id) continue;
                auto it = state.validations.find(f.id);
                if (it == state.validations.end()) continue;
                evidence.push_back(HypothesisEvidence{f.stance == Stance::Supports, f.stance == Stance::Refutes,
                                                      it->second.verdict == Verdict::Accept, f.confidence});
            }
            h = update_hypothesis_status(h, evidence);
        }
        GapEngineContext ctx{understanding.query, plan, profile, config_.catalog, understanding, today, &ids};
        IterationBudget iter_budget;
        iter_budget.max_iterations = config_.max_iterations;
        return run_gap_iterations(ctx, std::move(state), iter_budget, gateway_);
    });
    state = std::move(loop.state);
    record.iteration_log = loop.log;
    record.degraded = loop.degraded;
    record.stage_outputs[6] = {{"facts", state.facts.size()},
                               {"derived", state.derived.size()},
                               {"contradictions", state.contradictions.size()},
                               {"iterations", loop.log.size()},
                               {"degraded", loop.degraded}};
    log_event(6, "analysis_completed", record.stage_outputs[6]);

    // Stage 7: report generation.
    enter_stage(7, "report_generation");
    RenderedReport rendered = guard(7, [&] {
        auto requirements = derive_requirements(understanding, state.hypotheses, gateway_);
        auto coverage = compute_coverage(std::move(requirements), state);
        auto quality = compute_quality_triple(coverage, state, config_.alpha, config_.beta, config_.gamma);

        ReportDocument doc;
        doc.title = title_for(understanding);
        doc.summary = summary_for(state, coverage);
        doc.domain = understanding.query.domain;
        doc.understanding = understanding;
        doc.hypotheses = state.hypotheses;
        doc.facts = state.facts;
        doc.validations = state.validations;
        doc.derived_facts = state.derived;
        doc.contradictions = state.contradictions;
        doc.coverage = std::move(coverage);
        doc.gaps = loop.remaining_gaps;
        doc.iteration_log = loop.log;
        doc.graph = state.facts.empty() ? KnowledgeGraphFragment{}
                                        : build_knowledge_graph(state.facts, gateway_, profile.canonical_name);
        doc.quality = quality;
        doc.generated_at = clock_.now();
        doc.degraded = loop.degraded;
        return render_report(doc, config_.templates);
    });
    record.stage_outputs[7] = {{"cov_score", rendered.json["coverage"]["score"]},
                               {"quality", rendered.json["quality"]}};
    log_event(7, "report_rendered", record.stage_outputs[7]);

    // Stage 8: persistence and distribution.
    enter_stage(8, "persistence");
    guard(8, [&] {
        std::int64_t now = clock_.now().time_since_epoch().count();
        nlohmann::json report_payload = {{"report", rendered.json}, {"markdown", rendered.markdown}};
        store_.persist({RecordKind::Report, md5_hex(rendered.json.dump()), report_payload, task.id, now});
        for (const auto& f : state.facts) {
            nlohmann::json payload = {{"id", f.id},
                                      {"content", f.content},
                                      {"source_url", f.source_url},
                                      {"confidence", f.confidence}};
            store_.persist({RecordKind::Fact, md5_hex(normalize_content(f.content)), payload, task.id, now});
        }
        for (const auto& h : state.hypotheses) {
            nlohmann::json payload = {{"id", h.id},
                                      {"statement", h.statement},
                                      {"status", std::string(hypothesis_status_name(h.status))},
                                      {"confidence", h.confidence}};
            store_.persist(
                {RecordKind::Hypothesis, md5_hex(normalize_content(h.statement)), payload, task.id, now});
        }
        nlohmann::json gap_log = nlohmann::json::array();
        for (const auto& it : record.iteration_log) {
            gap_log.push_back({{"iteration", it.iteration},
                               {"gaps_found", it.gaps_found},
                               {"queries_fired", it.queries_fired},
                               {"facts_added", it.facts_added}});
        }
        store_.persist({RecordKind::GapLog, md5_hex(task.id + gap_log.dump()), gap_log, task.id, now});
        return 0;
    });
    record.stage_outputs[8] = {{"persisted", true}};
    log_event(8, "persisted", record.stage_outputs[8]);

    nlohmann::json log_json = nlohmann::json::array();
    for (const auto& e : record.decision_log) {
        log_json.push_back({{"stage", e.stage}, {"event", e.event}, {"digest", e.digest}});
    }
    store_.save_decision_log(task.id, log_json);

    return RunResult{std::move(record), std::move(rendered)};
}

RunResult Orchestrator::resume(const TaskRow& task, const HeartbeatSink& heartbeat) {
    if (task.state == TaskState::Completed) {
        RunResult result;
        result.record.task_id = task.id;
        if (auto payload = store_.latest_record(RecordKind::Report, task.id)) {
            result.report.json = payload->value("report", nlohmann::json::object());
            result.report.markdown = payload->value("markdown", "");
            result.record.degraded = result.report.json.value("degraded", false);
        }
        return result;  // no-op
    }
    if (task.attempt > config_.max_attempts) {
        throw Error("task " + task.id + " exhausted its " + std::to_string(config_.max_attempts) + " attempts");
    }
    // Restart from Stage 1; persisted records dedupe naturally.
    return execute(task, heartbeat);
}

}  // namespace hdr
