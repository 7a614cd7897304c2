#pragma once
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdr/gaps.hpp"
#include "hdr/queue.hpp"
#include "hdr/report.hpp"
#include "hdr/store.hpp"

namespace hdr {

struct PipelineConfig {
    std::optional<int> d_max_override;
    int max_iterations = 2;
    double alpha = 1.0 / 3.0;
    double beta = 1.0 / 3.0;
    double gamma = 1.0 / 3.0;
    std::optional<SubjectProfile> subject_override;
    std::string references;
    SourceCatalog catalog = SourceCatalog::defaults();
    TemporalLexicon lexicon = TemporalLexicon::builtin();
    ReportTemplateSet templates = ReportTemplateSet::builtin();
    int max_attempts = 3;
};

struct DecisionLogEntry {
    int stage = 0;
    std::string event;
    std::string digest;  // short MD5 of the event payload
};

struct RunRecord {
    std::string task_id;
    std::map<int, nlohmann::json> stage_outputs;
    std::vector<DecisionLogEntry> decision_log;
    std::vector<GapIterationRecord> iteration_log;
    bool degraded = false;
};

struct RunResult {
    RunRecord record;
    RenderedReport report;
};

class StageFailure : public Error {
public:
    StageFailure(int stage, const std::string& cause)
        : Error("stage " + std::to_string(stage) + " failed: " + cause), stage(stage), cause(cause) {}
    int stage;
    std::string cause;
};

using HeartbeatSink = std::function<void(int stage)>;

// Runs Stages 1-8 for one claimed task: understand -> hypothesize -> plan ->
// search -> extract -> analyze (+ gap loop) -> report -> persist. A
// heartbeat fires at every stage boundary; Stage 8 persists through the
// store's dedup rules, which makes retries idempotent.
class Orchestrator {
public:
    Orchestrator(ProviderGateway& gateway, Store& store, Clock& clock, PipelineConfig config = {});

    RunResult execute(const TaskRow& task, const HeartbeatSink& heartbeat = nullptr);
    // Retry entry point: restarts from Stage 1; Completed tasks no-op,
    // exhausted attempts are rejected.
    RunResult resume(const TaskRow& task, const HeartbeatSink& heartbeat = nullptr);

private:
    ProviderGateway& gateway_;
    Store& store_;
    Clock& clock_;
    PipelineConfig config_;
};

}  // namespace hdr
