#include <algorithm>
#include <map>

#include "hdr/store.hpp"

namespace hdr {

std::string_view task_state_name(TaskState s) {
    switch (s) {
        case TaskState::Queued: return "queued";
        case TaskState::Running: return "running";
        case TaskState::Completed: return "completed";
        case TaskState::Failed: return "failed";
    }
    return "queued";
}

std::optional<TaskState> task_state_from_name(std::string_view name) {
    if (name == "queued") return TaskState::Queued;
    if (name == "running") return TaskState::Running;
    if (name == "completed") return TaskState::Completed;
    if (name == "failed") return TaskState::Failed;
    return std::nullopt;
}

std::string_view record_kind_name(RecordKind k) {
    switch (k) {
        case RecordKind::Report: return "report";
        case RecordKind::Fact: return "fact";
        case RecordKind::SearchResult: return "search_result";
        case RecordKind::Hypothesis: return "hypothesis";
        case RecordKind::GapLog: return "gap_log";
    }
    return "fact";
}

TaskRow* MemoryStore::find(const std::string& id) {
    for (auto& t : tasks_) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::string MemoryStore::create_task(const std::string& query, int priority, std::int64_t now) {
    if (query.empty()) throw Error("task query must be non-empty");
    std::lock_guard lock(mutex_);
    TaskRow t;
    t.id = "t" + std::to_string(++next_id_);
    t.query = query;
    t.priority = priority;
    t.created_at = now;
    tasks_.push_back(t);
    return t.id;
}

std::optional<TaskRow> MemoryStore::get_task(const std::string& id) {
    std::lock_guard lock(mutex_);
    TaskRow* t = find(id);
    if (!t) return std::nullopt;
    return *t;
}

std::vector<TaskRow> MemoryStore::list_tasks() {
    std::lock_guard lock(mutex_);
    return tasks_;
}

std::optional<TaskRow> MemoryStore::claim_next(const std::string& worker_id, std::int64_t now) {
    std::lock_guard lock(mutex_);
    TaskRow* best = nullptr;
    for (auto& t : tasks_) {
        if (t.state != TaskState::Queued) continue;
        if (!best || t.priority > best->priority ||
            (t.priority == best->priority && t.created_at < best->created_at)) {
            best = &t;
        }
    }
    if (!best) return std::nullopt;
    best->state = TaskState::Running;
    best->worker_id = worker_id;
    best->started_at = now;
    best->last_heartbeat = now;
    best->current_stage = std::max(best->current_stage, 1);
    return *best;
}

HeartbeatStatus MemoryStore::heartbeat(const std::string& task_id, const std::string& worker_id, int stage,
                                       std::int64_t now) {
    std::lock_guard lock(mutex_);
    TaskRow* t = find(task_id);
    if (!t || t->state != TaskState::Running) return HeartbeatStatus::TaskNotRunning;
    if (t->worker_id != worker_id) return HeartbeatStatus::NotOwner;
    if (stage < t->current_stage) return HeartbeatStatus::StageRegression;
    t->current_stage = stage;
    t->last_heartbeat = now;
    return HeartbeatStatus::Ok;
}

bool MemoryStore::finish_task(const std::string& task_id, const std::string& worker_id, bool success,
                              const std::string& error, std::int64_t now) {
    std::lock_guard lock(mutex_);
    TaskRow* t = find(task_id);
    if (!t || t->state != TaskState::Running || t->worker_id != worker_id) return false;
    t->state = success ? TaskState::Completed : TaskState::Failed;
    t->finished_at = now;
    t->error = error;
    return true;
}

std::vector<SweepAction> MemoryStore::sweep(std::int64_t now, std::int64_t timeout_secs, int max_attempts) {
    std::lock_guard lock(mutex_);
    std::vector<SweepAction> actions;
    for (auto& t : tasks_) {
        if (t.state != TaskState::Running) continue;
        if (now - t.last_heartbeat <= timeout_secs) continue;
        if (t.attempt < max_attempts) {
            t.state = TaskState::Queued;
            t.attempt += 1;
            t.worker_id.clear();
            t.current_stage = 0;
            actions.push_back({t.id, true});
        } else {
            t.state = TaskState::Failed;
            t.finished_at = now;
            t.error = "heartbeat timeout after attempt " + std::to_string(t.attempt);
            actions.push_back({t.id, false});
        }
    }
    return actions;
}

PersistResult MemoryStore::persist(const StoredRecord& record) {
    std::lock_guard lock(mutex_);
    for (const auto& r : records_) {
        if (r.kind == record.kind && r.content_hash == record.content_hash) {
            return PersistResult::Deduplicated;
        }
    }
    records_.push_back(record);
    return PersistResult::Stored;
}

long MemoryStore::record_count(RecordKind kind) {
    std::lock_guard lock(mutex_);
    return std::count_if(records_.begin(), records_.end(),
                         [&](const StoredRecord& r) { return r.kind == kind; });
}

std::optional<nlohmann::json> MemoryStore::latest_record(RecordKind kind, const std::string& task_id) {
    std::lock_guard lock(mutex_);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
        if (it->kind == kind && it->task_id == task_id) return it->payload;
    }
    return std::nullopt;
}

void MemoryStore::save_decision_log(const std::string& task_id, const nlohmann::json& log) {
    std::lock_guard lock(mutex_);
    logs_[task_id] = log;
}

std::optional<nlohmann::json> MemoryStore::load_decision_log(const std::string& task_id) {
    std::lock_guard lock(mutex_);
    auto it = logs_.find(task_id);
    if (it == logs_.end()) return std::nullopt;
    return it->second;
}

void MemoryStore::record_progress(const std::string& task_id, int stage, std::int64_t) {
    std::lock_guard lock(mutex_);
    progress_.emplace_back(task_id, stage);
}

std::vector<int> MemoryStore::progress_stages(const std::string& task_id) {
    std::lock_guard lock(mutex_);
    std::vector<int> out;
    for (const auto& [id, stage] : progress_) {
        if (id == task_id) out.push_back(stage);
    }
    return out;
}

std::unique_ptr<Store> open_store(const std::string& path) {
    if (path == ":memory:" || path.empty()) return std::make_unique<MemoryStore>();
    return std::make_unique<SqliteStore>(path);
}

}  // namespace hdr
