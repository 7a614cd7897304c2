#pragma once
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdr/util.hpp"

namespace hdr {

enum class TaskState { Queued, Running, Completed, Failed };
std::string_view task_state_name(TaskState s);
std::optional<TaskState> task_state_from_name(std::string_view name);

struct TaskRow {
    std::string id;
    std::string query;
    TaskState state = TaskState::Queued;
    int priority = 0;
    int current_stage = 0;
    std::string worker_id;
    std::int64_t last_heartbeat = 0;
    int attempt = 1;
    std::int64_t created_at = 0;
    std::int64_t started_at = 0;
    std::int64_t finished_at = 0;
    std::string error;
};

enum class RecordKind { Report, Fact, SearchResult, Hypothesis, GapLog };
std::string_view record_kind_name(RecordKind k);

struct StoredRecord {
    RecordKind kind = RecordKind::Fact;
    std::string content_hash;  // MD5 hex of normalized content
    nlohmann::json payload;
    std::string task_id;
    std::int64_t stored_at = 0;
};

enum class PersistResult { Stored, Deduplicated };
enum class HeartbeatStatus { Ok, NotOwner, TaskNotRunning, StageRegression };

struct SweepAction {
    std::string task_id;
    bool requeued = false;  // false = failed permanently
};

// Storage contract shared by the in-memory and SQLite backends. All
// operations are atomic with respect to each other; claim_next hands a
// queued task to exactly one caller.
class Store {
public:
    virtual ~Store() = default;

    virtual std::string create_task(const std::string& query, int priority, std::int64_t now) = 0;
    virtual std::optional<TaskRow> get_task(const std::string& id) = 0;
    virtual std::vector<TaskRow> list_tasks() = 0;
    // Claim order: priority desc, then enqueue time asc, then id asc.
    virtual std::optional<TaskRow> claim_next(const std::string& worker_id, std::int64_t now) = 0;
    virtual HeartbeatStatus heartbeat(const std::string& task_id, const std::string& worker_id, int stage,
                                      std::int64_t now) = 0;
    virtual bool finish_task(const std::string& task_id, const std::string& worker_id, bool success,
                             const std::string& error, std::int64_t now) = 0;
    virtual std::vector<SweepAction> sweep(std::int64_t now, std::int64_t timeout_secs, int max_attempts) = 0;

    virtual PersistResult persist(const StoredRecord& record) = 0;
    virtual long record_count(RecordKind kind) = 0;
    virtual std::optional<nlohmann::json> latest_record(RecordKind kind, const std::string& task_id) = 0;

    virtual void save_decision_log(const std::string& task_id, const nlohmann::json& log) = 0;
    virtual std::optional<nlohmann::json> load_decision_log(const std::string& task_id) = 0;

    virtual void record_progress(const std::string& task_id, int stage, std::int64_t now) = 0;
    virtual std::vector<int> progress_stages(const std::string& task_id) = 0;
};

class MemoryStore final : public Store {
public:
    std::string create_task(const std::string& query, int priority, std::int64_t now) override;
    std::optional<TaskRow> get_task(const std::string& id) override;
    std::vector<TaskRow> list_tasks() override;
    std::optional<TaskRow> claim_next(const std::string& worker_id, std::int64_t now) override;
    HeartbeatStatus heartbeat(const std::string& task_id, const std::string& worker_id, int stage,
                              std::int64_t now) override;
    bool finish_task(const std::string& task_id, const std::string& worker_id, bool success,
                     const std::string& error, std::int64_t now) override;
    std::vector<SweepAction> sweep(std::int64_t now, std::int64_t timeout_secs, int max_attempts) override;
    PersistResult persist(const StoredRecord& record) override;
    long record_count(RecordKind kind) override;
    std::optional<nlohmann::json> latest_record(RecordKind kind, const std::string& task_id) override;
    void save_decision_log(const std::string& task_id, const nlohmann::json& log) override;
    std::optional<nlohmann::json> load_decision_log(const std::string& task_id) override;
    void record_progress(const std::string& task_id, int stage, std::int64_t now) override;
    std::vector<int> progress_stages(const std::string& task_id) override;

private:
    TaskRow* find(const std::string& id);
    std::mutex mutex_;
    std::vector<TaskRow> tasks_;
    std::vector<StoredRecord> records_;
    std::map<std::string, nlohmann::json> logs_;
    std::vector<std::pair<std::string, int>> progress_;
    long next_id_ = 0;
};

// SQLite-backed store (WAL journaling). Handles are process-internal; a
// mutex serializes statements on the shared connection.
class SqliteStore final : public Store {
public:
    explicit SqliteStore(const std::string& path);
    ~SqliteStore() override;
    SqliteStore(const SqliteStore&) = delete;
    SqliteStore& operator=(const SqliteStore&) = delete;

    std::string create_task(const std::string& query, int priority, std::int64_t now) override;
    std::optional<TaskRow> get_task(const std::string& id) override;
    std::vector<TaskRow> list_tasks() override;
    std::optional<TaskRow> claim_next(const std::string& worker_id, std::int64_t now) override;
    HeartbeatStatus heartbeat(const std::string& task_id, const std::string& worker_id, int stage,
                              std::int64_t now) override;
    bool finish_task(const std::string& task_id, const std::string& worker_id, bool success,
                     const std::string& error, std::int64_t now) override;
    std::vector<SweepAction> sweep(std::int64_t now, std::int64_t timeout_secs, int max_attempts) override;
    PersistResult persist(const StoredRecord& record) override;
    long record_count(RecordKind kind) override;
    std::optional<nlohmann::json> latest_record(RecordKind kind, const std::string& task_id) override;
    void save_decision_log(const std::string& task_id, const nlohmann::json& log) override;
    std::optional<nlohmann::json> load_decision_log(const std::string& task_id) override;
    void record_progress(const std::string& task_id, int stage, std::int64_t now) override;
    std::vector<int> progress_stages(const std::string& task_id) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Store> open_store(const std::string& path);  // ":memory:" -> MemoryStore

}  // namespace hdr
