#include <sqlite3.h>

#include <mutex>

#include "hdr/store.hpp"

namespace hdr {

namespace {

const char* kSchema = R"(
CREATE TABLE IF NOT EXISTS tasks (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  query TEXT NOT NULL,
  state TEXT NOT NULL DEFAULT 'queued',
  priority INTEGER NOT NULL DEFAULT 0,
  current_stage INTEGER NOT NULL DEFAULT 0,
  worker_id TEXT NOT NULL DEFAULT '',
  last_heartbeat INTEGER NOT NULL DEFAULT 0,
  attempt INTEGER NOT NULL DEFAULT 1,
  created_at INTEGER NOT NULL DEFAULT 0,
  started_at INTEGER NOT NULL DEFAULT 0,
  finished_at INTEGER NOT NULL DEFAULT 0,
  error TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS records (
  kind TEXT NOT NULL,
  content_hash TEXT NOT NULL,
  payload TEXT NOT NULL,
  task_id TEXT NOT NULL DEFAULT '',
  stored_at INTEGER NOT NULL DEFAULT 0,
  PRIMARY KEY (kind, content_hash)
);
CREATE TABLE IF NOT EXISTS decision_logs (
  task_id TEXT PRIMARY KEY,
  log TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS progress (
  task_id TEXT NOT NULL,
  stage INTEGER NOT NULL,
  at INTEGER NOT NULL
);
)";

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
            throw Error(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;

    Statement& bind(int idx, const std::string& v) {
        sqlite3_bind_text(stmt_, idx, v.c_str(), -1, SQLITE_TRANSIENT);
        return *this;
    }
    Statement& bind(int idx, std::int64_t v) {
        sqlite3_bind_int64(stmt_, idx, v);
        return *this;
    }
    Statement& bind(int idx, int v) {
        sqlite3_bind_int(stmt_, idx, v);
        return *this;
    }
    bool step() {
        int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw Error(std::string("sqlite step failed: ") + sqlite3_errmsg(db_));
    }
    std::string column_text(int idx) {
        const unsigned char* t = sqlite3_column_text(stmt_, idx);
        return t ? reinterpret_cast<const char*>(t) : "";
    }
    std::int64_t column_int64(int idx) { return sqlite3_column_int64(stmt_, idx); }
    int column_int(int idx) { return sqlite3_column_int(stmt_, idx); }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

TaskRow row_from(Statement& s) {
    TaskRow t;
    t.id = "t" + std::to_string(s.column_int64(0));
    t.query = s.column_text(1);
    t.state = task_state_from_name(s.column_text(2)).value_or(TaskState::Queued);
    t.priority = s.column_int(3);
    t.current_stage = s.column_int(4);
    t.worker_id = s.column_text(5);
    t.last_heartbeat = s.column_int64(6);
    t.attempt = s.column_int(7);
    t.created_at = s.column_int64(8);
    t.started_at = s.column_int64(9);
    t.finished_at = s.column_int64(10);
    t.error = s.column_text(11);
    return t;
}

constexpr const char* kTaskColumns =
    "id, query, state, priority, current_stage, worker_id, last_heartbeat, attempt, created_at, "
    "started_at, finished_at, error";

// Task ids are exposed as "t<rowid>".
std::int64_t numeric_id(const std::string& id) {
    if (id.size() < 2 || id[0] != 't') return -1;
    try {
        return std::stoll(id.substr(1));
    } catch (...) {
        return -1;
    }
}

}  // namespace

struct SqliteStore::Impl {
    sqlite3* db = nullptr;
    std::mutex mutex;
};

SqliteStore::SqliteStore(const std::string& path) : impl_(std::make_unique<Impl>()) {
    if (sqlite3_open(path.c_str(), &impl_->db) != SQLITE_OK) {
        throw Error("cannot open store at " + path);
    }
    char* err = nullptr;
    sqlite3_exec(impl_->db, "PRAGMA journal_mode=WAL;", nullptr, nullptr, nullptr);
    sqlite3_exec(impl_->db, "PRAGMA busy_timeout=5000;", nullptr, nullptr, nullptr);
    if (sqlite3_exec(impl_->db, kSchema, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw Error("store schema setup failed: " + msg);
    }
}

SqliteStore::~SqliteStore() {
    if (impl_->db) sqlite3_close(impl_->db);
}

std::string SqliteStore::create_task(const std::string& query, int priority, std::int64_t now) {
    if (query.empty()) throw Error("task query must be non-empty");
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "INSERT INTO tasks (query, priority, created_at) VALUES (?, ?, ?)");
    s.bind(1, query).bind(2, priority).bind(3, now);
    s.step();
    return "t" + std::to_string(sqlite3_last_insert_rowid(impl_->db));
}

std::optional<TaskRow> SqliteStore::get_task(const std::string& id) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, ("SELECT " + std::string(kTaskColumns) + " FROM tasks WHERE id = ?").c_str());
    s.bind(1, numeric_id(id));
    if (!s.step()) return std::nullopt;
    return row_from(s);
}

std::vector<TaskRow> SqliteStore::list_tasks() {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, ("SELECT " + std::string(kTaskColumns) + " FROM tasks ORDER BY id").c_str());
    std::vector<TaskRow> out;
    while (s.step()) out.push_back(row_from(s));
    return out;
}

std::optional<TaskRow> SqliteStore::claim_next(const std::string& worker_id, std::int64_t now) {
    std::lock_guard lock(impl_->mutex);
    Statement pick(impl_->db, ("SELECT " + std::string(kTaskColumns) +
                               " FROM tasks WHERE state = 'queued' ORDER BY priority DESC, created_at ASC, "
                               "id ASC LIMIT 1")
                                  .c_str());
    if (!pick.step()) return std::nullopt;
    TaskRow t = row_from(pick);
    Statement upd(impl_->db,
                  "UPDATE tasks SET state = 'running', worker_id = ?, started_at = ?, last_heartbeat = ?, "
                  "current_stage = MAX(current_stage, 1) WHERE id = ? AND state = 'queued'");
    upd.bind(1, worker_id).bind(2, now).bind(3, now).bind(4, numeric_id(t.id));
    upd.step();
    if (sqlite3_changes(impl_->db) != 1) return std::nullopt;
    t.state = TaskState::Running;
    t.worker_id = worker_id;
    t.started_at = now;
    t.last_heartbeat = now;
    t.current_stage = std::max(t.current_stage, 1);
    return t;
}

HeartbeatStatus SqliteStore::heartbeat(const std::string& task_id, const std::string& worker_id, int stage,
                                       std::int64_t now) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "SELECT state, worker_id, current_stage FROM tasks WHERE id = ?");
    s.bind(1, numeric_id(task_id));
    if (!s.step()) return HeartbeatStatus::TaskNotRunning;
    if (s.column_text(0) != "running") return HeartbeatStatus::TaskNotRunning;
    if (s.column_text(1) != worker_id) return HeartbeatStatus::NotOwner;
    if (stage < s.column_int(2)) return HeartbeatStatus::StageRegression;
    Statement upd(impl_->db, "UPDATE tasks SET current_stage = ?, last_heartbeat = ? WHERE id = ?");
    upd.bind(1, stage).bind(2, now).bind(3, numeric_id(task_id));
    upd.step();
    return HeartbeatStatus::Ok;
}

bool SqliteStore::finish_task(const std::string& task_id, const std::string& worker_id, bool success,
                              const std::string& error, std::int64_t now) {
    std::lock_guard lock(impl_->mutex);
    Statement upd(impl_->db,
                  "UPDATE tasks SET state = ?, finished_at = ?, error = ? WHERE id = ? AND state = "
                  "'running' AND worker_id = ?");
    upd.bind(1, std::string(success ? "completed" : "failed"))
        .bind(2, now)
        .bind(3, error)
        .bind(4, numeric_id(task_id))
        .bind(5, worker_id);
    upd.step();
    return sqlite3_changes(impl_->db) == 1;
}

std::vector<SweepAction> SqliteStore::sweep(std::int64_t now, std::int64_t timeout_secs, int max_attempts) {
    std::lock_guard lock(impl_->mutex);
    std::vector<SweepAction> actions;
    Statement stale(impl_->db, "SELECT id, attempt FROM tasks WHERE state = 'running' AND ? - last_heartbeat > ?");
    stale.bind(1, now).bind(2, timeout_secs);
    std::vector<std::pair<std::int64_t, int>> rows;
    while (stale.step()) rows.emplace_back(stale.column_int64(0), stale.column_int(1));
    for (auto [id, attempt] : rows) {
        if (attempt < max_attempts) {
            Statement upd(impl_->db,
                          "UPDATE tasks SET state = 'queued', attempt = attempt + 1, worker_id = '', "
                          "current_stage = 0 WHERE id = ?");
            upd.bind(1, id);
            upd.step();
            actions.push_back({"t" + std::to_string(id), true});
        } else {
            Statement upd(impl_->db,
                          "UPDATE tasks SET state = 'failed', finished_at = ?, error = ? WHERE id = ?");
            upd.bind(1, now).bind(2, std::string("heartbeat timeout after attempt ") + std::to_string(attempt))
                .bind(3, id);
            upd.step();
            actions.push_back({"t" + std::to_string(id), false});
        }
    }
    return actions;
}

PersistResult SqliteStore::persist(const StoredRecord& record) {
    std::lock_guard lock(impl_->mutex);
    Statement ins(impl_->db,
                  "INSERT OR IGNORE INTO records (kind, content_hash, payload, task_id, stored_at) VALUES "
                  "(?, ?, ?, ?, ?)");
    ins.bind(1, std::string(record_kind_name(record.kind)))
        .bind(2, record.content_hash)
        .bind(3, record.payload.dump())
        .bind(4, record.task_id)
        .bind(5, record.stored_at);
    ins.step();
    return sqlite3_changes(impl_->db) == 1 ? PersistResult::Stored : PersistResult::Deduplicated;
}

long SqliteStore::record_count(RecordKind kind) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "SELECT COUNT(*) FROM records WHERE kind = ?");
    s.bind(1, std::string(record_kind_name(kind)));
    s.step();
    return static_cast<long>(s.column_int64(0));
}

std::optional<nlohmann::json> SqliteStore::latest_record(RecordKind kind, const std::string& task_id) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db,
                "SELECT payload FROM records WHERE kind = ? AND task_id = ? ORDER BY rowid DESC LIMIT 1");
    s.bind(1, std::string(record_kind_name(kind))).bind(2, task_id);
    if (!s.step()) return std::nullopt;
    auto doc = nlohmann::json::parse(s.column_text(0), nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
}

void SqliteStore::save_decision_log(const std::string& task_id, const nlohmann::json& log) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "INSERT OR REPLACE INTO decision_logs (task_id, log) VALUES (?, ?)");
    s.bind(1, task_id).bind(2, log.dump());
    s.step();
}

std::optional<nlohmann::json> SqliteStore::load_decision_log(const std::string& task_id) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "SELECT log FROM decision_logs WHERE task_id = ?");
    s.bind(1, task_id);
    if (!s.step()) return std::nullopt;
    auto doc = nlohmann::json::parse(s.column_text(0), nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
}

void SqliteStore::record_progress(const std::string& task_id, int stage, std::int64_t now) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "INSERT INTO progress (task_id, stage, at) VALUES (?, ?, ?)");
    s.bind(1, task_id).bind(2, stage).bind(3, now);
    s.step();
}

std::vector<int> SqliteStore::progress_stages(const std::string& task_id) {
    std::lock_guard lock(impl_->mutex);
    Statement s(impl_->db, "SELECT stage FROM progress WHERE task_id = ? ORDER BY rowid");
    s.bind(1, task_id);
    std::vector<int> out;
    while (s.step()) out.push_back(s.column_int(0));
    return out;
}

}  // namespace hdr
