#pragma once
#include <string>
#include <vector>

#include "hdr/store.hpp"

namespace hdr {

struct QueueConfig {
    std::int64_t heartbeat_timeout_secs = 60;
    int max_attempts = 3;
    int heartbeat_period_secs = 10;
};

// Spec-facing facade over the store; the store is the synchronization
// authority, the queue adds the injected clock and retry policy.
class TaskQueue {
public:
    TaskQueue(Store& store, Clock& clock, QueueConfig config = {});

    std::string enqueue(const std::string& query, int priority);
    std::optional<TaskRow> claim(const std::string& worker_id);
    HeartbeatStatus heartbeat(const std::string& task_id, const std::string& worker_id, int stage);
    bool finish(const std::string& task_id, const std::string& worker_id, bool success,
                const std::string& error = "");
    std::vector<SweepAction> sweep();
    PersistResult persist(StoredRecord record);

    Store& store() { return store_; }
    const QueueConfig& config() const { return config_; }

private:
    Store& store_;
    Clock& clock_;
    QueueConfig config_;
};

struct MixerConfig {
    std::vector<std::pair<std::string, double>> ratios;  // category -> fraction, sums to 1
    double tolerance = 1.0;                              // allowed |count - ratio*n| per category
};

void validate_mixer_config(const MixerConfig& config);

struct MixItem {
    std::string category;
    std::int64_t recency = 0;  // larger = newer
    nlohmann::json payload;
};

// Selects up to n items honoring the ratio targets; shortfall in one
// category redistributes proportionally across the remaining ones.
// Within a category, newest first.
std::vector<MixItem> mix(std::vector<MixItem> items, const MixerConfig& config, int n);

}  // namespace hdr
