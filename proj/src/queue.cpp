#include "hdr/queue.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hdr {

TaskQueue::TaskQueue(Store& store, Clock& clock, QueueConfig config)
    : store_(store), clock_(clock), config_(config) {}

std::string TaskQueue::enqueue(const std::string& query, int priority) {
    return store_.create_task(query, priority, clock_.now().time_since_epoch().count());
}

std::optional<TaskRow> TaskQueue::claim(const std::string& worker_id) {
    return store_.claim_next(worker_id, clock_.now().time_since_epoch().count());
}

HeartbeatStatus TaskQueue::heartbeat(const std::string& task_id, const std::string& worker_id, int stage) {
    return store_.heartbeat(task_id, worker_id, stage, clock_.now().time_since_epoch().count());
}

bool TaskQueue::finish(const std::string& task_id, const std::string& worker_id, bool success,
                       const std::string& error) {
    return store_.finish_task(task_id, worker_id, success, error, clock_.now().time_since_epoch().count());
}

std::vector<SweepAction> TaskQueue::sweep() {
    return store_.sweep(clock_.now().time_since_epoch().count(), config_.heartbeat_timeout_secs,
                        config_.max_attempts);
}

PersistResult TaskQueue::persist(StoredRecord record) {
    record.stored_at = clock_.now().time_since_epoch().count();
    return store_.persist(record);
}

void validate_mixer_config(const MixerConfig& config) {
    double sum = 0.0;
    for (const auto& [category, ratio] : config.ratios) {
        if (ratio < 0.0) throw Error("mixer ratio for " + category + " is negative");
        sum += ratio;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw Error("mixer ratios must sum to 1");
}

std::vector<MixItem> mix(std::vector<MixItem> items, const MixerConfig& config, int n) {
    validate_mixer_config(config);
    if (n <= 0) return {};

    std::map<std::string, std::vector<MixItem>> buckets;
    for (auto& item : items) buckets[item.category].push_back(std::move(item));
    for (auto& [category, bucket] : buckets) {
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const MixItem& a, const MixItem& b) { return a.recency > b.recency; });
    }

    std::map<std::string, int> taken;
    int remaining = n;
    // Largest-remainder allocation of the remaining slots among categories
    // that still have supply, repeated until slots or supply run out.
    while (remaining > 0) {
        struct Active {
            const std::string* category;
            double ratio;
            int available;
        };
        std::vector<Active> active;
        double ratio_sum = 0.0;
        for (const auto& [category, ratio] : config.ratios) {
            auto it = buckets.find(category);
            int supply = it == buckets.end() ? 0 : static_cast<int>(it->second.size());
            int available = supply - taken[category];
            if (available > 0 && ratio > 0.0) {
                active.push_back({&category, ratio, available});
                ratio_sum += ratio;
            }
        }
        if (active.empty() || ratio_sum <= 0.0) break;

        struct Share {
            std::size_t idx;
            int base;
            double frac;
        };
        std::vector<Share> shares;
        int allocated = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            double ideal = active[i].ratio / ratio_sum * remaining;
            int base = static_cast<int>(ideal);
            shares.push_back({i, base, ideal - base});
            allocated += base;
        }
        std::stable_sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
            return a.frac > b.frac;
        });
        for (auto& s : shares) {
            if (allocated >= remaining) break;
            ++s.base;
            ++allocated;
        }

        int consumed = 0;
        for (const auto& s : shares) {
            int take = std::min(s.base, active[s.idx].available);
            taken[*active[s.idx].category] += take;
            consumed += take;
        }
        if (consumed == 0) break;
        remaining -= consumed;
    }

    std::vector<MixItem> out;
    for (const auto& [category, ratio] : config.ratios) {
        auto it = buckets.find(category);
        if (it == buckets.end()) continue;
        int count = taken[category];
        for (int i = 0; i < count; ++i) out.push_back(std::move(it->second[static_cast<std::size_t>(i)]));
    }
    return out;
}

}  // namespace hdr
