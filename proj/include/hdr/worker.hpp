#pragma once
#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "hdr/pipeline.hpp"
#include "hdr/queue.hpp"

namespace hdr {

// Claims one task, runs the pipeline with heartbeats wired to the queue,
// and finishes the task. Returns false when the queue was empty.
bool run_one_task(TaskQueue& queue, Orchestrator& orchestrator, Clock& clock, const std::string& worker_id);

struct WorkerPoolConfig {
    int concurrency = 1;
    int poll_ms = 200;
    bool drain = false;  // stop when the queue is empty
};

// Thread-per-worker pool plus a heartbeat-sweep monitor.
class WorkerPool {
public:
    WorkerPool(TaskQueue& queue, Orchestrator& orchestrator, Clock& clock, WorkerPoolConfig config);
    ~WorkerPool();

    void start();
    void stop();
    void wait();  // joins all workers (drain mode returns when idle)

private:
    TaskQueue& queue_;
    Orchestrator& orchestrator_;
    Clock& clock_;
    WorkerPoolConfig config_;
    std::atomic<bool> stopping_{false};
    std::vector<std::thread> threads_;
    std::thread monitor_;
};

}  // namespace hdr
