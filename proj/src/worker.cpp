#include "hdr/worker.hpp"

#include <chrono>

namespace hdr {

bool run_one_task(TaskQueue& queue, Orchestrator& orchestrator, Clock& clock, const std::string& worker_id) {
    auto task = queue.claim(worker_id);
    if (!task) return false;
    (void)clock;
    auto sink = [&](int stage) { queue.heartbeat(task->id, worker_id, stage); };
    try {
        orchestrator.resume(*task, sink);
        queue.finish(task->id, worker_id, true);
    } catch (const Error& e) {
        queue.finish(task->id, worker_id, false, e.what());
    }
    return true;
}

WorkerPool::WorkerPool(TaskQueue& queue, Orchestrator& orchestrator, Clock& clock, WorkerPoolConfig config)
    : queue_(queue), orchestrator_(orchestrator), clock_(clock), config_(config) {}

WorkerPool::~WorkerPool() { stop(); }

void WorkerPool::start() {
    stopping_ = false;
    for (int i = 0; i < config_.concurrency; ++i) {
        threads_.emplace_back([this, i] {
            std::string worker_id = "worker-" + std::to_string(i + 1);
            while (!stopping_) {
                bool worked = run_one_task(queue_, orchestrator_, clock_, worker_id);
                if (!worked) {
                    if (config_.drain) return;
                    std::this_thread::sleep_for(std::chrono::milliseconds(config_.poll_ms));
                }
            }
        });
    }
    monitor_ = std::thread([this] {
        while (!stopping_) {
            queue_.sweep();
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.poll_ms * 5));
        }
    });
}

void WorkerPool::stop() {
    stopping_ = true;
    for (auto& t : threads_) {
        if (t.joinable()) t.join();
    }
    threads_.clear();
    if (monitor_.joinable()) monitor_.join();
}

void WorkerPool::wait() {
    for (auto& t : threads_) {
        if (t.joinable()) t.join();
    }
    threads_.clear();
    stopping_ = true;
    if (monitor_.joinable()) monitor_.join();
}

}  // namespace hdr
