#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace coag {

/// Small worker pool for indexed jobs.  Callers split work into a fixed number
/// of chunks independent of the thread count and merge per-chunk results in
/// chunk order, so reductions stay bit-deterministic however many workers run.
class ThreadPool {
public:
    explicit ThreadPool(int threads);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int threads() const { return nthreads_; }

    /// Run job(0..njobs-1), returning when all jobs completed.  The calling
    /// thread participates.
    void run(int njobs, const std::function<void(int)>& job);

    /// Process-wide pool; size bounded by the COAG_THREADS environment
    /// variable (default: hardware concurrency).
    static ThreadPool& global();

private:
    void worker_loop();
    void drain();

    int nthreads_;
    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
    int draining_ = 0;  // workers currently inside drain(), guarded by mutex_
    std::atomic<const std::function<void(int)>*> job_{nullptr};
    std::atomic<int> njobs_{0};
    std::atomic<int> next_{0};
    std::atomic<int> completed_{0};
};

}  // namespace coag
