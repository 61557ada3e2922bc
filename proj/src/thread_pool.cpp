#include "coagstat/thread_pool.hpp"

#include <algorithm>
#include <cstdlib>

namespace coag {

ThreadPool::ThreadPool(int threads) : nthreads_(std::max(1, threads)) {
    for (int i = 1; i < nthreads_; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lk(mutex_);
        stop_ = true;
        ++generation_;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
}

void ThreadPool::drain() {
    const auto* job = job_.load();
    if (!job) return;
    int n = njobs_.load();
    for (int i = next_.fetch_add(1); i < n; i = next_.fetch_add(1)) {
        (*job)(i);
        completed_.fetch_add(1);
    }
}

void ThreadPool::worker_loop() {
    std::uint64_t seen = 0;
    while (true) {
        {
            std::unique_lock lk(mutex_);
            wake_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            ++draining_;
        }
        drain();
        {
            std::lock_guard lk(mutex_);
            if (--draining_ == 0) done_.notify_all();
        }
    }
}

void ThreadPool::run(int njobs, const std::function<void(int)>& job) {
    if (njobs <= 0) return;
    if (nthreads_ == 1 || njobs == 1) {
        for (int i = 0; i < njobs; ++i) job(i);
        return;
    }
    {
        std::lock_guard lk(mutex_);
        completed_.store(0);
        njobs_.store(njobs);
        next_.store(0);
        job_.store(&job);
        ++generation_;
    }
    wake_.notify_all();
    drain();
    // wait until every job ran and no worker still holds the job pointer
    {
        std::unique_lock lk(mutex_);
        done_.wait(lk, [&] { return completed_.load() == njobs && draining_ == 0; });
        job_.store(nullptr);
    }
}

ThreadPool& ThreadPool::global() {
    static ThreadPool pool([] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("COAG_THREADS")) {
            int req = std::atoi(env);
            if (req >= 1) hw = std::min(hw, req);
        }
        return hw;
    }());
    return pool;
}

}  // namespace coag
