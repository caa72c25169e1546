/*
 * Copyright 2026 The bisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BISIM_WORKER_POOL_HPP
#define BISIM_WORKER_POOL_HPP

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bisim {

/// Fixed set of worker threads running one indexed loop at a time.
///
/// parallel_for returns only after every index has been processed, so each
/// call is a full barrier: writes made inside the loop are visible to the
/// caller afterwards. The calling thread works as worker 0. With one thread
/// no threads are spawned and the loop runs inline.
class WorkerPool {
public:
    explicit WorkerPool(unsigned threads);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned size() const noexcept { return threads_; }

    /// Calls body(index, worker) for every index in [0, n). Indices are
    /// claimed dynamically in chunks of `grain`. The first exception thrown
    /// by any body is rethrown here after the barrier.
    void parallel_for(std::size_t n, const std::function<void(std::size_t, unsigned)>& body,
                      std::size_t grain = 1);

private:
    void worker_loop(unsigned worker);
    void drain(unsigned worker);

    unsigned threads_;
    std::vector<std::thread> workers_;

    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    std::uint64_t generation_ = 0;
    unsigned running_ = 0;
    bool stop_ = false;

    const std::function<void(std::size_t, unsigned)>* body_ = nullptr;
    std::size_t count_ = 0;
    std::size_t grain_ = 1;
    std::atomic<std::size_t> next_{0};
    std::exception_ptr error_;
};

} // namespace bisim

#endif // BISIM_WORKER_POOL_HPP
