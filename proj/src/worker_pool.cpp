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

#include "bisim/worker_pool.hpp"

#include <algorithm>

#include "bisim/lts.hpp"

namespace bisim {

WorkerPool::WorkerPool(unsigned threads) : threads_(threads)
{
    if (threads_ == 0)
        throw Error("worker pool needs at least one thread");
    workers_.reserve(threads_ - 1);
    for (unsigned w = 1; w < threads_; ++w)
        workers_.emplace_back([this, w] { worker_loop(w); });
}

WorkerPool::~WorkerPool()
{
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : workers_)
        t.join();
}

void WorkerPool::drain(unsigned worker)
{
    for (;;) {
        const auto begin = next_.fetch_add(grain_, std::memory_order_relaxed);
        if (begin >= count_)
            return;
        const auto end = std::min(count_, begin + grain_);
        try {
            for (auto i = begin; i < end; ++i)
                (*body_)(i, worker);
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_)
                error_ = std::current_exception();
            // Skip the remaining work.
            next_.store(count_, std::memory_order_relaxed);
            return;
        }
    }
}

void WorkerPool::worker_loop(unsigned worker)
{
    std::uint64_t seen = 0;
    for (;;) {
        {
            std::unique_lock lock(mutex_);
            start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_)
                return;
            seen = generation_;
        }
        drain(worker);
        {
            std::lock_guard lock(mutex_);
            if (--running_ == 0)
                done_cv_.notify_one();
        }
    }
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t, unsigned)>& body,
                              std::size_t grain)
{
    if (n == 0)
        return;
    if (threads_ == 1 || n <= grain) {
        for (std::size_t i = 0; i < n; ++i)
            body(i, 0);
        return;
    }
    {
        std::lock_guard lock(mutex_);
        body_ = &body;
        count_ = n;
        grain_ = std::max<std::size_t>(grain, 1);
        next_.store(0, std::memory_order_relaxed);
        error_ = nullptr;
        running_ = threads_ - 1;
        ++generation_;
    }
    start_cv_.notify_all();
    drain(0);
    std::exception_ptr error;
    {
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [&] { return running_ == 0; });
        body_ = nullptr;
        error = error_;
        error_ = nullptr;
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace bisim
