#pragma once

#include <mpad/random.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mpad::detail {

inline constexpr std::uint64_t trial_chunk = 4096;

inline unsigned worker_count() {
    if(const char* env = std::getenv("MPAD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if(v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `trials` independent trials in chunks of trial_chunk. Chunk c draws from
/// RandomSource::for_worker(master, c) where master is one draw from `rng`, so the result does
/// not depend on how many threads run. `body(source, count)` returns a partial result that is
/// merged with +=.
template <typename Result, typename Body>
Result run_trials(std::uint64_t trials, RandomSource& rng, Body body) {
    const std::uint64_t master = rng.next_u64();
    const std::uint64_t chunks = (trials + trial_chunk - 1) / trial_chunk;
    const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(chunks, 1)));

    std::vector<Result> partial(chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;

    auto work = [&] {
        try {
            for(std::uint64_t c = next++; c < chunks; c = next++) {
                RandomSource source = RandomSource::for_worker(master, c);
                const std::uint64_t count = std::min(trial_chunk, trials - c * trial_chunk);
                partial[c] = body(source, count);
            }
        } catch(...) {
            std::lock_guard lock(failure_lock);
            if(!failure) {
                failure = std::current_exception();
            }
            next = chunks;
        }
    };

    if(threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for(unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    if(failure) {
        std::rethrow_exception(failure);
    }
    Result total{};
    for(auto& p : partial) {
        total += p;
    }
    return total;
}

}  // namespace mpad::detail
