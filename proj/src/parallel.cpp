#include "incred/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace incred {

unsigned worker_count() {
    if (const char* env = std::getenv("INCRED_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    // One slot per worker; the error reported is the one at the lowest
    // index so that failures are as reproducible as successes.
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, count);
    std::atomic<std::size_t> stop_before{count};
    const std::size_t chunk = (count + workers - 1) / workers;

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, w, begin, end] {
            std::size_t i = begin;
            try {
                for (; i < end && i < stop_before.load(std::memory_order_relaxed); ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                error_index[w] = i;
                std::size_t cur = stop_before.load();
                while (i < cur && !stop_before.compare_exchange_weak(cur, i)) {
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    std::size_t best = workers;
    for (std::size_t w = 0; w < workers; ++w) {
        if (errors[w] && (best == workers || error_index[w] < error_index[best])) best = w;
    }
    if (best < workers) std::rethrow_exception(errors[best]);
}

}  // namespace incred
