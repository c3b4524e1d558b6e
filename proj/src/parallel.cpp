#include "prodwalk/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace prodwalk {

unsigned resolve_workers(ExecPolicy policy) {
    if (policy.workers > 0) return policy.workers;
    if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, ExecPolicy policy, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(resolve_workers(policy), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace prodwalk
