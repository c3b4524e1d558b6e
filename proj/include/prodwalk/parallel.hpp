#pragma once

#include <cstddef>
#include <functional>

namespace prodwalk {

inline constexpr const char* kWorkersEnv = "PRODWALK_WORKERS";

// Worker count for data-parallel loops. 0 means: read PRODWALK_WORKERS, else
// hardware concurrency.
struct ExecPolicy {
    unsigned workers = 0;
};

[[nodiscard]] unsigned resolve_workers(ExecPolicy policy);

// Runs body(i) for i in [0, count) on up to `workers` threads. Callers write
// into per-index slots and reduce in index order afterwards, so the result is
// the same for any worker count.
void parallel_for(std::size_t count, ExecPolicy policy, const std::function<void(std::size_t)>& body);

} // namespace prodwalk
