#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace dcrp {

/// Worker count: CRP_THREADS wins over `requested`; 0 means one per hardware thread.
unsigned resolve_threads(unsigned requested);

/// Evaluates f(replica) for replica in [0, count) on a small pool and returns the
/// results indexed by replica, so the merge order never depends on scheduling.
template <class F>
auto map_replicas(std::uint64_t count, unsigned threads, F&& f) {
    using R = std::invoke_result_t<F&, std::uint64_t>;
    std::vector<R> out(count);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
    if (threads == 1) {
        for (std::uint64_t i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace dcrp
