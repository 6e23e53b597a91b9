#include "snnae/common.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>

namespace snnae {

size_t uniform_index(Rng& rng, size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const uint64_t mask = std::bit_ceil(n) - 1;
    uint64_t x;
    do {
        x = rng() & mask;
    } while (x >= n);
    return static_cast<size_t>(x);
}

double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_range(Rng& rng, double lo, double hi) {
    return lo + uniform_real(rng) * (hi - lo);
}

unsigned effective_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SNNAE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn, unsigned threads) {
    if (n == 0) return;
    unsigned workers = effective_thread_count(threads);
    if (workers <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace snnae
