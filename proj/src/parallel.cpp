#include "kakeya/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace kakeya {

namespace {
std::atomic<int> g_workers{1};
}

void set_workers(int n) { g_workers = std::max(1, n); }

int workers() { return g_workers; }

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0 || chunk == 0) return;
    std::size_t count = (n + chunk - 1) / chunk;
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers()), count);
    auto run = [&](std::size_t c) { body(c, c * chunk, std::min(n, (c + 1) * chunk)); };
    if (nthreads <= 1) {
        for (std::size_t c = 0; c < count; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= count) return;
            try {
                run(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace kakeya
