#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kakeya {

// Process-wide worker pool size. Work is always split into the same fixed
// chunks and merged in chunk order, so results never depend on this value.
void set_workers(int n);
int workers();

// Calls body(chunk_index, begin, end) for consecutive chunks of [0, n).
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

template <class T, class F>
std::vector<T> map_chunks(std::size_t n, std::size_t chunk, F&& f) {
    std::size_t count = chunk == 0 ? 0 : (n + chunk - 1) / chunk;
    std::vector<T> out(count);
    parallel_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) { out[c] = f(b, e); });
    return out;
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
    parallel_chunks(n, 1, [&](std::size_t, std::size_t b, std::size_t) { f(b); });
}

}  // namespace kakeya
