#ifndef SHUFFLEGRAD_PARALLEL_HPP
#define SHUFFLEGRAD_PARALLEL_HPP

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace shufflegrad {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each item must
// be independent and write only to its own slot; callers aggregate afterwards
// in index order, which keeps results identical for any thread count.
inline void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body) {
    if (count <= 0) return;
    if (threads < 1) threads = 1;
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::int64_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace shufflegrad

#endif
