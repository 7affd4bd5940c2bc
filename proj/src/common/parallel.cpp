#include "symbridge/common/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace symbridge {

std::vector<ChunkRange> make_chunks(std::size_t n_items, std::size_t chunk_size) {
    if (chunk_size == 0) chunk_size = 1;
    std::vector<ChunkRange> chunks;
    for (std::size_t begin = 0, idx = 0; begin < n_items; begin += chunk_size, ++idx) {
        chunks.push_back({idx, begin, std::min(n_items, begin + chunk_size)});
    }
    return chunks;
}

void for_each_chunk(const std::vector<ChunkRange>& chunks, const Exec& exec,
                    const std::function<void(const ChunkRange&)>& body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(exec.threads, static_cast<unsigned>(chunks.size())));
    if (workers <= 1) {
        for (const auto& c : chunks) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < chunks.size(); i = next.fetch_add(1)) {
                try {
                    body(chunks[i]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace symbridge
