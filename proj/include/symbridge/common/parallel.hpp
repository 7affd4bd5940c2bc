#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace symbridge {

// Work is split into fixed-size chunks; each chunk draws from its own seeded
// stream. Results depend on (seed, chunk_size) only, not on the thread count.
struct Exec {
    unsigned threads = 1;
    std::size_t chunk_size = 2048;
};

struct ChunkRange {
    std::size_t index;
    std::size_t begin;
    std::size_t end;
};

std::vector<ChunkRange> make_chunks(std::size_t n_items, std::size_t chunk_size);

// Runs body(chunk) for every chunk on up to exec.threads workers.
void for_each_chunk(const std::vector<ChunkRange>& chunks, const Exec& exec,
                    const std::function<void(const ChunkRange&)>& body);

// Map every chunk to a partial result, then fold the partials in chunk order.
template <typename Partial, typename MapFn, typename MergeFn>
Partial map_reduce_chunks(std::size_t n_items, const Exec& exec, MapFn&& map, MergeFn&& merge) {
    const auto chunks = make_chunks(n_items, exec.chunk_size);
    std::vector<Partial> partials(chunks.size());
    for_each_chunk(chunks, exec, [&](const ChunkRange& c) { partials[c.index] = map(c); });
    Partial total{};
    for (auto& p : partials) merge(total, p);
    return total;
}

}  // namespace symbridge
