#pragma once

#include <cstdint>
#include <random>

namespace symbridge {

using Rng = std::mt19937_64;

// Independent stream for chunk `chunk` of a run seeded with `seed`. Streams
// depend only on (seed, chunk), never on the worker that consumes them.
Rng make_stream(std::uint64_t seed, std::uint64_t chunk);

inline double standard_normal(Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

}  // namespace symbridge
