#include "symbridge/common/rng.hpp"

namespace symbridge {

Rng make_stream(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      0x5eedu};
    return Rng(seq);
}

}  // namespace symbridge
