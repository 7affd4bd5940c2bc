#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "symbridge/common/rng.hpp"

namespace symbridge {

// sigma[i] is the image of i; cycle_type lists cycle lengths in decreasing order.
struct PermutationDraw {
    std::vector<std::size_t> sigma;
    std::vector<std::size_t> cycle_type;
};

// Uniform permutation of {0..N-1} by Fisher-Yates.
PermutationDraw sample_permutation(std::size_t N, Rng& rng);

std::vector<std::vector<std::size_t>> cycles(std::span<const std::size_t> sigma);
std::vector<std::size_t> cycle_type(std::span<const std::size_t> sigma);

// All cycle types (integer partitions) of N, each in decreasing order.
std::vector<std::vector<std::size_t>> cycle_types(std::size_t N);
// Probability of a cycle type under the uniform measure on Sym_N: 1 / prod_k k^{m_k} m_k!.
double cycle_type_probability(std::span<const std::size_t> type);

}  // namespace symbridge
