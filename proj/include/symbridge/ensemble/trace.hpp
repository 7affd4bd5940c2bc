#pragma once

#include <cstddef>
#include <vector>

#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/linalg/matrix.hpp"

namespace symbridge {

// log h_0 .. log h_{N_max} for the recursion
//   h_0 = 1,  h_N = (1/N) sum_{l=1}^{N} Tr(T^l) h_{N-l},
// i.e. the symmetrized trace (1/N!) sum_sigma prod_cycles Tr(T^{|c|}).
// T is the kernel already weighted by the start measure (K h^d for Lebesgue).
std::vector<double> log_sym_traces(const linalg::Matrix& T, std::size_t N_max);

double log_sym_trace_exact(const FKKernel& K, std::size_t N);
double sym_trace_exact(const FKKernel& K, std::size_t N);
double sym_trace_exact(const linalg::Matrix& T, std::size_t N);

// -(1/N) log h_N for N = 1..N_max.
std::vector<double> free_energy_curve(const FKKernel& K, std::size_t N_max);
std::vector<double> free_energy_curve(const linalg::Matrix& T, std::size_t N_max);

}  // namespace symbridge
