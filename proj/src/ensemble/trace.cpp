#include "symbridge/ensemble/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace symbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log Tr(T^l) for l = 1..L. Powers are renormalized by their largest entry
// after every product, so only the accumulated log scale grows.
std::vector<double> log_power_traces(const linalg::Matrix& T, std::size_t L) {
    if (!T.square()) throw std::invalid_argument("trace: matrix must be square");
    std::vector<double> out(L + 1, kNegInf);
    linalg::Matrix P = T;
    double log_scale = 0.0;
    for (std::size_t l = 1; l <= L; ++l) {
        if (l > 1) P = linalg::multiply(P, T);
        const double mx = P.max_abs();
        if (mx == 0.0) break;
        P *= 1.0 / mx;
        log_scale += std::log(mx);
        const double tr = P.trace();
        out[l] = tr > 0.0 ? log_scale + std::log(tr) : kNegInf;
    }
    return out;
}

double log_sum_exp(const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace

std::vector<double> log_sym_traces(const linalg::Matrix& T, std::size_t N_max) {
    const auto lt = log_power_traces(T, N_max);
    std::vector<double> log_h(N_max + 1, kNegInf);
    log_h[0] = 0.0;
    std::vector<double> terms;
    for (std::size_t N = 1; N <= N_max; ++N) {
        terms.clear();
        for (std::size_t l = 1; l <= N; ++l) terms.push_back(lt[l] + log_h[N - l]);
        log_h[N] = log_sum_exp(terms) - std::log(static_cast<double>(N));
    }
    return log_h;
}

double log_sym_trace_exact(const FKKernel& K, std::size_t N) {
    if (N < 1) throw std::invalid_argument("sym_trace_exact: N must be >= 1");
    return log_sym_traces(K.weighted(), N)[N];
}

double sym_trace_exact(const FKKernel& K, std::size_t N) { return std::exp(log_sym_trace_exact(K, N)); }

double sym_trace_exact(const linalg::Matrix& T, std::size_t N) {
    if (N < 1) throw std::invalid_argument("sym_trace_exact: N must be >= 1");
    return std::exp(log_sym_traces(T, N)[N]);
}

std::vector<double> free_energy_curve(const linalg::Matrix& T, std::size_t N_max) {
    if (N_max < 2) throw std::invalid_argument("free_energy_curve: N_max must be >= 2");
    const auto log_h = log_sym_traces(T, N_max);
    std::vector<double> curve(N_max);
    for (std::size_t N = 1; N <= N_max; ++N) curve[N - 1] = -log_h[N] / static_cast<double>(N);
    return curve;
}

std::vector<double> free_energy_curve(const FKKernel& K, std::size_t N_max) {
    return free_energy_curve(K.weighted(), N_max);
}

}  // namespace symbridge
