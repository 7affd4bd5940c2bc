#include "symbridge/ensemble/permutation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace symbridge {

PermutationDraw sample_permutation(std::size_t N, Rng& rng) {
    if (N < 1) throw std::invalid_argument("sample_permutation: N must be >= 1");
    PermutationDraw d;
    d.sigma.resize(N);
    std::iota(d.sigma.begin(), d.sigma.end(), std::size_t{0});
    for (std::size_t i = N - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(d.sigma[i], d.sigma[pick(rng)]);
    }
    d.cycle_type = cycle_type(d.sigma);
    return d;
}

std::vector<std::vector<std::size_t>> cycles(std::span<const std::size_t> sigma) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(sigma.size(), false);
    for (std::size_t s = 0; s < sigma.size(); ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> c;
        for (std::size_t i = s; !seen[i]; i = sigma[i]) {
            if (i >= sigma.size()) throw std::invalid_argument("not a permutation");
            seen[i] = true;
            c.push_back(i);
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::size_t> cycle_type(std::span<const std::size_t> sigma) {
    std::vector<std::size_t> type;
    for (const auto& c : cycles(sigma)) type.push_back(c.size());
    std::sort(type.begin(), type.end(), std::greater<>());
    return type;
}

std::vector<std::vector<std::size_t>> cycle_types(std::size_t N) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t remaining, std::size_t max_part) {
        if (remaining == 0) {
            out.push_back(current);
            return;
        }
        for (std::size_t k = std::min(remaining, max_part); k >= 1; --k) {
            current.push_back(k);
            rec(remaining - k, k);
            current.pop_back();
        }
    };
    rec(N, N);
    return out;
}

double cycle_type_probability(std::span<const std::size_t> type) {
    std::map<std::size_t, std::size_t> mult;
    for (std::size_t k : type) ++mult[k];
    double denom = 1.0;
    for (const auto& [k, m] : mult) {
        for (std::size_t r = 1; r <= m; ++r) denom *= static_cast<double>(k) * static_cast<double>(r);
    }
    return 1.0 / denom;
}

}  // namespace symbridge
