#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "symbridge/simd/kernels.hpp"

namespace symbridge::simd {
namespace {

Isa best_available() noexcept {
    if (detail::avx2_table() != nullptr) return Isa::avx2;
    if (detail::neon_table() != nullptr) return Isa::neon;
    return Isa::scalar;
}

Isa initial_isa() noexcept {
    const char* env = std::getenv("SYMBRIDGE_SIMD");
    if (env == nullptr) return best_available();
    const std::string requested(env);
    if (requested == "scalar") return Isa::scalar;
    if (requested == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    if (requested == "neon" && isa_available(Isa::neon)) return Isa::neon;
    return best_available();
}

std::atomic<const KernelTable*>& active_table() noexcept {
    static std::atomic<const KernelTable*> table{&kernels(initial_isa())};
    return table;
}

std::atomic<Isa>& active_tag() noexcept {
    static std::atomic<Isa> tag{initial_isa()};
    return tag;
}

}  // namespace

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return detail::avx2_table() != nullptr;
        case Isa::neon: return detail::neon_table() != nullptr;
    }
    return false;
}

Isa active_isa() noexcept { return active_tag().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    const KernelTable& table = kernels(isa);
    active_table().store(&table, std::memory_order_relaxed);
    active_tag().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable& kernels() noexcept { return *active_table().load(std::memory_order_relaxed); }

const KernelTable& kernels(Isa isa) {
    switch (isa) {
        case Isa::scalar: return detail::scalar_table();
        case Isa::avx2:
            if (const KernelTable* t = detail::avx2_table()) return *t;
            break;
        case Isa::neon:
            if (const KernelTable* t = detail::neon_table()) return *t;
            break;
    }
    throw std::invalid_argument("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this host");
}

}  // namespace symbridge::simd
