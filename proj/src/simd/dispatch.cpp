#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ibt/simd/kernels.hpp"

namespace ibt::simd {

namespace {

constexpr int kAuto = -1;
std::atomic<int> forced{kAuto};

Isa detect() {
    if (const char* env = std::getenv("IBT_SIMD")) {
        const std::string_view want(env);
        if (want == "scalar") {
            return Isa::scalar;
        }
        if (want == "avx2" && supported(Isa::avx2)) {
            return Isa::avx2;
        }
    }
    return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool supported(Isa isa) {
    if (isa == Isa::scalar) {
        return true;
    }
#if defined(IBT_HAVE_AVX2)
    static const bool has_avx2 = __builtin_cpu_supports("avx2");
    return has_avx2;
#else
    return false;
#endif
}

Isa active() {
    const int f = forced.load(std::memory_order_relaxed);
    if (f != kAuto) {
        return static_cast<Isa>(f);
    }
    static const Isa detected = detect();
    return detected;
}

void force(std::optional<Isa> isa) {
    if (isa && !supported(*isa)) {
        throw std::runtime_error("ISA '" + std::string(to_string(*isa)) + "' is not supported on this CPU");
    }
    forced.store(isa ? static_cast<int>(*isa) : kAuto, std::memory_order_relaxed);
}

void distances(Isa isa, std::span<const double> query, const PackedRows& rows, Distance kind,
               std::span<double> out) {
    if (query.size() != rows.features()) {
        throw std::invalid_argument("query has " + std::to_string(query.size()) + " features, rows have " +
                                    std::to_string(rows.features()));
    }
    if (out.size() < rows.rows()) {
        throw std::invalid_argument("output span shorter than the row count");
    }
#if defined(IBT_HAVE_AVX2)
    if (isa == Isa::avx2) {
        distances_avx2(query, rows, kind, out);
        return;
    }
#endif
    distances_scalar(query, rows, kind, out);
}

}  // namespace ibt::simd
