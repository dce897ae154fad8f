#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "ibt/distance.hpp"

namespace ibt::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
bool supported(Isa isa);

/// Best supported ISA unless overridden by force() or IBT_SIMD=scalar|avx2.
Isa active();

/// Pins the kernel choice; nullopt restores automatic selection.
void force(std::optional<Isa> isa);

// Both kernels perform the same per-row operation sequence (subtract,
// multiply, add; no fused multiply-add), so their outputs are bit-identical.
void distances_scalar(std::span<const double> query, const PackedRows& rows, Distance kind, std::span<double> out);
void distances_avx2(std::span<const double> query, const PackedRows& rows, Distance kind, std::span<double> out);

void distances(Isa isa, std::span<const double> query, const PackedRows& rows, Distance kind,
               std::span<double> out);

}  // namespace ibt::simd
