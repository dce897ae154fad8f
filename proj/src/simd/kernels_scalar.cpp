#include <algorithm>
#include <cmath>

#include "ibt/simd/kernels.hpp"

namespace ibt::simd {

void distances_scalar(std::span<const double> query, const PackedRows& rows, Distance kind, std::span<double> out) {
    constexpr auto L = PackedRows::kLanes;
    const std::size_t d = rows.features();
    for (std::size_t b = 0; b < rows.blocks(); ++b) {
        const double* block = rows.block(b);
        double acc[L] = {0.0, 0.0, 0.0, 0.0};
        if (kind == Distance::manhattan) {
            for (std::size_t f = 0; f < d; ++f) {
                for (std::size_t l = 0; l < L; ++l) {
                    acc[l] = acc[l] + std::fabs(query[f] - block[f * L + l]);
                }
            }
        } else {
            for (std::size_t f = 0; f < d; ++f) {
                for (std::size_t l = 0; l < L; ++l) {
                    const double diff = query[f] - block[f * L + l];
                    acc[l] = acc[l] + diff * diff;
                }
            }
        }
        const std::size_t live = std::min(L, rows.rows() - b * L);
        for (std::size_t l = 0; l < live; ++l) {
            out[b * L + l] = kind == Distance::euclidean ? std::sqrt(acc[l]) : acc[l];
        }
    }
}

}  // namespace ibt::simd
