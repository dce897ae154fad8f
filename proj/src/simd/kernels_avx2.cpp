// Built with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "ibt/simd/kernels.hpp"

namespace ibt::simd {

void distances_avx2(std::span<const double> query, const PackedRows& rows, Distance kind, std::span<double> out) {
    constexpr auto L = PackedRows::kLanes;
    const std::size_t d = rows.features();
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (std::size_t b = 0; b < rows.blocks(); ++b) {
        const double* block = rows.block(b);
        __m256d acc = _mm256_setzero_pd();
        if (kind == Distance::manhattan) {
            for (std::size_t f = 0; f < d; ++f) {
                const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(query[f]), _mm256_loadu_pd(block + f * L));
                acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, diff));
            }
        } else {
            for (std::size_t f = 0; f < d; ++f) {
                const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(query[f]), _mm256_loadu_pd(block + f * L));
                acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
            }
            if (kind == Distance::euclidean) {
                acc = _mm256_sqrt_pd(acc);
            }
        }
        const std::size_t live = std::min(L, rows.rows() - b * L);
        if (live == L) {
            _mm256_storeu_pd(out.data() + b * L, acc);
        } else {
            alignas(32) double tail[L];
            _mm256_store_pd(tail, acc);
            for (std::size_t l = 0; l < live; ++l) {
                out[b * L + l] = tail[l];
            }
        }
    }
}

}  // namespace ibt::simd
