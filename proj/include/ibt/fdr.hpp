#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ibt/classifier.hpp"

namespace ibt {

struct PValue {
    std::size_t id = 0;
    double p = 1.0;
};

struct BhResult {
    std::vector<PValue> sorted;  ///< by (p, id)
    std::size_t i_max = 0;       ///< 1-based; 0 when nothing is accepted
    std::vector<std::size_t> accepted;
};

/**
 * Benjamini-Hochberg step-up: i_max is the largest i with p_(i) <= i*alpha/u,
 * and ranks 1..i_max are accepted. alpha = 0 accepts nothing.
 */
BhResult bh_accept(std::span<const PValue> pvalues, double alpha, std::size_t u);

inline constexpr std::size_t kOutlier = std::numeric_limits<std::size_t>::max();

struct FdrResult {
    double alpha = 0.0;
    std::size_t u = 0;
    std::vector<BhResult> per_class;
    /// Per instance: accepted class with the smallest p, or kOutlier.
    std::vector<std::size_t> assigned;
    std::vector<std::size_t> outliers;
    /// Instances accepted by more than one class.
    std::size_t conflicts = 0;
};

/// Runs BH per class over all instances (ids are positions in `predictions`) and sets each outlier flag.
FdrResult classify_with_fdr(std::span<Prediction> predictions, double alpha);

}  // namespace ibt
