#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ibt/dataset.hpp"
#include "ibt/distance.hpp"
#include "ibt/twosample.hpp"

namespace ibt {

/// Read-only row-major matrix view.
struct MatrixView {
    std::span<const double> values;
    std::size_t cols = 0;

    std::size_t rows() const noexcept { return cols == 0 ? 0 : values.size() / cols; }
    std::span<const double> row(std::size_t i) const { return values.subspan(i * cols, cols); }
};

/// Training fold: packed rows for the distance kernels plus a row-major copy.
class TrainingSet {
public:
    TrainingSet(std::vector<double> row_major, std::size_t features, std::vector<std::size_t> labels,
                std::size_t classes);

    static TrainingSet from_dataset(const Dataset& ds, std::span<const std::size_t> indices);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t features() const noexcept { return features_; }
    std::size_t classes() const noexcept { return counts_.size(); }
    std::span<const std::size_t> labels() const noexcept { return labels_; }
    std::span<const std::size_t> class_counts() const noexcept { return counts_; }
    MatrixView matrix() const noexcept { return {values_, features_}; }
    const PackedRows& packed() const noexcept { return packed_; }

    /// Distances from `query` to every training row, in training order.
    std::vector<double> distances_to(std::span<const double> query, Distance kind) const;

private:
    std::vector<double> values_;
    std::size_t features_;
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> counts_;
    PackedRows packed_;
};

enum class Variant { all, direct, separate };

std::string_view to_string(Variant v);

struct IbtConfig {
    Variant variant = Variant::all;
    std::size_t k = 3;
    TestSpec test{};
    Distance distance = Distance::euclidean;
    /// Rank every distance once and read off per-class WMW rank sums. Only
    /// affects variant=all with the WMW engine; off routes through run_test().
    bool rank_fast_path = true;
};

/// Realized neighbourhood sizes for one binary problem.
struct NeighborSelection {
    Variant variant = Variant::all;
    std::size_t k = 0;
    std::size_t k_plus = 0;
    std::size_t k_minus = 0;
};

struct DistanceSamples {
    std::vector<double> gx;
    std::vector<double> gy;
    NeighborSelection selection;
};

struct Prediction {
    std::vector<double> per_class_p;
    std::size_t label = 0;
    bool outlier = false;
};

/// Index of the smallest entry; ties go to the lowest index.
std::size_t argmin_first(std::span<const double> values);

/**
 * Indices of the k nearest rows. Every row tied with the k-th smallest
 * distance is included, so the result does not depend on row order.
 */
std::vector<std::size_t> nearest_with_ties(std::span<const double> dist, std::size_t k);

/// (k for the first class, k for the second) under the proportional rule:
/// the smaller class takes min(k, size), the larger the rounded-half-up ratio.
std::pair<std::size_t, std::size_t> separate_counts(std::size_t m, std::size_t n, std::size_t k);

DistanceSamples build_samples_all(std::span<const double> t, MatrixView pos, MatrixView neg, const IbtConfig& cfg);
DistanceSamples build_samples_direct(std::span<const double> t, MatrixView pos, MatrixView neg, std::size_t k,
                                     const IbtConfig& cfg);
DistanceSamples build_samples_separate(std::span<const double> t, MatrixView pos, MatrixView neg, std::size_t k,
                                       const IbtConfig& cfg);

/**
 * One-vs-rest p-values from precomputed distances. A class absent from
 * training gets p = 1. In the direct variant an empty target group gives
 * p = 1 and an empty rest group gives p = 0.
 */
Prediction predict_from_distances(std::span<const double> dist, std::span<const std::size_t> labels,
                                  std::span<const std::size_t> class_counts, const IbtConfig& cfg);

Prediction classify_multiclass(std::span<const double> t, const TrainingSet& train, const IbtConfig& cfg);

/// per_class_p = {p_negative, p_positive}; label 1 means positive.
Prediction classify_binary(std::span<const double> t, MatrixView pos, MatrixView neg, const IbtConfig& cfg);

}  // namespace ibt
