#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ibt {

enum class Distance { euclidean, squared_euclidean, manhattan };

std::string_view to_string(Distance kind);
Distance parse_distance(std::string_view text);

/// Throws std::invalid_argument on a dimension mismatch.
double distance(std::span<const double> a, std::span<const double> b, Distance kind);

/**
 * Rows stored in blocks of four, feature-interleaved: block b holds
 * x[4b+0][f], x[4b+1][f], x[4b+2][f], x[4b+3][f] for f = 0, 1, ...
 * The tail block is zero-padded.
 */
class PackedRows {
public:
    static constexpr std::size_t kLanes = 4;

    PackedRows() = default;
    PackedRows(std::span<const double> row_major, std::size_t rows, std::size_t features);

    /// Packs the given rows of a row-major matrix with `features` columns.
    static PackedRows gather(std::span<const double> row_major, std::size_t features,
                             std::span<const std::size_t> indices);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t features() const noexcept { return features_; }
    std::size_t blocks() const noexcept { return (rows_ + kLanes - 1) / kLanes; }
    const double* block(std::size_t b) const noexcept { return data_.data() + b * kLanes * features_; }

private:
    std::size_t rows_ = 0;
    std::size_t features_ = 0;
    std::vector<double> data_;
};

/// Distances from `query` to every packed row, written in row order. Uses the active ISA.
void distances(std::span<const double> query, const PackedRows& rows, Distance kind, std::span<double> out);

}  // namespace ibt
