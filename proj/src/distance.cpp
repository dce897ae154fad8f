#include "ibt/distance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ibt/simd/kernels.hpp"

namespace ibt {

std::string_view to_string(Distance kind) {
    switch (kind) {
        case Distance::euclidean: return "euclidean";
        case Distance::squared_euclidean: return "squared-euclidean";
        case Distance::manhattan: return "manhattan";
    }
    return "?";
}

Distance parse_distance(std::string_view text) {
    for (auto kind : {Distance::euclidean, Distance::squared_euclidean, Distance::manhattan}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown distance '" + std::string(text) + "'");
}

double distance(std::span<const double> a, std::span<const double> b, Distance kind) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance between vectors of size " + std::to_string(a.size()) + " and " +
                                    std::to_string(b.size()));
    }
    double acc = 0.0;
    if (kind == Distance::manhattan) {
        for (std::size_t f = 0; f < a.size(); ++f) {
            acc = acc + std::fabs(a[f] - b[f]);
        }
        return acc;
    }
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double d = a[f] - b[f];
        acc = acc + d * d;
    }
    return kind == Distance::euclidean ? std::sqrt(acc) : acc;
}

PackedRows::PackedRows(std::span<const double> row_major, std::size_t rows, std::size_t features)
    : rows_(rows), features_(features), data_(blocks() * kLanes * features, 0.0) {
    if (row_major.size() != rows * features) {
        throw std::invalid_argument("row-major buffer does not match rows x features");
    }
    for (std::size_t i = 0; i < rows; ++i) {
        double* dst = data_.data() + (i / kLanes) * kLanes * features + i % kLanes;
        for (std::size_t f = 0; f < features; ++f) {
            dst[f * kLanes] = row_major[i * features + f];
        }
    }
}

PackedRows PackedRows::gather(std::span<const double> row_major, std::size_t features,
                              std::span<const std::size_t> indices) {
    std::vector<double> rows;
    rows.reserve(indices.size() * features);
    for (auto i : indices) {
        const auto row = row_major.subspan(i * features, features);
        rows.insert(rows.end(), row.begin(), row.end());
    }
    return PackedRows(rows, indices.size(), features);
}

void distances(std::span<const double> query, const PackedRows& rows, Distance kind, std::span<double> out) {
    simd::distances(simd::active(), query, rows, kind, out);
}

}  // namespace ibt
