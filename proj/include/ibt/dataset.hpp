#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibt {

/// Raised by the loaders; the message carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when preprocessing or fold planning cannot produce a usable dataset.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMissingLabel = std::numeric_limits<std::size_t>::max();

/**
 * Feature matrix with class labels.
 *
 * Values are stored row-major. A freshly loaded dataset may hold NaN cells
 * (missing values) and categorical columns; `preprocess()` removes both, after
 * which every value lies in [0, 1].
 */
struct Dataset {
    std::string name;
    std::size_t n_features = 0;
    std::vector<double> values;
    std::vector<std::size_t> labels;  ///< kMissingLabel when the class cell was missing
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    /// Per feature: category levels in code order. Empty for numeric columns.
    std::vector<std::vector<std::string>> categories;

    std::size_t rows() const noexcept { return labels.size(); }
    std::size_t classes() const noexcept { return class_names.size(); }

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features, n_features};
    }

    std::vector<std::size_t> class_counts() const;
    bool has_missing() const;
};

enum class FileFormat { keel, csv };

/// Parses "keel", "keel-dat", "dat" or "csv".
FileFormat parse_file_format(std::string_view text);

/// Format implied by the file extension (.csv -> csv, everything else keel).
FileFormat format_from_extension(const std::filesystem::path& path);

/// Loads a raw (not yet preprocessed) dataset. Missing cells are kept as NaN.
Dataset load_dataset(const std::filesystem::path& path, FileFormat format);

Dataset parse_keel(std::istream& in, std::string name);
Dataset parse_csv(std::istream& in, std::string name);

/**
 * Drops rows with missing cells, integer-encodes categorical columns by order
 * of first appearance, and min-max scales every column to [0, 1] (constant
 * columns become 0). Classes are re-indexed by first appearance among the
 * retained rows.
 */
Dataset preprocess(const Dataset& raw);

/// Headerless CSV, label last, values in shortest round-trip form.
void write_csv(const Dataset& ds, std::ostream& out);

/// Stratified fold assignment for repeated k-fold cross-validation.
struct FoldPlan {
    std::uint64_t seed = 0;
    std::size_t repeats = 0;
    std::size_t folds = 0;
    std::size_t instances = 0;
    std::vector<std::uint32_t> assignment;  ///< repeats x instances
    std::vector<std::string> warnings;

    std::size_t fold_of(std::size_t repeat, std::size_t instance) const {
        return assignment[repeat * instances + instance];
    }
    std::span<const std::uint32_t> repeat_assignment(std::size_t repeat) const {
        return {assignment.data() + repeat * instances, instances};
    }
};

/// Every class is shuffled with the (seed, repeat) fold stream and dealt
/// round-robin into folds, continuing the rotation across classes.
FoldPlan make_folds(const Dataset& ds, std::size_t folds, std::size_t repeats, std::uint64_t seed);

}  // namespace ibt
