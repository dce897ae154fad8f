#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibt/classifier.hpp"
#include "ibt/dataset.hpp"

namespace ibt {

enum class Method { ibt_u, ibt_u_k_d, ibt_u_k_s, tbc, idc, knn };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);
bool uses_k(Method m);
bool uses_test(Method m);

struct MethodSpec {
    Method method = Method::ibt_u;
    std::size_t k = 3;
    TestSpec test{};
    Distance distance = Distance::euclidean;

    /// e.g. "ibt-u", "ibt-u-k-d(k=3)", "knn(k=3)"; non-default engines append ",test=ks".
    std::string label() const;
    IbtConfig ibt_config() const;
};

struct CvReport {
    std::string dataset;
    MethodSpec method;
    std::uint64_t seed = 0;
    std::vector<double> repeat_accuracy;
    std::vector<bool> repeat_failed;
    double mean = 0.0;
    double std = 0.0;  ///< population form over repeats
    double wall_seconds = 0.0;

    bool failed() const;
};

/// Mean and population standard deviation.
std::pair<double, double> mean_std(std::span<const double> values);

/**
 * Repeated cross-validation. (repeat, fold) tasks are spread over `threads`
 * workers; each instance's correctness lands in a fixed slot, so results do
 * not depend on scheduling. A failed TBC fold zeroes its whole repeat.
 */
CvReport run_cv(const Dataset& ds, const FoldPlan& plan, const MethodSpec& method, unsigned threads = 1);

struct SummaryRow {
    std::string method;
    double average = 0.0;  ///< failed datasets count as 0
    double average_valid = 0.0;  ///< over datasets without a failed repeat
    std::size_t datasets = 0;
    std::size_t failed = 0;
};

/// Per-method macro average of dataset means, methods in first-seen order.
std::vector<SummaryRow> aggregate(std::span<const CvReport> reports);

struct OutlierReport {
    std::string dataset;
    std::string holdout;
    double alpha = 0.0;
    double train_fraction = 0.0;
    std::size_t test_size = 0;
    std::vector<std::size_t> outliers_per_repeat;
    std::vector<std::size_t> conflicts_per_repeat;
    /// Residual argmin labels of the held-out instances, per repeat (class names).
    std::vector<std::vector<std::string>> residual_labels;
    double mean_outliers = 0.0;
};

/**
 * Trains on a random per-class `train_fraction` of every class except
 * `holdout`, then scores all held-out instances with BH control at `alpha`.
 */
OutlierReport run_outlier_experiment(const Dataset& ds, std::string_view holdout, double train_fraction, double alpha,
                                     std::size_t repeats, std::uint64_t seed, const IbtConfig& cfg,
                                     unsigned threads = 1);

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_repeats_csv(std::span<const CvReport> reports, std::ostream& out);
void write_summary_csv(std::span<const CvReport> reports, std::ostream& out);
void write_reports_table(std::span<const CvReport> reports, std::ostream& out);
void write_aggregate_table(std::span<const SummaryRow> rows, std::ostream& out);
void write_aggregate_csv(std::span<const SummaryRow> rows, std::ostream& out);
void write_outlier_csv(const OutlierReport& report, std::ostream& out);
void write_outlier_table(const OutlierReport& report, std::ostream& out);

/// Command-line entry point; returns the process exit code (0 ok, 1 runtime failure, 2 usage).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ibt
