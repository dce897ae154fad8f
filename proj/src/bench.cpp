#include "ibt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ibt/baselines.hpp"
#include "ibt/fdr.hpp"
#include "ibt/rng.hpp"

namespace ibt {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::ibt_u: return "ibt-u";
        case Method::ibt_u_k_d: return "ibt-u-k-d";
        case Method::ibt_u_k_s: return "ibt-u-k-s";
        case Method::tbc: return "tbc";
        case Method::idc: return "idc";
        case Method::knn: return "knn";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    for (auto m : {Method::ibt_u, Method::ibt_u_k_d, Method::ibt_u_k_s, Method::tbc, Method::idc, Method::knn}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    if (text == "k-nn") {
        return Method::knn;
    }
    throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

bool uses_k(Method m) { return m == Method::ibt_u_k_d || m == Method::ibt_u_k_s || m == Method::knn; }

bool uses_test(Method m) { return m == Method::ibt_u || m == Method::ibt_u_k_d || m == Method::ibt_u_k_s; }

std::string MethodSpec::label() const {
    std::vector<std::string> params;
    if (uses_k(method)) {
        params.push_back("k=" + std::to_string(k));
    }
    if (uses_test(method) && test.kind != TestKind::wmw) {
        params.push_back("test=" + std::string(to_string(test.kind)));
        if (test.kind == TestKind::precedence && test.order > 0) {
            params.push_back("r=" + std::to_string(test.order));
        }
    }
    if (method != Method::tbc && distance != Distance::euclidean) {
        params.push_back("distance=" + std::string(to_string(distance)));
    }
    std::string out(to_string(method));
    if (!params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < params.size(); ++i) {
            out += (i ? "," : "") + params[i];
        }
        out += ')';
    }
    return out;
}

IbtConfig MethodSpec::ibt_config() const {
    IbtConfig cfg;
    cfg.variant = method == Method::ibt_u_k_d ? Variant::direct
                  : method == Method::ibt_u_k_s ? Variant::separate
                                                : Variant::all;
    cfg.k = k;
    cfg.test = test;
    cfg.distance = distance;
    return cfg;
}

bool CvReport::failed() const { return std::find(repeat_failed.begin(), repeat_failed.end(), true) != repeat_failed.end(); }

std::pair<double, double> mean_std(std::span<const double> values) {
    if (values.empty()) {
        return {0.0, 0.0};
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

namespace {

/// Runs task(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <typename Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace

CvReport run_cv(const Dataset& ds, const FoldPlan& plan, const MethodSpec& method, unsigned threads) {
    if (plan.instances != ds.rows()) {
        throw std::invalid_argument("fold plan does not match dataset '" + ds.name + "'");
    }
    if (ds.rows() == 0) {
        throw DataError("dataset '" + ds.name + "' has no instances");
    }
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = ds.rows();
    std::vector<unsigned char> correct(plan.repeats * n, 0);
    std::vector<unsigned char> fold_failed(plan.repeats * plan.folds, 0);
    const auto cfg = method.ibt_config();

    parallel_for(plan.repeats * plan.folds, threads, [&](std::size_t task) {
        const std::size_t r = task / plan.folds;
        const std::size_t f = task % plan.folds;
        const auto assignment = plan.repeat_assignment(r);
        std::vector<std::size_t> train_idx;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < n; ++i) {
            (assignment[i] == f ? test_idx : train_idx).push_back(i);
        }
        if (test_idx.empty()) {
            return;
        }
        const auto train = TrainingSet::from_dataset(ds, train_idx);
        auto mark = [&](std::size_t i, std::size_t label) { correct[r * n + i] = label == ds.labels[i] ? 1 : 0; };
        switch (method.method) {
            case Method::ibt_u:
            case Method::ibt_u_k_d:
            case Method::ibt_u_k_s:
                for (auto i : test_idx) mark(i, classify_multiclass(ds.row(i), train, cfg).label);
                break;
            case Method::knn:
                for (auto i : test_idx) mark(i, knn_classify(ds.row(i), train, method.k, method.distance));
                break;
            case Method::idc: {
                const IdcModel model(train, method.distance);
                for (auto i : test_idx) mark(i, model.classify(ds.row(i)).label);
                break;
            }
            case Method::tbc: {
                const TbcModel model(train);
                for (auto i : test_idx) {
                    const auto res = model.classify(ds.row(i));
                    if (res.failed) {
                        fold_failed[task] = 1;
                        return;
                    }
                    mark(i, res.label);
                }
                break;
            }
        }
    });

    CvReport report;
    report.dataset = ds.name;
    report.method = method;
    report.seed = plan.seed;
    for (std::size_t r = 0; r < plan.repeats; ++r) {
        const bool failed = std::any_of(fold_failed.begin() + static_cast<std::ptrdiff_t>(r * plan.folds),
                                        fold_failed.begin() + static_cast<std::ptrdiff_t>((r + 1) * plan.folds),
                                        [](unsigned char v) { return v != 0; });
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += correct[r * n + i];
        report.repeat_failed.push_back(failed);
        report.repeat_accuracy.push_back(failed ? 0.0 : static_cast<double>(hits) / static_cast<double>(n));
    }
    std::tie(report.mean, report.std) = mean_std(report.repeat_accuracy);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<SummaryRow> aggregate(std::span<const CvReport> reports) {
    std::vector<SummaryRow> rows;
    std::vector<double> valid_sum;
    for (const auto& rep : reports) {
        const auto label = rep.method.label();
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) { return r.method == label; });
        if (it == rows.end()) {
            rows.push_back({label, 0.0, 0.0, 0, 0});
            valid_sum.push_back(0.0);
            it = rows.end() - 1;
        }
        const auto slot = static_cast<std::size_t>(it - rows.begin());
        it->average += rep.mean;
        ++it->datasets;
        if (rep.failed()) {
            ++it->failed;
        } else {
            valid_sum[slot] += rep.mean;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        row.average /= static_cast<double>(row.datasets);
        const auto valid = row.datasets - row.failed;
        row.average_valid = valid == 0 ? 0.0 : valid_sum[i] / static_cast<double>(valid);
    }
    return rows;
}

OutlierReport run_outlier_experiment(const Dataset& ds, std::string_view holdout, double train_fraction, double alpha,
                                     std::size_t repeats, std::uint64_t seed, const IbtConfig& cfg, unsigned threads) {
    const auto found = std::find(ds.class_names.begin(), ds.class_names.end(), holdout);
    if (found == ds.class_names.end()) {
        throw DataError("class '" + std::string(holdout) + "' not found in dataset '" + ds.name + "'");
    }
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw std::invalid_argument("train fraction must lie in (0, 1]");
    }
    if (ds.classes() < 3) {
        throw DataError("holding out a class needs at least three classes");
    }
    const auto held = static_cast<std::size_t>(found - ds.class_names.begin());

    std::vector<std::size_t> test_idx;
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::string> train_names;
    std::vector<std::size_t> remap(ds.classes(), 0);
    for (std::size_t c = 0; c < ds.classes(); ++c) {
        if (c != held) {
            remap[c] = train_names.size();
            train_names.push_back(ds.class_names[c]);
            members.emplace_back();
        }
    }
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.labels[i] == held) {
            test_idx.push_back(i);
        } else {
            members[remap[ds.labels[i]]].push_back(i);
        }
    }

    OutlierReport report;
    report.dataset = ds.name;
    report.holdout = std::string(holdout);
    report.alpha = alpha;
    report.train_fraction = train_fraction;
    report.test_size = test_idx.size();
    report.outliers_per_repeat.assign(repeats, 0);
    report.conflicts_per_repeat.assign(repeats, 0);
    report.residual_labels.assign(repeats, {});

    parallel_for(repeats, threads, [&](std::size_t r) {
        Rng rng(seed, Stream::outlier_training, r);
        std::vector<double> values;
        std::vector<std::size_t> labels;
        for (std::size_t c = 0; c < members.size(); ++c) {
            auto pool = members[c];
            rng.shuffle(std::span<std::size_t>(pool));
            const auto take = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(pool.size()) + 0.5)), 1,
                pool.size());
            for (std::size_t j = 0; j < take; ++j) {
                const auto row = ds.row(pool[j]);
                values.insert(values.end(), row.begin(), row.end());
                labels.push_back(c);
            }
        }
        const TrainingSet train(std::move(values), ds.n_features, std::move(labels), members.size());
        std::vector<Prediction> preds;
        preds.reserve(test_idx.size());
        for (auto i : test_idx) {
            preds.push_back(classify_multiclass(ds.row(i), train, cfg));
        }
        const auto fdr = classify_with_fdr(preds, alpha);
        report.outliers_per_repeat[r] = fdr.outliers.size();
        report.conflicts_per_repeat[r] = fdr.conflicts;
        for (const auto& p : preds) {
            report.residual_labels[r].push_back(train_names[p.label]);
        }
    });

    double total = 0.0;
    for (auto o : report.outliers_per_repeat) total += static_cast<double>(o);
    report.mean_outliers = repeats == 0 ? 0.0 : total / static_cast<double>(repeats);
    return report;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string fixed4(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

/// Minimal CSV quoting for free-text fields.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    return out + '"';
}

void write_aligned(const std::vector<std::vector<std::string>>& cells, std::ostream& out) {
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) line += "  ";
            line += row[c];
            if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
        }
        out << line << '\n';
    }
}

}  // namespace

void write_repeats_csv(std::span<const CvReport> reports, std::ostream& out) {
    out << "dataset,method,k,test,repeat,accuracy\n";
    for (const auto& rep : reports) {
        const auto& m = rep.method;
        const auto k = uses_k(m.method) ? std::to_string(m.k) : std::string();
        const auto test = uses_test(m.method) ? std::string(to_string(m.test.kind)) : std::string();
        for (std::size_t r = 0; r < rep.repeat_accuracy.size(); ++r) {
            out << csv_field(rep.dataset) << ',' << csv_field(m.label()) << ',' << k << ',' << test << ',' << r + 1
                << ',' << format_double(rep.repeat_accuracy[r]) << '\n';
        }
    }
}

void write_summary_csv(std::span<const CvReport> reports, std::ostream& out) {
    out << "dataset,method,mean,std\n";
    for (const auto& rep : reports) {
        out << csv_field(rep.dataset) << ',' << csv_field(rep.method.label()) << ',' << format_double(rep.mean) << ','
            << format_double(rep.std) << '\n';
    }
}

void write_reports_table(std::span<const CvReport> reports, std::ostream& out) {
    std::vector<std::vector<std::string>> cells{{"dataset", "method", "mean", "std(pop)", "note"}};
    for (const auto& rep : reports) {
        cells.push_back({rep.dataset, rep.method.label(), fixed4(rep.mean), fixed4(rep.std),
                         rep.failed() ? "failed (scored 0)" : ""});
    }
    write_aligned(cells, out);
}

void write_aggregate_table(std::span<const SummaryRow> rows, std::ostream& out) {
    std::vector<std::vector<std::string>> cells{{"method", "datasets", "failed", "average", "average(valid)"}};
    for (const auto& row : rows) {
        cells.push_back({row.method, std::to_string(row.datasets), std::to_string(row.failed), fixed4(row.average),
                         fixed4(row.average_valid)});
    }
    write_aligned(cells, out);
}

void write_aggregate_csv(std::span<const SummaryRow> rows, std::ostream& out) {
    out << "method,datasets,failed,average,average_valid\n";
    for (const auto& row : rows) {
        out << csv_field(row.method) << ',' << row.datasets << ',' << row.failed << ',' << format_double(row.average)
            << ',' << format_double(row.average_valid) << '\n';
    }
}

void write_outlier_csv(const OutlierReport& report, std::ostream& out) {
    out << "dataset,holdout,alpha,repeat,test_size,outliers,conflicts\n";
    for (std::size_t r = 0; r < report.outliers_per_repeat.size(); ++r) {
        out << csv_field(report.dataset) << ',' << csv_field(report.holdout) << ',' << format_double(report.alpha)
            << ',' << r + 1 << ',' << report.test_size << ',' << report.outliers_per_repeat[r] << ','
            << report.conflicts_per_repeat[r] << '\n';
    }
}

void write_outlier_table(const OutlierReport& report, std::ostream& out) {
    std::vector<std::vector<std::string>> cells{{"repeat", "outliers", "of", "conflicts"}};
    for (std::size_t r = 0; r < report.outliers_per_repeat.size(); ++r) {
        cells.push_back({std::to_string(r + 1), std::to_string(report.outliers_per_repeat[r]),
                         std::to_string(report.test_size), std::to_string(report.conflicts_per_repeat[r])});
    }
    write_aligned(cells, out);
    out << "dataset " << report.dataset << ", holdout " << report.holdout << ", alpha "
        << format_double(report.alpha) << ": mean outliers " << fixed4(report.mean_outliers) << " of "
        << report.test_size << '\n';
}

}  // namespace ibt
