#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "ibt/bench.hpp"

namespace ibt {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::uint64_t seed = 1;
    std::size_t folds = 10;
    std::size_t repeats = 10;
    std::string out_path;
    std::string format = "table";
    std::string data_format;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

struct EngineOptions {
    std::string test = "wmw";
    std::size_t order = 0;
    std::string distance = "euclidean";
};

void add_common(CLI::App* app, Common& c, bool cv) {
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    if (cv) {
        app->add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    }
    app->add_option("--repeats", c.repeats, "Repeats")->capture_default_str()->check(CLI::Range(1, 100000));
    app->add_option("--out", c.out_path, "Write CSV results to this path");
    app->add_option("--format", c.format, "Console output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "table"}));
    app->add_option("--data-format", c.data_format, "Input format (default: from the file extension)")
        ->check(CLI::IsMember({"keel-dat", "keel", "csv"}));
    app->add_option("--threads", c.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
}

void add_engine(CLI::App* app, EngineOptions& e) {
    app->add_option("--test", e.test, "Two-sample engine")
        ->capture_default_str()
        ->check(CLI::IsMember({"wmw", "pooled-t", "ks", "precedence"}));
    app->add_option("--order", e.order, "Precedence order r (0 = derived from the k nearest neighbours)")
        ->capture_default_str();
    app->add_option("--distance", e.distance, "Distance")
        ->capture_default_str()
        ->check(CLI::IsMember({"euclidean", "squared-euclidean", "manhattan"}));
}

Dataset load(const fs::path& path, const Common& c) {
    const auto format = c.data_format.empty() ? format_from_extension(path) : parse_file_format(c.data_format);
    return load_dataset(path, format);
}

std::vector<fs::path> expand(const std::vector<std::string>& inputs) {
    std::vector<fs::path> paths;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                const auto ext = entry.path().extension();
                if (entry.is_regular_file() && (ext == ".dat" || ext == ".csv")) {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            paths.insert(paths.end(), found.begin(), found.end());
        } else {
            paths.push_back(p);
        }
    }
    return paths;
}

std::vector<std::size_t> parse_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t value = 0;
        const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc{} || end != item.data() + item.size()) {
            throw CLI::ValidationError("--k", "expects positive integers, got '" + item + "'");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    f << content;
    if (!f) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

void emit_reports(const std::vector<CvReport>& reports, bool with_aggregate, const Common& c, std::ostream& out) {
    if (!c.out_path.empty()) {
        std::ostringstream rep;
        write_repeats_csv(reports, rep);
        write_file(c.out_path, rep.str());
        std::ostringstream sum;
        write_summary_csv(reports, sum);
        write_file(c.out_path + ".summary.csv", sum.str());
    }
    const auto agg = aggregate(reports);
    if (c.format == "csv") {
        write_summary_csv(reports, out);
        if (with_aggregate) {
            out << '\n';
            write_aggregate_csv(agg, out);
        }
        return;
    }
    write_reports_table(reports, out);
    if (with_aggregate) {
        out << '\n';
        write_aggregate_table(agg, out);
    }
}

TestSpec engine_test(const EngineOptions& e) { return {parse_test_kind(e.test), e.order}; }

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Instance-based classification by two-sample testing"};
    app.require_subcommand(1);

    Common common;
    EngineOptions engine;

    auto* run = app.add_subcommand("run", "Cross-validate one method on one or more datasets");
    std::vector<std::string> run_datasets;
    std::string run_method;
    std::size_t run_k = 3;
    run->add_option("--dataset", run_datasets, "Dataset file(s) or directories")->required();
    run->add_option("--method", run_method, "ibt-u | ibt-u-k-d | ibt-u-k-s | tbc | idc | knn")
        ->required()
        ->check(CLI::IsMember({"ibt-u", "ibt-u-k-d", "ibt-u-k-s", "tbc", "idc", "knn", "k-nn"}));
    run->add_option("--k", run_k, "Neighbourhood size")->capture_default_str()->check(CLI::PositiveNumber);
    add_engine(run, engine);
    add_common(run, common, true);

    auto* compare = app.add_subcommand("compare", "Cross-validate several methods and summarize");
    std::vector<std::string> cmp_datasets;
    std::string cmp_methods = "ibt-u,ibt-u-k-d,ibt-u-k-s,tbc,idc,knn";
    std::string cmp_k = "3";
    compare->add_option("--datasets", cmp_datasets, "Dataset files or directories")->required();
    compare->add_option("--methods", cmp_methods, "Comma-separated methods")->capture_default_str();
    compare->add_option("--k", cmp_k, "Comma-separated k values")->capture_default_str();
    add_engine(compare, engine);
    add_common(compare, common, true);

    auto* outliers = app.add_subcommand("outliers", "Hold out a class and flag outliers with BH control");
    std::string out_dataset;
    std::string holdout;
    double alpha = 0.05;
    double fraction = 0.8;
    std::string out_method = "ibt-u";
    std::size_t out_k = 3;
    outliers->add_option("--dataset", out_dataset, "Dataset file")->required();
    outliers->add_option("--holdout", holdout, "Class name to hold out")->required();
    outliers->add_option("--alpha", alpha, "FDR level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    outliers->add_option("--train-fraction", fraction, "Per-class training fraction")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    outliers->add_option("--method", out_method, "ibt-u | ibt-u-k-d | ibt-u-k-s")
        ->capture_default_str()
        ->check(CLI::IsMember({"ibt-u", "ibt-u-k-d", "ibt-u-k-s"}));
    outliers->add_option("--k", out_k, "Neighbourhood size")->capture_default_str()->check(CLI::PositiveNumber);
    add_engine(outliers, engine);
    add_common(outliers, common, false);

    auto* prep = app.add_subcommand("prep", "Preprocess a dataset and print its summary");
    std::string prep_dataset;
    prep->add_option("--dataset", prep_dataset, "Dataset file")->required();
    add_common(prep, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed() || compare->parsed()) {
            std::vector<MethodSpec> specs;
            const auto test = engine_test(engine);
            const auto dist = parse_distance(engine.distance);
            if (run->parsed()) {
                specs.push_back({parse_method(run_method), run_k, test, dist});
            } else {
                const auto ks = parse_list(cmp_k);
                if (ks.empty() || std::find(ks.begin(), ks.end(), 0u) != ks.end()) {
                    throw CLI::ValidationError("--k", "expects positive integers");
                }
                for (const auto& name : split(cmp_methods)) {
                    Method m{};
                    try {
                        m = parse_method(name);
                    } catch (const std::invalid_argument& e) {
                        throw CLI::ValidationError("--methods", e.what());
                    }
                    if (uses_k(m)) {
                        for (auto k : ks) specs.push_back({m, k, test, dist});
                    } else {
                        specs.push_back({m, ks.front(), test, dist});
                    }
                }
            }
            std::vector<CvReport> reports;
            for (const auto& path : expand(run->parsed() ? run_datasets : cmp_datasets)) {
                const auto ds = preprocess(load(path, common));
                const auto plan = make_folds(ds, common.folds, common.repeats, common.seed);
                for (const auto& w : plan.warnings) {
                    err << "warning: " << ds.name << ": " << w << '\n';
                }
                for (const auto& spec : specs) {
                    reports.push_back(run_cv(ds, plan, spec, common.threads));
                    if (reports.back().failed()) {
                        err << "note: " << ds.name << ": " << spec.label()
                            << " failed (singular pooled covariance); scored 0\n";
                    }
                }
            }
            emit_reports(reports, compare->parsed(), common, out);
            return 0;
        }
        if (outliers->parsed()) {
            const auto ds = preprocess(load(out_dataset, common));
            MethodSpec spec{parse_method(out_method), out_k, engine_test(engine), parse_distance(engine.distance)};
            const auto report = run_outlier_experiment(ds, holdout, fraction, alpha, common.repeats, common.seed,
                                                       spec.ibt_config(), common.threads);
            if (!common.out_path.empty()) {
                std::ostringstream csv;
                write_outlier_csv(report, csv);
                write_file(common.out_path, csv.str());
            }
            if (common.format == "csv") {
                write_outlier_csv(report, out);
            } else {
                write_outlier_table(report, out);
            }
            return 0;
        }
        if (prep->parsed()) {
            const auto raw = load(prep_dataset, common);
            const auto ds = preprocess(raw);
            if (!common.out_path.empty()) {
                std::ostringstream csv;
                write_csv(ds, csv);
                write_file(common.out_path, csv.str());
            }
            const auto counts = ds.class_counts();
            if (common.format == "csv") {
                out << "dataset,raw_rows,rows,features,class,count\n";
                for (std::size_t c = 0; c < ds.classes(); ++c) {
                    out << ds.name << ',' << raw.rows() << ',' << ds.rows() << ',' << ds.n_features << ','
                        << ds.class_names[c] << ',' << counts[c] << '\n';
                }
            } else {
                out << ds.name << ": " << ds.rows() << " rows (" << raw.rows() << " raw), " << ds.n_features
                    << " features, " << ds.classes() << " classes\n";
                for (std::size_t c = 0; c < ds.classes(); ++c) {
                    out << "  " << ds.class_names[c] << ": " << counts[c] << '\n';
                }
            }
            const auto plan = make_folds(ds, common.folds, 1, common.seed);
            for (const auto& w : plan.warnings) {
                err << "warning: " << w << '\n';
            }
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace ibt
