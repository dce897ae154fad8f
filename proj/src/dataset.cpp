#include "ibt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ibt/rng.hpp"

namespace ibt {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(classes(), 0);
    for (auto label : labels) {
        if (label != kMissingLabel) {
            ++counts[label];
        }
    }
    return counts;
}

bool Dataset::has_missing() const {
    return std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); }) ||
           std::find(labels.begin(), labels.end(), kMissingLabel) != labels.end();
}

FileFormat parse_file_format(std::string_view text) {
    if (text == "keel" || text == "keel-dat" || text == "dat") {
        return FileFormat::keel;
    }
    if (text == "csv") {
        return FileFormat::csv;
    }
    throw std::invalid_argument("unknown dataset format '" + std::string(text) + "'");
}

FileFormat format_from_extension(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? FileFormat::csv : FileFormat::keel;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_missing(std::string_view token) { return token.empty() || token == "?"; }

std::optional<double> parse_number(std::string_view token) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                               : comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

/// Assigns codes to string levels by order of first appearance.
class LevelIndex {
public:
    std::size_t code(std::string_view level) {
        const auto [it, inserted] = codes_.try_emplace(std::string(level), levels_.size());
        if (inserted) {
            levels_.emplace_back(level);
        }
        return it->second;
    }
    bool contains(std::string_view level) const { return codes_.count(std::string(level)) != 0; }
    const std::vector<std::string>& levels() const { return levels_; }

private:
    std::unordered_map<std::string, std::size_t> codes_;
    std::vector<std::string> levels_;
};

struct Attribute {
    std::string name;
    bool nominal = false;
    std::vector<std::string> declared;
};

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

Attribute parse_attribute(std::string_view rest, std::size_t line) {
    rest = trim(rest);
    Attribute attr;
    std::size_t name_end = 0;
    if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        const auto close = rest.find(rest.front(), 1);
        if (close == std::string_view::npos) {
            throw ParseError(line, "unterminated attribute name");
        }
        name_end = close + 1;
    } else {
        name_end = rest.find_first_of(" \t{");
        if (name_end == std::string_view::npos) {
            throw ParseError(line, "attribute '" + std::string(rest) + "' has no type");
        }
    }
    attr.name = unquote(rest.substr(0, name_end));
    auto type = trim(rest.substr(name_end));
    if (attr.name.empty() || type.empty()) {
        throw ParseError(line, "malformed @attribute declaration");
    }
    if (type.front() == '{') {
        const auto close = type.find('}');
        if (close == std::string_view::npos) {
            throw ParseError(line, "unterminated nominal value list for '" + attr.name + "'");
        }
        attr.nominal = true;
        for (auto v : split_commas(type.substr(1, close - 1))) {
            if (!v.empty()) {
                attr.declared.push_back(unquote(v));
            }
        }
        if (attr.declared.empty()) {
            throw ParseError(line, "empty nominal value list for '" + attr.name + "'");
        }
        return attr;
    }
    std::size_t word = 0;
    while (word < type.size() && std::isalpha(static_cast<unsigned char>(type[word]))) {
        ++word;
    }
    const auto kind = lower(type.substr(0, word));
    if (kind != "real" && kind != "integer" && kind != "numeric") {
        throw ParseError(line, "unknown attribute type '" + std::string(type) + "'");
    }
    return attr;
}

std::vector<std::string> parse_name_list(std::string_view rest) {
    std::vector<std::string> names;
    for (auto n : split_commas(rest)) {
        if (!n.empty()) {
            names.push_back(unquote(n));
        }
    }
    return names;
}

struct RawTable {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> line_numbers;
};

}  // namespace

Dataset parse_keel(std::istream& in, std::string name) {
    std::vector<Attribute> attrs;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    bool in_data = false;
    RawTable table;

    std::string buffer;
    std::size_t line_no = 0;
    while (std::getline(in, buffer)) {
        ++line_no;
        const auto line = trim(buffer);
        if (line.empty() || line.front() == '%') {
            continue;
        }
        if (!in_data) {
            if (line.front() != '@') {
                throw ParseError(line_no, "expected a header directive before @data");
            }
            const auto split = line.find_first_of(" \t");
            const auto keyword = lower(line.substr(0, split));
            const auto rest = split == std::string_view::npos ? std::string_view{} : line.substr(split);
            if (keyword == "@relation") {
                if (name.empty()) {
                    name = unquote(trim(rest));
                }
            } else if (keyword == "@attribute") {
                attrs.push_back(parse_attribute(rest, line_no));
            } else if (keyword == "@inputs") {
                input_names = parse_name_list(rest);
            } else if (keyword == "@outputs" || keyword == "@output") {
                output_names = parse_name_list(rest);
            } else if (keyword == "@data") {
                in_data = true;
            } else {
                throw ParseError(line_no, "unknown header directive '" + std::string(line.substr(0, split)) + "'");
            }
            continue;
        }
        auto tokens = split_commas(line);
        if (tokens.size() != attrs.size()) {
            throw ParseError(line_no, "expected " + std::to_string(attrs.size()) + " values, found " +
                                          std::to_string(tokens.size()));
        }
        table.cells.emplace_back(tokens.begin(), tokens.end());
        table.line_numbers.push_back(line_no);
    }
    if (!in_data) {
        throw ParseError(line_no, "missing @data section");
    }
    if (attrs.size() < 2) {
        throw ParseError(line_no, "need at least one input and one output attribute");
    }

    auto index_of = [&](const std::string& attr_name) -> std::size_t {
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            if (attrs[i].name == attr_name) {
                return i;
            }
        }
        throw ParseError(line_no, "unknown attribute '" + attr_name + "' in @inputs/@outputs");
    };

    std::size_t output = attrs.size() - 1;
    if (!output_names.empty()) {
        if (output_names.size() != 1) {
            throw ParseError(line_no, "exactly one output attribute is supported");
        }
        output = index_of(output_names.front());
    }
    std::vector<std::size_t> inputs;
    if (!input_names.empty()) {
        for (const auto& n : input_names) {
            inputs.push_back(index_of(n));
        }
    } else {
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            if (i != output) {
                inputs.push_back(i);
            }
        }
    }

    Dataset ds;
    ds.name = std::move(name);
    ds.n_features = inputs.size();
    ds.values.reserve(table.cells.size() * inputs.size());
    ds.labels.reserve(table.cells.size());
    std::vector<LevelIndex> levels(inputs.size());
    LevelIndex classes;
    const auto& out_attr = attrs[output];

    for (std::size_t r = 0; r < table.cells.size(); ++r) {
        const auto& cells = table.cells[r];
        for (std::size_t f = 0; f < inputs.size(); ++f) {
            const auto& attr = attrs[inputs[f]];
            const auto& token = cells[inputs[f]];
            if (is_missing(token)) {
                ds.values.push_back(std::nan(""));
            } else if (attr.nominal) {
                ds.values.push_back(static_cast<double>(levels[f].code(unquote(token))));
            } else if (auto v = parse_number(token)) {
                ds.values.push_back(*v);
            } else {
                throw ParseError(table.line_numbers[r],
                                 "non-numeric value '" + token + "' for attribute '" + attr.name + "'");
            }
        }
        const auto token = unquote(cells[output]);
        if (is_missing(token)) {
            ds.labels.push_back(kMissingLabel);
            continue;
        }
        if (out_attr.nominal &&
            std::find(out_attr.declared.begin(), out_attr.declared.end(), token) == out_attr.declared.end()) {
            throw ParseError(table.line_numbers[r], "unknown class token '" + token + "'");
        }
        ds.labels.push_back(classes.code(token));
    }
    // Declared classes that never occur keep a slot after the observed ones.
    for (const auto& declared : out_attr.declared) {
        if (!classes.contains(declared)) {
            classes.code(declared);
        }
    }
    ds.class_names = classes.levels();
    for (std::size_t f = 0; f < inputs.size(); ++f) {
        ds.feature_names.push_back(attrs[inputs[f]].name);
        ds.categories.push_back(attrs[inputs[f]].nominal ? levels[f].levels() : std::vector<std::string>{});
    }
    return ds;
}

Dataset parse_csv(std::istream& in, std::string name) {
    RawTable table;
    std::string buffer;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, buffer)) {
        ++line_no;
        const auto line = trim(buffer);
        if (line.empty()) {
            continue;
        }
        auto tokens = split_commas(line);
        if (width == 0) {
            if (tokens.size() < 2) {
                throw ParseError(line_no, "need at least one feature column and a label column");
            }
            width = tokens.size();
        } else if (tokens.size() != width) {
            throw ParseError(line_no, "expected " + std::to_string(width) + " values, found " +
                                          std::to_string(tokens.size()));
        }
        table.cells.emplace_back(tokens.begin(), tokens.end());
        table.line_numbers.push_back(line_no);
    }

    Dataset ds;
    ds.name = std::move(name);
    ds.n_features = width == 0 ? 0 : width - 1;
    std::vector<bool> numeric(ds.n_features, true);
    for (const auto& cells : table.cells) {
        for (std::size_t f = 0; f < ds.n_features; ++f) {
            if (numeric[f] && !is_missing(cells[f]) && !parse_number(cells[f])) {
                numeric[f] = false;
            }
        }
    }
    std::vector<LevelIndex> levels(ds.n_features);
    LevelIndex classes;
    ds.values.reserve(table.cells.size() * ds.n_features);
    for (const auto& cells : table.cells) {
        for (std::size_t f = 0; f < ds.n_features; ++f) {
            if (is_missing(cells[f])) {
                ds.values.push_back(std::nan(""));
            } else if (numeric[f]) {
                ds.values.push_back(*parse_number(cells[f]));
            } else {
                ds.values.push_back(static_cast<double>(levels[f].code(cells[f])));
            }
        }
        const auto& label = cells.back();
        ds.labels.push_back(is_missing(label) ? kMissingLabel : classes.code(label));
    }
    ds.class_names = classes.levels();
    for (std::size_t f = 0; f < ds.n_features; ++f) {
        ds.feature_names.push_back("f" + std::to_string(f + 1));
        ds.categories.push_back(numeric[f] ? std::vector<std::string>{} : levels[f].levels());
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    }
    auto stem = path.stem().string();
    if (format == FileFormat::csv) {
        return parse_csv(in, std::move(stem));
    }
    auto ds = parse_keel(in, {});
    ds.name = std::move(stem);
    return ds;
}

Dataset preprocess(const Dataset& raw) {
    const std::size_t d = raw.n_features;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        if (raw.labels[i] == kMissingLabel) {
            continue;
        }
        const auto row = raw.row(i);
        if (std::none_of(row.begin(), row.end(), [](double v) { return std::isnan(v); })) {
            keep.push_back(i);
        }
    }
    if (keep.empty()) {
        throw DataError("dataset '" + raw.name + "' has no complete rows");
    }

    std::vector<std::size_t> counts(raw.classes(), 0);
    for (auto i : keep) {
        ++counts[raw.labels[i]];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            throw DataError("class '" + raw.class_names[c] + "' of dataset '" + raw.name +
                            "' has no instances after preprocessing");
        }
    }
    if (counts.size() < 2) {
        throw DataError("dataset '" + raw.name + "' needs at least two classes");
    }

    Dataset out;
    out.name = raw.name;
    out.n_features = d;
    out.feature_names = raw.feature_names;
    out.categories.assign(d, {});
    out.values.resize(keep.size() * d);
    out.labels.reserve(keep.size());

    std::vector<std::size_t> class_map(raw.classes(), kMissingLabel);
    for (auto i : keep) {
        auto& mapped = class_map[raw.labels[i]];
        if (mapped == kMissingLabel) {
            mapped = out.class_names.size();
            out.class_names.push_back(raw.class_names[raw.labels[i]]);
        }
        out.labels.push_back(mapped);
    }

    for (std::size_t f = 0; f < d; ++f) {
        const bool categorical = f < raw.categories.size() && !raw.categories[f].empty();
        std::vector<double> column(keep.size());
        if (categorical) {
            std::vector<double> recode(raw.categories[f].size(), -1.0);
            double next = 0.0;
            for (std::size_t r = 0; r < keep.size(); ++r) {
                const auto code = static_cast<std::size_t>(raw.values[keep[r] * d + f]);
                if (recode[code] < 0.0) {
                    recode[code] = next++;
                }
                column[r] = recode[code];
            }
        } else {
            for (std::size_t r = 0; r < keep.size(); ++r) {
                column[r] = raw.values[keep[r] * d + f];
            }
        }
        const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
        const double min = *lo;
        const double range = *hi - *lo;
        for (std::size_t r = 0; r < keep.size(); ++r) {
            out.values[r * d + f] = range > 0.0 ? (column[r] - min) / range : 0.0;
        }
    }
    return out;
}

void write_csv(const Dataset& ds, std::ostream& out) {
    char buf[64];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (double v : ds.row(i)) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, ptr - buf);
            out.put(',');
        }
        out << (ds.labels[i] == kMissingLabel ? std::string("?") : ds.class_names[ds.labels[i]]) << '\n';
    }
}

FoldPlan make_folds(const Dataset& ds, std::size_t folds, std::size_t repeats, std::uint64_t seed) {
    if (folds < 2) {
        throw DataError("cross-validation needs at least 2 folds");
    }
    if (repeats < 1) {
        throw DataError("cross-validation needs at least 1 repeat");
    }
    if (ds.rows() == 0) {
        throw DataError("dataset '" + ds.name + "' has no instances to cross-validate");
    }
    if (ds.has_missing()) {
        throw DataError("dataset '" + ds.name + "' must be preprocessed before planning folds");
    }

    FoldPlan plan;
    plan.seed = seed;
    plan.repeats = repeats;
    plan.folds = folds;
    plan.instances = ds.rows();
    plan.assignment.resize(repeats * ds.rows());

    std::vector<std::vector<std::size_t>> members(ds.classes());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        members[ds.labels[i]].push_back(i);
    }
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (!members[c].empty() && members[c].size() < folds) {
            plan.warnings.push_back("class '" + ds.class_names[c] + "' has " + std::to_string(members[c].size()) +
                                    " instances, fewer than " + std::to_string(folds) +
                                    " folds; some folds will miss it");
        }
    }

    for (std::size_t r = 0; r < repeats; ++r) {
        Rng rng(seed, Stream::folds, r);
        auto offset = static_cast<std::size_t>(rng.below(folds));
        for (auto cls : members) {
            rng.shuffle(std::span<std::size_t>(cls));
            for (std::size_t j = 0; j < cls.size(); ++j) {
                plan.assignment[r * plan.instances + cls[j]] = static_cast<std::uint32_t>((offset + j) % folds);
            }
            offset = (offset + cls.size()) % folds;
        }
    }
    return plan;
}

}  // namespace ibt
