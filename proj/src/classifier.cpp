#include "ibt/classifier.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ibt {

TrainingSet::TrainingSet(std::vector<double> row_major, std::size_t features, std::vector<std::size_t> labels,
                         std::size_t classes)
    : values_(std::move(row_major)),
      features_(features),
      labels_(std::move(labels)),
      counts_(classes, 0),
      packed_(values_, labels_.size(), features) {
    for (auto label : labels_) {
        if (label >= classes) {
            throw std::invalid_argument("training label out of range");
        }
        ++counts_[label];
    }
}

TrainingSet TrainingSet::from_dataset(const Dataset& ds, std::span<const std::size_t> indices) {
    std::vector<double> values;
    values.reserve(indices.size() * ds.n_features);
    std::vector<std::size_t> labels;
    labels.reserve(indices.size());
    for (auto i : indices) {
        const auto row = ds.row(i);
        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(ds.labels[i]);
    }
    return TrainingSet(std::move(values), ds.n_features, std::move(labels), ds.classes());
}

std::vector<double> TrainingSet::distances_to(std::span<const double> query, Distance kind) const {
    std::vector<double> out(size());
    distances(query, packed_, kind, out);
    return out;
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::all: return "all";
        case Variant::direct: return "direct";
        case Variant::separate: return "separate";
    }
    return "?";
}

std::size_t argmin_first(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) {
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> nearest_with_ties(std::span<const double> dist, std::size_t k) {
    std::vector<std::size_t> idx(dist.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (k == 0) {
        return {};
    }
    if (k >= dist.size()) {
        return idx;
    }
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    const double cutoff = dist[idx[k - 1]];
    std::vector<std::size_t> out;
    out.reserve(k + 4);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] <= cutoff) {
            out.push_back(i);
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> separate_counts(std::size_t m, std::size_t n, std::size_t k) {
    if (m == 0 || n == 0) {
        throw DegenerateSample("separate neighbour selection needs both classes present");
    }
    if (k == 0) {
        throw std::invalid_argument("k must be at least 1");
    }
    const std::size_t small = std::min(m, n);
    const std::size_t large = std::max(m, n);
    const std::size_t k_small = std::min(k, small);
    const std::size_t k_large = std::min(large, (2 * k_small * large + small) / (2 * small));
    return m <= n ? std::pair{k_small, k_large} : std::pair{k_large, k_small};
}

namespace {

std::vector<double> distances_to_rows(std::span<const double> t, MatrixView rows, Distance kind) {
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = distance(t, rows.row(i), kind);
    }
    return out;
}

std::vector<double> smallest(std::vector<double> values, std::size_t count) {
    count = std::min(count, values.size());
    std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(count), values.end());
    values.resize(count);
    return values;
}

/// Runs the engine; a precedence test without a fixed order uses r = k_minus + 1.
double engine_p(const TestSpec& spec, std::span<const double> gx, std::span<const double> gy, std::size_t k_minus) {
    if (spec.kind != TestKind::precedence) {
        return run_test(spec, gx, gy).p;
    }
    const std::size_t wanted = spec.order == 0 ? k_minus + 1 : spec.order;
    return precedence_one_sided(gx, gy, std::clamp<std::size_t>(wanted, 1, gy.size())).p;
}

/// Neighbours outside each class among the k nearest (ties included).
std::vector<std::size_t> rest_neighbor_counts(std::span<const double> dist, std::span<const std::size_t> labels,
                                              std::size_t classes, std::size_t k) {
    const auto nb = nearest_with_ties(dist, k);
    std::vector<std::size_t> counts(classes, nb.size());
    for (auto i : nb) {
        --counts[labels[i]];
    }
    return counts;
}

}  // namespace

DistanceSamples build_samples_all(std::span<const double> t, MatrixView pos, MatrixView neg, const IbtConfig& cfg) {
    if (pos.rows() == 0 || neg.rows() == 0) {
        throw DegenerateSample("both training classes must be nonempty");
    }
    DistanceSamples s{distances_to_rows(t, pos, cfg.distance), distances_to_rows(t, neg, cfg.distance), {}};
    s.selection = {Variant::all, s.gx.size() + s.gy.size(), s.gx.size(), s.gy.size()};
    return s;
}

DistanceSamples build_samples_direct(std::span<const double> t, MatrixView pos, MatrixView neg, std::size_t k,
                                     const IbtConfig& cfg) {
    if (k == 0 || k > pos.rows() + neg.rows()) {
        throw std::invalid_argument("k must lie in [1, m + n]");
    }
    auto dist = distances_to_rows(t, pos, cfg.distance);
    const std::size_t m = dist.size();
    const auto dneg = distances_to_rows(t, neg, cfg.distance);
    dist.insert(dist.end(), dneg.begin(), dneg.end());
    DistanceSamples s;
    for (auto i : nearest_with_ties(dist, k)) {
        (i < m ? s.gx : s.gy).push_back(dist[i]);
    }
    s.selection = {Variant::direct, k, s.gx.size(), s.gy.size()};
    return s;
}

DistanceSamples build_samples_separate(std::span<const double> t, MatrixView pos, MatrixView neg, std::size_t k,
                                       const IbtConfig& cfg) {
    const auto [k1, k2] = separate_counts(pos.rows(), neg.rows(), k);
    DistanceSamples s{smallest(distances_to_rows(t, pos, cfg.distance), k1),
                      smallest(distances_to_rows(t, neg, cfg.distance), k2),
                      {}};
    s.selection = {Variant::separate, k, k1, k2};
    return s;
}

Prediction predict_from_distances(std::span<const double> dist, std::span<const std::size_t> labels,
                                  std::span<const std::size_t> class_counts, const IbtConfig& cfg) {
    const std::size_t q = class_counts.size();
    const std::size_t total = dist.size();
    if (labels.size() != total) {
        throw std::invalid_argument("distance and label counts differ");
    }
    if (cfg.variant != Variant::all && cfg.k == 0) {
        throw std::invalid_argument("k must be at least 1");
    }
    Prediction pred;
    pred.per_class_p.assign(q, 1.0);

    const bool adaptive_precedence = cfg.test.kind == TestKind::precedence && cfg.test.order == 0;
    const auto k_minus = adaptive_precedence ? rest_neighbor_counts(dist, labels, q, cfg.k) : std::vector<std::size_t>(q, 0);

    auto present = [&](std::size_t c) { return class_counts[c] > 0; };
    auto alone = [&](std::size_t c) { return class_counts[c] == total; };

    switch (cfg.variant) {
        case Variant::all: {
            if (cfg.test.kind == TestKind::wmw && cfg.rank_fast_path) {
                std::vector<std::size_t> order(total);
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
                std::vector<double> rank_sum(q, 0.0);
                for (std::size_t i = 0; i < total;) {
                    std::size_t j = i;
                    while (j < total && dist[order[j]] == dist[order[i]]) ++j;
                    const double midrank = static_cast<double>(i + 1 + j) / 2.0;
                    for (std::size_t r = i; r < j; ++r) {
                        rank_sum[labels[order[r]]] += midrank;
                    }
                    i = j;
                }
                for (std::size_t c = 0; c < q; ++c) {
                    if (present(c)) {
                        pred.per_class_p[c] =
                            alone(c) ? 0.0 : wmw_from_rank_sum(rank_sum[c], class_counts[c], total - class_counts[c]).p;
                    }
                }
                break;
            }
            std::vector<double> gx;
            std::vector<double> gy;
            for (std::size_t c = 0; c < q; ++c) {
                if (!present(c)) continue;
                if (alone(c)) {
                    pred.per_class_p[c] = 0.0;
                    continue;
                }
                gx.clear();
                gy.clear();
                for (std::size_t i = 0; i < total; ++i) {
                    (labels[i] == c ? gx : gy).push_back(dist[i]);
                }
                pred.per_class_p[c] = engine_p(cfg.test, gx, gy, k_minus[c]);
            }
            break;
        }
        case Variant::direct: {
            const auto nb = nearest_with_ties(dist, cfg.k);
            std::vector<double> gx;
            std::vector<double> gy;
            for (std::size_t c = 0; c < q; ++c) {
                if (!present(c)) continue;
                gx.clear();
                gy.clear();
                for (auto i : nb) {
                    (labels[i] == c ? gx : gy).push_back(dist[i]);
                }
                if (gx.empty()) {
                    pred.per_class_p[c] = 1.0;
                } else if (gy.empty()) {
                    pred.per_class_p[c] = 0.0;
                } else {
                    pred.per_class_p[c] = engine_p(cfg.test, gx, gy, adaptive_precedence ? k_minus[c] : gy.size());
                }
            }
            break;
        }
        case Variant::separate: {
            std::vector<std::size_t> order(total);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
            std::vector<double> gx;
            std::vector<double> gy;
            for (std::size_t c = 0; c < q; ++c) {
                if (!present(c)) continue;
                if (alone(c)) {
                    pred.per_class_p[c] = 0.0;
                    continue;
                }
                const auto [k1, k2] = separate_counts(class_counts[c], total - class_counts[c], cfg.k);
                gx.clear();
                gy.clear();
                for (std::size_t r = 0; r < total && (gx.size() < k1 || gy.size() < k2); ++r) {
                    const auto i = order[r];
                    if (labels[i] == c) {
                        if (gx.size() < k1) gx.push_back(dist[i]);
                    } else if (gy.size() < k2) {
                        gy.push_back(dist[i]);
                    }
                }
                pred.per_class_p[c] = engine_p(cfg.test, gx, gy, k_minus[c]);
            }
            break;
        }
    }
    pred.label = argmin_first(pred.per_class_p);
    return pred;
}

Prediction classify_multiclass(std::span<const double> t, const TrainingSet& train, const IbtConfig& cfg) {
    if (train.classes() < 2) {
        throw std::invalid_argument("need at least two classes");
    }
    const auto dist = train.distances_to(t, cfg.distance);
    return predict_from_distances(dist, train.labels(), train.class_counts(), cfg);
}

Prediction classify_binary(std::span<const double> t, MatrixView pos, MatrixView neg, const IbtConfig& cfg) {
    if (pos.rows() == 0 || neg.rows() == 0) {
        throw DegenerateSample("both training classes must be nonempty");
    }
    std::vector<double> dist;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < neg.rows(); ++i) {
        dist.push_back(distance(t, neg.row(i), cfg.distance));
        labels.push_back(0);
    }
    for (std::size_t i = 0; i < pos.rows(); ++i) {
        dist.push_back(distance(t, pos.row(i), cfg.distance));
        labels.push_back(1);
    }
    const std::size_t counts[2] = {neg.rows(), pos.rows()};
    return predict_from_distances(dist, labels, counts, cfg);
}

}  // namespace ibt
