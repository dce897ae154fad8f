#include "ibt/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ibt {

namespace {

constexpr double kMinRcond = 1e-12;

std::size_t argmax_first(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

TrainingSet binary_training(MatrixView pos, MatrixView neg) {
    if (pos.cols != neg.cols) {
        throw std::invalid_argument("positive and negative rows differ in width");
    }
    std::vector<double> values(neg.values.begin(), neg.values.end());
    values.insert(values.end(), pos.values.begin(), pos.values.end());
    std::vector<std::size_t> labels(neg.rows(), 0);
    labels.resize(neg.rows() + pos.rows(), 1);
    return TrainingSet(std::move(values), pos.cols, std::move(labels), 2);
}

double pair_count(double n) { return n * (n - 1.0) / 2.0; }

double bf(double between, double within_a, double within_b) { return 2.0 * between - (within_a + within_b); }

}  // namespace

double IdcDecision::delta_plus() const { return std::fabs(bf1 - bf0); }
double IdcDecision::delta_minus() const { return std::fabs(bf2 - bf0); }

TbcModel::TbcModel(const TrainingSet& train) : features_(train.features()) {
    const std::size_t q = train.classes();
    const std::size_t d = features_;
    const auto counts = train.class_counts();
    for (auto c : counts) {
        if (c <= d) {
            failed_ = true;
        }
    }
    if (failed_) {
        return;
    }
    const auto x = train.matrix();
    auto side = [&](auto&& member) {
        Side s;
        s.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        s.scatter = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (member(i)) {
                s.mean += Eigen::Map<const Eigen::VectorXd>(x.row(i).data(), static_cast<Eigen::Index>(d));
                s.count += 1.0;
            }
        }
        s.mean /= s.count;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (member(i)) {
                const Eigen::VectorXd v =
                    Eigen::Map<const Eigen::VectorXd>(x.row(i).data(), static_cast<Eigen::Index>(d)) - s.mean;
                s.scatter.noalias() += v * v.transpose();
            }
        }
        return s;
    };
    const auto labels = train.labels();
    for (std::size_t c = 0; c < q; ++c) {
        target_.push_back(side([&](std::size_t i) { return labels[i] == c; }));
        rest_.push_back(side([&](std::size_t i) { return labels[i] != c; }));
    }
}

TbcModel::Result TbcModel::classify(std::span<const double> t) const {
    Result res;
    if (failed_) {
        res.failed = true;
        return res;
    }
    if (t.size() != features_) {
        throw std::invalid_argument("query width does not match training features");
    }
    const auto d = static_cast<Eigen::Index>(features_);
    const Eigen::Map<const Eigen::VectorXd> q(t.data(), d);
    res.t2.resize(target_.size());
    for (std::size_t c = 0; c < target_.size(); ++c) {
        const auto& in = target_[c];
        const auto& out = rest_[c];
        const double a = in.count + 1.0;
        const double b = out.count;
        const Eigen::VectorXd v = q - in.mean;
        const Eigen::VectorXd mean = in.mean + v / a;
        const Eigen::MatrixXd pooled = (in.scatter + (in.count / a) * v * v.transpose() + out.scatter) / (a + b - 2.0);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(pooled);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() >= kMinRcond)) {
            res.failed = true;
            return res;
        }
        const Eigen::VectorXd dm = mean - out.mean;
        res.t2[c] = (a * b / (a + b)) * dm.dot(ldlt.solve(dm));
    }
    res.label = argmax_first(res.t2);
    return res;
}

IdcModel::IdcModel(const TrainingSet& train, Distance kind) : train_(&train), kind_(kind) {
    const std::size_t q = train.classes();
    const std::size_t n = train.size();
    const auto labels = train.labels();
    const auto x = train.matrix();
    // Pair sums by class pair; cross[a][b] is only filled for a < b.
    std::vector<double> pair(q * q, 0.0);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        distances(x.row(i), train.packed(), kind, dist);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto lo = std::min(labels[i], labels[j]);
            const auto hi = std::max(labels[i], labels[j]);
            pair[lo * q + hi] += dist[j];
        }
    }
    auto cross = [&](std::size_t a, std::size_t b) { return pair[std::min(a, b) * q + std::max(a, b)]; };
    within_.resize(q);
    between_.assign(q, 0.0);
    rest_within_.assign(q, 0.0);
    for (std::size_t c = 0; c < q; ++c) {
        within_[c] = pair[c * q + c];
        for (std::size_t o = 0; o < q; ++o) {
            if (o != c) {
                between_[c] += cross(c, o);
            }
        }
        for (std::size_t a = 0; a < q; ++a) {
            if (a == c) continue;
            for (std::size_t b = a; b < q; ++b) {
                if (b != c) {
                    rest_within_[c] += cross(a, b);
                }
            }
        }
    }
}

IdcModel::Result IdcModel::classify(std::span<const double> t) const {
    const auto& train = *train_;
    const std::size_t q = train.classes();
    const auto dist = train.distances_to(t, kind_);
    const auto labels = train.labels();
    std::vector<double> to_class(q, 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        to_class[labels[i]] += dist[i];
    }
    Result res;
    res.score.assign(q, std::numeric_limits<double>::infinity());
    res.bf0.assign(q, std::numeric_limits<double>::quiet_NaN());
    res.bf1.assign(q, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < q; ++c) {
        const double m = static_cast<double>(train.class_counts()[c]);
        const double n = static_cast<double>(train.size()) - m;
        if (m < 2.0 || n < 2.0) {
            continue;
        }
        double to_rest = 0.0;
        for (std::size_t o = 0; o < q; ++o) {
            if (o != c) to_rest += to_class[o];
        }
        const double rest = rest_within_[c] / pair_count(n);
        res.bf0[c] = bf(between_[c] / (m * n), within_[c] / pair_count(m), rest);
        res.bf1[c] = bf((between_[c] + to_rest) / ((m + 1.0) * n), (within_[c] + to_class[c]) / pair_count(m + 1.0), rest);
        res.score[c] = std::fabs(res.bf1[c] - res.bf0[c]);
    }
    res.label = argmin_first(res.score);
    return res;
}

TbcDecision tbc_classify(std::span<const double> t, MatrixView pos, MatrixView neg) {
    const auto train = binary_training(pos, neg);
    const auto res = TbcModel(train).classify(t);
    TbcDecision out;
    out.failed = res.failed;
    if (!res.failed) {
        out.t2_plus = res.t2[1];
        out.t2_minus = res.t2[0];
        out.label = res.label;
    }
    return out;
}

IdcDecision idc_classify(std::span<const double> t, MatrixView pos, MatrixView neg, Distance kind) {
    if (pos.rows() < 2 || neg.rows() < 2) {
        throw DegenerateSample("IDC needs at least two instances per class");
    }
    const auto train = binary_training(pos, neg);
    const auto res = IdcModel(train, kind).classify(t);
    return {res.bf0[1], res.bf1[1], res.bf1[0], res.label};
}

std::size_t knn_from_distances(std::span<const double> dist, std::span<const std::size_t> labels,
                               std::size_t classes, std::size_t k) {
    if (k == 0 || k > dist.size()) {
        throw std::invalid_argument("k must lie in [1, training size]");
    }
    std::vector<double> votes(classes, 0.0);
    for (auto i : nearest_with_ties(dist, k)) {
        votes[labels[i]] += 1.0;
    }
    return argmax_first(votes);
}

std::size_t knn_classify(std::span<const double> t, const TrainingSet& train, std::size_t k, Distance kind) {
    return knn_from_distances(train.distances_to(t, kind), train.labels(), train.classes(), k);
}

}  // namespace ibt
