#include "ibt/fdr.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ibt {

BhResult bh_accept(std::span<const PValue> pvalues, double alpha, std::size_t u) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in [0, 1]");
    }
    if (u < pvalues.size()) {
        throw std::invalid_argument("u is smaller than the number of p-values");
    }
    BhResult res;
    res.sorted.assign(pvalues.begin(), pvalues.end());
    for (const auto& pv : res.sorted) {
        if (!(pv.p >= 0.0 && pv.p <= 1.0)) {
            throw std::invalid_argument("p-value outside [0, 1] for instance " + std::to_string(pv.id));
        }
    }
    std::sort(res.sorted.begin(), res.sorted.end(),
              [](const PValue& a, const PValue& b) { return a.p < b.p || (a.p == b.p && a.id < b.id); });
    if (alpha == 0.0) {
        return res;
    }
    for (std::size_t i = res.sorted.size(); i >= 1; --i) {
        if (res.sorted[i - 1].p <= static_cast<double>(i) * alpha / static_cast<double>(u)) {
            res.i_max = i;
            break;
        }
    }
    for (std::size_t i = 0; i < res.i_max; ++i) {
        res.accepted.push_back(res.sorted[i].id);
    }
    return res;
}

FdrResult classify_with_fdr(std::span<Prediction> predictions, double alpha) {
    FdrResult res;
    res.alpha = alpha;
    res.u = predictions.size();
    const std::size_t q = predictions.empty() ? 0 : predictions.front().per_class_p.size();
    for (const auto& pred : predictions) {
        if (pred.per_class_p.size() != q) {
            throw std::invalid_argument("predictions disagree on the number of classes");
        }
    }
    std::vector<PValue> column(res.u);
    for (std::size_t c = 0; c < q; ++c) {
        for (std::size_t i = 0; i < res.u; ++i) {
            column[i] = {i, predictions[i].per_class_p[c]};
        }
        res.per_class.push_back(bh_accept(column, alpha, res.u));
    }
    res.assigned.assign(res.u, kOutlier);
    std::vector<std::size_t> hits(res.u, 0);
    for (std::size_t c = 0; c < q; ++c) {
        for (auto id : res.per_class[c].accepted) {
            ++hits[id];
            auto& slot = res.assigned[id];
            if (slot == kOutlier || predictions[id].per_class_p[c] < predictions[id].per_class_p[slot]) {
                slot = c;
            }
        }
    }
    for (std::size_t i = 0; i < res.u; ++i) {
        res.conflicts += hits[i] > 1 ? 1 : 0;
        predictions[i].outlier = res.assigned[i] == kOutlier;
        if (predictions[i].outlier) {
            res.outliers.push_back(i);
        }
    }
    return res;
}

}  // namespace ibt
