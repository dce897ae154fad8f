#include "ibt/twosample.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace ibt {

std::string_view to_string(TestKind kind) {
    switch (kind) {
        case TestKind::wmw: return "wmw";
        case TestKind::pooled_t: return "pooled-t";
        case TestKind::ks: return "ks";
        case TestKind::precedence: return "precedence";
    }
    return "?";
}

TestKind parse_test_kind(std::string_view text) {
    for (auto kind : {TestKind::wmw, TestKind::pooled_t, TestKind::ks, TestKind::precedence}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown test '" + std::string(text) + "'");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) {
        throw std::domain_error("student_t_cdf needs positive degrees of freedom");
    }
    return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

namespace {

void require_nonempty(std::span<const double> gx, std::span<const double> gy, const char* engine) {
    if (gx.empty() || gy.empty()) {
        throw DegenerateSample(std::string(engine) + " needs two nonempty samples");
    }
}

std::vector<double> sorted_copy(std::span<const double> s) {
    std::vector<double> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

TestOutcome wmw_from_rank_sum(double rank_sum, std::size_t m, std::size_t n) {
    if (m == 0 || n == 0) {
        throw DegenerateSample("WMW needs two nonempty samples");
    }
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    const double u1 = rank_sum - dm * (dm + 1.0) / 2.0;
    const double z = (u1 - dm * dn / 2.0) / std::sqrt(dm * dn * (dm + dn + 1.0) / 12.0);
    return {u1, z, clamp01(normal_cdf(z)), m, n};
}

TestOutcome wmw_one_sided(std::span<const double> gx, std::span<const double> gy) {
    require_nonempty(gx, gy, "WMW");
    struct Item {
        double value;
        bool first;
    };
    std::vector<Item> pooled;
    pooled.reserve(gx.size() + gy.size());
    for (double v : gx) pooled.push_back({v, true});
    for (double v : gy) pooled.push_back({v, false});
    std::sort(pooled.begin(), pooled.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

    double rank_sum = 0.0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        std::size_t firsts = 0;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) {
            firsts += pooled[j].first ? 1 : 0;
            ++j;
        }
        // Positions i+1 .. j share the midrank.
        const double midrank = static_cast<double>(i + 1 + j) / 2.0;
        rank_sum += midrank * static_cast<double>(firsts);
        i = j;
    }
    return wmw_from_rank_sum(rank_sum, gx.size(), gy.size());
}

TestOutcome pooled_t_one_sided(std::span<const double> gx, std::span<const double> gy) {
    require_nonempty(gx, gy, "pooled t");
    const auto x = sorted_copy(gx);
    const auto y = sorted_copy(gy);
    const double m = static_cast<double>(x.size());
    const double n = static_cast<double>(y.size());

    auto degenerate = [&](double mean_x, double mean_y) {
        const double p = mean_x == mean_y ? 0.5 : (mean_x < mean_y ? 0.0 : 1.0);
        return TestOutcome{0.0, std::nullopt, p, x.size(), y.size()};
    };
    const bool constant = x.front() == x.back() && y.front() == y.back();
    if (constant) {
        return degenerate(x.front(), y.front());
    }

    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    if (x.size() + y.size() < 3) {
        return degenerate(mean_x, mean_y);
    }
    double ss = 0.0;
    for (double v : x) ss += (v - mean_x) * (v - mean_x);
    double ssy = 0.0;
    for (double v : y) ssy += (v - mean_y) * (v - mean_y);
    ss += ssy;
    const double df = m + n - 2.0;
    const double sp = std::sqrt(ss / df);
    if (sp == 0.0) {
        return degenerate(mean_x, mean_y);
    }
    const double t = (mean_x - mean_y) / (sp * std::sqrt(1.0 / m + 1.0 / n));
    return {t, std::nullopt, clamp01(student_t_cdf(t, df)), x.size(), y.size()};
}

TestOutcome ks_one_sided(std::span<const double> gx, std::span<const double> gy) {
    require_nonempty(gx, gy, "KS");
    const auto x = sorted_copy(gx);
    const auto y = sorted_copy(gy);
    const auto m = static_cast<std::int64_t>(x.size());
    const auto n = static_cast<std::int64_t>(y.size());
    // Scaled difference i*n - j*m = mn (F_x - F_y) after every distinct value.
    std::int64_t best = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() || j < y.size()) {
        const double v = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        best = std::max(best, static_cast<std::int64_t>(i) * n - static_cast<std::int64_t>(j) * m);
    }
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    const double d_plus = static_cast<double>(best) / (dm * dn);
    const double p = std::exp(-2.0 * d_plus * d_plus * dm * dn / (dm + dn));
    return {d_plus, std::nullopt, clamp01(p), x.size(), y.size()};
}

namespace {

using u128 = unsigned __int128;

/// C(n, k) if it fits in 64 bits.
std::optional<std::uint64_t> binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    u128 r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) {
            return std::nullopt;
        }
    }
    return static_cast<std::uint64_t>(r);
}

double log_binomial(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

void check_precedence_args(std::size_t m, std::size_t n, std::size_t r) {
    if (m == 0 || n == 0) {
        throw DegenerateSample("precedence test needs two nonempty samples");
    }
    if (r < 1 || r > n) {
        throw std::out_of_range("precedence order r=" + std::to_string(r) + " outside [1, " + std::to_string(n) +
                                "]");
    }
}

}  // namespace

double precedence_tail(std::size_t m, std::size_t n, std::size_t r, std::size_t w) {
    check_precedence_args(m, n, r);
    if (w == 0) {
        return 1.0;
    }
    if (w > m) {
        return 0.0;
    }
    if (const auto total = binomial(m + n, m)) {
        // Every term is bounded by the total, so the running sum fits as well.
        std::uint64_t count = 0;
        for (std::size_t j = w; j <= m; ++j) {
            count += *binomial(j + r - 1, j) * *binomial(m - j + n - r, m - j);
        }
        return static_cast<double>(count) / static_cast<double>(*total);
    }
    const double log_total = log_binomial(m + n, m);
    double p = 0.0;
    for (std::size_t j = w; j <= m; ++j) {
        p += std::exp(log_binomial(j + r - 1, j) + log_binomial(m - j + n - r, m - j) - log_total);
    }
    return clamp01(p);
}

double precedence_tail_enumerated(std::size_t m, std::size_t n, std::size_t r, std::size_t w) {
    check_precedence_args(m, n, r);
    const std::size_t total_len = m + n;
    if (total_len > 62) {
        throw std::out_of_range("enumeration limited to m+n <= 62");
    }
    // Bit i set: position i (ascending) holds an x. Gosper's hack walks all masks with m bits.
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    const std::uint64_t last = ((std::uint64_t{1} << m) - 1) << n;
    for (std::uint64_t mask = (std::uint64_t{1} << m) - 1;;) {
        std::size_t ys = 0;
        std::size_t xs = 0;
        for (std::size_t pos = 0; pos < total_len; ++pos) {
            if ((mask >> pos) & 1u) {
                ++xs;
            } else if (++ys == r) {
                break;
            }
        }
        ++total;
        count += xs >= w ? 1 : 0;
        if (mask == last) {
            break;
        }
        const std::uint64_t low = mask & (~mask + 1);
        const std::uint64_t ripple = mask + low;
        mask = ripple | (((mask ^ ripple) >> 2) / low);
    }
    return static_cast<double>(count) / static_cast<double>(total);
}

TestOutcome precedence_one_sided(std::span<const double> gx, std::span<const double> gy, std::size_t r) {
    check_precedence_args(gx.size(), gy.size(), r);
    auto y = sorted_copy(gy);
    const double threshold = y[r - 1];
    const auto w = static_cast<std::size_t>(
        std::count_if(gx.begin(), gx.end(), [threshold](double v) { return v <= threshold; }));
    const std::size_t m = gx.size();
    const std::size_t n = gy.size();
    const double p = m + n <= 20 ? precedence_tail_enumerated(m, n, r, w) : precedence_tail(m, n, r, w);
    return {static_cast<double>(w), std::nullopt, p, m, n};
}

TestOutcome run_test(const TestSpec& spec, std::span<const double> gx, std::span<const double> gy) {
    switch (spec.kind) {
        case TestKind::wmw: return wmw_one_sided(gx, gy);
        case TestKind::pooled_t: return pooled_t_one_sided(gx, gy);
        case TestKind::ks: return ks_one_sided(gx, gy);
        case TestKind::precedence:
            if (spec.order == 0) {
                throw std::invalid_argument("precedence test needs an explicit order r >= 1");
            }
            return precedence_one_sided(gx, gy, spec.order);
    }
    throw std::invalid_argument("unknown test kind");
}

}  // namespace ibt
