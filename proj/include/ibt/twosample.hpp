#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ibt {

/// An engine was handed an empty sample (or one it cannot score).
class DegenerateSample : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class TestKind { wmw, pooled_t, ks, precedence };

/**
 * Engine choice. `order` is the precedence parameter r (index of the order
 * statistic of the second sample). Zero asks the classifier to derive it from
 * the neighbourhood: r = (neighbours outside the target class) + 1.
 */
struct TestSpec {
    TestKind kind = TestKind::wmw;
    std::size_t order = 0;
};

std::string_view to_string(TestKind kind);
TestKind parse_test_kind(std::string_view text);

/// One-sided outcome; a small p means the first sample is stochastically smaller.
struct TestOutcome {
    double statistic = 0.0;
    std::optional<double> z;
    double p = 1.0;
    std::size_t m = 0;
    std::size_t n = 0;
};

double normal_cdf(double z);
double student_t_cdf(double t, double df);

/// Midrank WMW with the plain normal approximation (no tie or continuity correction).
TestOutcome wmw_one_sided(std::span<const double> gx, std::span<const double> gy);

/// Same outcome computed from the pooled-rank sum of the first sample.
TestOutcome wmw_from_rank_sum(double rank_sum, std::size_t m, std::size_t n);

/**
 * Pooled-variance t test. When the pooled deviation is zero (or there are no
 * degrees of freedom) p is 0.5 for equal means, 0 when gx has the smaller mean
 * and 1 otherwise.
 */
TestOutcome pooled_t_one_sided(std::span<const double> gx, std::span<const double> gy);

/// D+ = max(F_x - F_y), p = exp(-2 D+^2 mn/(m+n)).
TestOutcome ks_one_sided(std::span<const double> gx, std::span<const double> gy);

/**
 * W_r = #{x <= y_(r)}; p = P(W >= W_r) over equiprobable arrangements.
 * Exact enumeration for m+n <= 20, closed form beyond.
 */
TestOutcome precedence_one_sided(std::span<const double> gx, std::span<const double> gy, std::size_t r);

/// P(W_r >= w) from the closed form C(w+r-1, w) C(m-w+n-r, m-w) / C(m+n, m).
double precedence_tail(std::size_t m, std::size_t n, std::size_t r, std::size_t w);

/// P(W_r >= w) by walking all C(m+n, m) arrangements. Needs m+n <= 62.
double precedence_tail_enumerated(std::size_t m, std::size_t n, std::size_t r, std::size_t w);

/// Dispatches on `spec.kind`; precedence uses `spec.order`, which must be set.
TestOutcome run_test(const TestSpec& spec, std::span<const double> gx, std::span<const double> gy);

}  // namespace ibt
