#include "codedmm/scheme.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace codedmm {

namespace {

constexpr long long kMaxParam = 1'000'000;

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

} // namespace

DerivedParams derive_params(const SchemeParams& params) {
    const long long n = params.n;
    const long long k_a = params.k_a;
    const long long k_b = params.k_b;
    const long long x = params.x;

    if (n <= 0 || k_a <= 0 || k_b <= 0) {
        throw std::invalid_argument("scheme: n, k_a, k_b must be positive");
    }
    if (n > kMaxParam || k_a > kMaxParam || k_b > kMaxParam) {
        throw std::invalid_argument("scheme: parameter exceeds supported range of 10^6");
    }
    if (n <= k_a * k_b) {
        throw std::invalid_argument("scheme: no straggler margin, need n > k_a*k_b");
    }

    const long long s_max = n - k_a * k_b;
    if (x < 0 || x > s_max - 1) {
        throw std::invalid_argument(
            "scheme: degenerate relaxation, need 0 <= x <= s_max-1 = " +
            std::to_string(s_max - 1));
    }

    DerivedParams d;
    d.n = n;
    d.k_a = k_a;
    d.k_b = k_b;
    d.x = x;
    d.max_stragglers = s_max;
    d.stragglers = s_max - x;
    d.weight_reduction = (k_a * x) / s_max;

    // lcm(n, k_a) cannot overflow: both operands are <= 10^6.
    d.num_a_blocks = std::lcm(n, k_a);
    d.num_b_blocks = k_b;
    d.num_unknowns = d.num_a_blocks * d.num_b_blocks;
    d.uncoded_per_worker = d.num_unknowns / n;
    d.tasks_per_worker = d.num_a_blocks / k_a;
    d.coded_per_worker = d.tasks_per_worker - d.uncoded_per_worker;
    d.num_groups = n / d.tasks_per_worker;
    d.type_window = 1 + ceil_div(s_max, k_b);
    d.b_weight = 1 + k_b - ceil_div(k_b, d.type_window);
    d.recovery_threshold = k_a * k_b + x;
    d.appearances = k_b + s_max;
    return d;
}

} // namespace codedmm
