#include "codedmm/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace codedmm;

namespace {

EncodingPlan plan_for(long long n, long long k_a, long long k_b, long long x,
                      std::uint64_t seed = 7) {
    return build_plan({n, k_a, k_b, x, seed});
}

DerivedParams derive(long long n, long long k_a, long long k_b, long long x) {
    return derive_params({n, k_a, k_b, x, 0});
}

} // namespace

TEST_CASE("maximum products for a bounded class appearance count") {
    const DerivedParams fig3 = derive(5, 2, 2, 0);  // ell = 5, c = 1
    CHECK(eta_max_products(fig3, 4) == 22);
    CHECK(eta_max_products(fig3, 1) == 5 * 4 / 2);

    const DerivedParams n8 = derive(8, 3, 2, 0);  // ell = 8, c = 1
    CHECK(eta_max_products(n8, 6) == 58);
    CHECK(eta_max_products(n8, 1) == 8 * 7 / 2);

    CHECK_THROWS_AS(eta_max_products(n8, 0), std::invalid_argument);
    CHECK_THROWS_AS(eta_max_products(n8, 10), std::invalid_argument);
    // kappa = n + 1 unlocks every product.
    CHECK(eta_max_products(n8, 9) == 8 * 8);
}

TEST_CASE("bounded-appearance maxima match brute-force ledger enumeration") {
    const EncodingPlan plan = plan_for(5, 2, 2, 0, 4);
    const DerivedParams& d = plan.derived;
    const long long ell = d.tasks_per_worker;
    const long long kappa = 4;

    for (long long m = 0; m < ell; ++m) {
        std::vector<long long> locs;
        for (long long i = 0; i < d.n; ++i) locs.push_back(plan.class_location(m, i));
        long long best = -1;
        std::vector<long long> counts(static_cast<std::size_t>(d.n), 0);
        while (true) {
            long long total = 0, appearances = 0;
            for (long long i = 0; i < d.n; ++i) {
                total += counts[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(i)] > locs[static_cast<std::size_t>(i)]) {
                    ++appearances;
                }
            }
            if (appearances == kappa - 1) best = std::max(best, total);
            long long i = 0;
            while (i < d.n && counts[static_cast<std::size_t>(i)] == ell) {
                counts[static_cast<std::size_t>(i)] = 0;
                ++i;
            }
            if (i == d.n) break;
            ++counts[static_cast<std::size_t>(i)];
        }
        CHECK(best == eta_max_products(d, kappa));
    }
}

TEST_CASE("Q bounds reproduce the reference systems") {
    const QBounds n8_x0 = q_bounds(derive(8, 3, 2, 0));
    CHECK(n8_x0.q_lb == 59);
    CHECK(n8_x0.q_ub == 59);

    const QBounds n8_x1 = q_bounds(derive(8, 3, 2, 1));
    CHECK(n8_x1.q_lb == 60);
    CHECK(n8_x1.q_ub == 62);

    const QBounds n24_x0 = q_bounds(derive(24, 4, 5, 0));
    CHECK(n24_x0.q_lb == 139);
    CHECK(n24_x0.q_ub == 139);

    const QBounds n24_x2 = q_bounds(derive(24, 4, 5, 2));
    CHECK(n24_x2.q_lb == 141);
    CHECK(n24_x2.q_ub == 142);

    const QBounds fig3 = q_bounds(derive(5, 2, 2, 0));
    CHECK(fig3.q_lb == 23);
    CHECK(fig3.q_ub == 23);
}

TEST_CASE("exhaustive oracle equals the closed form on the (5,2,2) plan") {
    const EncodingPlan plan = plan_for(5, 2, 2, 0, 4);
    CHECK(q_exact_oracle(plan, OracleMode::exhaustive_ledgers) == 23);
}

TEST_CASE("subset-search oracle on the (8,3,2) plans") {
    CHECK(q_exact_oracle(plan_for(8, 3, 2, 0, 4), OracleMode::per_class_subsets) == 59);

    const long long q = q_exact_oracle(plan_for(8, 3, 2, 1, 4), OracleMode::per_class_subsets);
    const QBounds bounds = q_bounds(derive(8, 3, 2, 1));
    CHECK(q >= bounds.q_lb);
    CHECK(q <= bounds.q_ub);
    WARN_MESSAGE(q == 61, "reference plans land on 61; value here is " << q);
}

TEST_CASE("oracle equals the closed form whenever x = 0") {
    for (auto [n, k_a, k_b] : {std::tuple<long long, long long, long long>{5, 2, 2},
                               {8, 3, 2},
                               {12, 3, 3},
                               {10, 4, 2}}) {
        const EncodingPlan plan = plan_for(n, k_a, k_b, 0, 21);
        const QBounds bounds = q_bounds(plan.derived);
        CHECK(bounds.q_lb == bounds.q_ub);
        CHECK(q_exact_oracle(plan, OracleMode::per_class_subsets) == bounds.q_ub);
    }
}

TEST_CASE("oracle stays within the bounds for x > 0") {
    for (auto [n, k_a, k_b, x] : {std::tuple<long long, long long, long long, long long>
                                  {8, 3, 2, 1}, {5, 3, 1, 1}, {10, 4, 2, 1}}) {
        const EncodingPlan plan = plan_for(n, k_a, k_b, x, 31);
        const QBounds bounds = q_bounds(plan.derived);
        const long long q = q_exact_oracle(plan, OracleMode::per_class_subsets);
        CHECK(q >= bounds.q_lb);
        CHECK(q <= bounds.q_ub);
    }
}

TEST_CASE("oracle size limits") {
    CHECK_THROWS_AS(q_exact_oracle(plan_for(8, 3, 2, 0), OracleMode::exhaustive_ledgers),
                    std::invalid_argument);
    CHECK_THROWS_AS(q_exact_oracle(plan_for(24, 4, 5, 0), OracleMode::per_class_subsets),
                    std::invalid_argument);
}

TEST_CASE("coprime x=0 closed form") {
    // With n and k_a coprime, Q = Delta + s_max(n + k_a k_b - 1)/2 + 1.
    for (auto [n, k_a, k_b] : {std::tuple<long long, long long, long long>{5, 2, 2},
                               {8, 3, 2},
                               {5, 3, 1},
                               {7, 2, 3},
                               {9, 4, 2}}) {
        const DerivedParams d = derive(n, k_a, k_b, 0);
        REQUIRE(std::gcd(n, k_a) == 1);
        const long long lhs = 2 * (q_bounds(d).q_ub - 1 - d.num_unknowns);
        CHECK(lhs == d.max_stragglers * (n + k_a * k_b - 1));
    }
}

TEST_CASE("conditioning sweep on a small plan") {
    const EncodingPlan plan = plan_for(8, 3, 2, 0, 3);
    const ConditioningReport report = kappa_worst(plan, 2);
    CHECK_FALSE(report.sampled);
    CHECK(report.subsets_checked == 28);
    CHECK(report.kappa_worst >= 1.0);
    CHECK(std::isfinite(report.kappa_worst));
    CHECK(report.worst_stragglers.size() == 2);
    CHECK(report.worst_class >= 0);
    REQUIRE(report.quantiles.size() == 5);
    CHECK(report.quantiles.front() <= report.quantiles.back());
    CHECK(report.quantiles.back() == doctest::Approx(report.kappa_worst));
}

TEST_CASE("assignment properties pass on the reference grid") {
    const long long grid[][4] = {{5, 2, 2, 0},  {5, 3, 1, 1},  {8, 3, 2, 0}, {8, 3, 2, 1},
                                 {12, 3, 3, 0}, {24, 4, 5, 0}, {24, 4, 5, 2}};
    for (const auto& g : grid) {
        const EncodingPlan plan = plan_for(g[0], g[1], g[2], g[3]);
        const PropertyReport report = verify_assignment_properties(plan);
        CHECK(report.all_pass);
        const double expected = static_cast<double>(plan.derived.max_stragglers *
                                                    plan.derived.a_weight()) /
                                static_cast<double>(plan.derived.k_a);
        for (double mu : report.mean_coded_appearances) {
            CHECK(mu == doctest::Approx(expected));
        }
    }
}

TEST_CASE("a planted cross-class support member breaks the partition checks") {
    EncodingPlan plan = plan_for(12, 3, 3, 0);
    // Worker 0's combination covers class 3 = {3, 7, 11}; smuggle in a
    // member of class 2.
    REQUIRE(plan.workers[0].tasks[3].support == std::vector<long long>{3, 7, 11});
    plan.workers[0].tasks[3].support[2] = 10;
    const PropertyReport report = verify_assignment_properties(plan);
    CHECK_FALSE(report.all_pass);
    bool partition_failed = false;
    for (const PropertyCheck& c : report.checks) {
        if (c.name == "class worker partition" && !c.pass) partition_failed = true;
    }
    CHECK(partition_failed);
}

TEST_CASE("type structure holds at x = 0") {
    for (auto [n, k_a, k_b] : {std::tuple<long long, long long, long long>{12, 3, 3},
                               {12, 2, 5},
                               {5, 2, 2},
                               {8, 3, 2}}) {
        const PropertyReport report = verify_type_structure(plan_for(n, k_a, k_b, 0));
        CHECK(report.all_pass);
    }
    CHECK_THROWS_AS(verify_type_structure(plan_for(8, 3, 2, 1)), std::invalid_argument);
}

TEST_CASE("an undersized B weight breaks the coefficient rank property") {
    // (12,2,5) needs weight 3; forcing 2 leaves a 5-column selection whose
    // supports cover only 4 rows, which no coefficient draw can fix.
    PlanOptions options;
    options.b_weight_override = 2;
    const EncodingPlan weak = build_plan({12, 2, 5, 0, 7}, options);
    const PropertyReport report = verify_type_structure(weak);
    CHECK_FALSE(report.all_pass);
}

TEST_CASE("resilience sweep passes at the design straggler count") {
    const EncodingPlan fig4 = plan_for(12, 3, 3, 0);
    const PropertyReport r4 = verify_resilience(fig4, 3);
    CHECK(r4.all_pass);
    CHECK(r4.exhaustive);

    const EncodingPlan fig3 = plan_for(5, 2, 2, 0);
    CHECK(verify_resilience(fig3, 1).all_pass);
}

TEST_CASE("one straggler beyond the design count breaks some subset") {
    CHECK_FALSE(verify_resilience(plan_for(12, 3, 3, 0), 4).all_pass);
    CHECK_FALSE(verify_resilience(plan_for(8, 3, 2, 1), 2).all_pass);
}

TEST_CASE("threshold-size column subsets keep full rank") {
    for (const auto& g : {std::tuple<long long, long long, long long, long long>{5, 2, 2, 0},
                          {5, 3, 1, 1},
                          {8, 3, 2, 1},
                          {12, 3, 3, 0}}) {
        const auto [n, k_a, k_b, x] = g;
        CHECK(verify_column_subset_ranks(plan_for(n, k_a, k_b, x)).all_pass);
    }
}

TEST_CASE("sparsity cost model") {
    const DerivedParams d = derive(12, 3, 3, 0);
    const SparsityCostModel model = sparsity_cost_model(d, 0.02, 1200, 1200, 300);
    CHECK(model.ratio == 1.0 / 3.0);
    CHECK(model.proposed_worker_flops / model.baseline_worker_flops ==
          doctest::Approx(model.ratio));

    // zeta = k_b with no straggler margin collapses to 1/k_a.
    CHECK(sparsity_cost_ratio(8, 2, 2, 0) == doctest::Approx(0.25));

    CHECK_THROWS_AS(sparsity_cost_model(d, 0.0, 10, 12, 3), std::invalid_argument);
    CHECK_THROWS_AS(sparsity_cost_model(d, 1.5, 10, 12, 3), std::invalid_argument);
}

TEST_CASE("dense inputs reduce the model to exact dense flop counts") {
    const DerivedParams d = derive(12, 3, 3, 0);
    const long long t = 50, r = 60, w = 30;
    const SparsityCostModel model = sparsity_cost_model(d, 1.0, t, r, w);

    EncodingPlan plan = plan_for(12, 3, 3, 0);
    Rng rng(5);
    const SparseMatrix a = random_sparse(t, r, 1.0, rng);
    const SparseMatrix b = random_sparse(t, w, 1.0, rng);
    const auto payloads =
        encode_blocks(PartitionedMatrix(a, 12), PartitionedMatrix(b, 3), plan);

    const GramProduct uncoded = gram_product(*payloads[0].a_blocks[0], *payloads[0].b_block);
    CHECK(std::abs(static_cast<double>(uncoded.flops) - model.uncoded_task_flops) <=
          0.05 * model.uncoded_task_flops);
    const GramProduct coded = gram_product(*payloads[0].a_blocks[3], *payloads[0].b_block);
    CHECK(std::abs(static_cast<double>(coded.flops) - model.coded_task_flops) <=
          0.05 * model.coded_task_flops);
}
