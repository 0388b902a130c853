#include "codedmm/decoder.hpp"

#include "codedmm/synthetic.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <stdexcept>
#include <vector>

using namespace codedmm;
using codedmm::test::naive_gram;

namespace {

EncodingPlan plan_for(long long n, long long k_a, long long k_b, long long x,
                      std::uint64_t seed = 7) {
    return build_plan({n, k_a, k_b, x, seed});
}

struct Instance {
    EncodingPlan plan;
    PartitionedMatrix a;
    PartitionedMatrix b;
    std::vector<WorkerPayload> payloads;
    DenseMatrix direct;
};

Instance make_instance(long long n, long long k_a, long long k_b, long long x, long long t,
                       long long r, long long w, std::uint64_t seed = 7) {
    EncodingPlan plan = plan_for(n, k_a, k_b, x, seed);
    Rng rng(seed ^ 0xabcd);
    const DenseMatrix a = random_dense(t, r, rng);
    const DenseMatrix b = random_dense(t, w, rng);
    PartitionedMatrix pa(a, plan.derived.num_a_blocks);
    PartitionedMatrix pb(b, plan.derived.num_b_blocks);
    auto payloads = encode_blocks(pa, pb, plan);
    return {std::move(plan), std::move(pa), std::move(pb), std::move(payloads),
            naive_gram(a, b)};
}

std::vector<CompletedProduct> all_products(const Instance& inst) {
    std::vector<CompletedProduct> products;
    for (const WorkerPlan& wp : inst.plan.workers) {
        const auto& payload = inst.payloads[static_cast<std::size_t>(wp.worker)];
        for (std::size_t loc = 0; loc < payload.a_blocks.size(); ++loc) {
            GramProduct g = gram_product(*payload.a_blocks[loc], *payload.b_block);
            products.push_back({wp.worker, static_cast<long long>(loc), std::move(g.value)});
        }
    }
    return products;
}

} // namespace

TEST_CASE("ledger recording") {
    ProgressLedger ledger(3, 2);
    CHECK(ledger.count(0) == 0);
    ledger.record_completion(0);
    CHECK(ledger.count(0) == 1);
    ledger.record_completion(0);
    CHECK(ledger.finished(0));
    CHECK_THROWS_AS(ledger.record_completion(0), std::invalid_argument);
    CHECK(ledger.total() == 2);
}

TEST_CASE("decodability on the (12,3,3) plan") {
    const EncodingPlan plan = plan_for(12, 3, 3, 0);
    const long long ell = plan.derived.tasks_per_worker;

    SUBCASE("full completion decodes every class") {
        const auto report = is_decodable(ProgressLedger::full(12, ell), plan);
        CHECK(report.decodable);
        for (long long r : report.class_ranks) CHECK(r == 9);
    }

    SUBCASE("three idle workers still decode") {
        std::vector<long long> counts(12, ell);
        counts[0] = counts[10] = counts[11] = 0;
        const auto report =
            is_decodable(ProgressLedger::from_counts(counts, ell), plan);
        CHECK(report.decodable);
    }
}

TEST_CASE("partial-progress threshold on the (5,2,2) plan") {
    const EncodingPlan plan = plan_for(5, 2, 2, 0, 4);
    const long long ell = plan.derived.tasks_per_worker;

    // Hand-built starving pattern: worker 0 stops before its class-4
    // combination and worker 3 stops before block 9, so block 9 is seen
    // only once and its two unknowns cannot both be recovered.
    const std::vector<long long> worst{4, 5, 5, 3, 5};
    long long total = 0;
    for (long long c : worst) total += c;
    CHECK(total == 22);
    CHECK_FALSE(is_decodable(ProgressLedger::from_counts(worst, ell), plan).decodable);

    // Any ledger carrying 23 or more products decodes.  Enumerate all
    // (ell+1)^5 ledgers and check every one at or above the threshold.
    std::vector<long long> counts(5, 0);
    while (true) {
        long long sum = 0;
        for (long long c : counts) sum += c;
        if (sum >= 23) {
            CHECK(is_decodable(ProgressLedger::from_counts(counts, ell), plan).decodable);
        }
        long long i = 0;
        while (i < 5 && counts[static_cast<std::size_t>(i)] == ell) {
            counts[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == 5) break;
        ++counts[static_cast<std::size_t>(i)];
    }
}

TEST_CASE("decodability is monotone in the ledger") {
    const EncodingPlan plan = plan_for(8, 3, 2, 1, 11);
    const long long ell = plan.derived.tasks_per_worker;
    Rng rng(123);
    for (int round = 0; round < 20; ++round) {
        std::vector<long long> counts(8);
        for (auto& c : counts) {
            c = static_cast<long long>(rng.next_u64() % static_cast<std::uint64_t>(ell + 1));
        }
        if (!is_decodable(ProgressLedger::from_counts(counts, ell), plan).decodable) continue;
        std::vector<long long> more = counts;
        for (auto& c : more) {
            c = std::min(ell, c + static_cast<long long>(rng.next_u64() % 3));
        }
        CHECK(is_decodable(ProgressLedger::from_counts(more, ell), plan).decodable);
    }
}

TEST_CASE("decode recovers the product from the first threshold workers") {
    const Instance inst = make_instance(12, 3, 3, 0, 60, 120, 30);
    const auto products = all_products(inst);
    std::vector<long long> survivors(9);
    std::iota(survivors.begin(), survivors.end(), 0);
    const RecoveredResult result = decode_from_survivors(inst.plan, products, survivors);
    CHECK((result.product - inst.direct).norm() <= 1e-10 * inst.direct.norm());
    CHECK(result.class_residuals.size() == 4);
}

TEST_CASE("matrix-vector recovery under any single straggler") {
    const Instance inst = make_instance(5, 3, 1, 1, 60, 120, 1);
    const auto products = all_products(inst);
    for (long long straggler = 0; straggler < 5; ++straggler) {
        std::vector<long long> survivors;
        for (long long i = 0; i < 5; ++i) {
            if (i != straggler) survivors.push_back(i);
        }
        const RecoveredResult result = decode_from_survivors(inst.plan, products, survivors);
        CHECK((result.product - inst.direct).norm() <= 1e-6 * inst.direct.norm());
    }
}

TEST_CASE("unit-coefficient plan decodes by copying blocks") {
    EncodingPlan plan = plan_for(12, 3, 3, 0);
    for (WorkerPlan& wp : plan.workers) {
        for (ATask& t : wp.tasks) {
            if (t.kind == ATask::Kind::coded) {
                t.coefficients.assign(t.coefficients.size(), 0.0);
                t.coefficients[0] = 1.0;
            }
        }
        wp.b.coefficients.assign(wp.b.coefficients.size(), 0.0);
        wp.b.coefficients[0] = 1.0;
    }
    Rng rng(9);
    const DenseMatrix a = random_dense(30, 48, rng);
    const DenseMatrix b = random_dense(30, 12, rng);
    const PartitionedMatrix pa(a, 12);
    const PartitionedMatrix pb(b, 3);
    const auto payloads = encode_blocks(pa, pb, plan);

    std::vector<CompletedProduct> products;
    for (const WorkerPlan& wp : plan.workers) {
        for (std::size_t loc = 0; loc < wp.tasks.size(); ++loc) {
            GramProduct g =
                gram_product(*payloads[static_cast<std::size_t>(wp.worker)].a_blocks[loc],
                             *payloads[static_cast<std::size_t>(wp.worker)].b_block);
            products.push_back({wp.worker, static_cast<long long>(loc), std::move(g.value)});
        }
    }
    const RecoveredResult result =
        decode(ProgressLedger::full(12, 4), products, plan);
    const DenseMatrix direct = naive_gram(a, b);
    CHECK((result.product - direct).norm() <= 1e-12 * direct.norm());
}

TEST_CASE("every threshold-sized survivor set decodes for (12,3,3)") {
    const Instance inst = make_instance(12, 3, 3, 0, 36, 60, 15);
    const auto products = all_products(inst);
    std::vector<long long> idx{0, 1, 2, 3, 4, 5, 6, 7, 8};
    long long checked = 0;
    do {
        const RecoveredResult result = decode_from_survivors(inst.plan, products, idx);
        REQUIRE((result.product - inst.direct).norm() <= 1e-6 * inst.direct.norm());
        ++checked;
        // Advance to the next 9-of-12 combination.
        long long i = 8;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == 12 - 9 + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (long long j = i + 1; j < 9; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    } while (true);
    CHECK(checked == 220);
}

TEST_CASE("survivor count below the threshold is rejected") {
    const Instance inst = make_instance(5, 2, 2, 0, 20, 20, 8);
    const auto products = all_products(inst);

    std::vector<long long> all{0, 1, 2, 3, 4};
    CHECK_NOTHROW(decode_from_survivors(inst.plan, products, all));

    std::vector<long long> too_few{0, 1, 2};
    CHECK_THROWS_AS(decode_from_survivors(inst.plan, products, too_few),
                    std::invalid_argument);
}
