#include "codedmm/encoding.hpp"

#include "codedmm/synthetic.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace codedmm;

namespace {

EncodingPlan plan_for(long long n, long long k_a, long long k_b, long long x,
                      std::uint64_t seed = 7) {
    return build_plan({n, k_a, k_b, x, seed});
}

std::set<long long> support_set(const ATask& t) {
    return {t.support.begin(), t.support.end()};
}

} // namespace

TEST_CASE("class decomposition") {
    const auto classes_12 = decompose_classes(derive_params({12, 3, 3, 0, 0}));
    CHECK(classes_12.classes[0] == std::vector<long long>{0, 4, 8});

    const auto classes_5 = decompose_classes(derive_params({5, 2, 2, 0, 0}));
    CHECK(classes_5.classes[0] == std::vector<long long>{0, 5});

    const auto singleton = decompose_classes(derive_params({4, 1, 2, 0, 0}));
    for (long long m = 0; m < singleton.ell; ++m) {
        CHECK(singleton.classes[static_cast<std::size_t>(m)] == std::vector<long long>{m});
    }

    // Disjoint cover of 0..num_a_blocks-1, block i in class i mod ell.
    const auto d = derive_params({24, 4, 5, 0, 0});
    const auto classes = decompose_classes(d);
    std::set<long long> all;
    for (long long m = 0; m < classes.ell; ++m) {
        for (long long i : classes.classes[static_cast<std::size_t>(m)]) {
            CHECK(i % classes.ell == m);
            CHECK(all.insert(i).second);
        }
    }
    CHECK(static_cast<long long>(all.size()) == d.num_a_blocks);
}

TEST_CASE("worker assignments for (12,3,3)") {
    const EncodingPlan plan = plan_for(12, 3, 3, 0);
    const WorkerPlan& w0 = plan.workers[0];
    CHECK(w0.tasks[0].block == 0);
    CHECK(w0.tasks[1].block == 1);
    CHECK(w0.tasks[2].block == 2);
    CHECK(w0.tasks[3].kind == ATask::Kind::coded);
    CHECK(support_set(w0.tasks[3]) == std::set<long long>{3, 7, 11});
    CHECK(w0.b.support == std::vector<long long>{0, 1});
}

TEST_CASE("worker assignments for (5,2,2)") {
    const EncodingPlan plan = plan_for(5, 2, 2, 0);
    const WorkerPlan& w0 = plan.workers[0];
    for (long long j = 0; j < 4; ++j) {
        CHECK(w0.tasks[static_cast<std::size_t>(j)].kind == ATask::Kind::uncoded);
        CHECK(w0.tasks[static_cast<std::size_t>(j)].block == j);
    }
    CHECK(support_set(w0.tasks[4]) == std::set<long long>{4, 9});
    CHECK(w0.b.support == std::vector<long long>{0, 1});
}

TEST_CASE("worker assignments for the matrix-vector case (5,3,1,x=1)") {
    const EncodingPlan plan = plan_for(5, 3, 1, 1);
    CHECK(plan.derived.a_weight() == 2);
    const WorkerPlan& w0 = plan.workers[0];
    CHECK(w0.tasks[0].block == 0);
    CHECK(w0.tasks[1].block == 1);
    CHECK(w0.tasks[2].block == 2);
    CHECK(w0.tasks[3].kind == ATask::Kind::coded);
    CHECK(w0.tasks[3].support == std::vector<long long>{3, 8});
    CHECK(w0.tasks[4].support == std::vector<long long>{4, 9});
    CHECK(w0.b.support == std::vector<long long>{0});
}

TEST_CASE("B supports follow the cyclic pattern for (12,2,5)") {
    const EncodingPlan plan = plan_for(12, 2, 5, 0);
    CHECK(plan.derived.b_weight == 3);
    for (const WorkerPlan& wp : plan.workers) {
        REQUIRE(wp.b.support.size() == 3);
        for (long long t = 0; t < 3; ++t) {
            CHECK(wp.b.support[static_cast<std::size_t>(t)] == (wp.worker + t) % 5);
        }
        CHECK(wp.b.type_id == wp.worker % 5);
    }
}

TEST_CASE("plan structure invariants across a grid") {
    const long long grid[][4] = {{5, 2, 2, 0},  {5, 3, 1, 1},  {8, 3, 2, 0}, {8, 3, 2, 1},
                                 {12, 3, 3, 0}, {24, 4, 5, 0}, {24, 4, 5, 2}};
    for (const auto& g : grid) {
        const EncodingPlan plan = plan_for(g[0], g[1], g[2], g[3]);
        const DerivedParams& d = plan.derived;
        for (const WorkerPlan& wp : plan.workers) {
            REQUIRE(static_cast<long long>(wp.tasks.size()) == d.tasks_per_worker);
            const long long u = wp.worker * (d.num_a_blocks / d.n);
            std::set<long long> classes_seen;
            for (long long j = 0; j < d.tasks_per_worker; ++j) {
                const ATask& t = wp.tasks[static_cast<std::size_t>(j)];
                if (j < d.uncoded_per_worker) {
                    CHECK(t.kind == ATask::Kind::uncoded);
                    CHECK(t.block == (u + j) % d.num_a_blocks);
                } else {
                    CHECK(t.kind == ATask::Kind::coded);
                    CHECK(static_cast<long long>(t.support.size()) == d.a_weight());
                    for (long long s : t.support) {
                        CHECK(s % d.tasks_per_worker == t.class_id);
                    }
                }
                CHECK(classes_seen.insert(t.class_id).second);  // one task per class
            }
            CHECK(static_cast<long long>(classes_seen.size()) == d.tasks_per_worker);
        }
        // Class cursors advance by a_weight per coded assignment.
        const long long coded_per_class = d.coded_per_worker * d.num_groups;
        for (long long c : plan.final_counters) {
            CHECK(c == (coded_per_class * d.a_weight()) % d.k_a);
        }
    }
}

TEST_CASE("appearance counts for (12,3,3)") {
    const AppearanceIndex idx = appearance_sets(plan_for(12, 3, 3, 0));
    for (long long i = 0; i < 12; ++i) {
        CHECK(idx.uncoded_workers[static_cast<std::size_t>(i)].size() == 3);
        CHECK(idx.coded_workers[static_cast<std::size_t>(i)].size() == 3);
    }
}

TEST_CASE("appearance counts for (5,3,1,x=1)") {
    const AppearanceIndex idx = appearance_sets(plan_for(5, 3, 1, 1));
    CHECK(idx.uncoded_workers[0].size() == 1);
    CHECK(idx.coded_workers[0].size() == 2);
    CHECK(idx.coded_workers[5].size() == 1);
    CHECK(idx.coded_workers[10].size() == 1);
}

TEST_CASE("coded appearances per class sum to the design total") {
    const long long grid[][4] = {{5, 2, 2, 0}, {8, 3, 2, 1}, {12, 3, 3, 0}, {24, 4, 5, 2}};
    for (const auto& g : grid) {
        const EncodingPlan plan = plan_for(g[0], g[1], g[2], g[3]);
        const DerivedParams& d = plan.derived;
        const AppearanceIndex idx = appearance_sets(plan);
        for (long long m = 0; m < d.tasks_per_worker; ++m) {
            long long total = 0;
            for (long long j = 0; j < d.k_a; ++j) {
                total += static_cast<long long>(
                    idx.coded_workers[static_cast<std::size_t>(j * d.tasks_per_worker + m)]
                        .size());
            }
            CHECK(total == d.coded_per_worker * d.num_groups * d.a_weight());
            CHECK(total == d.max_stragglers * d.a_weight());
        }
        // No block appears coded and uncoded in the same worker.
        for (long long i = 0; i < d.num_a_blocks; ++i) {
            for (long long w : idx.uncoded_workers[static_cast<std::size_t>(i)]) {
                const auto& v = idx.coded_workers[static_cast<std::size_t>(i)];
                CHECK(std::find(v.begin(), v.end(), w) == v.end());
            }
        }
    }
}

TEST_CASE("plans are deterministic in the seed") {
    const EncodingPlan a = plan_for(8, 3, 2, 1, 99);
    const EncodingPlan b = plan_for(8, 3, 2, 1, 99);
    std::ostringstream sa, sb;
    write_plan(sa, a);
    write_plan(sb, b);
    CHECK(sa.str() == sb.str());

    const EncodingPlan c = plan_for(8, 3, 2, 1, 100);
    std::ostringstream sc;
    write_plan(sc, c);
    CHECK(sa.str() != sc.str());
}

TEST_CASE("plan files round trip losslessly") {
    const EncodingPlan plan = plan_for(12, 3, 3, 0, 1234567);
    std::stringstream file;
    write_plan(file, plan);
    const EncodingPlan back = read_plan(file);
    std::ostringstream rewritten;
    write_plan(rewritten, back);
    std::ostringstream original;
    write_plan(original, plan);
    CHECK(rewritten.str() == original.str());
}

TEST_CASE("encode_blocks materializes the plan") {
    Rng rng(55);
    const SparseMatrix a = random_sparse(60, 24, 0.3, rng);
    const SparseMatrix b = random_sparse(60, 6, 0.3, rng);
    EncodingPlan plan = plan_for(12, 3, 3, 0);
    const PartitionedMatrix pa(a, plan.derived.num_a_blocks);
    const PartitionedMatrix pb(b, plan.derived.num_b_blocks);

    SUBCASE("unit coefficients project onto a single block") {
        plan.workers[0].tasks[3].coefficients = {1.0, 0.0, 0.0};
        const auto payloads = encode_blocks(pa, pb, plan);
        const long long first = plan.workers[0].tasks[3].support[0];
        CHECK((payloads[0].a_blocks[3]->to_dense() - pa.block(first).to_dense()).norm() == 0.0);
    }

    SUBCASE("uncoded payloads alias the partition blocks") {
        const auto payloads = encode_blocks(pa, pb, plan);
        CHECK(payloads[0].a_blocks[0].get() == &pa.block(0));
        CHECK(payloads[0].a_blocks[0]->nnz() == pa.block(0).nnz());
    }

    SUBCASE("dimension mismatches are rejected") {
        const PartitionedMatrix wrong(a, 8);
        CHECK_THROWS_AS(encode_blocks(wrong, pb, plan), std::invalid_argument);
    }
}

TEST_CASE("coded block density tracks the union-of-supports estimate") {
    // Weight-4 combinations of 2%-dense blocks: expected 1 - 0.98^4.
    Rng rng(77);
    const double density = 0.02;
    const SparseMatrix a = random_sparse(3000, 4800, density, rng);
    const SparseMatrix b = random_sparse(3000, 1500, density, rng);
    const EncodingPlan plan = plan_for(24, 4, 5, 0);
    const auto payloads = encode_blocks(PartitionedMatrix(a, 24), PartitionedMatrix(b, 5), plan);

    const double expect_a = 1.0 - std::pow(1.0 - density, 4.0);
    const double expect_b = 1.0 - std::pow(1.0 - density, 3.0);
    for (long long w : {0, 7, 23}) {
        const auto& payload = payloads[static_cast<std::size_t>(w)];
        const auto& coded = payload.a_blocks.back();  // the coded slot
        CHECK(std::abs(coded->density() - expect_a) <= 0.1 * expect_a);
        CHECK(std::abs(payload.b_block->density() - expect_b) <= 0.1 * expect_b);
    }

    // Uncoded payloads keep the source block sparsity exactly.
    const PartitionedMatrix pa(a, 24);
    CHECK(payloads[0].a_blocks[0]->nnz() == pa.block(0).nnz());
}
