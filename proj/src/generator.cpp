#include "codedmm/generator.hpp"

#include <algorithm>
#include <stdexcept>

namespace codedmm {

BGenerator build_GB(const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;
    BGenerator gen;
    gen.coefficients = DenseMatrix::Zero(d.k_b, d.n);
    long long weight = 0;
    for (const WorkerPlan& wp : plan.workers) {
        weight = std::max<long long>(weight, static_cast<long long>(wp.b.support.size()));
        for (std::size_t t = 0; t < wp.b.support.size(); ++t) {
            gen.coefficients(wp.b.support[t], wp.worker) = wp.b.coefficients[t];
        }
    }
    gen.b_weight = weight;
    return gen;
}

ClassSystem build_class_system(const EncodingPlan& plan, long long class_id) {
    const DerivedParams& d = plan.derived;
    if (class_id < 0 || class_id >= d.tasks_per_worker) {
        throw std::invalid_argument("class system: class id out of range");
    }
    ClassSystem sys;
    sys.class_id = class_id;
    sys.g_a = DenseMatrix::Zero(d.k_a, d.n);
    sys.g_b = build_GB(plan).coefficients;
    for (const WorkerPlan& wp : plan.workers) {
        for (const ATask& t : wp.tasks) {
            if (t.class_id != class_id) continue;
            if (t.kind == ATask::Kind::uncoded) {
                sys.g_a(t.block / d.tasks_per_worker, wp.worker) = 1.0;
            } else {
                for (std::size_t j = 0; j < t.support.size(); ++j) {
                    sys.g_a(t.support[j] / d.tasks_per_worker, wp.worker) = t.coefficients[j];
                }
            }
        }
    }
    sys.g = khatri_rao_columns(sys.g_a, sys.g_b);
    return sys;
}

RiMatrix extract_Ri(const EncodingPlan& plan, long long block) {
    const DerivedParams& d = plan.derived;
    if (d.x != 0) {
        throw std::invalid_argument(
            "extract_Ri: unsupported for x > 0 (appearance structure not guaranteed)");
    }
    if (block < 0 || block >= d.num_a_blocks) {
        throw std::invalid_argument("extract_Ri: block index out of range");
    }

    const AppearanceIndex idx = appearance_sets(plan);
    std::vector<long long> workers = idx.uncoded_workers[static_cast<std::size_t>(block)];
    const auto& coded = idx.coded_workers[static_cast<std::size_t>(block)];
    workers.insert(workers.end(), coded.begin(), coded.end());
    std::sort(workers.begin(), workers.end());

    RiMatrix ri;
    ri.block = block;
    ri.workers = workers;
    ri.coefficients = DenseMatrix::Zero(d.k_b, static_cast<long long>(workers.size()));
    for (std::size_t c = 0; c < workers.size(); ++c) {
        const WorkerPlan& wp = plan.workers[static_cast<std::size_t>(workers[c])];
        for (std::size_t t = 0; t < wp.b.support.size(); ++t) {
            ri.coefficients(wp.b.support[t], static_cast<long long>(c)) = wp.b.coefficients[t];
        }
    }

    // The worker types form sigma consecutive residues mod k_b.  When
    // sigma is not a multiple of k_b the run start is the unique residue
    // where the multiplicity steps up; otherwise any start fits and the
    // type of the lowest-index appearance worker is used.
    const long long k_b = d.k_b;
    std::vector<long long> count(static_cast<std::size_t>(k_b), 0);
    for (long long w : workers) count[static_cast<std::size_t>(w % k_b)]++;
    const long long sigma = static_cast<long long>(workers.size());
    const long long rem = sigma % k_b;
    if (rem == 0) {
        ri.start_type = workers.empty() ? 0 : workers.front() % k_b;
    } else {
        const long long base = sigma / k_b;
        ri.start_type = -1;
        for (long long t = 0; t < k_b; ++t) {
            if (count[static_cast<std::size_t>(t)] == base + 1 &&
                count[static_cast<std::size_t>((t - 1 + k_b) % k_b)] == base) {
                ri.start_type = t;
                break;
            }
        }
    }
    return ri;
}

} // namespace codedmm
