#pragma once

#include "codedmm/encoding.hpp"
#include "codedmm/generator.hpp"
#include "codedmm/linalg.hpp"

#include <span>
#include <vector>

namespace codedmm {

/// Per-worker count of completed block products.  A worker with count t has
/// finished locations 0..t-1 of its task list, matching the top-to-bottom
/// execution order.
class ProgressLedger {
public:
    ProgressLedger(long long workers, long long tasks_per_worker);

    /// Increments the worker's count; throws when the worker already
    /// finished all its tasks.
    void record_completion(long long worker);

    long long count(long long worker) const { return counts_.at(static_cast<std::size_t>(worker)); }
    long long total() const;
    long long worker_count() const { return static_cast<long long>(counts_.size()); }
    long long tasks_per_worker() const { return tasks_per_worker_; }
    bool finished(long long worker) const { return count(worker) == tasks_per_worker_; }

    static ProgressLedger full(long long workers, long long tasks_per_worker);
    static ProgressLedger from_counts(std::vector<long long> counts, long long tasks_per_worker);

private:
    std::vector<long long> counts_;
    long long tasks_per_worker_ = 0;
};

struct CompletedProduct {
    long long worker = 0;
    long long location = 0;
    DenseMatrix value;
};

/// Per-class rank of the generator columns whose product is available under
/// the ledger, and the overall decodability flag.
struct DecodabilityReport {
    std::vector<long long> class_ranks;
    long long required_rank = 0;
    bool decodable = false;
};

DecodabilityReport is_decodable(const ProgressLedger& ledger, const EncodingPlan& plan);

/// Precomputed class systems and locations for repeated decodability
/// checks against the same plan (the simulator drives one per event).
class DecodabilityChecker {
public:
    explicit DecodabilityChecker(const EncodingPlan& plan);
    DecodabilityReport check(const ProgressLedger& ledger) const;

private:
    const EncodingPlan* plan_;
    std::vector<ClassSystem> systems_;
    std::vector<std::vector<long long>> locations_;  // [class][worker]
};

struct RecoveredResult {
    DenseMatrix product;  ///< the assembled A^T B (padded size when padding was used)
    std::vector<double> class_residuals;
    std::vector<double> class_conditions;
};

/// Recovers all block products from the completed products implied by the
/// ledger.  Each class system is solved by least squares over every
/// available equation.  Throws when some class is rank-deficient.
RecoveredResult decode(const ProgressLedger& ledger,
                       std::span<const CompletedProduct> products,
                       const EncodingPlan& plan);

/// decode() with full progress on the given workers and none elsewhere.
/// Throws when fewer than recovery_threshold workers are given.
RecoveredResult decode_from_survivors(const EncodingPlan& plan,
                                      std::span<const CompletedProduct> products,
                                      std::span<const long long> survivors);

} // namespace codedmm
