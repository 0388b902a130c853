#pragma once

#include "codedmm/linalg.hpp"
#include "codedmm/scheme.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace codedmm {

/// The ell disjoint classes of A blocks; class m holds the blocks with
/// index congruent to m modulo ell, in increasing order.
struct ClassDecomposition {
    long long ell = 0;
    long long k_a = 0;
    std::vector<std::vector<long long>> classes;
};

ClassDecomposition decompose_classes(const DerivedParams& derived);

/// One A-side assignment slot of a worker.
struct ATask {
    enum class Kind { uncoded, coded };
    Kind kind = Kind::uncoded;
    long long block = -1;     ///< uncoded only: global A-block index
    long long class_id = -1;  ///< class of the assignment (both kinds)
    std::vector<long long> support;     ///< coded only: global block indices
    std::vector<double> coefficients;   ///< coded only: same length as support
};

/// The single coded B block of a worker: a combination of b_weight
/// cyclically consecutive B blocks starting at the worker's type.
struct BSpec {
    long long type_id = 0;
    std::vector<long long> support;
    std::vector<double> coefficients;
};

struct WorkerPlan {
    long long worker = 0;
    std::vector<ATask> tasks;  ///< executed top to bottom, locations 0..ell-1
    BSpec b;
};

/// The full assignment produced from SchemeParams; deterministic in the seed.
struct EncodingPlan {
    SchemeParams params;
    DerivedParams derived;
    std::vector<WorkerPlan> workers;
    std::vector<long long> final_counters;  ///< per-class cursor after assignment

    /// Location (0..ell-1) at which class m appears within worker i.
    /// Every class appears exactly once per worker.
    long long class_location(long long class_id, long long worker) const;

    /// Worker group g = the ell consecutive workers starting at g*ell.
    std::vector<long long> group(long long g) const;
};

struct PlanOptions {
    /// Overrides the derived B encoding weight; used to probe what breaks
    /// below the designed value.
    std::optional<long long> b_weight_override;
};

EncodingPlan build_plan(const SchemeParams& params);
EncodingPlan build_plan(const SchemeParams& params, const PlanOptions& options);

/// Per A block: the workers holding it uncoded (U) and coded (V).
struct AppearanceIndex {
    std::vector<std::vector<long long>> uncoded_workers;
    std::vector<std::vector<long long>> coded_workers;
};

AppearanceIndex appearance_sets(const EncodingPlan& plan);

/// Materialized per-worker inputs.  Uncoded A blocks alias the partition's
/// storage; coded blocks own their combination.
struct WorkerPayload {
    std::vector<std::shared_ptr<const SparseMatrix>> a_blocks;
    std::shared_ptr<const SparseMatrix> b_block;
};

std::vector<WorkerPayload> encode_blocks(const PartitionedMatrix& a,
                                         const PartitionedMatrix& b,
                                         const EncodingPlan& plan);

/// Plan file round trip.  The format is line oriented with a stable field
/// order and 17-significant-digit coefficients, so identical plans produce
/// byte-identical files.
void write_plan(std::ostream& out, const EncodingPlan& plan);
void write_plan(const std::string& path, const EncodingPlan& plan);
EncodingPlan read_plan(std::istream& in);
EncodingPlan read_plan(const std::string& path);

} // namespace codedmm
