#pragma once

#include "codedmm/baseline.hpp"
#include "codedmm/decoder.hpp"
#include "codedmm/encoding.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace codedmm {

/// Per-worker speed factors; 1.0 is nominal, 0 is a full failure (the
/// worker produces no events).
struct SpeedProfile {
    std::vector<double> speeds;

    static SpeedProfile uniform(long long n);
    /// The first `count` workers run at `factor` times nominal speed.
    static SpeedProfile with_stragglers(long long n, long long count, double factor);
};

enum class CostModelKind {
    unit_cost,         ///< every block product costs 1
    nnz_flop,          ///< measured flop counts of the actual encoded blocks
    analytic_density,  ///< closed-form density estimates
};

std::string cost_model_name(CostModelKind kind);

/// Per-worker ordered task costs; the timeline only depends on these.
struct TaskCosts {
    std::vector<std::vector<double>> costs;
};

TaskCosts unit_costs(const EncodingPlan& plan);
/// Runs every block product and records its flop count.
TaskCosts measured_costs(const EncodingPlan& plan, const std::vector<WorkerPayload>& payloads);
TaskCosts analytic_costs(const EncodingPlan& plan, double density, long long t, long long r,
                         long long w);

TaskCosts poly_unit_costs(const PolyCodePlan& plan);
TaskCosts poly_measured_costs(const std::vector<PolyPayload>& payloads);
TaskCosts poly_analytic_costs(const PolyCodePlan& plan, double density, long long t,
                              long long r, long long w);

struct TimelineEvent {
    double time = 0.0;
    long long worker = 0;
    long long location = 0;
    long long class_id = -1;  ///< -1 for single-product baselines
};

struct Timeline {
    std::vector<TimelineEvent> events;  ///< sorted by (time, worker, location)
    std::vector<double> finish_times;   ///< +infinity for workers that never finish
};

/// Event k of worker i lands at (overhead-adjusted cost of its first k+1
/// tasks) / speed_i.  Throws on negative speeds; zero-speed workers emit
/// nothing.
Timeline simulate_timeline(const TaskCosts& costs, const SpeedProfile& speeds,
                           double per_product_overhead = 0.0);
Timeline simulate_timeline(const EncodingPlan& plan, const TaskCosts& costs,
                           const SpeedProfile& speeds, double per_product_overhead = 0.0);

struct DecodePoint {
    double time = 0.0;        ///< +infinity when never decodable
    long long products = 0;   ///< events consumed up to decodability
    bool decodable = false;
};

/// Earliest prefix of the timeline whose ledger is decodable.
DecodePoint time_to_decode(const Timeline& timeline, const EncodingPlan& plan);

/// Baseline variant: decodable once `threshold` workers have finished their
/// single task.
DecodePoint time_to_decode_threshold(const Timeline& timeline, long long threshold);

struct SweepRow {
    std::string scheme;
    long long straggler_count = 0;
    double straggler_factor = 0.0;
    std::string cost_model;
    double decode_time = 0.0;
    long long products_used = 0;
};

/// Runs the proposed plan and the polynomial baseline over straggler counts
/// 0..max_stragglers at the given factor and collects decode times.
std::vector<SweepRow> compare_overall(const EncodingPlan& plan, const TaskCosts& plan_costs,
                                      const PolyCodePlan& poly, const TaskCosts& poly_costs,
                                      long long max_stragglers, double factor,
                                      CostModelKind cost_model);

/// CSV with header scheme,straggler_count,straggler_factor,cost_model,
/// decode_time,products_used.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace codedmm
