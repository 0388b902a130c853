#include "codedmm/simulator.hpp"

#include "codedmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace codedmm {

SpeedProfile SpeedProfile::uniform(long long n) {
    return SpeedProfile{std::vector<double>(static_cast<std::size_t>(n), 1.0)};
}

SpeedProfile SpeedProfile::with_stragglers(long long n, long long count, double factor) {
    if (count < 0 || count > n) throw std::invalid_argument("speed profile: bad straggler count");
    SpeedProfile p = uniform(n);
    for (long long i = 0; i < count; ++i) p.speeds[static_cast<std::size_t>(i)] = factor;
    return p;
}

std::string cost_model_name(CostModelKind kind) {
    switch (kind) {
        case CostModelKind::unit_cost: return "unit";
        case CostModelKind::nnz_flop: return "nnz";
        case CostModelKind::analytic_density: return "analytic";
    }
    return "unknown";
}

TaskCosts unit_costs(const EncodingPlan& plan) {
    TaskCosts c;
    c.costs.assign(static_cast<std::size_t>(plan.derived.n),
                   std::vector<double>(static_cast<std::size_t>(plan.derived.tasks_per_worker), 1.0));
    return c;
}

TaskCosts measured_costs(const EncodingPlan& plan, const std::vector<WorkerPayload>& payloads) {
    if (payloads.size() != plan.workers.size()) {
        throw std::invalid_argument("measured_costs: payload count does not match plan");
    }
    TaskCosts c;
    c.costs.resize(payloads.size());
    for (std::size_t i = 0; i < payloads.size(); ++i) {
        for (const auto& block : payloads[i].a_blocks) {
            const GramProduct g = gram_product(*block, *payloads[i].b_block);
            c.costs[i].push_back(static_cast<double>(g.flops));
        }
    }
    return c;
}

TaskCosts analytic_costs(const EncodingPlan& plan, double density, long long t, long long r,
                         long long w) {
    const SparsityCostModel model = sparsity_cost_model(plan.derived, density, t, r, w);
    TaskCosts c;
    c.costs.resize(static_cast<std::size_t>(plan.derived.n));
    for (std::size_t i = 0; i < c.costs.size(); ++i) {
        for (const ATask& task : plan.workers[i].tasks) {
            c.costs[i].push_back(task.kind == ATask::Kind::uncoded ? model.uncoded_task_flops
                                                                   : model.coded_task_flops);
        }
    }
    return c;
}

TaskCosts poly_unit_costs(const PolyCodePlan& plan) {
    TaskCosts c;
    c.costs.assign(static_cast<std::size_t>(plan.n), {1.0});
    return c;
}

TaskCosts poly_measured_costs(const std::vector<PolyPayload>& payloads) {
    TaskCosts c;
    c.costs.reserve(payloads.size());
    for (const PolyPayload& p : payloads) {
        const GramProduct g = gram_product(p.a, p.b);
        c.costs.push_back({static_cast<double>(g.flops)});
    }
    return c;
}

TaskCosts poly_analytic_costs(const PolyCodePlan& plan, double density, long long t, long long r,
                              long long w) {
    const double da = std::min(1.0, density * static_cast<double>(plan.k_a));
    const double db = std::min(1.0, density * static_cast<double>(plan.k_b));
    const double flops = 2.0 * static_cast<double>(t) *
                         (da * static_cast<double>(r) / static_cast<double>(plan.k_a)) *
                         (db * static_cast<double>(w) / static_cast<double>(plan.k_b));
    TaskCosts c;
    c.costs.assign(static_cast<std::size_t>(plan.n), {flops});
    return c;
}

Timeline simulate_timeline(const TaskCosts& costs, const SpeedProfile& speeds,
                           double per_product_overhead) {
    if (speeds.speeds.size() != costs.costs.size()) {
        throw std::invalid_argument("simulate: speed count does not match worker count");
    }
    for (double s : speeds.speeds) {
        if (s < 0.0 || !std::isfinite(s)) {
            throw std::invalid_argument("simulate: speeds must be finite and non-negative");
        }
    }

    Timeline tl;
    tl.finish_times.assign(costs.costs.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < costs.costs.size(); ++i) {
        const double speed = speeds.speeds[i];
        if (speed == 0.0) continue;  // full failure: no events
        double cum = 0.0;
        for (std::size_t j = 0; j < costs.costs[i].size(); ++j) {
            cum += costs.costs[i][j] + per_product_overhead;
            tl.events.push_back({cum / speed, static_cast<long long>(i),
                                 static_cast<long long>(j), -1});
        }
        tl.finish_times[i] = cum / speed;
    }
    std::sort(tl.events.begin(), tl.events.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.worker != b.worker) return a.worker < b.worker;
        return a.location < b.location;
    });
    return tl;
}

Timeline simulate_timeline(const EncodingPlan& plan, const TaskCosts& costs,
                           const SpeedProfile& speeds, double per_product_overhead) {
    Timeline tl = simulate_timeline(costs, speeds, per_product_overhead);
    for (TimelineEvent& e : tl.events) {
        e.class_id = plan.workers[static_cast<std::size_t>(e.worker)]
                         .tasks[static_cast<std::size_t>(e.location)]
                         .class_id;
    }
    return tl;
}

DecodePoint time_to_decode(const Timeline& timeline, const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;
    const DecodabilityChecker checker(plan);
    ProgressLedger ledger(d.n, d.tasks_per_worker);

    DecodePoint out;
    out.time = std::numeric_limits<double>::infinity();
    long long consumed = 0;
    for (const TimelineEvent& e : timeline.events) {
        ledger.record_completion(e.worker);
        ++consumed;
        // A ledger below one product per unknown can never decode.
        if (ledger.total() < d.num_unknowns) continue;
        if (checker.check(ledger).decodable) {
            out.time = e.time;
            out.products = consumed;
            out.decodable = true;
            return out;
        }
    }
    return out;
}

DecodePoint time_to_decode_threshold(const Timeline& timeline, long long threshold) {
    DecodePoint out;
    out.time = std::numeric_limits<double>::infinity();
    long long finished = 0;
    long long consumed = 0;
    for (const TimelineEvent& e : timeline.events) {
        ++consumed;
        ++finished;  // single-task workers: every event is a finish
        if (finished >= threshold) {
            out.time = e.time;
            out.products = consumed;
            out.decodable = true;
            return out;
        }
    }
    return out;
}

std::vector<SweepRow> compare_overall(const EncodingPlan& plan, const TaskCosts& plan_costs,
                                      const PolyCodePlan& poly, const TaskCosts& poly_costs,
                                      long long max_stragglers, double factor,
                                      CostModelKind cost_model) {
    std::vector<SweepRow> rows;
    for (long long count = 0; count <= max_stragglers; ++count) {
        const SpeedProfile speeds = SpeedProfile::with_stragglers(plan.derived.n, count, factor);
        {
            const Timeline tl = simulate_timeline(plan, plan_costs, speeds);
            const DecodePoint dp = time_to_decode(tl, plan);
            rows.push_back({"proposed", count, factor, cost_model_name(cost_model), dp.time,
                            dp.products});
        }
        {
            const Timeline tl = simulate_timeline(poly_costs, speeds);
            const DecodePoint dp = time_to_decode_threshold(tl, poly.recovery_threshold());
            rows.push_back({"poly", count, factor, cost_model_name(cost_model), dp.time,
                            dp.products});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "scheme,straggler_count,straggler_factor,cost_model,decode_time,products_used\n";
    char buf[64];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.decode_time);
        out << r.scheme << "," << r.straggler_count << ",";
        char fbuf[64];
        std::snprintf(fbuf, sizeof(fbuf), "%.17g", r.straggler_factor);
        out << fbuf << "," << r.cost_model << "," << buf << "," << r.products_used << "\n";
    }
}

} // namespace codedmm
