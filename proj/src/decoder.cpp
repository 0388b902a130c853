#include "codedmm/decoder.hpp"

#include <map>
#include <stdexcept>

namespace codedmm {

ProgressLedger::ProgressLedger(long long workers, long long tasks_per_worker)
    : counts_(static_cast<std::size_t>(workers), 0), tasks_per_worker_(tasks_per_worker) {}

void ProgressLedger::record_completion(long long worker) {
    auto& c = counts_.at(static_cast<std::size_t>(worker));
    if (c >= tasks_per_worker_) {
        throw std::invalid_argument("ledger: worker already finished");
    }
    ++c;
}

long long ProgressLedger::total() const {
    long long t = 0;
    for (long long c : counts_) t += c;
    return t;
}

ProgressLedger ProgressLedger::full(long long workers, long long tasks_per_worker) {
    ProgressLedger l(workers, tasks_per_worker);
    l.counts_.assign(static_cast<std::size_t>(workers), tasks_per_worker);
    return l;
}

ProgressLedger ProgressLedger::from_counts(std::vector<long long> counts,
                                           long long tasks_per_worker) {
    for (long long c : counts) {
        if (c < 0 || c > tasks_per_worker) {
            throw std::invalid_argument("ledger: count out of range");
        }
    }
    ProgressLedger l(static_cast<long long>(counts.size()), tasks_per_worker);
    l.counts_ = std::move(counts);
    return l;
}

DecodabilityChecker::DecodabilityChecker(const EncodingPlan& plan) : plan_(&plan) {
    const long long ell = plan.derived.tasks_per_worker;
    systems_.reserve(static_cast<std::size_t>(ell));
    locations_.resize(static_cast<std::size_t>(ell));
    for (long long m = 0; m < ell; ++m) {
        systems_.push_back(build_class_system(plan, m));
        auto& locs = locations_[static_cast<std::size_t>(m)];
        locs.reserve(static_cast<std::size_t>(plan.derived.n));
        for (long long i = 0; i < plan.derived.n; ++i) {
            locs.push_back(plan.class_location(m, i));
        }
    }
}

DecodabilityReport DecodabilityChecker::check(const ProgressLedger& ledger) const {
    const DerivedParams& d = plan_->derived;
    DecodabilityReport report;
    report.required_rank = d.k_a * d.k_b;
    report.decodable = true;
    for (std::size_t m = 0; m < systems_.size(); ++m) {
        std::vector<long long> avail;
        for (long long i = 0; i < d.n; ++i) {
            if (ledger.count(i) > locations_[m][static_cast<std::size_t>(i)]) {
                avail.push_back(i);
            }
        }
        DenseMatrix cols(report.required_rank, static_cast<long long>(avail.size()));
        for (std::size_t j = 0; j < avail.size(); ++j) {
            cols.col(static_cast<long long>(j)) = systems_[m].g.col(avail[j]);
        }
        const long long rank = numerical_rank(cols);
        report.class_ranks.push_back(rank);
        if (rank < report.required_rank) report.decodable = false;
    }
    return report;
}

DecodabilityReport is_decodable(const ProgressLedger& ledger, const EncodingPlan& plan) {
    return DecodabilityChecker(plan).check(ledger);
}

RecoveredResult decode(const ProgressLedger& ledger,
                       std::span<const CompletedProduct> products,
                       const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;

    // Index products by (worker, location).
    std::map<std::pair<long long, long long>, const CompletedProduct*> by_slot;
    long long wa = -1, wb = -1;
    for (const CompletedProduct& p : products) {
        if (wa < 0) {
            wa = p.value.rows();
            wb = p.value.cols();
        } else if (p.value.rows() != wa || p.value.cols() != wb) {
            throw std::invalid_argument("decode: product shapes differ");
        }
        by_slot[{p.worker, p.location}] = &p;
    }
    if (wa < 0) throw std::invalid_argument("decode: no products given");

    RecoveredResult out;
    out.product = DenseMatrix::Zero(d.num_a_blocks * wa, d.num_b_blocks * wb);

    for (long long m = 0; m < d.tasks_per_worker; ++m) {
        const ClassSystem sys = build_class_system(plan, m);
        std::vector<long long> avail;
        for (long long i = 0; i < d.n; ++i) {
            const long long loc = plan.class_location(m, i);
            if (ledger.count(i) > loc) {
                if (by_slot.find({i, loc}) == by_slot.end()) {
                    throw std::invalid_argument("decode: missing product for completed slot");
                }
                avail.push_back(i);
            }
        }

        const long long unknowns = d.k_a * d.k_b;
        DenseMatrix equations(static_cast<long long>(avail.size()), unknowns);
        DenseMatrix rhs(static_cast<long long>(avail.size()), wa * wb);
        for (std::size_t r = 0; r < avail.size(); ++r) {
            const long long i = avail[r];
            equations.row(static_cast<long long>(r)) = sys.g.col(i).transpose();
            const DenseMatrix& v = by_slot[{i, plan.class_location(m, i)}]->value;
            for (long long a = 0; a < wa; ++a) {
                rhs.block(static_cast<long long>(r), a * wb, 1, wb) = v.row(a);
            }
        }

        LeastSquaresSolution sol;
        try {
            sol = solve_least_squares(equations, rhs);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("decode: class " + std::to_string(m) +
                                        " is rank-deficient (insufficient progress)");
        }
        out.class_residuals.push_back(sol.residual_norm);
        out.class_conditions.push_back(condition_number(equations));

        for (long long alpha = 0; alpha < d.k_a; ++alpha) {
            for (long long beta = 0; beta < d.k_b; ++beta) {
                const long long row = alpha * d.k_b + beta;
                const long long block_a = alpha * d.tasks_per_worker + m;
                for (long long a = 0; a < wa; ++a) {
                    out.product.block(block_a * wa + a, beta * wb, 1, wb) =
                        sol.solution.block(row, a * wb, 1, wb);
                }
            }
        }
    }
    return out;
}

RecoveredResult decode_from_survivors(const EncodingPlan& plan,
                                      std::span<const CompletedProduct> products,
                                      std::span<const long long> survivors) {
    const DerivedParams& d = plan.derived;
    if (static_cast<long long>(survivors.size()) < d.recovery_threshold) {
        throw std::invalid_argument("decode: fewer survivors than the recovery threshold");
    }
    std::vector<long long> counts(static_cast<std::size_t>(d.n), 0);
    for (long long s : survivors) {
        counts.at(static_cast<std::size_t>(s)) = d.tasks_per_worker;
    }
    const ProgressLedger ledger =
        ProgressLedger::from_counts(std::move(counts), d.tasks_per_worker);

    std::vector<CompletedProduct> kept;
    for (const CompletedProduct& p : products) {
        if (ledger.count(p.worker) > p.location) kept.push_back(p);
    }
    return decode(ledger, kept, plan);
}

} // namespace codedmm
