#include "codedmm/analysis.hpp"

#include "codedmm/parallel.hpp"
#include "codedmm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace codedmm {

namespace {

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

/// Number of s-subsets of n, saturating at cap.
long long subset_count_capped(long long n, long long s, long long cap) {
    long long count = 1;
    for (long long i = 0; i < s; ++i) {
        count = count * (n - i) / (i + 1);
        if (count > cap) return cap + 1;
    }
    return count;
}

/// Advances a sorted index combination; returns false after the last one.
bool next_combination(std::vector<long long>& idx, long long n) {
    const long long k = static_cast<long long>(idx.size());
    long long i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (long long j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return true;
}

std::vector<std::vector<long long>> enumerate_or_sample_subsets(long long n, long long s,
                                                                long long max_subsets,
                                                                std::uint64_t seed,
                                                                bool* sampled) {
    std::vector<std::vector<long long>> subsets;
    if (s == 0) {
        *sampled = false;
        subsets.push_back({});
        return subsets;
    }
    if (subset_count_capped(n, s, max_subsets) <= max_subsets) {
        *sampled = false;
        std::vector<long long> idx(static_cast<std::size_t>(s));
        std::iota(idx.begin(), idx.end(), 0);
        do {
            subsets.push_back(idx);
        } while (next_combination(idx, n));
        return subsets;
    }
    *sampled = true;
    Rng rng(seed);
    std::vector<long long> pool(static_cast<std::size_t>(n));
    for (long long i = 0; i < max_subsets; ++i) {
        std::iota(pool.begin(), pool.end(), 0);
        for (long long j = 0; j < s; ++j) {
            const long long pick = j + static_cast<long long>(
                rng.next_u64() % static_cast<std::uint64_t>(n - j));
            std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
        }
        std::vector<long long> sub(pool.begin(), pool.begin() + s);
        std::sort(sub.begin(), sub.end());
        subsets.push_back(std::move(sub));
    }
    return subsets;
}

std::string join_indices(const std::vector<long long>& v) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    os << "}";
    return os.str();
}

} // namespace

long long eta_max_products(const DerivedParams& derived, long long kappa) {
    if (kappa < 1 || kappa > derived.n + 1) {
        throw std::invalid_argument("eta_max_products: kappa out of range");
    }
    const long long n = derived.n;
    const long long ell = derived.tasks_per_worker;
    const long long c = derived.num_groups;
    const long long c1 = (kappa - 1) / c;
    const long long c2 = kappa - 1 - c * c1;
    long long eta = n * (ell - 1) / 2;
    for (long long i = 0; i < c1; ++i) eta += c * (ell - i);
    eta += c2 * (ell - c1);
    return eta;
}

QBounds q_bounds(const DerivedParams& derived) {
    QBounds out;
    const long long c = derived.num_groups;
    const long long tau = derived.recovery_threshold;
    out.c1 = (tau - 1) / c;
    out.c2 = tau - 1 - c * out.c1;
    out.eta_ub = eta_max_products(derived, tau);
    out.q_ub = out.eta_ub + 1;
    out.lb_slack = ceil_div(derived.max_stragglers * derived.weight_reduction, derived.k_a);
    out.q_lb = eta_max_products(derived, derived.k_a * derived.k_b) + out.lb_slack + 1;
    return out;
}

namespace {

long long oracle_per_class(const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;
    const long long n = d.n;
    const long long ell = d.tasks_per_worker;
    const long long full_rank = d.k_a * d.k_b;

    long long best = 0;
    for (long long m = 0; m < ell; ++m) {
        const ClassSystem sys = build_class_system(plan, m);
        std::vector<long long> locs(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) locs[static_cast<std::size_t>(i)] = plan.class_location(m, i);

        const std::uint64_t masks = std::uint64_t{1} << n;
        std::vector<long long> per_mask(static_cast<std::size_t>(masks), -1);
        parallel_for(static_cast<std::size_t>(masks), [&](std::size_t mask) {
            std::vector<long long> sel;
            for (long long i = 0; i < n; ++i) {
                if (mask >> i & 1) sel.push_back(i);
            }
            if (static_cast<long long>(sel.size()) >= full_rank) {
                DenseMatrix cols(full_rank, static_cast<long long>(sel.size()));
                for (std::size_t j = 0; j < sel.size(); ++j) {
                    cols.col(static_cast<long long>(j)) = sys.g.col(sel[j]);
                }
                if (numerical_rank(cols) >= full_rank) return;  // class decodable
            }
            long long total = 0;
            std::size_t k = 0;
            for (long long i = 0; i < n; ++i) {
                if (k < sel.size() && sel[k] == i) {
                    total += ell;
                    ++k;
                } else {
                    total += locs[static_cast<std::size_t>(i)];
                }
            }
            per_mask[mask] = total;
        });
        for (long long t : per_mask) best = std::max(best, t);
    }
    return best + 1;
}

long long oracle_exhaustive(const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;
    const long long n = d.n;
    const long long ell = d.tasks_per_worker;
    const long long full_rank = d.k_a * d.k_b;

    std::vector<ClassSystem> systems;
    std::vector<std::vector<long long>> locs(static_cast<std::size_t>(ell));
    for (long long m = 0; m < ell; ++m) {
        systems.push_back(build_class_system(plan, m));
        for (long long i = 0; i < n; ++i) {
            locs[static_cast<std::size_t>(m)].push_back(plan.class_location(m, i));
        }
    }

    std::vector<long long> counts(static_cast<std::size_t>(n), 0);
    long long best = 0;
    while (true) {
        long long total = 0;
        for (long long c : counts) total += c;
        if (total > best) {
            bool decodable = true;
            for (long long m = 0; m < ell && decodable; ++m) {
                std::vector<long long> sel;
                for (long long i = 0; i < n; ++i) {
                    if (counts[static_cast<std::size_t>(i)] >
                        locs[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)]) {
                        sel.push_back(i);
                    }
                }
                if (static_cast<long long>(sel.size()) < full_rank) {
                    decodable = false;
                    break;
                }
                DenseMatrix cols(full_rank, static_cast<long long>(sel.size()));
                for (std::size_t j = 0; j < sel.size(); ++j) {
                    cols.col(static_cast<long long>(j)) = systems[static_cast<std::size_t>(m)].g.col(sel[j]);
                }
                if (numerical_rank(cols) < full_rank) decodable = false;
            }
            if (!decodable) best = total;
        }
        // Next ledger in mixed-radix order.
        long long i = 0;
        while (i < n && counts[static_cast<std::size_t>(i)] == ell) {
            counts[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == n) break;
        ++counts[static_cast<std::size_t>(i)];
    }
    return best + 1;
}

} // namespace

long long q_exact_oracle(const EncodingPlan& plan, OracleMode mode) {
    const DerivedParams& d = plan.derived;
    if (mode == OracleMode::per_class_subsets) {
        if (d.n > 12) {
            throw std::invalid_argument("q_exact_oracle: instance too large for subset search");
        }
        return oracle_per_class(plan);
    }
    if (d.n > 6) {
        throw std::invalid_argument("q_exact_oracle: instance too large for ledger enumeration");
    }
    const long long q = oracle_exhaustive(plan);
    if (q != oracle_per_class(plan)) {
        throw std::logic_error("q_exact_oracle: modes disagree");
    }
    return q;
}

ConditioningReport kappa_worst(const EncodingPlan& plan, long long s, long long max_subsets) {
    const DerivedParams& d = plan.derived;
    if (s < 0 || s >= d.n) throw std::invalid_argument("kappa_worst: bad straggler count");

    std::vector<ClassSystem> systems;
    for (long long m = 0; m < d.tasks_per_worker; ++m) {
        systems.push_back(build_class_system(plan, m));
    }

    ConditioningReport report;
    const auto subsets = enumerate_or_sample_subsets(
        d.n, s, max_subsets, plan.params.seed ^ 0x6b79c0ded5a17ULL, &report.sampled);
    report.subsets_checked = static_cast<long long>(subsets.size());

    std::vector<double> per_subset(subsets.size(), 0.0);
    std::vector<long long> per_subset_class(subsets.size(), -1);
    parallel_for(subsets.size(), [&](std::size_t si) {
        const auto& stragglers = subsets[si];
        std::vector<long long> survivors;
        std::size_t k = 0;
        for (long long i = 0; i < d.n; ++i) {
            if (k < stragglers.size() && stragglers[k] == i) {
                ++k;
            } else {
                survivors.push_back(i);
            }
        }
        double worst = 0.0;
        long long worst_class = -1;
        for (std::size_t m = 0; m < systems.size(); ++m) {
            DenseMatrix cols(d.k_a * d.k_b, static_cast<long long>(survivors.size()));
            for (std::size_t j = 0; j < survivors.size(); ++j) {
                cols.col(static_cast<long long>(j)) = systems[m].g.col(survivors[j]);
            }
            const double kappa = condition_number(cols);
            if (kappa > worst) {
                worst = kappa;
                worst_class = static_cast<long long>(m);
            }
        }
        per_subset[si] = worst;
        per_subset_class[si] = worst_class;
    });

    std::size_t argmax = 0;
    for (std::size_t i = 1; i < per_subset.size(); ++i) {
        if (per_subset[i] > per_subset[argmax]) argmax = i;
    }
    report.kappa_worst = per_subset[argmax];
    report.worst_stragglers = subsets[argmax];
    report.worst_class = per_subset_class[argmax];

    std::vector<double> sorted = per_subset;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
    };
    report.quantiles = {sorted.front(), quantile(0.25), quantile(0.5), quantile(0.75),
                        sorted.back()};
    return report;
}

void PropertyReport::add(PropertyCheck check) {
    all_pass = all_pass && check.pass;
    checks.push_back(std::move(check));
}

PropertyReport verify_assignment_properties(const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;
    const AppearanceIndex idx = appearance_sets(plan);
    PropertyReport report;

    // Coded appearances within a class differ by at most one.
    {
        PropertyCheck check{"coded-appearance balance"};
        for (long long m = 0; m < d.tasks_per_worker && check.pass; ++m) {
            long long lo = d.n + 1, hi = -1;
            for (long long j = 0; j < d.k_a; ++j) {
                const long long i = j * d.tasks_per_worker + m;
                const long long v =
                    static_cast<long long>(idx.coded_workers[static_cast<std::size_t>(i)].size());
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > 1) {
                check.pass = false;
                check.counterexample = "class " + std::to_string(m) + " coded counts span [" +
                                       std::to_string(lo) + "," + std::to_string(hi) + "]";
            }
        }
        report.add(std::move(check));
    }

    // Every block: exactly k_b uncoded appearances, at least s coded ones,
    // and no worker holding it both ways.
    {
        PropertyCheck check{"per-block appearance counts"};
        for (long long i = 0; i < d.num_a_blocks && check.pass; ++i) {
            const auto& u = idx.uncoded_workers[static_cast<std::size_t>(i)];
            const auto& v = idx.coded_workers[static_cast<std::size_t>(i)];
            if (static_cast<long long>(u.size()) != d.k_b) {
                check.pass = false;
                check.counterexample = "block " + std::to_string(i) + " has " +
                                       std::to_string(u.size()) + " uncoded appearances";
                break;
            }
            if (static_cast<long long>(v.size()) < d.stragglers) {
                check.pass = false;
                check.counterexample = "block " + std::to_string(i) + " has only " +
                                       std::to_string(v.size()) + " coded appearances";
                break;
            }
            for (long long w : u) {
                if (std::find(v.begin(), v.end(), w) != v.end()) {
                    check.pass = false;
                    check.counterexample = "block " + std::to_string(i) +
                                           " appears coded and uncoded in worker " +
                                           std::to_string(w);
                    break;
                }
            }
        }
        report.add(std::move(check));
    }

    // Within every group of ell consecutive workers, each class occupies
    // every location exactly once.
    {
        PropertyCheck check{"class locations cover each group"};
        for (long long g = 0; g < d.num_groups && check.pass; ++g) {
            for (long long m = 0; m < d.tasks_per_worker && check.pass; ++m) {
                std::vector<bool> seen(static_cast<std::size_t>(d.tasks_per_worker), false);
                for (long long i : plan.group(g)) {
                    seen[static_cast<std::size_t>(plan.class_location(m, i))] = true;
                }
                if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
                    check.pass = false;
                    check.counterexample = "class " + std::to_string(m) + " misses a location in group " +
                                           std::to_string(g);
                }
            }
        }
        report.add(std::move(check));
    }

    // Per class, the uncoded workers and coded workers are disjoint sets of
    // sizes k_a*k_b and s_max.
    {
        PropertyCheck check{"class worker partition"};
        for (long long m = 0; m < d.tasks_per_worker && check.pass; ++m) {
            std::vector<long long> uni, cod;
            for (long long j = 0; j < d.k_a; ++j) {
                const long long i = j * d.tasks_per_worker + m;
                const auto& u = idx.uncoded_workers[static_cast<std::size_t>(i)];
                const auto& v = idx.coded_workers[static_cast<std::size_t>(i)];
                uni.insert(uni.end(), u.begin(), u.end());
                cod.insert(cod.end(), v.begin(), v.end());
            }
            std::sort(uni.begin(), uni.end());
            uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
            std::sort(cod.begin(), cod.end());
            cod.erase(std::unique(cod.begin(), cod.end()), cod.end());
            if (static_cast<long long>(uni.size()) != d.k_a * d.k_b ||
                static_cast<long long>(cod.size()) != d.max_stragglers) {
                check.pass = false;
                check.counterexample = "class " + std::to_string(m) + " union sizes " +
                                       std::to_string(uni.size()) + "/" + std::to_string(cod.size());
                break;
            }
            std::vector<long long> inter;
            std::set_intersection(uni.begin(), uni.end(), cod.begin(), cod.end(),
                                  std::back_inserter(inter));
            if (!inter.empty()) {
                check.pass = false;
                check.counterexample = "class " + std::to_string(m) +
                                       " uncoded/coded unions intersect at worker " +
                                       std::to_string(inter.front());
            }
        }
        report.add(std::move(check));
    }

    // Mean coded appearances per class must equal s_max*(k_a-y)/k_a.
    {
        PropertyCheck check{"mean coded appearances"};
        for (long long m = 0; m < d.tasks_per_worker; ++m) {
            long long sum = 0;
            for (long long j = 0; j < d.k_a; ++j) {
                const long long i = j * d.tasks_per_worker + m;
                sum += static_cast<long long>(idx.coded_workers[static_cast<std::size_t>(i)].size());
            }
            report.mean_coded_appearances.push_back(static_cast<double>(sum) /
                                                    static_cast<double>(d.k_a));
            if (check.pass && sum != d.max_stragglers * d.a_weight()) {
                check.pass = false;
                check.counterexample = "class " + std::to_string(m) + " coded total " +
                                       std::to_string(sum) + " != " +
                                       std::to_string(d.max_stragglers * d.a_weight());
            }
        }
        report.add(std::move(check));
    }

    return report;
}

PropertyReport verify_type_structure(const EncodingPlan& plan, double rank_tol) {
    const DerivedParams& d = plan.derived;
    if (d.x != 0) {
        throw std::invalid_argument("verify_type_structure: requires x = 0");
    }
    PropertyReport report;

    PropertyCheck consec{"consecutive B types per block"};
    PropertyCheck ranks{"all k_b x k_b coefficient submatrices nonsingular"};
    for (long long i = 0; i < d.num_a_blocks; ++i) {
        const RiMatrix ri = extract_Ri(plan, i);
        const long long sigma = static_cast<long long>(ri.workers.size());
        if (sigma != d.appearances) {
            consec.pass = false;
            consec.counterexample =
                "block " + std::to_string(i) + " appears " + std::to_string(sigma) + " times";
            break;
        }
        // The type multiset must equal sigma consecutive residues mod k_b.
        std::vector<long long> count(static_cast<std::size_t>(d.k_b), 0);
        for (long long w : ri.workers) count[static_cast<std::size_t>(w % d.k_b)]++;
        if (consec.pass && ri.start_type < 0) {
            consec.pass = false;
            consec.counterexample = "block " + std::to_string(i) + " has no consecutive type run";
        }
        if (consec.pass) {
            std::vector<long long> expected(static_cast<std::size_t>(d.k_b), sigma / d.k_b);
            for (long long t = 0; t < sigma % d.k_b; ++t) {
                expected[static_cast<std::size_t>((ri.start_type + t) % d.k_b)]++;
            }
            if (count != expected) {
                consec.pass = false;
                consec.counterexample = "block " + std::to_string(i) + " types are not consecutive";
            }
        }

        if (ranks.pass) {
            std::vector<long long> idx(static_cast<std::size_t>(d.k_b));
            std::iota(idx.begin(), idx.end(), 0);
            do {
                DenseMatrix sub(d.k_b, d.k_b);
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    sub.col(static_cast<long long>(j)) = ri.coefficients.col(idx[j]);
                }
                if (numerical_rank(sub, rank_tol) < d.k_b) {
                    ranks.pass = false;
                    ranks.counterexample = "block " + std::to_string(i) + " columns " +
                                           join_indices(idx) + " are singular";
                    break;
                }
            } while (next_combination(idx, sigma));
        }
    }
    report.add(std::move(consec));
    report.add(std::move(ranks));
    return report;
}

namespace {

/// Shared sweep: rank of every class system restricted to the complement of
/// each straggler subset (equivalently every (n-s)-column subset).
PropertyReport sweep_straggler_ranks(const EncodingPlan& plan, long long s,
                                     long long max_subsets, const std::string& check_name) {
    const DerivedParams& d = plan.derived;
    if (s < 0 || s >= d.n) throw std::invalid_argument("rank sweep: bad straggler count");

    std::vector<ClassSystem> systems;
    for (long long m = 0; m < d.tasks_per_worker; ++m) {
        systems.push_back(build_class_system(plan, m));
    }

    PropertyReport report;
    bool sampled = false;
    const auto subsets = enumerate_or_sample_subsets(
        d.n, s, max_subsets, plan.params.seed ^ 0x51dce5a11ULL, &sampled);
    report.exhaustive = !sampled;

    const long long full_rank = d.k_a * d.k_b;
    std::vector<long long> bad_class(subsets.size(), -1);
    parallel_for(subsets.size(), [&](std::size_t si) {
        const auto& stragglers = subsets[si];
        std::vector<long long> survivors;
        std::size_t k = 0;
        for (long long i = 0; i < d.n; ++i) {
            if (k < stragglers.size() && stragglers[k] == i) {
                ++k;
            } else {
                survivors.push_back(i);
            }
        }
        for (std::size_t m = 0; m < systems.size(); ++m) {
            DenseMatrix cols(full_rank, static_cast<long long>(survivors.size()));
            for (std::size_t j = 0; j < survivors.size(); ++j) {
                cols.col(static_cast<long long>(j)) = systems[m].g.col(survivors[j]);
            }
            if (numerical_rank(cols) < full_rank) {
                bad_class[si] = static_cast<long long>(m);
                return;
            }
        }
    });

    PropertyCheck check{check_name};
    for (std::size_t si = 0; si < subsets.size(); ++si) {
        if (bad_class[si] >= 0) {
            check.pass = false;
            check.counterexample = "stragglers " + join_indices(subsets[si]) + " break class " +
                                   std::to_string(bad_class[si]);
            break;
        }
    }
    report.add(std::move(check));
    return report;
}

} // namespace

PropertyReport verify_resilience(const EncodingPlan& plan, long long s, long long max_subsets) {
    return sweep_straggler_ranks(plan, s, max_subsets, "full class rank under erasures");
}

PropertyReport verify_column_subset_ranks(const EncodingPlan& plan, long long max_subsets) {
    const DerivedParams& d = plan.derived;
    // A tau-column subset is the complement of an (n - tau)-straggler subset.
    return sweep_straggler_ranks(plan, d.n - d.recovery_threshold, max_subsets,
                                 "every threshold-size column subset has full rank");
}

double sparsity_cost_ratio(long long n, long long k_b, long long b_weight,
                           long long max_stragglers) {
    return static_cast<double>(b_weight * (k_b + max_stragglers)) /
           static_cast<double>(n * k_b);
}

SparsityCostModel sparsity_cost_model(const DerivedParams& derived, double density,
                                      long long t, long long r, long long w) {
    if (density <= 0.0 || density > 1.0) {
        throw std::invalid_argument("sparsity_cost_model: density must be in (0, 1]");
    }
    const auto combined = [&](long long weight) {
        return std::min(1.0, density * static_cast<double>(weight));
    };
    const double wa = static_cast<double>(r) / static_cast<double>(derived.num_a_blocks);
    const double wb = static_cast<double>(w) / static_cast<double>(derived.num_b_blocks);
    const double d_b = combined(derived.b_weight);

    SparsityCostModel model;
    model.ratio = sparsity_cost_ratio(derived.n, derived.k_b, derived.b_weight,
                                      derived.max_stragglers);
    model.uncoded_task_flops = 2.0 * static_cast<double>(t) * (density * wa) * (d_b * wb);
    model.coded_task_flops =
        2.0 * static_cast<double>(t) * (combined(derived.a_weight()) * wa) * (d_b * wb);
    model.proposed_worker_flops =
        static_cast<double>(derived.uncoded_per_worker) * model.uncoded_task_flops +
        static_cast<double>(derived.coded_per_worker) * model.coded_task_flops;
    model.baseline_worker_flops = 2.0 * static_cast<double>(t) *
                                  (combined(derived.k_a) * static_cast<double>(r) /
                                   static_cast<double>(derived.k_a)) *
                                  (combined(derived.k_b) * static_cast<double>(w) /
                                   static_cast<double>(derived.k_b));
    return model;
}

} // namespace codedmm
