#pragma once

#include "codedmm/encoding.hpp"
#include "codedmm/generator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace codedmm {

/// Closed-form bounds on Q, the worst-case number of in-order block
/// products sufficient to decode.  The bounds coincide when x = 0.
struct QBounds {
    long long q_lb = 0;
    long long q_ub = 0;
    long long c1 = 0;        ///< floor((tau - 1) / c)
    long long c2 = 0;        ///< tau - 1 - c * c1
    long long eta_ub = 0;    ///< max products with at most tau - 1 class appearances
    long long lb_slack = 0;  ///< ceil(s_max * y / k_a), the lower-bound extra term
};

/// Maximum total of in-order products over all workers such that a fixed
/// class appears exactly kappa - 1 times.  Valid for 1 <= kappa <= n + 1.
long long eta_max_products(const DerivedParams& derived, long long kappa);

QBounds q_bounds(const DerivedParams& derived);

enum class OracleMode {
    per_class_subsets,  ///< n <= 12: search worker subsets per class
    exhaustive_ledgers, ///< n <= 6: enumerate all (ell+1)^n ledgers
};

/// Brute-force Q for a concrete plan, independent of the closed forms.
/// Throws std::invalid_argument when the instance is too large for the
/// requested mode.
long long q_exact_oracle(const EncodingPlan& plan, OracleMode mode);

struct ConditioningReport {
    double kappa_worst = 0.0;
    std::vector<long long> worst_stragglers;
    long long worst_class = -1;
    std::vector<double> quantiles;  ///< {min, 25%, 50%, 75%, max} over subsets
    bool sampled = false;           ///< true when subsets were sampled, not enumerated
    long long subsets_checked = 0;
};

/// Worst per-class condition number of the surviving decoding system over
/// straggler subsets of size s.  Enumerates when C(n, s) <= max_subsets,
/// otherwise samples max_subsets subsets from the plan seed.
ConditioningReport kappa_worst(const EncodingPlan& plan, long long s,
                               long long max_subsets = 100000);

struct PropertyCheck {
    std::string name;
    bool pass = true;
    std::string counterexample;  ///< empty when the check passed
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool all_pass = true;
    std::vector<double> mean_coded_appearances;  ///< per class, when computed
    bool exhaustive = true;  ///< false when a sweep had to sample

    void add(PropertyCheck check);
};

/// Balance and appearance-count checks: per-class coded appearances differ
/// by at most one, every block has k_b uncoded and >= s coded appearances,
/// classes cover all locations within each worker group, and the per-class
/// uncoded/coded worker unions partition the workers.
PropertyReport verify_assignment_properties(const EncodingPlan& plan);

/// x = 0 structure: every block appears at sigma workers whose B types are
/// sigma consecutive residues, and every k_b x k_b submatrix of every R_i
/// is nonsingular at the given tolerance.
PropertyReport verify_type_structure(const EncodingPlan& plan, double rank_tol = 1e-10);

/// Erasure resilience: every class system keeps full rank after removing
/// every straggler subset of size s (enumerated up to max_subsets, sampled
/// beyond).
PropertyReport verify_resilience(const EncodingPlan& plan, long long s,
                                 long long max_subsets = 1000000);

/// Column-subset rank property: every k_a*k_b x tau column subset of every
/// class system has full rank.
PropertyReport verify_column_subset_ranks(const EncodingPlan& plan,
                                          long long max_subsets = 10000000);

struct SparsityCostModel {
    double ratio = 0.0;  ///< proposed/dense per-worker cost, (zeta/n)(1 + s_max/k_b)
    double proposed_worker_flops = 0.0;
    double baseline_worker_flops = 0.0;
    double uncoded_task_flops = 0.0;
    double coded_task_flops = 0.0;
};

/// Closed-form per-worker cost estimates for inputs of the given density.
/// Dimensions are the full t x r and t x w operand shapes.  Densities of
/// combined blocks use the linear small-density model, capped at 1.
SparsityCostModel sparsity_cost_model(const DerivedParams& derived, double density,
                                      long long t, long long r, long long w);

/// The cost ratio above as a standalone formula.
double sparsity_cost_ratio(long long n, long long k_b, long long b_weight,
                           long long max_stragglers);

} // namespace codedmm
