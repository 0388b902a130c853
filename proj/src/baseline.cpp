#include "codedmm/baseline.hpp"

#include "codedmm/parallel.hpp"
#include "codedmm/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace codedmm {

std::vector<double> PolyCodePlan::a_coefficients(long long worker) const {
    std::vector<double> c(static_cast<std::size_t>(k_a));
    double p = 1.0;
    for (long long j = 0; j < k_a; ++j) {
        c[static_cast<std::size_t>(j)] = p;
        p *= points.at(static_cast<std::size_t>(worker));
    }
    return c;
}

std::vector<double> PolyCodePlan::b_coefficients(long long worker) const {
    std::vector<double> c(static_cast<std::size_t>(k_b));
    const double step = std::pow(points.at(static_cast<std::size_t>(worker)),
                                 static_cast<double>(k_a));
    double p = 1.0;
    for (long long j = 0; j < k_b; ++j) {
        c[static_cast<std::size_t>(j)] = p;
        p *= step;
    }
    return c;
}

PolyCodePlan poly_plan(long long n, long long k_a, long long k_b, std::vector<double> points) {
    if (n <= k_a * k_b || k_a <= 0 || k_b <= 0) {
        throw std::invalid_argument("poly_plan: need n > k_a*k_b >= 1");
    }
    PolyCodePlan plan;
    plan.n = n;
    plan.k_a = k_a;
    plan.k_b = k_b;
    if (points.empty()) {
        points.resize(static_cast<std::size_t>(n));
        std::iota(points.begin(), points.end(), 1.0);
    }
    if (static_cast<long long>(points.size()) != n) {
        throw std::invalid_argument("poly_plan: need one evaluation point per worker");
    }
    std::vector<double> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("poly_plan: evaluation points must be distinct");
    }
    plan.points = std::move(points);
    return plan;
}

std::vector<PolyPayload> poly_encode(const PartitionedMatrix& a, const PartitionedMatrix& b,
                                     const PolyCodePlan& plan) {
    if (a.block_count() != plan.k_a || b.block_count() != plan.k_b) {
        throw std::invalid_argument("poly_encode: partition does not match plan");
    }
    std::vector<PolyPayload> out;
    out.reserve(static_cast<std::size_t>(plan.n));
    std::vector<const SparseMatrix*> a_parts, b_parts;
    for (long long i = 0; i < plan.k_a; ++i) a_parts.push_back(&a.block(i));
    for (long long i = 0; i < plan.k_b; ++i) b_parts.push_back(&b.block(i));
    for (long long w = 0; w < plan.n; ++w) {
        PolyPayload p;
        p.a = linear_combination(a_parts, plan.a_coefficients(w));
        p.b = linear_combination(b_parts, plan.b_coefficients(w));
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

/// Row w of the interpolation system: powers of the worker's point for the
/// unknowns A_alpha^T B_beta at flat index alpha + beta*k_a.
DenseMatrix interpolation_rows(const PolyCodePlan& plan, const std::vector<long long>& workers) {
    const long long unknowns = plan.k_a * plan.k_b;
    DenseMatrix m(static_cast<long long>(workers.size()), unknowns);
    for (std::size_t r = 0; r < workers.size(); ++r) {
        double p = 1.0;
        for (long long e = 0; e < unknowns; ++e) {
            m(static_cast<long long>(r), e) = p;
            p *= plan.points[static_cast<std::size_t>(workers[r])];
        }
    }
    return m;
}

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

} // namespace

DenseMatrix poly_decode(const PolyCodePlan& plan,
                        const std::vector<std::pair<long long, DenseMatrix>>& survivor_products) {
    if (static_cast<long long>(survivor_products.size()) < plan.recovery_threshold()) {
        throw std::invalid_argument("poly_decode: fewer survivors than the recovery threshold");
    }
    const long long wa = survivor_products.front().second.rows();
    const long long wb = survivor_products.front().second.cols();

    std::vector<long long> workers;
    DenseMatrix rhs(static_cast<long long>(survivor_products.size()), wa * wb);
    for (std::size_t r = 0; r < survivor_products.size(); ++r) {
        const auto& [worker, value] = survivor_products[r];
        if (value.rows() != wa || value.cols() != wb) {
            throw std::invalid_argument("poly_decode: product shapes differ");
        }
        workers.push_back(worker);
        for (long long a = 0; a < wa; ++a) {
            rhs.block(static_cast<long long>(r), a * wb, 1, wb) = value.row(a);
        }
    }

    const DenseMatrix system = interpolation_rows(plan, workers);
    const LeastSquaresSolution sol = solve_least_squares(system, rhs);

    DenseMatrix product(plan.k_a * wa, plan.k_b * wb);
    for (long long alpha = 0; alpha < plan.k_a; ++alpha) {
        for (long long beta = 0; beta < plan.k_b; ++beta) {
            const long long row = alpha + beta * plan.k_a;
            for (long long a = 0; a < wa; ++a) {
                product.block(alpha * wa + a, beta * wb, 1, wb) =
                    sol.solution.block(row, a * wb, 1, wb);
            }
        }
    }
    return product;
}

double poly_kappa_worst(const PolyCodePlan& plan, long long s, long long max_subsets) {
    if (s < 0 || s >= plan.n) throw std::invalid_argument("poly_kappa_worst: bad straggler count");
    const long long survivors_count = plan.n - s;

    // Enumerate straggler subsets when feasible, otherwise sample.
    long long count = 1;
    bool enumerate = true;
    for (long long i = 0; i < s; ++i) {
        count = count * (plan.n - i) / (i + 1);
        if (count > max_subsets) {
            enumerate = false;
            break;
        }
    }

    std::vector<std::vector<long long>> subsets;
    if (enumerate) {
        std::vector<long long> idx(static_cast<std::size_t>(s));
        std::iota(idx.begin(), idx.end(), 0);
        if (s == 0) {
            subsets.push_back({});
        } else {
            do {
                subsets.push_back(idx);
            } while (next_combination(idx, plan.n));
        }
    } else {
        Rng rng(0xb45e11e);
        std::vector<long long> pool(static_cast<std::size_t>(plan.n));
        for (long long i = 0; i < max_subsets; ++i) {
            std::iota(pool.begin(), pool.end(), 0);
            for (long long j = 0; j < s; ++j) {
                const long long pick = j + static_cast<long long>(
                    rng.next_u64() % static_cast<std::uint64_t>(plan.n - j));
                std::swap(pool[static_cast<std::size_t>(j)],
                          pool[static_cast<std::size_t>(pick)]);
            }
            std::vector<long long> sub(pool.begin(), pool.begin() + s);
            std::sort(sub.begin(), sub.end());
            subsets.push_back(std::move(sub));
        }
    }

    std::vector<double> kappas(subsets.size(), 0.0);
    parallel_for(subsets.size(), [&](std::size_t si) {
        std::vector<long long> survivors;
        survivors.reserve(static_cast<std::size_t>(survivors_count));
        std::size_t k = 0;
        for (long long i = 0; i < plan.n; ++i) {
            if (k < subsets[si].size() && subsets[si][k] == i) {
                ++k;
            } else {
                survivors.push_back(i);
            }
        }
        kappas[si] = condition_number(interpolation_rows(plan, survivors));
    });
    return *std::max_element(kappas.begin(), kappas.end());
}

} // namespace codedmm
