// Command-line front end: parameter derivation, plan generation and
// verification, Q analysis, conditioning sweeps, worker simulation, and
// end-to-end coded multiplication with Matrix Market I/O.

#include "codedmm/analysis.hpp"
#include "codedmm/baseline.hpp"
#include "codedmm/decoder.hpp"
#include "codedmm/encoding.hpp"
#include "codedmm/matrix_market.hpp"
#include "codedmm/simulator.hpp"
#include "codedmm/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace codedmm;

namespace {

constexpr const char* kVersion = "codedmm 1.0.0";

struct Options {
    long long n = 0, k_a = 0, k_b = 0, x = 0;
    std::uint64_t seed = 1;
    long long rows = 2400, cols_a = 2400, cols_b = 1000;
    double density = 0.02;
    std::string a_path, b_path;
    long long straggler_count = -1;
    double straggler_factor = 0.2;
    std::string cost_model = "nnz";
    bool pad = false;
    std::string out_dir;
    std::string plan_file;
    long long seeds = 1;
    std::string oracle_mode = "auto";
    std::vector<double> nodes;
    bool check = false;
};

SchemeParams scheme_params(const Options& o) {
    return SchemeParams{o.n, o.k_a, o.k_b, o.x, o.seed};
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string canonical_config(const Options& o, const std::string& subcommand) {
    std::ostringstream os;
    os << subcommand << " n=" << o.n << " k_a=" << o.k_a << " k_b=" << o.k_b << " x=" << o.x
       << " seed=" << o.seed << " rows=" << o.rows << " cols_a=" << o.cols_a
       << " cols_b=" << o.cols_b << " density=" << o.density << " a=" << o.a_path
       << " b=" << o.b_path << " straggler_count=" << o.straggler_count
       << " straggler_factor=" << o.straggler_factor << " cost_model=" << o.cost_model
       << " pad=" << o.pad << " seeds=" << o.seeds << " oracle_mode=" << o.oracle_mode;
    return os.str();
}

void write_manifest(const Options& o, const std::string& subcommand) {
    if (o.out_dir.empty()) return;
    fs::create_directories(o.out_dir);
    std::ofstream out(fs::path(o.out_dir) / "manifest.txt");
    const std::string config = canonical_config(o, subcommand);
    out << "tool " << kVersion << "\n";
    out << "subcommand " << subcommand << "\n";
    out << "config " << config << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config)));
    out << "config_hash " << buf << "\n";
    out << "seed " << o.seed << "\n";
}

struct Inputs {
    SparseMatrix a;
    SparseMatrix b;
};

Inputs load_inputs(const Options& o) {
    Inputs in;
    if (!o.a_path.empty() != !o.b_path.empty()) {
        throw CLI::ValidationError("inputs", "provide both --a and --b, or neither");
    }
    if (!o.a_path.empty()) {
        in.a = read_matrix_market_sparse(o.a_path);
        in.b = read_matrix_market_sparse(o.b_path);
    } else {
        Rng rng_a(o.seed ^ 0xa5a5a5a5ULL);
        Rng rng_b(o.seed ^ 0x5a5a5a5aULL);
        in.a = random_sparse(o.rows, o.cols_a, o.density, rng_a);
        in.b = random_sparse(o.rows, o.cols_b, o.density, rng_b);
    }
    if (in.a.rows() != in.b.rows()) {
        throw CLI::ValidationError("inputs", "A and B must have the same row count");
    }
    return in;
}

EncodingPlan obtain_plan(const Options& o) {
    if (!o.plan_file.empty()) return read_plan(o.plan_file);
    return build_plan(scheme_params(o));
}

int run_derive(const Options& o) {
    const DerivedParams d = derive_params(scheme_params(o));
    std::cout << "n " << d.n << "\nk_a " << d.k_a << "\nk_b " << d.k_b << "\nx " << d.x
              << "\nmax_stragglers " << d.max_stragglers << "\nstragglers " << d.stragglers
              << "\nweight_reduction " << d.weight_reduction << "\na_weight " << d.a_weight()
              << "\nb_weight " << d.b_weight << "\nnum_a_blocks " << d.num_a_blocks
              << "\nnum_b_blocks " << d.num_b_blocks << "\nnum_unknowns " << d.num_unknowns
              << "\nuncoded_per_worker " << d.uncoded_per_worker << "\ntasks_per_worker "
              << d.tasks_per_worker << "\ncoded_per_worker " << d.coded_per_worker
              << "\nnum_groups " << d.num_groups << "\ntype_window " << d.type_window
              << "\nrecovery_threshold " << d.recovery_threshold << "\nappearances "
              << d.appearances << "\n";
    return 0;
}

int run_plan(const Options& o) {
    const EncodingPlan plan = build_plan(scheme_params(o));
    std::string path = o.plan_file;
    if (path.empty()) {
        if (o.out_dir.empty()) {
            write_plan(std::cout, plan);
            return 0;
        }
        fs::create_directories(o.out_dir);
        path = (fs::path(o.out_dir) / "plan.txt").string();
    }
    write_plan(path, plan);
    write_manifest(o, "plan");
    std::cout << "plan written to " << path << "\n";
    return 0;
}

void print_report(const std::string& suite, const PropertyReport& report) {
    for (const PropertyCheck& c : report.checks) {
        std::cout << (c.pass ? "pass" : "FAIL") << "  " << suite << ": " << c.name;
        if (!c.pass) std::cout << "  [" << c.counterexample << "]";
        std::cout << "\n";
    }
}

int run_verify(const Options& o) {
    const EncodingPlan plan = obtain_plan(o);
    const DerivedParams& d = plan.derived;
    bool ok = true;

    const PropertyReport assignment = verify_assignment_properties(plan);
    print_report("assignment", assignment);
    ok = ok && assignment.all_pass;

    if (d.x == 0) {
        const PropertyReport types = verify_type_structure(plan);
        print_report("type-structure", types);
        ok = ok && types.all_pass;
    }

    const PropertyReport resilience = verify_resilience(plan, d.stragglers);
    print_report("resilience", resilience);
    ok = ok && resilience.all_pass;

    const PropertyReport subsets = verify_column_subset_ranks(plan);
    print_report("column-subsets", subsets);
    ok = ok && subsets.all_pass;

    std::cout << (ok ? "all checks passed" : "checks FAILED") << "\n";
    return ok ? 0 : 1;
}

int run_q_bounds(const Options& o) {
    const QBounds q = q_bounds(derive_params(scheme_params(o)));
    std::cout << "Q_lb=" << q.q_lb << " Q_ub=" << q.q_ub << "\n";
    return 0;
}

int run_q_oracle(const Options& o) {
    const EncodingPlan plan = obtain_plan(o);
    OracleMode mode;
    if (o.oracle_mode == "exhaustive") {
        mode = OracleMode::exhaustive_ledgers;
    } else if (o.oracle_mode == "per-class") {
        mode = OracleMode::per_class_subsets;
    } else {
        mode = plan.derived.n <= 6 ? OracleMode::exhaustive_ledgers
                                   : OracleMode::per_class_subsets;
    }
    const long long q = q_exact_oracle(plan, mode);
    const QBounds bounds = q_bounds(plan.derived);
    std::cout << "Q=" << q << " (bounds " << bounds.q_lb << ".." << bounds.q_ub << ")\n";
    return 0;
}

int run_cond(const Options& o) {
    const long long s_default = derive_params(scheme_params(o)).stragglers;
    const long long s = o.straggler_count >= 0 ? o.straggler_count : s_default;

    std::vector<double> worst;
    for (long long i = 0; i < o.seeds; ++i) {
        SchemeParams p = scheme_params(o);
        p.seed = o.seed + static_cast<std::uint64_t>(i);
        const EncodingPlan plan = build_plan(p);
        const ConditioningReport rep = kappa_worst(plan, s);
        worst.push_back(rep.kappa_worst);
        std::cout << "seed " << p.seed << " kappa_worst " << rep.kappa_worst << " worst_class "
                  << rep.worst_class << " subsets " << rep.subsets_checked
                  << (rep.sampled ? " (sampled)" : "") << "\n";
    }
    std::sort(worst.begin(), worst.end());
    const double median = worst.size() % 2 == 1
                              ? worst[worst.size() / 2]
                              : 0.5 * (worst[worst.size() / 2 - 1] + worst[worst.size() / 2]);
    std::cout << "median kappa_worst " << median << "\n";

    const PolyCodePlan poly = poly_plan(o.n, o.k_a, o.k_b, o.nodes);
    std::cout << "poly kappa_worst " << poly_kappa_worst(poly, s) << "\n";

    if (!o.out_dir.empty()) {
        write_manifest(o, "cond");
        std::ofstream csv(fs::path(o.out_dir) / "cond.csv");
        csv << "seed,kappa_worst\n";
        for (long long i = 0; i < o.seeds; ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", worst[static_cast<std::size_t>(i)]);
            csv << (o.seed + static_cast<std::uint64_t>(i)) << "," << buf << "\n";
        }
    }
    return 0;
}

CostModelKind parse_cost_model(const std::string& name) {
    if (name == "unit") return CostModelKind::unit_cost;
    if (name == "nnz") return CostModelKind::nnz_flop;
    if (name == "analytic") return CostModelKind::analytic_density;
    throw CLI::ValidationError("--cost-model", "expected unit, nnz, or analytic");
}

int run_simulate(const Options& o) {
    const EncodingPlan plan = build_plan(scheme_params(o));
    const CostModelKind kind = parse_cost_model(o.cost_model);
    const PolyCodePlan poly = poly_plan(o.n, o.k_a, o.k_b, o.nodes);

    TaskCosts plan_costs, poly_costs;
    if (kind == CostModelKind::unit_cost) {
        plan_costs = unit_costs(plan);
        poly_costs = poly_unit_costs(poly);
    } else if (kind == CostModelKind::analytic_density) {
        plan_costs = analytic_costs(plan, o.density, o.rows, o.cols_a, o.cols_b);
        poly_costs = poly_analytic_costs(poly, o.density, o.rows, o.cols_a, o.cols_b);
    } else {
        const Inputs in = load_inputs(o);
        const PartitionedMatrix a(in.a, plan.derived.num_a_blocks, o.pad);
        const PartitionedMatrix b(in.b, plan.derived.num_b_blocks, o.pad);
        plan_costs = measured_costs(plan, encode_blocks(a, b, plan));
        const PartitionedMatrix pa(in.a, o.k_a, o.pad);
        const PartitionedMatrix pb(in.b, o.k_b, o.pad);
        poly_costs = poly_measured_costs(poly_encode(pa, pb, poly));
    }

    const long long max_count = o.straggler_count >= 0 ? o.straggler_count : 6;
    const auto rows = compare_overall(plan, plan_costs, poly, poly_costs, max_count,
                                      o.straggler_factor, kind);
    write_sweep_csv(std::cout, rows);
    if (!o.out_dir.empty()) {
        write_manifest(o, "simulate");
        std::ofstream csv(fs::path(o.out_dir) / "sweep.csv");
        write_sweep_csv(csv, rows);
    }
    return 0;
}

int run_multiply(const Options& o) {
    const EncodingPlan plan = build_plan(scheme_params(o));
    const Inputs in = load_inputs(o);
    const PartitionedMatrix a(in.a, plan.derived.num_a_blocks, o.pad);
    const PartitionedMatrix b(in.b, plan.derived.num_b_blocks, o.pad);
    const auto payloads = encode_blocks(a, b, plan);

    const CostModelKind kind = parse_cost_model(o.cost_model);
    TaskCosts costs;
    if (kind == CostModelKind::unit_cost) {
        costs = unit_costs(plan);
    } else if (kind == CostModelKind::analytic_density) {
        costs = analytic_costs(plan, o.density, in.a.rows(), in.a.cols(), in.b.cols());
    } else {
        costs = measured_costs(plan, payloads);
    }

    const long long count = o.straggler_count >= 0 ? o.straggler_count : 0;
    const SpeedProfile speeds =
        SpeedProfile::with_stragglers(plan.derived.n, count, o.straggler_factor);
    const Timeline tl = simulate_timeline(plan, costs, speeds);
    const DecodePoint dp = time_to_decode(tl, plan);
    if (!dp.decodable) {
        std::cerr << "not decodable under the given speed profile\n";
        return 1;
    }

    // Compute the products for the decodable prefix and decode.
    ProgressLedger ledger(plan.derived.n, plan.derived.tasks_per_worker);
    std::vector<CompletedProduct> products;
    for (long long e = 0; e < dp.products; ++e) {
        const TimelineEvent& ev = tl.events[static_cast<std::size_t>(e)];
        ledger.record_completion(ev.worker);
        const auto& payload = payloads[static_cast<std::size_t>(ev.worker)];
        GramProduct g = gram_product(*payload.a_blocks[static_cast<std::size_t>(ev.location)],
                                     *payload.b_block);
        products.push_back({ev.worker, ev.location, std::move(g.value)});
    }
    const RecoveredResult result = decode(ledger, products, plan);

    // Trim any padding back to the true product size.
    const DenseMatrix product = result.product.topLeftCorner(in.a.cols(), in.b.cols());

    std::cout << "decode_time " << dp.time << "\nproducts_used " << dp.products << "\n";
    double max_residual = 0, max_cond = 0;
    for (double r : result.class_residuals) max_residual = std::max(max_residual, r);
    for (double c : result.class_conditions) max_cond = std::max(max_cond, c);
    std::cout << "max_class_residual " << max_residual << "\nmax_class_condition " << max_cond
              << "\n";

    if (o.check) {
        const GramProduct direct = gram_product(in.a, in.b);
        const double err = (product - direct.value).norm() / direct.value.norm();
        std::cout << "relative_error " << err << "\n";
    }
    if (!o.out_dir.empty()) {
        write_manifest(o, "multiply");
        write_matrix_market((fs::path(o.out_dir) / "result.mtx").string(), product);
        std::cout << "result written to " << (fs::path(o.out_dir) / "result.mtx").string()
                  << "\n";
    }
    return 0;
}

int run_baseline(const Options& o) {
    const PolyCodePlan poly = poly_plan(o.n, o.k_a, o.k_b, o.nodes);
    std::cout << "recovery_threshold " << poly.recovery_threshold() << "\n";
    std::cout << "a_weight " << poly.k_a << "\nb_weight " << poly.k_b << "\n";

    const Inputs in = load_inputs(o);
    const PartitionedMatrix a(in.a, o.k_a, o.pad);
    const PartitionedMatrix b(in.b, o.k_b, o.pad);
    const auto payloads = poly_encode(a, b, poly);

    const long long s_default = o.n - poly.recovery_threshold();
    const long long s = o.straggler_count >= 0 ? o.straggler_count : s_default;
    std::cout << "kappa_worst " << poly_kappa_worst(poly, s) << "\n";

    // Decode from the first threshold workers as a correctness check.
    std::vector<std::pair<long long, DenseMatrix>> products;
    for (long long w = 0; w < poly.recovery_threshold(); ++w) {
        GramProduct g = gram_product(payloads[static_cast<std::size_t>(w)].a,
                                     payloads[static_cast<std::size_t>(w)].b);
        products.emplace_back(w, std::move(g.value));
    }
    const DenseMatrix recovered = poly_decode(poly, products);
    const DenseMatrix product = recovered.topLeftCorner(in.a.cols(), in.b.cols());
    if (o.check) {
        const GramProduct direct = gram_product(in.a, in.b);
        std::cout << "relative_error " << (product - direct.value).norm() / direct.value.norm()
                  << "\n";
    }
    if (!o.out_dir.empty()) {
        write_manifest(o, "baseline");
        write_matrix_market((fs::path(o.out_dir) / "result.mtx").string(), product);
    }
    return 0;
}

void add_scheme_options(CLI::App* cmd, Options& o, bool required = true) {
    auto* n = cmd->add_option("--n", o.n, "worker count");
    auto* ka = cmd->add_option("--ka", o.k_a, "inverse storage fraction for A");
    auto* kb = cmd->add_option("--kb", o.k_b, "inverse storage fraction for B");
    if (required) {
        n->required();
        ka->required();
        kb->required();
    }
    cmd->add_option("--x", o.x, "straggler-resilience relaxation");
    cmd->add_option("--seed", o.seed, "PRNG seed");
}

void add_matrix_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--rows", o.rows, "synthetic input row count");
    cmd->add_option("--cols-a", o.cols_a, "synthetic A column count");
    cmd->add_option("--cols-b", o.cols_b, "synthetic B column count");
    cmd->add_option("--density", o.density, "synthetic input density");
    cmd->add_option("--a", o.a_path, "Matrix Market file for A");
    cmd->add_option("--b", o.b_path, "Matrix Market file for B");
    cmd->add_flag("--pad", o.pad, "pad indivisible dimensions with zero columns");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded distributed matrix multiplication toolkit"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "read options from a key=value file");
    app.require_subcommand(1);

    Options o;

    auto* derive = app.add_subcommand("derive", "print derived scheme parameters");
    add_scheme_options(derive, o);

    auto* plan = app.add_subcommand("plan", "generate and write an assignment plan");
    add_scheme_options(plan, o);
    plan->add_option("--out", o.out_dir, "output directory");
    plan->add_option("--plan-file", o.plan_file, "explicit plan file path");

    auto* verify = app.add_subcommand("verify", "run every property suite on a plan");
    add_scheme_options(verify, o, false);
    verify->add_option("--plan-file", o.plan_file, "plan file to verify");

    auto* qb = app.add_subcommand("q-bounds", "print closed-form Q bounds");
    add_scheme_options(qb, o);

    auto* qo = app.add_subcommand("q-oracle", "brute-force Q for a concrete plan");
    add_scheme_options(qo, o, false);
    qo->add_option("--plan-file", o.plan_file, "plan file to analyze");
    qo->add_option("--oracle-mode", o.oracle_mode, "auto, per-class, or exhaustive");

    auto* cond = app.add_subcommand("cond", "worst-case condition number sweep");
    add_scheme_options(cond, o);
    cond->add_option("--straggler-count", o.straggler_count, "stragglers per subset");
    cond->add_option("--seeds", o.seeds, "number of seeds (median reported)");
    cond->add_option("--nodes", o.nodes, "baseline evaluation points");
    cond->add_option("--out", o.out_dir, "output directory");

    auto* sim = app.add_subcommand("simulate", "decode-time sweep over straggler counts");
    add_scheme_options(sim, o);
    add_matrix_options(sim, o);
    sim->add_option("--straggler-count", o.straggler_count, "maximum stragglers in the sweep");
    sim->add_option("--straggler-factor", o.straggler_factor, "straggler speed factor");
    sim->add_option("--cost-model", o.cost_model, "unit, nnz, or analytic");
    sim->add_option("--nodes", o.nodes, "baseline evaluation points");
    sim->add_option("--out", o.out_dir, "output directory");

    auto* mul = app.add_subcommand("multiply", "encode, simulate, decode, write the product");
    add_scheme_options(mul, o);
    add_matrix_options(mul, o);
    mul->add_option("--straggler-count", o.straggler_count, "slow workers in the profile");
    mul->add_option("--straggler-factor", o.straggler_factor, "straggler speed factor");
    mul->add_option("--cost-model", o.cost_model, "unit, nnz, or analytic");
    mul->add_flag("--check", o.check, "compare against the direct product");
    mul->add_option("--out", o.out_dir, "output directory");

    auto* base = app.add_subcommand("baseline", "polynomial-code counterpart run");
    add_scheme_options(base, o);
    add_matrix_options(base, o);
    base->add_option("--straggler-count", o.straggler_count, "stragglers for the kappa sweep");
    base->add_option("--nodes", o.nodes, "evaluation points (default 1..n)");
    base->add_flag("--check", o.check, "compare against the direct product");
    base->add_option("--out", o.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (derive->parsed()) return run_derive(o);
        if (plan->parsed()) return run_plan(o);
        if (verify->parsed()) return run_verify(o);
        if (qb->parsed()) return run_q_bounds(o);
        if (qo->parsed()) return run_q_oracle(o);
        if (cond->parsed()) return run_cond(o);
        if (sim->parsed()) return run_simulate(o);
        if (mul->parsed()) return run_multiply(o);
        if (base->parsed()) return run_baseline(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
