#include "codedmm/encoding.hpp"

#include "codedmm/rng.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace codedmm {

ClassDecomposition decompose_classes(const DerivedParams& derived) {
    ClassDecomposition out;
    out.ell = derived.tasks_per_worker;
    out.k_a = derived.k_a;
    out.classes.resize(static_cast<std::size_t>(out.ell));
    for (long long m = 0; m < out.ell; ++m) {
        auto& cls = out.classes[static_cast<std::size_t>(m)];
        cls.reserve(static_cast<std::size_t>(out.k_a));
        for (long long j = 0; j < out.k_a; ++j) {
            cls.push_back(j * out.ell + m);
        }
    }
    return out;
}

long long EncodingPlan::class_location(long long class_id, long long worker) const {
    const auto& tasks = workers.at(static_cast<std::size_t>(worker)).tasks;
    for (std::size_t j = 0; j < tasks.size(); ++j) {
        if (tasks[j].class_id == class_id) return static_cast<long long>(j);
    }
    throw std::logic_error("plan: class missing from worker");
}

std::vector<long long> EncodingPlan::group(long long g) const {
    const long long ell = derived.tasks_per_worker;
    std::vector<long long> ids;
    ids.reserve(static_cast<std::size_t>(ell));
    for (long long i = g * ell; i < (g + 1) * ell; ++i) ids.push_back(i);
    return ids;
}

EncodingPlan build_plan(const SchemeParams& params) {
    return build_plan(params, PlanOptions{});
}

EncodingPlan build_plan(const SchemeParams& params, const PlanOptions& options) {
    EncodingPlan plan;
    plan.params = params;
    plan.derived = derive_params(params);
    const DerivedParams& d = plan.derived;
    const long long b_weight = options.b_weight_override.value_or(d.b_weight);
    if (b_weight < 1 || b_weight > d.k_b) {
        throw std::invalid_argument("plan: B weight out of range");
    }

    const ClassDecomposition classes = decompose_classes(d);
    std::vector<long long> counters(static_cast<std::size_t>(d.tasks_per_worker), 0);
    Rng rng(params.seed);

    const long long shift = d.num_a_blocks / d.n;
    const long long coded_weight = d.a_weight();

    plan.workers.reserve(static_cast<std::size_t>(d.n));
    for (long long i = 0; i < d.n; ++i) {
        WorkerPlan wp;
        wp.worker = i;
        const long long u = i * shift;

        for (long long t = 0; t < d.uncoded_per_worker; ++t) {
            ATask task;
            task.kind = ATask::Kind::uncoded;
            task.block = (u + t) % d.num_a_blocks;
            task.class_id = task.block % d.tasks_per_worker;
            wp.tasks.push_back(std::move(task));
        }

        for (long long j = 0; j < d.coded_per_worker; ++j) {
            const long long v = (u + d.uncoded_per_worker + j) % d.tasks_per_worker;
            ATask task;
            task.kind = ATask::Kind::coded;
            task.class_id = v;
            auto& lambda = counters[static_cast<std::size_t>(v)];
            const auto& cls = classes.classes[static_cast<std::size_t>(v)];
            for (long long t = 0; t < coded_weight; ++t) {
                task.support.push_back(cls[static_cast<std::size_t>((lambda + t) % d.k_a)]);
                task.coefficients.push_back(rng.uniform_sym());
            }
            lambda = (lambda + coded_weight) % d.k_a;
            wp.tasks.push_back(std::move(task));
        }

        wp.b.type_id = i % d.k_b;
        for (long long t = 0; t < b_weight; ++t) {
            wp.b.support.push_back((i + t) % d.num_b_blocks);
            wp.b.coefficients.push_back(rng.uniform_sym());
        }
        plan.workers.push_back(std::move(wp));
    }
    plan.final_counters = std::move(counters);
    return plan;
}

AppearanceIndex appearance_sets(const EncodingPlan& plan) {
    const long long blocks = plan.derived.num_a_blocks;
    AppearanceIndex idx;
    idx.uncoded_workers.resize(static_cast<std::size_t>(blocks));
    idx.coded_workers.resize(static_cast<std::size_t>(blocks));
    for (const WorkerPlan& wp : plan.workers) {
        for (const ATask& t : wp.tasks) {
            if (t.kind == ATask::Kind::uncoded) {
                idx.uncoded_workers[static_cast<std::size_t>(t.block)].push_back(wp.worker);
            } else {
                for (long long b : t.support) {
                    idx.coded_workers[static_cast<std::size_t>(b)].push_back(wp.worker);
                }
            }
        }
    }
    return idx;
}

std::vector<WorkerPayload> encode_blocks(const PartitionedMatrix& a,
                                         const PartitionedMatrix& b,
                                         const EncodingPlan& plan) {
    const DerivedParams& d = plan.derived;
    if (a.block_count() != d.num_a_blocks) {
        throw std::invalid_argument("encode: A partition does not match plan");
    }
    if (b.block_count() != d.num_b_blocks) {
        throw std::invalid_argument("encode: B partition does not match plan");
    }
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("encode: A and B row counts differ");
    }

    std::vector<WorkerPayload> payloads;
    payloads.reserve(plan.workers.size());
    for (const WorkerPlan& wp : plan.workers) {
        WorkerPayload p;
        for (const ATask& t : wp.tasks) {
            if (t.kind == ATask::Kind::uncoded) {
                p.a_blocks.push_back(a.block_ptr(t.block));
            } else {
                std::vector<const SparseMatrix*> parts;
                parts.reserve(t.support.size());
                for (long long idx : t.support) parts.push_back(&a.block(idx));
                p.a_blocks.push_back(std::make_shared<const SparseMatrix>(
                    linear_combination(parts, t.coefficients)));
            }
        }
        std::vector<const SparseMatrix*> parts;
        parts.reserve(wp.b.support.size());
        for (long long idx : wp.b.support) parts.push_back(&b.block(idx));
        p.b_block = std::make_shared<const SparseMatrix>(
            linear_combination(parts, wp.b.coefficients));
        payloads.push_back(std::move(p));
    }
    return payloads;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string expect_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) return line;
    }
    throw std::runtime_error("plan file: truncated");
}

std::istringstream tagged(const std::string& line, const std::string& tag) {
    std::istringstream ls(line);
    std::string got;
    ls >> got;
    if (got != tag) {
        throw std::runtime_error("plan file: expected '" + tag + "', got '" + got + "'");
    }
    return ls;
}

} // namespace

void write_plan(std::ostream& out, const EncodingPlan& plan) {
    out << "codedmm-plan v1\n";
    out << "n " << plan.params.n << "\n";
    out << "k_a " << plan.params.k_a << "\n";
    out << "k_b " << plan.params.k_b << "\n";
    out << "x " << plan.params.x << "\n";
    out << "seed " << plan.params.seed << "\n";
    for (const WorkerPlan& wp : plan.workers) {
        out << "worker " << wp.worker << "\n";
        for (const ATask& t : wp.tasks) {
            if (t.kind == ATask::Kind::uncoded) {
                out << "a u " << t.block << "\n";
            } else {
                out << "a c " << t.class_id << " :";
                for (long long s : t.support) out << " " << s;
                out << " :";
                for (double c : t.coefficients) out << " " << format_value(c);
                out << "\n";
            }
        }
        out << "b " << wp.b.type_id << " :";
        for (long long s : wp.b.support) out << " " << s;
        out << " :";
        for (double c : wp.b.coefficients) out << " " << format_value(c);
        out << "\n";
    }
    out << "counters";
    for (long long c : plan.final_counters) out << " " << c;
    out << "\n";
}

void write_plan(const std::string& path, const EncodingPlan& plan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_plan(out, plan);
}

EncodingPlan read_plan(std::istream& in) {
    if (expect_line(in) != "codedmm-plan v1") {
        throw std::runtime_error("plan file: bad header");
    }
    SchemeParams params;
    tagged(expect_line(in), "n") >> params.n;
    tagged(expect_line(in), "k_a") >> params.k_a;
    tagged(expect_line(in), "k_b") >> params.k_b;
    tagged(expect_line(in), "x") >> params.x;
    tagged(expect_line(in), "seed") >> params.seed;

    EncodingPlan plan;
    plan.params = params;
    plan.derived = derive_params(params);
    const long long ell = plan.derived.tasks_per_worker;

    std::string line;
    for (long long i = 0; i < plan.derived.n; ++i) {
        WorkerPlan wp;
        tagged(expect_line(in), "worker") >> wp.worker;
        for (long long j = 0; j < ell; ++j) {
            auto ls = tagged(expect_line(in), "a");
            std::string kind;
            ls >> kind;
            ATask t;
            if (kind == "u") {
                t.kind = ATask::Kind::uncoded;
                ls >> t.block;
                t.class_id = t.block % ell;
            } else if (kind == "c") {
                t.kind = ATask::Kind::coded;
                std::string sep;
                ls >> t.class_id >> sep;
                long long idx = 0;
                while (ls >> sep && sep != ":") {
                    idx = std::stoll(sep);
                    t.support.push_back(idx);
                }
                double v = 0;
                while (ls >> v) t.coefficients.push_back(v);
                if (t.support.size() != t.coefficients.size()) {
                    throw std::runtime_error("plan file: coded task size mismatch");
                }
            } else {
                throw std::runtime_error("plan file: unknown task kind " + kind);
            }
            wp.tasks.push_back(std::move(t));
        }
        {
            auto ls = tagged(expect_line(in), "b");
            std::string sep;
            ls >> wp.b.type_id >> sep;
            while (ls >> sep && sep != ":") {
                wp.b.support.push_back(std::stoll(sep));
            }
            double v = 0;
            while (ls >> v) wp.b.coefficients.push_back(v);
            if (wp.b.support.size() != wp.b.coefficients.size()) {
                throw std::runtime_error("plan file: B spec size mismatch");
            }
        }
        plan.workers.push_back(std::move(wp));
    }
    {
        auto ls = tagged(expect_line(in), "counters");
        long long c = 0;
        while (ls >> c) plan.final_counters.push_back(c);
    }
    return plan;
}

EncodingPlan read_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_plan(in);
}

} // namespace codedmm
