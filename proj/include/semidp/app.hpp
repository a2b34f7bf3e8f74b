#pragma once

// Command driver behind the semidp executable: reads inputs, dispatches to a
// solver, evaluates the requested measures and optionally cross-checks them
// against brute-force enumeration.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "algebra.hpp"
#include "cds.hpp"
#include "csp.hpp"
#include "csp_io.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "expr_io.hpp"
#include "generate.hpp"
#include "kexpr_io.hpp"
#include "measures.hpp"
#include "measures_io.hpp"
#include "oracle.hpp"

namespace semidp {

struct RunConfig {
    std::string command;  // solve-cds, solve-ds, solve-csp, sum-product, eval-expr, oracle, validate, gen

    std::string kexpr_path;
    std::string instance_path;
    std::string td_path;
    std::string expr_path;
    std::string costs_path;
    std::string lists_path;
    std::string matrix_path;
    std::string edges_out;  // validate --kexpr: write the edge list here

    std::vector<std::string> measures;  // empty means the command's default
    std::string problem = "cds";        // oracle/validate on a k-expression: cds or ds
    std::uint32_t k = 0;                // 0: largest label in the k-expression
    std::uint32_t max_k = 4;
    bool check_oracle = false;
    bool json = false;

    EnumerationBudget budget;
    std::size_t node_budget = std::size_t{1} << 22;
    std::size_t member_budget = std::size_t{1} << 20;

    // gen
    std::string gen_kind;  // kexpr, csp, sum-product
    std::uint32_t gen_vertices = 6;
    std::uint32_t gen_variables = 5;
    std::uint32_t gen_domain = 3;
    std::uint32_t gen_arity = 3;
    std::uint32_t gen_bag = 3;
    std::uint64_t seed = 1;
    std::string semiring = "nat";
    std::string out_path;
    std::string out_td_path;
};

struct ResultReport {
    std::string command;
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json expr_stats = nlohmann::json::object();
    nlohmann::json work = nlohmann::json::object();
    nlohmann::json timings = nlohmann::json::object();  // microseconds per phase
    nlohmann::json inputs = nlohmann::json::object();   // role -> FNV-1a hash
    std::string oracle = "not-run";
    bool ok = true;
    std::string failure;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["results"] = results;
        j["expr_stats"] = expr_stats;
        j["work"] = work;
        j["timings_us"] = timings;
        j["inputs"] = inputs;
        j["oracle"] = oracle;
        j["ok"] = ok;
        if (!failure.empty()) j["failure"] = failure;
        return j;
    }

    std::string render_json() const { return to_json().dump(2) + "\n"; }

    std::string render_human() const {
        std::ostringstream out;
        auto flat = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        for (const auto& [k, v] : results.items()) out << k << ": " << flat(v) << "\n";
        if (!failure.empty()) out << "failure: " << failure << "\n";
        if (!expr_stats.empty()) {
            out << "expression:";
            for (const auto& [k, v] : expr_stats.items()) out << " " << k << "=" << flat(v);
            out << "\n";
        }
        if (!work.empty()) {
            out << "work:";
            for (const auto& [k, v] : work.items()) out << " " << k << "=" << flat(v);
            out << "\n";
        }
        if (oracle != "not-run") out << "oracle: " << oracle << "\n";
        return out.str();
    }
};

/// Process exit code of an error category.
inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return 1;
        case ErrorKind::parse: return 2;
        case ErrorKind::legality: return 3;
        case ErrorKind::resource: return 4;
        case ErrorKind::mismatch: return 5;
        case ErrorKind::overflow: return 6;
    }
    return 1;
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

inline std::string fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class Stopwatch {
public:
    std::int64_t lap() {
        const auto now = std::chrono::steady_clock::now();
        const auto us = std::chrono::duration_cast<std::chrono::microseconds>(now - last_).count();
        last_ = now;
        return us;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Either a matrix measure or the (min cost, count) pair.
struct MeasureRequest {
    std::string name;
    std::optional<MeasureMatrix> matrix;
    std::optional<MeasureMatrix> costs;  // count-min-cost
};

inline nlohmann::json render_min_count(const Cost& min, const Natural& count) {
    nlohmann::json j;
    if (min.is_infinite()) {
        j["min"] = "inf";
    } else {
        j["min"] = min.value();
    }
    j["count"] = count.str();
    return j;
}

class Session {
public:
    Session(const RunConfig& cfg, ResultReport& report) : cfg_(cfg), report_(report) {}

    std::string input(const std::string& role, const std::string& path) {
        if (path.empty()) throw UsageError("missing --" + role);
        std::string text = read_file(path);
        report_.inputs[role] = fnv1a(text);
        return text;
    }

    MeasureMatrix matrix_file(const std::string& role, const std::string& path,
                              const std::shared_ptr<const Universe>& u, std::optional<SemiringKind> kind) {
        MeasureMatrix m = read_matrix(input(role, path), u);
        if (kind && m.semiring().kind() != *kind)
            throw UsageError("--" + role + " must be a " + (*kind == SemiringKind::tropical ? "trop" : "bool") + " matrix");
        return m;
    }

    /// Cost matrix: --costs, or unit weight on choosing a vertex when
    /// unit_default is set.
    MeasureMatrix costs(const std::shared_ptr<const Universe>& u, bool unit_default) {
        if (!cfg_.costs_path.empty()) return matrix_file("costs", cfg_.costs_path, u, SemiringKind::tropical);
        if (!unit_default) throw UsageError("this measure needs --costs");
        return MeasureMatrix::generate(u, Semiring::tropical(), [&](auto, auto t) {
            return Value::tropical(Cost(u->codomain_name(t) == "1" ? 1 : 0));
        });
    }

    std::vector<MeasureRequest> measures(const std::shared_ptr<const Universe>& u, bool unit_costs,
                                         const std::vector<std::string>& defaults) {
        std::vector<MeasureRequest> out;
        for (const auto& name : cfg_.measures.empty() ? defaults : cfg_.measures) {
            MeasureRequest r{name, std::nullopt, std::nullopt};
            if (name == "decision") {
                r.matrix = decision_measure(u);
            } else if (name == "count") {
                r.matrix = counting_measure(u);
            } else if (name == "cost") {
                r.matrix = costs(u, unit_costs);
            } else if (name == "deltanat") {
                r.matrix = delta_measure(costs(u, unit_costs), counting_measure(u));
            } else if (name == "count-min-cost") {
                r.costs = costs(u, unit_costs);
            } else if (name == "list") {
                if (cfg_.lists_path.empty()) throw UsageError("--measure list needs --lists");
                r.matrix = matrix_file("lists", cfg_.lists_path, u, SemiringKind::boolean);
            } else if (name == "matrix") {
                if (cfg_.matrix_path.empty()) throw UsageError("--measure matrix needs --matrix");
                r.matrix = matrix_file("matrix", cfg_.matrix_path, u, std::nullopt);
            } else {
                throw UsageError("unknown measure '" + name + "'");
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    void evaluate_all(const ExprStore& store, ExprHandle e, const std::vector<MeasureRequest>& ms) {
        const ExprNode& root = store.node(e);
        report_.expr_stats["dag_nodes"] = store.reachable(e).size();
        report_.expr_stats["tree_size"] = root.tree_size.str();
        report_.expr_stats["domain_size"] = root.domain.count();
        for (const auto& m : ms) {
            if (m.matrix) {
                report_.results[m.name] = evaluate(store, e, *m.matrix).to_string();
            } else {
                const MinCostCount mc = count_min_cost(store, e, *m.costs);
                report_.results[m.name] = render_min_count(mc.min_cost, mc.count);
            }
        }
    }

    nlohmann::json oracle_results(const FunctionSet& fs, const std::vector<MeasureRequest>& ms) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& m : ms) {
            if (m.matrix) {
                out[m.name] = measure_directly(fs, *m.matrix).to_string();
            } else {
                const ArgminResult am = argmin_scan(fs, *m.costs);
                out[m.name] = render_min_count(am.min.as_cost(), Natural(am.set.size()));
            }
        }
        return out;
    }

    void compare(const nlohmann::json& expected) {
        for (const auto& [name, want] : expected.items()) {
            const auto& got = report_.results.at(name);
            if (got != want)
                throw MismatchError("oracle mismatch for measure '" + name + "': solver " + got.dump() + ", oracle " +
                                    want.dump());
        }
        report_.oracle = "agree";
    }

private:
    const RunConfig& cfg_;
    ResultReport& report_;
};

inline ResultReport run_kexpr(const RunConfig& cfg, bool connected) {
    ResultReport report;
    report.command = cfg.command;
    Session session(cfg, report);
    Stopwatch clock;
    const KExprPtr e = read_kexpr(session.input("kexpr", cfg.kexpr_path));
    auto u = indicator_universe(*e);
    const auto ms = session.measures(u, true, {"count"});
    report.timings["parse"] = clock.lap();

    ExprStore store(u);
    CdsStats stats;
    const CdsOptions options{cfg.max_k};
    const ExprHandle h = connected ? solve_semiring_cds(store, *e, cfg.k, &stats, options)
                                   : solve_semiring_ds(store, *e, cfg.k, &stats, options);
    report.timings["solve"] = clock.lap();
    const std::uint32_t k = cfg.k == 0 ? max_label(*e) : cfg.k;
    report.work["k"] = k;
    report.work["max_oplus_pairs"] = stats.max_oplus_pairs;
    report.work["max_table_size"] = stats.max_table_size;
    report.work["oplus_pair_bound"] = std::to_string(cds_oplus_pair_bound(k));
    if (stats.max_oplus_pairs > cds_oplus_pair_bound(k)) throw LegalityError("oplus pair count exceeds its bound");

    session.evaluate_all(store, h, ms);
    report.timings["evaluate"] = clock.lap();
    if (cfg.check_oracle) {
        const LabeledGraph g = eval_kexpr(*e);
        const FunctionSet fs = connected ? enumerate_cds(g, cfg.budget) : enumerate_ds(g, cfg.budget);
        session.compare(session.oracle_results(fs, ms));
        report.timings["oracle"] = clock.lap();
    }
    return report;
}

inline ResultReport run_csp(const RunConfig& cfg) {
    ResultReport report;
    report.command = cfg.command;
    Session session(cfg, report);
    Stopwatch clock;
    const CspInstance csp = read_csp(session.input("instance", cfg.instance_path));
    const TreeDecomposition td = read_td(session.input("td", cfg.td_path), csp.variables.size());
    auto u = csp.universe();
    const auto ms = session.measures(u, false, {"count"});
    const LabeledGraph g = gaifman(csp);
    const NiceTreeDecomposition ntd = make_nice(g, td);
    report.timings["parse"] = clock.lap();

    ExprStore store(u);
    CspStats stats;
    const ExprHandle h = solve_semiring_csp(store, csp, ntd, &stats);
    report.timings["solve"] = clock.lap();
    const Width w = primal_width(td);
    const std::uint64_t bound = csp_node_bound(csp.domain.size(), w.width);
    report.work["width"] = w.width;
    report.work["degenerate"] = w.degenerate;
    report.work["nice_nodes"] = ntd.nodes.size();
    report.work["max_node_assignments"] = stats.max_node_assignments;
    report.work["node_assignment_bound"] = std::to_string(bound);
    if (stats.max_node_assignments > bound) throw LegalityError("per-node assignment count exceeds its bound");

    session.evaluate_all(store, h, ms);
    report.timings["evaluate"] = clock.lap();
    if (cfg.check_oracle) {
        session.compare(session.oracle_results(enumerate_csp(csp, cfg.budget), ms));
        report.timings["oracle"] = clock.lap();
    }
    return report;
}

inline ResultReport run_sum_product(const RunConfig& cfg) {
    ResultReport report;
    report.command = cfg.command;
    Session session(cfg, report);
    Stopwatch clock;
    const SumProductInstance sp = read_sum_product(session.input("instance", cfg.instance_path));
    const TreeDecomposition td = read_td(session.input("td", cfg.td_path), sp.variables.size());
    const auto scopes = scopes_of(sp);
    const NiceTreeDecomposition ntd = make_nice(gaifman(sp), td, &scopes);
    report.timings["parse"] = clock.lap();

    CspStats stats;
    const Value v = solve_sum_product(sp, ntd, &stats);
    report.timings["solve"] = clock.lap();
    report.results["value"] = v.to_string();
    report.results["semiring"] = sp.semiring.to_string();
    const Width w = primal_width(td);
    report.work["width"] = w.width;
    report.work["max_node_assignments"] = stats.max_node_assignments;
    report.work["node_assignment_bound"] = std::to_string(csp_node_bound(sp.domain.size(), w.width));
    if (cfg.check_oracle) {
        const Value want = brute_sum_product(sp, cfg.budget);
        if (!(want == v))
            throw MismatchError("oracle mismatch: solver " + v.to_string() + ", oracle " + want.to_string());
        report.oracle = "agree";
        report.timings["oracle"] = clock.lap();
    }
    return report;
}

inline ResultReport run_eval_expr(const RunConfig& cfg) {
    ResultReport report;
    report.command = cfg.command;
    Session session(cfg, report);
    Stopwatch clock;
    if (cfg.matrix_path.empty()) throw UsageError("eval-expr needs --matrix to fix the universe");
    const MeasureMatrix base = read_matrix(session.input("matrix", cfg.matrix_path));
    auto u = base.universe_ptr();
    ExprStore store(u);
    const ExprHandle h = read_expr(store, session.input("expr", cfg.expr_path));
    const auto ms = session.measures(u, false, {"matrix"});
    report.timings["parse"] = clock.lap();
    EvalStats stats;
    evaluate(store, h, base, &stats);
    report.work["reachable_nodes"] = stats.reachable_nodes;
    report.work["semiring_ops"] = stats.semiring_ops;
    session.evaluate_all(store, h, ms);
    report.timings["evaluate"] = clock.lap();
    if (cfg.check_oracle) {
        const Semantics sem = materialize(store, h, cfg.node_budget, cfg.member_budget);
        if (sem.is_fail()) throw LegalityError("expression denotes FAIL: " + sem.failure);
        session.compare(session.oracle_results(*sem.set, ms));
        report.timings["oracle"] = clock.lap();
    }
    return report;
}

inline ResultReport run_oracle(const RunConfig& cfg) {
    ResultReport report;
    report.command = cfg.command;
    Session session(cfg, report);
    Stopwatch clock;
    FunctionSet fs;
    std::vector<MeasureRequest> ms;
    if (!cfg.kexpr_path.empty()) {
        const KExprPtr e = read_kexpr(session.input("kexpr", cfg.kexpr_path));
        validate_kexpr(*e, cfg.k == 0 ? max_label(*e) : cfg.k);
        ms = session.measures(indicator_universe(*e), true, {"count"});
        const LabeledGraph g = eval_kexpr(*e);
        if (cfg.problem == "cds") {
            fs = enumerate_cds(g, cfg.budget);
        } else if (cfg.problem == "ds") {
            fs = enumerate_ds(g, cfg.budget);
        } else {
            throw UsageError("--problem must be cds or ds");
        }
    } else if (!cfg.instance_path.empty()) {
        const CspInstance csp = read_csp(session.input("instance", cfg.instance_path));
        ms = session.measures(csp.universe(), false, {"count"});
        fs = enumerate_csp(csp, cfg.budget);
    } else {
        throw UsageError("oracle needs --kexpr or --instance");
    }
    report.results = session.oracle_results(fs, ms);
    report.work["solutions"] = fs.size();
    report.timings["oracle"] = clock.lap();
    report.oracle = "only";
    return report;
}

inline ResultReport run_validate(const RunConfig& cfg) {
    ResultReport report;
    report.command = cfg.command;
    Session session(cfg, report);
    if (!cfg.kexpr_path.empty()) {
        const KExprPtr e = read_kexpr(session.input("kexpr", cfg.kexpr_path));
        const std::uint32_t k = cfg.k == 0 ? max_label(*e) : cfg.k;
        try {
            validate_kexpr(*e, k);
        } catch (const LegalityError& err) {
            report.ok = false;
            report.failure = err.what();
            return report;
        }
        const LabeledGraph g = eval_kexpr(*e);
        report.results["k"] = k;
        report.results["vertices"] = g.size();
        report.results["edges"] = g.edge_count();
        if (!cfg.edges_out.empty()) detail::write_file(cfg.edges_out, write_edge_list(g));
        return report;
    }
    if (cfg.instance_path.empty() || cfg.td_path.empty()) throw UsageError("validate needs --kexpr or --instance with --td");
    const CspInstance csp = read_csp(session.input("instance", cfg.instance_path));
    const TreeDecomposition td = read_td(session.input("td", cfg.td_path), csp.variables.size());
    const LabeledGraph g = gaifman(csp);
    const TdCheck check = validate_td(g, td);
    if (!check) {
        report.ok = false;
        report.failure = "property " + std::to_string(check.property) + ": " + check.witness;
        report.results["violated_property"] = check.property;
        return report;
    }
    const NiceTreeDecomposition ntd = make_nice(g, td);
    const TdCheck nice = validate_nice(g, ntd);
    if (!nice) {
        report.ok = false;
        report.failure = "nice form: " + nice.witness;
        return report;
    }
    const Width w = primal_width(td);
    report.results["width"] = w.width;
    report.results["degenerate"] = w.degenerate;
    report.results["nice_nodes"] = ntd.nodes.size();
    report.results["nice_width"] = primal_width(ntd).width;
    return report;
}

inline ResultReport run_gen(const RunConfig& cfg) {
    ResultReport report;
    report.command = cfg.command;
    auto emit = [&](const std::string& path, const std::string& text, const char* role) {
        if (path.empty()) {
            report.results[role] = text;
        } else {
            write_file(path, text);
            report.results[role] = path;
        }
    };
    if (cfg.gen_kind == "kexpr") {
        const KExprPtr e = generate_kexpr({cfg.k == 0 ? 2 : cfg.k, cfg.gen_vertices, cfg.seed});
        emit(cfg.out_path, write_kexpr(*e) + "\n", "kexpr");
    } else if (cfg.gen_kind == "csp" || cfg.gen_kind == "sum-product") {
        const GeneratedCsp g = generate_csp({cfg.gen_variables, cfg.gen_domain, cfg.gen_arity, cfg.gen_bag, cfg.seed});
        if (cfg.gen_kind == "csp") {
            emit(cfg.out_path, write_csp(g.instance), "instance");
        } else {
            emit(cfg.out_path, write_sum_product(random_sum_product(g.instance, parse_semiring(cfg.semiring), cfg.seed)),
                 "instance");
        }
        emit(cfg.out_td_path, write_td(g.td, g.instance.variables.size()), "td");
    } else {
        throw UsageError("gen kind must be kexpr, csp or sum-product");
    }
    return report;
}

}  // namespace detail

/// Runs one command. Failures surface as semidp::Error with a category that
/// exit_code maps to the process status; validation failures are reported
/// with ok = false instead.
inline ResultReport run(const RunConfig& cfg) {
    if (cfg.command == "solve-cds") return detail::run_kexpr(cfg, true);
    if (cfg.command == "solve-ds") return detail::run_kexpr(cfg, false);
    if (cfg.command == "solve-csp") return detail::run_csp(cfg);
    if (cfg.command == "sum-product") return detail::run_sum_product(cfg);
    if (cfg.command == "eval-expr") return detail::run_eval_expr(cfg);
    if (cfg.command == "oracle") return detail::run_oracle(cfg);
    if (cfg.command == "validate") return detail::run_validate(cfg);
    if (cfg.command == "gen") return detail::run_gen(cfg);
    throw UsageError("unknown command '" + cfg.command + "'");
}

}  // namespace semidp
