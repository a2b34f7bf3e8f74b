// semidp command-line front end.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "semidp/app.hpp"

namespace {

template <class T>
void env_override(const char* name, T& target) {
    if (const char* v = std::getenv(name)) {
        try {
            target = static_cast<T>(std::stoull(v));
        } catch (const std::exception&) {
            throw semidp::UsageError(std::string(name) + " must be a non-negative integer");
        }
    }
}

void add_measure_options(CLI::App* cmd, semidp::RunConfig& cfg) {
    cmd->add_option("--measure", cfg.measures,
                    "decision, count, cost, deltanat, count-min-cost, list or matrix (repeatable)");
    cmd->add_option("--costs", cfg.costs_path, "trop matrix file of costs");
    cmd->add_option("--lists", cfg.lists_path, "bool matrix file of allowed values");
    cmd->add_option("--matrix", cfg.matrix_path, "matrix file in any semiring");
}

}  // namespace

int main(int argc, char** argv) {
    semidp::RunConfig cfg;
    CLI::App app{"Semiring dynamic programming over clique-width and tree decompositions"};
    app.require_subcommand(1);
    std::string format = "human";
    app.add_option("--format", format, "human or json")->check(CLI::IsMember({"human", "json"}));

    auto* cds = app.add_subcommand("solve-cds", "connected dominating sets of a k-expression");
    auto* ds = app.add_subcommand("solve-ds", "dominating sets of a k-expression");
    for (auto* c : {cds, ds}) {
        c->add_option("--kexpr", cfg.kexpr_path, "k-expression file")->required();
        c->add_option("--k", cfg.k, "width (default: largest label)");
        c->add_option("--max-k", cfg.max_k, "refuse widths above this");
        c->add_flag("--check-oracle", cfg.check_oracle, "compare with brute-force enumeration");
        add_measure_options(c, cfg);
    }

    auto* csp = app.add_subcommand("solve-csp", "solution set of a CSP over a tree decomposition");
    csp->add_option("--instance", cfg.instance_path, "CSP instance (JSON)")->required();
    csp->add_option("--td", cfg.td_path, "tree decomposition (PACE .td)")->required();
    csp->add_flag("--check-oracle", cfg.check_oracle, "compare with brute-force enumeration");
    add_measure_options(csp, cfg);

    auto* sp = app.add_subcommand("sum-product", "sum over assignments of products of valuations");
    sp->add_option("--instance", cfg.instance_path, "sum-product instance (JSON)")->required();
    sp->add_option("--td", cfg.td_path, "tree decomposition (PACE .td)")->required();
    sp->add_flag("--check-oracle", cfg.check_oracle, "compare with brute-force summation");

    auto* ev = app.add_subcommand("eval-expr", "evaluate a join/union expression");
    ev->add_option("--expr", cfg.expr_path, "expression file")->required();
    ev->add_flag("--check-oracle", cfg.check_oracle, "compare with the materialized function set");
    add_measure_options(ev, cfg);

    auto* orc = app.add_subcommand("oracle", "brute-force measures by enumeration");
    orc->add_option("--kexpr", cfg.kexpr_path, "k-expression file");
    orc->add_option("--instance", cfg.instance_path, "CSP instance (JSON)");
    orc->add_option("--problem", cfg.problem, "cds or ds (with --kexpr)");
    orc->add_option("--k", cfg.k, "width (default: largest label)");
    add_measure_options(orc, cfg);

    auto* val = app.add_subcommand("validate", "check a k-expression or a tree decomposition");
    val->add_option("--kexpr", cfg.kexpr_path, "k-expression file");
    val->add_option("--k", cfg.k, "width (default: largest label)");
    val->add_option("--edges", cfg.edges_out, "write the edge list of the k-expression's graph");
    val->add_option("--instance", cfg.instance_path, "CSP instance (JSON)");
    val->add_option("--td", cfg.td_path, "tree decomposition (PACE .td)");

    auto* gen = app.add_subcommand("gen", "seeded random fixtures");
    gen->add_option("kind", cfg.gen_kind, "kexpr, csp or sum-product")->required();
    gen->add_option("--k", cfg.k, "k-expression width");
    gen->add_option("--n", cfg.gen_vertices, "k-expression vertex count");
    gen->add_option("--vars", cfg.gen_variables, "variable count");
    gen->add_option("--domain", cfg.gen_domain, "domain size");
    gen->add_option("--arity", cfg.gen_arity, "maximal constraint arity");
    gen->add_option("--bag", cfg.gen_bag, "maximal bag size");
    gen->add_option("--semiring", cfg.semiring, "valuation semiring for sum-product: bool, nat or trop");
    gen->add_option("--seed", cfg.seed, "random seed");
    gen->add_option("--out", cfg.out_path, "instance output file (default stdout)");
    gen->add_option("--out-td", cfg.out_td_path, "decomposition output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.json = format == "json";

    try {
        env_override("SEMIDP_MAX_CANDIDATES", cfg.budget.max_candidates);
        env_override("SEMIDP_MAX_SOLUTIONS", cfg.budget.max_solutions);
        env_override("SEMIDP_MEMBER_BUDGET", cfg.member_budget);
        env_override("SEMIDP_NODE_BUDGET", cfg.node_budget);

        const semidp::ResultReport report = semidp::run(cfg);
        if (cfg.command == "gen" && !cfg.json) {
            for (const auto& [role, v] : report.results.items()) {
                const std::string text = v.get<std::string>();
                if ((role == "td" ? cfg.out_td_path : cfg.out_path).empty()) std::cout << text;
            }
        } else {
            std::cout << (cfg.json ? report.render_json() : report.render_human());
        }
        return report.ok ? 0 : semidp::exit_code(semidp::ErrorKind::legality);
    } catch (const semidp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return semidp::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
