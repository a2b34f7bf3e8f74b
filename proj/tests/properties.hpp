#pragma once

// Corpus-wide equivalence and bound checks shared by the unit suites and
// the acceptance binary. Each returns the first failure, or nullopt.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "laws.hpp"

namespace testing_support {

inline std::string describe_set(const FunctionSet& fs) {
    std::string out = "{";
    for (const Assignment& f : fs.members) {
        out += "(";
        for (auto x : f) out += x == kUnassigned ? "-" : std::to_string(x);
        out += ")";
    }
    return out + "}";
}

/// Builds the solver expression of one k-expression and compares it with
/// the enumerated solution set, then five measures evaluated both ways.
inline std::optional<std::string> check_graph_instance(const NamedKExpr& item, bool connected, SeededRng& rng) {
    const auto u = indicator_universe(*item.expr);
    ExprStore store(u);
    const ExprHandle root = connected ? solve_semiring_cds(store, *item.expr, item.k)
                                      : solve_semiring_ds(store, *item.expr, item.k);
    const LabeledGraph g = eval_kexpr(*item.expr);
    const FunctionSet expected = connected ? enumerate_cds(g) : enumerate_ds(g);
    const Semantics sem = materialize(store, root, 1U << 22, 1U << 20);
    if (sem.is_fail()) return item.name + ": solver expression is illegal";
    if (!(sem.set->members == expected.members))
        return item.name + ": solution set " + describe_set(*sem.set) + " differs from " + describe_set(expected);
    for (const auto& [name, m] : five_measures(rng, u)) {
        const Value got = evaluate(store, root, m);
        const Value want = measure_directly(expected, m);
        if (!(got == want)) return item.name + ": " + name + " measure " + got.to_string() + " vs oracle " + want.to_string();
    }
    return std::nullopt;
}

inline std::optional<std::string> check_graph_corpus(const std::vector<NamedKExpr>& corpus, bool connected,
                                                     std::uint64_t seed) {
    SeededRng rng(seed);
    for (const auto& item : corpus)
        if (auto failure = check_graph_instance(item, connected, rng)) return failure;
    return std::nullopt;
}

struct PreparedCsp {
    LabeledGraph gaifman_graph;
    NiceTreeDecomposition ntd;
};

inline PreparedCsp prepare(const NamedCsp& item) {
    const auto scopes = scopes_of(item.instance);
    LabeledGraph g = gaifman(item.instance);
    NiceTreeDecomposition ntd = make_nice(g, item.td, &scopes);
    return {std::move(g), std::move(ntd)};
}

inline std::optional<std::string> check_csp_instance(const NamedCsp& item, SeededRng& rng) {
    const PreparedCsp p = prepare(item);
    if (const TdCheck c = validate_nice(p.gaifman_graph, p.ntd, nullptr); !c)
        return item.name + ": nice decomposition invalid: " + c.witness;
    const auto u = item.instance.universe();
    ExprStore store(u);
    const ExprHandle root = solve_semiring_csp(store, item.instance, p.ntd);
    const FunctionSet expected = enumerate_csp(item.instance);
    const Semantics sem = materialize(store, root, 1U << 22, 1U << 20);
    if (sem.is_fail()) return item.name + ": solver expression is illegal";
    if (!(sem.set->members == expected.members))
        return item.name + ": solution set " + describe_set(*sem.set) + " differs from " + describe_set(expected);
    for (const auto& [name, m] : five_measures(rng, u)) {
        const Value got = evaluate(store, root, m);
        const Value want = measure_directly(expected, m);
        if (!(got == want)) return item.name + ": " + name + " measure " + got.to_string() + " vs oracle " + want.to_string();
    }
    return std::nullopt;
}

inline std::optional<std::string> check_csp_corpus(const std::vector<NamedCsp>& corpus, std::uint64_t seed) {
    SeededRng rng(seed);
    for (const auto& item : corpus)
        if (auto failure = check_csp_instance(item, rng)) return failure;
    return std::nullopt;
}

/// Random valuations in bool, nat and trop against brute force, and the
/// Boolean indicator instance against the decision measure.
inline std::optional<std::string> check_sum_product_corpus(const std::vector<NamedCsp>& corpus, std::uint64_t seed) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const NamedCsp& item = corpus[i];
        const PreparedCsp p = prepare(item);
        for (const Semiring& s : {Semiring::boolean(), Semiring::natural(), Semiring::tropical()}) {
            const SumProductInstance sp = random_sum_product(item.instance, s, seed + i);
            const Value got = solve_sum_product(sp, p.ntd);
            const Value want = brute_sum_product(sp);
            if (!(got == want))
                return item.name + ": sum-product over " + s.to_string() + " gave " + got.to_string() + ", brute force " +
                       want.to_string();
        }
        ExprStore store(item.instance.universe());
        const ExprHandle root = solve_semiring_csp(store, item.instance, p.ntd);
        const Value decided = evaluate(store, root, decision_measure(store.universe_ptr()));
        const Value boolean = solve_sum_product(indicator_instance(item.instance, Semiring::boolean()), p.ntd);
        if (!(decided == boolean))
            return item.name + ": Boolean sum-product " + boolean.to_string() + " vs decision " + decided.to_string();
    }
    return std::nullopt;
}

/// Table sizes against |D|^(width+1) per node and oplus pairs against
/// (3^(2^k) * 2^k)^2.
inline std::optional<std::string> check_work_bounds(const std::vector<NamedKExpr>& graphs,
                                                    const std::vector<NamedCsp>& csps) {
    for (const auto& item : graphs) {
        for (bool connected : {true, false}) {
            ExprStore store(indicator_universe(*item.expr));
            CdsStats stats;
            if (connected)
                solve_semiring_cds(store, *item.expr, item.k, &stats);
            else
                solve_semiring_ds(store, *item.expr, item.k, &stats);
            if (stats.max_oplus_pairs > cds_oplus_pair_bound(item.k))
                return item.name + ": " + std::to_string(stats.max_oplus_pairs) + " oplus pairs exceed the bound " +
                       std::to_string(cds_oplus_pair_bound(item.k));
        }
    }
    for (const auto& item : csps) {
        const PreparedCsp p = prepare(item);
        const std::uint64_t bound = csp_node_bound(item.instance.domain.size(), primal_width(item.td).width);
        ExprStore store(item.instance.universe());
        CspStats stats;
        solve_semiring_csp(store, item.instance, p.ntd, &stats);
        if (stats.max_node_assignments > bound)
            return item.name + ": " + std::to_string(stats.max_node_assignments) + " assignments exceed " +
                   std::to_string(bound);
        CspStats sp_stats;
        solve_sum_product(random_sum_product(item.instance, Semiring::natural(), 1), p.ntd, &sp_stats);
        if (sp_stats.max_node_assignments > bound)
            return item.name + ": sum-product table of " + std::to_string(sp_stats.max_node_assignments) +
                   " entries exceeds " + std::to_string(bound);
    }
    return std::nullopt;
}

inline void collect_subexpressions(const KExpr& e, std::vector<const KExpr*>& out) {
    out.push_back(&e);
    if (e.left) collect_subexpressions(*e.left, out);
    if (e.right) collect_subexpressions(*e.right, out);
}

/// Every node of every expression, every subset of the node's vertices:
/// the transfer functions give the trace computed from the definition.
inline std::optional<std::string> check_trace_soundness(const std::vector<NamedKExpr>& corpus,
                                                        std::uint64_t* checked = nullptr) {
    for (const auto& item : corpus) {
        std::vector<const KExpr*> nodes;
        collect_subexpressions(*item.expr, nodes);
        for (const KExpr* node : nodes) {
            const LabeledGraph g = eval_kexpr(*node);
            const std::uint64_t subsets = std::uint64_t{1} << g.size();
            for (std::uint64_t mask = 0; mask < subsets; ++mask) {
                std::vector<bool> in(g.size());
                for (std::size_t v = 0; v < g.size(); ++v) in[v] = mask >> v & 1U;
                const Trace inc = incremental_trace(*node, item.k, [&](const std::string& name) { return in[g.index(name)]; });
                const Trace ref = trace_from_scratch(g, in, item.k);
                if (!(inc == ref))
                    return item.name + ": trace mismatch at " + write_kexpr(*node) + " subset mask " + std::to_string(mask) +
                           ": " + inc.signature.to_string() + "/" + std::to_string(inc.domination) + " vs " +
                           ref.signature.to_string() + "/" + std::to_string(ref.domination);
                if (checked) ++*checked;
            }
        }
    }
    return std::nullopt;
}

}  // namespace testing_support
