#pragma once

// Brute-force ground truth. Everything here enumerates candidates directly
// and shares no code with the dynamic programs.

#include <cstdint>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "cds.hpp"
#include "csp.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "graph.hpp"
#include "measures.hpp"

namespace semidp {

struct EnumerationBudget {
    std::uint64_t max_candidates = std::uint64_t{1} << 20;
    std::uint64_t max_solutions = std::uint64_t{1} << 20;
};

namespace detail {

inline std::uint64_t candidate_count(std::uint64_t base, std::size_t exponent, const EnumerationBudget& budget) {
    if (budget.max_candidates == 0 || budget.max_solutions == 0) throw UsageError("enumeration budget must be positive");
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (n > budget.max_candidates / std::max<std::uint64_t>(base, 1))
            throw ResourceError("enumeration of " + std::to_string(base) + "^" + std::to_string(exponent) +
                                " candidates exceeds the budget of " + std::to_string(budget.max_candidates));
        n *= base;
    }
    if (n > budget.max_candidates) throw ResourceError("enumeration exceeds the candidate budget");
    return n;
}

inline void add_solution(FunctionSet& fs, Assignment a, const EnumerationBudget& budget) {
    if (fs.members.size() >= budget.max_solutions) throw ResourceError("enumeration exceeds the solution budget");
    fs.members.insert(std::move(a));
}

inline FunctionSet full_domain_set(std::size_t n) {
    FunctionSet fs;
    fs.domain = DomainSet(n);
    for (std::uint32_t s = 0; s < n; ++s) fs.domain.insert(s);
    return fs;
}

inline bool dominates(const LabeledGraph& g, const std::vector<bool>& in) {
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        if (in[v]) continue;
        bool hit = false;
        for (auto u : g.neighbors(v)) hit = hit || in[u];
        if (!hit) return false;
    }
    return true;
}

/// Component ids of G[S] (-1 outside S); returns the number of components.
inline std::size_t components(const LabeledGraph& g, const std::vector<bool>& in, std::vector<int>& comp) {
    comp.assign(g.size(), -1);
    int count = 0;
    for (std::uint32_t s = 0; s < g.size(); ++s) {
        if (!in[s] || comp[s] >= 0) continue;
        std::vector<std::uint32_t> stack{s};
        comp[s] = count;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (auto u : g.neighbors(v))
                if (in[u] && comp[u] < 0) {
                    comp[u] = count;
                    stack.push_back(u);
                }
        }
        ++count;
    }
    return static_cast<std::size_t>(count);
}

template <class Accept>
FunctionSet enumerate_subsets(const LabeledGraph& g, const EnumerationBudget& budget, Accept accept) {
    const std::uint64_t total = candidate_count(2, g.size(), budget);
    FunctionSet fs = full_domain_set(g.size());
    std::vector<bool> in(g.size());
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t v = 0; v < g.size(); ++v) in[v] = (mask >> v) & 1U;
        if (!accept(in)) continue;
        Assignment a(g.size());
        for (std::size_t v = 0; v < g.size(); ++v) a[v] = in[v] ? 1U : 0U;
        add_solution(fs, std::move(a), budget);
    }
    return fs;
}

}  // namespace detail

/// Indicator functions (codomain index 1 = chosen) of all dominating sets.
inline FunctionSet enumerate_ds(const LabeledGraph& g, const EnumerationBudget& budget = {}) {
    return detail::enumerate_subsets(g, budget, [&](const std::vector<bool>& in) { return detail::dominates(g, in); });
}

/// Indicator functions of all non-empty connected dominating sets.
inline FunctionSet enumerate_cds(const LabeledGraph& g, const EnumerationBudget& budget = {}) {
    std::vector<int> comp;
    return detail::enumerate_subsets(g, budget, [&](const std::vector<bool>& in) {
        return detail::dominates(g, in) && detail::components(g, in, comp) == 1;
    });
}

/// Whether f satisfies every constraint.
inline bool satisfies(const CspInstance& csp, const Assignment& f) {
    for (const Constraint& c : csp.constraints) {
        Tuple t;
        for (auto v : c.scope) t.push_back(f[v]);
        if (!c.tuples.count(t)) return false;
    }
    return true;
}

namespace detail {

/// Calls fn on every total assignment V -> D in lexicographic order.
template <class Fn>
void for_each_assignment(std::size_t n_vars, std::size_t d, const EnumerationBudget& budget, Fn fn) {
    const std::uint64_t total = candidate_count(d, n_vars, budget);
    Assignment f(n_vars, 0);
    for (std::uint64_t i = 0; i < total; ++i) {
        fn(f);
        for (std::size_t p = n_vars; p-- > 0;) {
            if (++f[p] < d) break;
            f[p] = 0;
        }
    }
}

}  // namespace detail

inline FunctionSet enumerate_csp(const CspInstance& csp, const EnumerationBudget& budget = {}) {
    FunctionSet fs = detail::full_domain_set(csp.variables.size());
    detail::for_each_assignment(csp.variables.size(), csp.domain.size(), budget, [&](const Assignment& f) {
        if (satisfies(csp, f)) detail::add_solution(fs, f, budget);
    });
    return fs;
}

/// Literal sum over f of the product over dom(f) of M[s, f(s)].
inline Value measure_directly(const FunctionSet& fs, const MeasureMatrix& m) {
    const Semiring& sr = m.semiring();
    Value total = zero(sr);
    const auto dom = fs.domain.elements();
    for (const Assignment& f : fs.members) {
        if (f.size() != m.universe().domain_size()) throw UsageError("function set and measure universes differ");
        Value term = one(sr);
        for (auto s : dom) term = mul(term, m.at(s, f[s]));
        total = add(total, term);
    }
    return total;
}

inline Value measure_directly(const FunctionSet& fs, const MeasureMatrix& m, const Universe& fs_universe) {
    if (!(fs_universe == m.universe())) throw UsageError("function set and measure universes differ");
    return measure_directly(fs, m);
}

struct ArgminResult {
    Value min;
    FunctionSet set;
};

/// Minimum weight over fs (zero of the dioid when fs is empty) and the
/// members attaining it.
inline ArgminResult argmin_scan(const FunctionSet& fs, const MeasureMatrix& w) {
    if (!w.semiring().is_dioid()) throw UsageError("argmin_scan needs dioid weights");
    std::vector<std::pair<Value, const Assignment*>> weighted;
    Value best = zero(w.semiring());
    for (const Assignment& f : fs.members) {
        FunctionSet single{fs.domain, {f}};
        Value wf = measure_directly(single, w);
        if (dioid_compare(wf, best) < 0) best = wf;
        weighted.emplace_back(std::move(wf), &f);
    }
    ArgminResult out{best, FunctionSet{fs.domain, {}}};
    for (const auto& [wf, f] : weighted)
        if (wf == best) out.set.members.insert(*f);
    return out;
}

/// Direct sum over all assignments of the product of valuations.
inline Value brute_sum_product(const SumProductInstance& sp, const EnumerationBudget& budget = {}) {
    Value total = zero(sp.semiring);
    const std::size_t d = sp.domain.size();
    detail::for_each_assignment(sp.variables.size(), d, budget, [&](const Assignment& f) {
        Value term = one(sp.semiring);
        for (const ValuedConstraint& c : sp.constraints) {
            Tuple t;
            for (auto v : c.scope) t.push_back(f[v]);
            term = mul(term, c.table[tuple_index(t, d)]);
        }
        total = add(total, term);
    });
    return total;
}

/// Trace of S computed from its definition on the labeled graph: per label
/// set, the number of components of G[S] with exactly those labels (capped
/// at "many"), and the labels whose vertices all lie in N[S].
inline Trace trace_from_scratch(const LabeledGraph& g, const std::vector<bool>& in, std::uint32_t k) {
    std::vector<int> comp;
    const std::size_t n_comp = detail::components(g, in, comp);
    std::vector<LabelSet> comp_labels(n_comp, 0);
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (comp[v] >= 0) comp_labels[comp[v]] |= LabelSet{1} << (g.label(v) - 1);
    Signature sig(k);
    for (LabelSet c : comp_labels) sig[c] = sig[c] == Tribool::zero ? Tribool::one : Tribool::many;

    LabelSet dom = 0;
    for (std::uint32_t l = 1; l <= k; ++l) {
        bool all = true;
        for (std::uint32_t v = 0; v < g.size(); ++v) {
            if (g.label(v) != l || in[v]) continue;
            bool hit = false;
            for (auto u : g.neighbors(v)) hit = hit || in[u];
            all = all && hit;
        }
        if (all) dom |= LabelSet{1} << (l - 1);
    }
    return {sig, dom};
}

}  // namespace semidp
