#pragma once

// Finite-domain CSPs over tree decompositions.
//
// Variables and domain values are referred to by index. Tables over a bag
// are dense, indexed in mixed radix |D| with the bag's smallest variable as
// the least significant digit.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "algebra.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "graph.hpp"

namespace semidp {

using Tuple = std::vector<std::uint32_t>;
using TupleSet = std::unordered_set<Tuple, boost::hash<Tuple>>;

struct Constraint {
    std::vector<std::uint32_t> scope;  // variable indices, arity >= 1
    TupleSet tuples;                   // allowed tuples of domain indices
};

namespace detail {

inline void check_names(const std::vector<std::string>& names, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) throw LegalityError(std::string("duplicate ") + what + " '" + n + "'");
}

inline void check_scope(const std::vector<std::uint32_t>& scope, std::size_t n_vars, std::size_t max_arity) {
    if (scope.empty()) throw LegalityError("constraint arity must be at least 1");
    if (scope.size() > max_arity)
        throw LegalityError("constraint arity " + std::to_string(scope.size()) + " exceeds the limit " +
                            std::to_string(max_arity));
    for (auto v : scope)
        if (v >= n_vars) throw LegalityError("constraint scope refers to an unknown variable");
}

}  // namespace detail

struct CspInstance {
    std::vector<std::string> variables;
    std::vector<std::string> domain;
    std::vector<Constraint> constraints;

    void validate(std::size_t max_arity = 4) const {
        detail::check_names(variables, "variable");
        detail::check_names(domain, "domain value");
        if (domain.empty()) throw LegalityError("the domain must be non-empty");
        for (const Constraint& c : constraints) {
            detail::check_scope(c.scope, variables.size(), max_arity);
            for (const Tuple& t : c.tuples) {
                if (t.size() != c.scope.size()) throw LegalityError("relation tuple arity differs from scope size");
                for (auto d : t)
                    if (d >= domain.size()) throw LegalityError("relation tuple uses an unknown domain value");
            }
        }
    }

    /// S = variables, T = domain values.
    std::shared_ptr<const Universe> universe() const { return std::make_shared<const Universe>(variables, domain); }
};

/// Dense valuation table over D^arity, first scope variable least significant.
struct ValuedConstraint {
    std::vector<std::uint32_t> scope;
    std::vector<Value> table;
};

struct SumProductInstance {
    std::vector<std::string> variables;
    std::vector<std::string> domain;
    Semiring semiring = Semiring::natural();
    std::vector<ValuedConstraint> constraints;

    void validate(std::size_t max_arity = 4) const {
        detail::check_names(variables, "variable");
        detail::check_names(domain, "domain value");
        if (domain.empty()) throw LegalityError("the domain must be non-empty");
        for (const ValuedConstraint& c : constraints) {
            detail::check_scope(c.scope, variables.size(), max_arity);
            std::size_t expected = 1;
            for (std::size_t i = 0; i < c.scope.size(); ++i) expected *= domain.size();
            if (c.table.size() != expected) throw LegalityError("valuation table is not total");
            for (const Value& v : c.table)
                if (!(v.semiring() == semiring))
                    throw LegalityError("valuation " + v.to_string() + " is not in " + semiring.to_string());
        }
    }
};

/// Index of a tuple in a dense table (first entry least significant).
inline std::size_t tuple_index(const Tuple& t, std::size_t d) {
    std::size_t idx = 0;
    for (std::size_t i = t.size(); i-- > 0;) idx = idx * d + t[i];
    return idx;
}

inline Tuple tuple_at(std::size_t index, std::size_t arity, std::size_t d) {
    Tuple t(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        t[i] = static_cast<std::uint32_t>(index % d);
        index /= d;
    }
    return t;
}

/// Relations as 0/1 valuations in the given semiring.
inline SumProductInstance indicator_instance(const CspInstance& csp, const Semiring& semiring) {
    SumProductInstance sp{csp.variables, csp.domain, semiring, {}};
    const std::size_t d = csp.domain.size();
    for (const Constraint& c : csp.constraints) {
        ValuedConstraint vc{c.scope, {}};
        std::size_t size = 1;
        for (std::size_t i = 0; i < c.scope.size(); ++i) size *= d;
        for (std::size_t i = 0; i < size; ++i)
            vc.table.push_back(c.tuples.count(tuple_at(i, c.scope.size(), d)) ? one(semiring) : zero(semiring));
        sp.constraints.push_back(std::move(vc));
    }
    return sp;
}

/// Vertices are the variables; x ~ y iff some scope holds both.
inline LabeledGraph gaifman(const std::vector<std::string>& variables,
                            const std::vector<std::vector<std::uint32_t>>& scopes) {
    LabeledGraph g;
    for (const auto& v : variables) g.add_vertex(v);
    for (const auto& scope : scopes)
        for (auto x : scope)
            for (auto y : scope) g.add_edge(x, y);
    return g;
}

inline std::vector<std::vector<std::uint32_t>> scopes_of(const CspInstance& csp) {
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto& c : csp.constraints) out.push_back(c.scope);
    return out;
}

inline std::vector<std::vector<std::uint32_t>> scopes_of(const SumProductInstance& sp) {
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto& c : sp.constraints) out.push_back(c.scope);
    return out;
}

inline LabeledGraph gaifman(const CspInstance& csp) { return gaifman(csp.variables, scopes_of(csp)); }
inline LabeledGraph gaifman(const SumProductInstance& sp) { return gaifman(sp.variables, scopes_of(sp)); }

// ---------------------------------------------------------------------------
// Tree decompositions

/// Unrooted tree of bags; bag 0 serves as the root.
struct TreeDecomposition {
    std::vector<std::vector<std::uint32_t>> bags;  // sorted vertex indices
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

struct Width {
    std::size_t width = 0;
    bool degenerate = false;  // every bag is empty
};

inline Width primal_width(const std::vector<std::vector<std::uint32_t>>& bags) {
    std::size_t largest = 0;
    for (const auto& b : bags) largest = std::max(largest, b.size());
    if (largest == 0) return {0, true};
    return {largest - 1, false};
}

inline Width primal_width(const TreeDecomposition& td) { return primal_width(td.bags); }

struct TdCheck {
    bool ok = true;
    int property = 0;  // 0 = not a tree, 1 = vertex coverage, 2 = edge coverage, 3 = connectivity
    std::string witness;
    explicit operator bool() const noexcept { return ok; }
};

namespace detail {

inline TdCheck td_violation(int property, std::string witness) { return {false, property, std::move(witness)}; }

/// Parent links from a BFS rooted at bag 0, or nullopt when not a tree.
inline std::optional<std::vector<std::int64_t>> root_tree(std::size_t n,
                                                          const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    if (n == 0) return edges.empty() ? std::optional<std::vector<std::int64_t>>(std::vector<std::int64_t>{}) : std::nullopt;
    if (edges.size() != n - 1) return std::nullopt;
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (auto [a, b] : edges) {
        if (a >= n || b >= n || a == b) return std::nullopt;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<std::int64_t> parent(n, -2);
    parent[0] = -1;
    std::vector<std::uint32_t> queue{0};
    for (std::size_t q = 0; q < queue.size(); ++q)
        for (auto c : adj[queue[q]])
            if (parent[c] == -2) {
                parent[c] = queue[q];
                queue.push_back(c);
            }
    if (queue.size() != n) return std::nullopt;
    return parent;
}

}  // namespace detail

/// Checks the tree shape and the three decomposition properties, reporting
/// the first violation.
inline TdCheck validate_td(const LabeledGraph& g, const TreeDecomposition& td) {
    const std::size_t n = td.bags.size();
    const auto parent = detail::root_tree(n, td.edges);
    if (!parent) return detail::td_violation(0, "bags and edges do not form a tree");
    for (std::size_t b = 0; b < n; ++b)
        for (auto v : td.bags[b])
            if (v >= g.size()) return detail::td_violation(1, "bag " + std::to_string(b + 1) + " holds an unknown vertex");

    std::vector<std::vector<std::uint32_t>> holders(g.size());
    for (std::uint32_t b = 0; b < n; ++b)
        for (auto v : td.bags[b]) holders[v].push_back(b);
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (holders[v].empty()) return detail::td_violation(1, "vertex " + g.name(v) + " is in no bag");

    for (auto [u, v] : g.edges()) {
        bool covered = false;
        for (auto b : holders[u])
            if (std::binary_search(td.bags[b].begin(), td.bags[b].end(), v)) covered = true;
        if (!covered) return detail::td_violation(2, "edge {" + g.name(u) + "," + g.name(v) + "} is in no bag");
    }

    // Bags holding v are connected iff exactly one of them has a parent
    // outside the set.
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        std::size_t tops = 0;
        for (auto b : holders[v]) {
            const auto p = (*parent)[b];
            if (p < 0 || !std::binary_search(td.bags[p].begin(), td.bags[p].end(), v)) ++tops;
        }
        if (tops != 1) return detail::td_violation(3, "bags holding " + g.name(v) + " are not connected");
    }
    return {};
}

enum class NiceKind : std::uint8_t { leaf, introduce, forget, join };

struct NiceNode {
    NiceKind kind = NiceKind::leaf;
    std::uint32_t var = 0;                // introduce/forget only
    std::vector<std::uint32_t> children;  // node ids, all smaller than this node's
    std::vector<std::uint32_t> bag;       // sorted
};

/// Node ids are a post-order: children precede their parents and the root
/// is the last node.
struct NiceTreeDecomposition {
    std::vector<NiceNode> nodes;
    std::uint32_t root = 0;
    std::vector<std::uint32_t> var_lambda;         // variable -> introduce node
    std::vector<std::uint32_t> constraint_lambda;  // constraint -> introduce node covering its scope

    std::vector<std::vector<std::uint32_t>> bags() const {
        std::vector<std::vector<std::uint32_t>> out;
        for (const auto& n : nodes) out.push_back(n.bag);
        return out;
    }
};

inline Width primal_width(const NiceTreeDecomposition& ntd) { return primal_width(ntd.bags()); }

inline TreeDecomposition as_tree_decomposition(const NiceTreeDecomposition& ntd) {
    // Rooted at bag 0 by convention, so the root goes first.
    TreeDecomposition td;
    const std::size_t n = ntd.nodes.size();
    auto pos = [&](std::uint32_t id) { return id == ntd.root ? 0U : (id < ntd.root ? id + 1 : id); };
    td.bags.resize(n);
    for (std::uint32_t id = 0; id < n; ++id) {
        td.bags[pos(id)] = ntd.nodes[id].bag;
        for (auto c : ntd.nodes[id].children) td.edges.emplace_back(pos(id), pos(c));
    }
    return td;
}

/// Introduce nodes whose bag covers each scope, first in id order.
inline std::vector<std::uint32_t> assign_constraint_lambda(const NiceTreeDecomposition& ntd,
                                                           const std::vector<std::vector<std::uint32_t>>& scopes) {
    std::vector<std::uint32_t> out;
    for (const auto& scope : scopes) {
        std::optional<std::uint32_t> found;
        for (std::uint32_t id = 0; id < ntd.nodes.size() && !found; ++id) {
            const NiceNode& n = ntd.nodes[id];
            if (n.kind != NiceKind::introduce) continue;
            if (std::all_of(scope.begin(), scope.end(),
                            [&](auto v) { return std::binary_search(n.bag.begin(), n.bag.end(), v); }))
                found = id;
        }
        if (!found) throw LegalityError("no introduce node covers a constraint scope");
        out.push_back(*found);
    }
    return out;
}

/// Nice form of a valid decomposition: along each tree edge, forget the
/// child-only vertices and introduce the parent-only ones (in vertex order),
/// split many children with binary joins, and forget the root bag above the
/// root in reverse vertex order. When scopes are given, constraint_lambda is filled as well.
inline NiceTreeDecomposition make_nice(const LabeledGraph& g, const TreeDecomposition& td,
                                       const std::vector<std::vector<std::uint32_t>>* scopes = nullptr) {
    if (const TdCheck check = validate_td(g, td); !check)
        throw UsageError("invalid tree decomposition (property " + std::to_string(check.property) + "): " + check.witness);

    NiceTreeDecomposition ntd;
    auto add = [&](NiceNode n) {
        ntd.nodes.push_back(std::move(n));
        return static_cast<std::uint32_t>(ntd.nodes.size() - 1);
    };
    auto introduce = [&](std::uint32_t child, std::uint32_t v) {
        NiceNode n{NiceKind::introduce, v, {child}, ntd.nodes[child].bag};
        n.bag.insert(std::lower_bound(n.bag.begin(), n.bag.end(), v), v);
        return add(std::move(n));
    };
    auto forget = [&](std::uint32_t child, std::uint32_t v) {
        NiceNode n{NiceKind::forget, v, {child}, ntd.nodes[child].bag};
        n.bag.erase(std::lower_bound(n.bag.begin(), n.bag.end(), v));
        return add(std::move(n));
    };

    if (td.bags.empty()) {
        ntd.root = add(NiceNode{});
    } else {
        const auto parent = *detail::root_tree(td.bags.size(), td.edges);
        std::vector<std::vector<std::uint32_t>> kids(td.bags.size());
        for (std::uint32_t b = 1; b < td.bags.size(); ++b) kids[parent[b]].push_back(b);

        // Iterative post-order over td bags; result[b] is a node with bag(b).
        std::vector<std::uint32_t> result(td.bags.size());
        std::vector<std::pair<std::uint32_t, bool>> stack{{0, false}};
        while (!stack.empty()) {
            auto [b, expanded] = stack.back();
            stack.pop_back();
            if (!expanded) {
                stack.emplace_back(b, true);
                for (auto it = kids[b].rbegin(); it != kids[b].rend(); ++it) stack.emplace_back(*it, false);
                continue;
            }
            const auto& bag = td.bags[b];
            std::vector<std::uint32_t> branches;
            for (auto c : kids[b]) {
                std::uint32_t cur = result[c];
                const auto child_bag = td.bags[c];
                for (auto v : child_bag)
                    if (!std::binary_search(bag.begin(), bag.end(), v)) cur = forget(cur, v);
                for (auto v : bag)
                    if (!std::binary_search(child_bag.begin(), child_bag.end(), v)) cur = introduce(cur, v);
                branches.push_back(cur);
            }
            if (branches.empty()) {
                std::uint32_t cur = add(NiceNode{});
                for (auto v : bag) cur = introduce(cur, v);
                branches.push_back(cur);
            }
            std::uint32_t acc = branches.front();
            for (std::size_t i = 1; i < branches.size(); ++i)
                acc = add(NiceNode{NiceKind::join, 0, {acc, branches[i]}, bag});
            result[b] = acc;
        }
        std::uint32_t cur = result[0];
        for (auto it = td.bags[0].rbegin(); it != td.bags[0].rend(); ++it) cur = forget(cur, *it);
        ntd.root = cur;
    }

    ntd.var_lambda.assign(g.size(), 0);
    std::vector<bool> assigned(g.size(), false);
    for (std::uint32_t id = 0; id < ntd.nodes.size(); ++id) {
        const NiceNode& n = ntd.nodes[id];
        if (n.kind == NiceKind::introduce && !assigned[n.var]) {
            assigned[n.var] = true;
            ntd.var_lambda[n.var] = id;
        }
    }
    if (scopes) ntd.constraint_lambda = assign_constraint_lambda(ntd, *scopes);
    return ntd;
}

/// Checks the nice-form invariants and that the bags form a decomposition
/// of g.
inline TdCheck validate_nice(const LabeledGraph& g, const NiceTreeDecomposition& ntd,
                             const std::vector<std::vector<std::uint32_t>>* scopes = nullptr) {
    auto fail = [](std::string w) { return detail::td_violation(4, std::move(w)); };
    if (ntd.nodes.empty() || ntd.root != ntd.nodes.size() - 1) return fail("root must be the last node");
    if (!ntd.nodes[ntd.root].bag.empty()) return fail("root bag is not empty");
    std::vector<int> parents(ntd.nodes.size(), 0);
    for (std::uint32_t id = 0; id < ntd.nodes.size(); ++id) {
        const NiceNode& n = ntd.nodes[id];
        const std::string at = "node " + std::to_string(id) + ": ";
        if (!std::is_sorted(n.bag.begin(), n.bag.end()) ||
            std::adjacent_find(n.bag.begin(), n.bag.end()) != n.bag.end())
            return fail(at + "bag is not a sorted set");
        for (auto c : n.children) {
            if (c >= id) return fail(at + "child id not smaller than parent id");
            ++parents[c];
        }
        auto with = [](std::vector<std::uint32_t> b, std::uint32_t v) {
            b.insert(std::lower_bound(b.begin(), b.end(), v), v);
            return b;
        };
        switch (n.kind) {
            case NiceKind::leaf:
                if (!n.children.empty() || !n.bag.empty()) return fail(at + "leaf must be childless with an empty bag");
                break;
            case NiceKind::introduce: {
                if (n.children.size() != 1) return fail(at + "introduce needs one child");
                const auto& cb = ntd.nodes[n.children[0]].bag;
                if (std::binary_search(cb.begin(), cb.end(), n.var) || with(cb, n.var) != n.bag)
                    return fail(at + "introduce bag must be child bag plus the new vertex");
                break;
            }
            case NiceKind::forget: {
                if (n.children.size() != 1) return fail(at + "forget needs one child");
                const auto& cb = ntd.nodes[n.children[0]].bag;
                if (std::binary_search(n.bag.begin(), n.bag.end(), n.var) || with(n.bag, n.var) != cb)
                    return fail(at + "forget bag must be child bag minus the vertex");
                break;
            }
            case NiceKind::join:
                if (n.children.size() != 2) return fail(at + "join needs two children");
                if (ntd.nodes[n.children[0]].bag != n.bag || ntd.nodes[n.children[1]].bag != n.bag)
                    return fail(at + "join children must share its bag");
                break;
        }
    }
    for (std::uint32_t id = 0; id < ntd.nodes.size(); ++id)
        if (parents[id] != (id == ntd.root ? 0 : 1)) return fail("node " + std::to_string(id) + " is not in the tree");

    if (ntd.var_lambda.size() != g.size()) return fail("var_lambda is not total");
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        const auto id = ntd.var_lambda[v];
        if (id >= ntd.nodes.size() || ntd.nodes[id].kind != NiceKind::introduce || ntd.nodes[id].var != v)
            return fail("var_lambda(" + g.name(v) + ") is not an introduce node of it");
    }
    if (scopes) {
        if (ntd.constraint_lambda.size() != scopes->size()) return fail("constraint_lambda is not total");
        for (std::size_t c = 0; c < scopes->size(); ++c) {
            const auto id = ntd.constraint_lambda[c];
            if (id >= ntd.nodes.size() || ntd.nodes[id].kind != NiceKind::introduce)
                return fail("constraint_lambda is not an introduce node");
            const auto& bag = ntd.nodes[id].bag;
            for (auto v : (*scopes)[c])
                if (!std::binary_search(bag.begin(), bag.end(), v))
                    return fail("constraint_lambda bag misses part of the scope");
        }
    }
    return validate_td(g, as_tree_decomposition(ntd));
}

// ---------------------------------------------------------------------------
// Dynamic programming over a nice decomposition

struct CspStats {
    std::uint64_t max_node_assignments = 0;
    std::uint64_t total_assignments = 0;
    std::size_t nodes = 0;
};

/// |D|^(width + 1), saturating.
inline std::uint64_t csp_node_bound(std::size_t domain_size, std::size_t width) {
    std::uint64_t b = 1;
    for (std::size_t i = 0; i <= width; ++i)
        if (__builtin_mul_overflow(b, std::uint64_t{domain_size}, &b)) return UINT64_MAX;
    return b;
}

namespace detail {

/// Digit position of each variable of `child` inside `bag` (both sorted).
inline std::vector<std::size_t> positions_in(const std::vector<std::uint32_t>& child, const std::vector<std::uint32_t>& bag) {
    std::vector<std::size_t> pos;
    for (auto v : child) pos.push_back(static_cast<std::size_t>(std::lower_bound(bag.begin(), bag.end(), v) - bag.begin()));
    return pos;
}

inline std::size_t table_size(std::size_t d, std::size_t bag_size) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < bag_size; ++i) {
        if (n > SIZE_MAX / d) throw ResourceError("bag table does not fit in memory");
        n *= d;
    }
    return n;
}

/// Generic bottom-up pass; Ops supplies leaf/introduce/forget/join rules over
/// the table entry type.
template <class Entry, class Ops>
std::vector<std::vector<Entry>> run_nice(const NiceTreeDecomposition& ntd, std::size_t d, Ops& ops, CspStats* stats,
                                         bool keep_all) {
    std::vector<std::vector<Entry>> tables(ntd.nodes.size());
    std::vector<std::size_t> remaining_parents(ntd.nodes.size(), 0);
    for (const auto& n : ntd.nodes)
        for (auto c : n.children) ++remaining_parents[c];

    for (std::uint32_t id = 0; id < ntd.nodes.size(); ++id) {
        const NiceNode& n = ntd.nodes[id];
        const std::size_t size = table_size(d, n.bag.size());
        std::vector<Entry>& out = tables[id];
        out.reserve(size);
        Tuple f(n.bag.size(), 0);
        std::vector<std::size_t> child_pos;
        if (!n.children.empty()) child_pos = positions_in(ntd.nodes[n.children[0]].bag, n.bag);
        // Position of the forgotten vertex in the child bag.
        std::size_t forget_pos = 0;
        if (n.kind == NiceKind::forget) {
            const auto& cb = ntd.nodes[n.children[0]].bag;
            forget_pos = static_cast<std::size_t>(std::lower_bound(cb.begin(), cb.end(), n.var) - cb.begin());
        }

        for (std::size_t idx = 0; idx < size; ++idx) {
            switch (n.kind) {
                case NiceKind::leaf: out.push_back(ops.leaf()); break;
                case NiceKind::introduce: {
                    std::size_t cidx = 0;
                    for (std::size_t p = child_pos.size(); p-- > 0;) cidx = cidx * d + f[child_pos[p]];
                    out.push_back(ops.introduce(id, n, f, tables[n.children[0]][cidx]));
                    break;
                }
                case NiceKind::forget: {
                    // Child bag = this bag plus var at forget_pos.
                    std::size_t low = 0, scale = 1;
                    for (std::size_t p = 0; p < forget_pos; ++p) {
                        low += f[p] * scale;
                        scale *= d;
                    }
                    std::size_t high_part = 0;
                    for (std::size_t p = f.size(); p-- > forget_pos;) high_part = high_part * d + f[p];
                    std::vector<const Entry*> ext;
                    for (std::size_t value = 0; value < d; ++value)
                        ext.push_back(&tables[n.children[0]][low + scale * (value + d * high_part)]);
                    out.push_back(ops.forget(ext));
                    break;
                }
                case NiceKind::join:
                    out.push_back(ops.join(tables[n.children[0]][idx], tables[n.children[1]][idx]));
                    break;
            }
            for (std::size_t p = 0; p < f.size(); ++p) {
                if (++f[p] < d) break;
                f[p] = 0;
            }
        }
        if (stats) {
            stats->max_node_assignments = std::max<std::uint64_t>(stats->max_node_assignments, size);
            stats->total_assignments += size;
            ++stats->nodes;
        }
        if (!keep_all)
            for (auto c : n.children)
                if (--remaining_parents[c] == 0) std::vector<Entry>().swap(tables[c]);
    }
    return tables;
}

}  // namespace detail

/// Tables E_N(f) for every node of the nice decomposition (indexed by node
/// id, then by assignment index over the node's bag).
inline std::vector<std::vector<ExprHandle>> csp_tables(ExprStore& store, const CspInstance& csp,
                                                       const NiceTreeDecomposition& ntd, CspStats* stats = nullptr,
                                                       bool keep_all = true) {
    csp.validate(SIZE_MAX);
    if (!(store.universe() == *csp.universe())) throw UsageError("store universe does not match the instance");
    const std::size_t d = csp.domain.size();

    // Constraints checked at each introduce node: scope inside the bag and
    // containing the new vertex.
    std::vector<std::vector<std::uint32_t>> checked(ntd.nodes.size());
    for (std::uint32_t id = 0; id < ntd.nodes.size(); ++id) {
        const NiceNode& n = ntd.nodes[id];
        if (n.kind != NiceKind::introduce) continue;
        for (std::uint32_t c = 0; c < csp.constraints.size(); ++c) {
            const auto& scope = csp.constraints[c].scope;
            if (std::find(scope.begin(), scope.end(), n.var) == scope.end()) continue;
            if (std::all_of(scope.begin(), scope.end(),
                            [&](auto v) { return std::binary_search(n.bag.begin(), n.bag.end(), v); }))
                checked[id].push_back(c);
        }
    }

    struct Ops {
        ExprStore& store;
        const CspInstance& csp;
        const NiceTreeDecomposition& ntd;
        const std::vector<std::vector<std::uint32_t>>& checked;

        ExprHandle leaf() { return store.make_unit(); }
        ExprHandle introduce(std::uint32_t id, const NiceNode& n, const Tuple& f, ExprHandle child) {
            if (store.node(child).is_empty) return child;
            auto value_of = [&](std::uint32_t v) {
                return f[static_cast<std::size_t>(std::lower_bound(n.bag.begin(), n.bag.end(), v) - n.bag.begin())];
            };
            for (auto c : checked[id]) {
                const Constraint& con = csp.constraints[c];
                Tuple t;
                for (auto v : con.scope) t.push_back(value_of(v));
                if (!con.tuples.count(t)) return store.make_empty();
            }
            if (ntd.var_lambda[n.var] != id) return child;
            return store.make_join(child, store.make_leaf(n.var, value_of(n.var)));
        }
        ExprHandle forget(const std::vector<const ExprHandle*>& ext) {
            ExprHandle acc = store.make_empty();
            for (const ExprHandle* h : ext) {
                if (store.node(*h).is_empty) continue;
                acc = store.node(acc).is_empty ? *h : store.make_uplus(acc, *h);
            }
            return acc;
        }
        ExprHandle join(ExprHandle a, ExprHandle b) {
            if (store.node(a).is_empty) return a;
            if (store.node(b).is_empty) return b;
            return store.make_join(a, b);
        }
    } ops{store, csp, ntd, checked};
    return detail::run_nice<ExprHandle>(ntd, d, ops, stats, keep_all);
}

/// Expression of the full solution set: E_root of the empty assignment.
inline ExprHandle solve_semiring_csp(ExprStore& store, const CspInstance& csp, const NiceTreeDecomposition& ntd,
                                     CspStats* stats = nullptr) {
    return csp_tables(store, csp, ntd, stats, false)[ntd.root].at(0);
}

/// Sum over all assignments of the product of the valuations.
inline Value solve_sum_product(const SumProductInstance& sp, const NiceTreeDecomposition& ntd, CspStats* stats = nullptr) {
    sp.validate(SIZE_MAX);
    if (ntd.constraint_lambda.size() != sp.constraints.size())
        throw UsageError("sum-product needs constraint_lambda for every constraint");
    const std::size_t d = sp.domain.size();
    std::vector<std::vector<std::uint32_t>> owned(ntd.nodes.size());
    for (std::uint32_t c = 0; c < sp.constraints.size(); ++c) owned.at(ntd.constraint_lambda[c]).push_back(c);

    struct Ops {
        const SumProductInstance& sp;
        const std::vector<std::vector<std::uint32_t>>& owned;
        std::size_t d;

        Value leaf() { return one(sp.semiring); }
        Value introduce(std::uint32_t id, const NiceNode& n, const Tuple& f, const Value& child) {
            Value acc = child;
            for (auto c : owned[id]) {
                const ValuedConstraint& con = sp.constraints[c];
                Tuple t;
                for (auto v : con.scope)
                    t.push_back(f[static_cast<std::size_t>(std::lower_bound(n.bag.begin(), n.bag.end(), v) - n.bag.begin())]);
                acc = mul(acc, con.table[tuple_index(t, d)]);
            }
            return acc;
        }
        Value forget(const std::vector<const Value*>& ext) {
            Value acc = zero(sp.semiring);
            for (const Value* v : ext) acc = add(acc, *v);
            return acc;
        }
        Value join(const Value& a, const Value& b) { return mul(a, b); }
    } ops{sp, owned, d};
    return detail::run_nice<Value>(ntd, d, ops, stats, false)[ntd.root].at(0);
}

}  // namespace semidp
