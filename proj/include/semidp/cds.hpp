#pragma once

// Clique-width dynamic programming for (connected) dominating sets.
//
// Label sets C of [k] are bitmasks with bit (l - 1) for label l. A trace of a
// vertex subset S in a k-expression is (signature, domination): the signature
// counts, per label set C, the components of G[S] whose labels are exactly C
// (0, 1 or "many"), and the domination set holds the labels all of whose
// vertices lie in N[S].

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "graph.hpp"

namespace semidp {

// ---------------------------------------------------------------------------
// k-expressions

enum class KExprKind : std::uint8_t { vertex, oplus, relabel, edge };

struct KExpr;
using KExprPtr = std::shared_ptr<const KExpr>;

struct KExpr {
    KExprKind kind;
    std::uint32_t i = 0;  // vertex label, or first label of relabel/edge (1-based)
    std::uint32_t j = 0;
    std::string name;     // vertex only
    KExprPtr left;        // child of relabel/edge, left operand of oplus
    KExprPtr right;
};

inline KExprPtr kx_vertex(std::uint32_t label, std::string name) {
    return std::make_shared<const KExpr>(KExpr{KExprKind::vertex, label, 0, std::move(name), nullptr, nullptr});
}
inline KExprPtr kx_oplus(KExprPtr a, KExprPtr b) {
    return std::make_shared<const KExpr>(KExpr{KExprKind::oplus, 0, 0, {}, std::move(a), std::move(b)});
}
inline KExprPtr kx_relabel(std::uint32_t from, std::uint32_t to, KExprPtr child) {
    return std::make_shared<const KExpr>(KExpr{KExprKind::relabel, from, to, {}, std::move(child), nullptr});
}
inline KExprPtr kx_edge(std::uint32_t i, std::uint32_t j, KExprPtr child) {
    return std::make_shared<const KExpr>(KExpr{KExprKind::edge, i, j, {}, std::move(child), nullptr});
}

/// Largest label used anywhere in the expression.
inline std::uint32_t max_label(const KExpr& e) {
    switch (e.kind) {
        case KExprKind::vertex: return e.i;
        case KExprKind::oplus: return std::max(max_label(*e.left), max_label(*e.right));
        default: return std::max({e.i, e.j, max_label(*e.left)});
    }
}

/// Vertex names in left-to-right order.
inline std::vector<std::string> kexpr_vertices(const KExpr& e) {
    std::vector<std::string> out;
    std::vector<const KExpr*> stack{&e};
    while (!stack.empty()) {
        const KExpr* n = stack.back();
        stack.pop_back();
        if (n->kind == KExprKind::vertex) {
            out.push_back(n->name);
        } else if (n->kind == KExprKind::oplus) {
            stack.push_back(n->right.get());
            stack.push_back(n->left.get());
        } else {
            stack.push_back(n->left.get());
        }
    }
    return out;
}

/// Checks labels in [1, k], i != j and distinct vertex names.
inline void validate_kexpr(const KExpr& e, std::uint32_t k) {
    if (k == 0 || k > 31) throw LegalityError("width k must be in [1, 31]");
    std::unordered_set<std::string> names;
    std::vector<const KExpr*> stack{&e};
    auto check_label = [&](std::uint32_t l) {
        if (l < 1 || l > k) throw LegalityError("label " + std::to_string(l) + " outside [1, " + std::to_string(k) + "]");
    };
    while (!stack.empty()) {
        const KExpr* n = stack.back();
        stack.pop_back();
        switch (n->kind) {
            case KExprKind::vertex:
                check_label(n->i);
                if (!names.insert(n->name).second) throw LegalityError("duplicate vertex name '" + n->name + "'");
                break;
            case KExprKind::oplus:
                if (!n->left || !n->right) throw LegalityError("oplus needs two operands");
                stack.push_back(n->left.get());
                stack.push_back(n->right.get());
                break;
            default:
                check_label(n->i);
                check_label(n->j);
                if (n->i == n->j) throw LegalityError("relabel/edge need distinct labels");
                if (!n->left) throw LegalityError("relabel/edge need a child");
                stack.push_back(n->left.get());
        }
    }
}

/// The labeled graph denoted by the expression; labels are 1-based and
/// vertices appear in left-to-right order.
inline LabeledGraph eval_kexpr(const KExpr& e) {
    LabeledGraph g;
    // Returns the range [first, last) of vertex indices built by n.
    std::function<std::pair<std::uint32_t, std::uint32_t>(const KExpr&)> build =
        [&](const KExpr& n) -> std::pair<std::uint32_t, std::uint32_t> {
        switch (n.kind) {
            case KExprKind::vertex: {
                const auto v = g.add_vertex(n.name, n.i);
                return {v, v + 1};
            }
            case KExprKind::oplus: {
                const auto l = build(*n.left);
                const auto r = build(*n.right);
                return {l.first, r.second};
            }
            case KExprKind::relabel: {
                const auto range = build(*n.left);
                for (auto v = range.first; v < range.second; ++v)
                    if (g.label(v) == n.i) g.set_label(v, n.j);
                return range;
            }
            case KExprKind::edge: {
                const auto range = build(*n.left);
                for (auto u = range.first; u < range.second; ++u)
                    if (g.label(u) == n.i)
                        for (auto v = range.first; v < range.second; ++v)
                            if (g.label(v) == n.j) g.add_edge(u, v);
                return range;
            }
        }
        throw UsageError("bad k-expression node");
    };
    build(e);
    return g;
}

/// S = vertex names in left-to-right order, T = {0, 1}.
inline std::shared_ptr<const Universe> indicator_universe(const KExpr& e) {
    return std::make_shared<const Universe>(kexpr_vertices(e), std::vector<std::string>{"0", "1"});
}

// ---------------------------------------------------------------------------
// Three-valued counts and signatures

enum class Tribool : std::uint8_t { zero = 0, one = 1, many = 2 };

inline Tribool tribool_add(Tribool a, Tribool b) noexcept {
    if (a == Tribool::zero) return b;
    if (b == Tribool::zero) return a;
    return Tribool::many;
}

inline const char* to_string(Tribool t) noexcept {
    switch (t) {
        case Tribool::zero: return "0";
        case Tribool::one: return "1";
        default: return "2";
    }
}

using LabelSet = std::uint32_t;

inline LabelSet label_bit(std::uint32_t label) { return LabelSet{1} << (label - 1); }

inline LabelSet label_set(std::initializer_list<std::uint32_t> labels) {
    LabelSet out = 0;
    for (auto l : labels) out |= label_bit(l);
    return out;
}

inline LabelSet full_label_set(std::uint32_t k) { return k >= 32 ? ~LabelSet{0} : (LabelSet{1} << k) - 1; }

/// Dense table over all 2^k label sets.
class Signature {
public:
    Signature() = default;
    explicit Signature(std::uint32_t k) : k_(k), entries_(std::size_t{1} << k, Tribool::zero) {}

    std::uint32_t k() const noexcept { return k_; }
    Tribool operator[](LabelSet c) const { return entries_.at(c); }
    Tribool& operator[](LabelSet c) { return entries_.at(c); }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Sum of all entries in the three-valued arithmetic.
    Tribool norm() const noexcept {
        Tribool total = Tribool::zero;
        for (Tribool t : entries_) total = tribool_add(total, t);
        return total;
    }

    std::string to_string() const {
        std::string out;
        for (Tribool t : entries_) out += semidp::to_string(t);
        return out;
    }

    friend bool operator==(const Signature&, const Signature&) = default;
    friend auto operator<=>(const Signature& a, const Signature& b) { return a.entries_ <=> b.entries_; }

private:
    std::uint32_t k_ = 0;
    std::vector<Tribool> entries_;
};

inline Signature sig_add(const Signature& a, const Signature& b) {
    if (a.k() != b.k()) throw UsageError("sig_add: width mismatch");
    Signature out(a.k());
    for (LabelSet c = 0; c < out.size(); ++c) out[c] = tribool_add(a[c], b[c]);
    return out;
}

inline LabelSet relabel_set(LabelSet c, std::uint32_t i, std::uint32_t j) {
    if (!(c & label_bit(i))) return c;
    return (c & ~label_bit(i)) | label_bit(j);
}

inline Signature sig_relabel(const Signature& s, std::uint32_t i, std::uint32_t j) {
    Signature out(s.k());
    for (LabelSet c = 0; c < s.size(); ++c) {
        const LabelSet to = relabel_set(c, i, j);
        out[to] = tribool_add(out[to], s[c]);
    }
    return out;
}

inline LabelSet dom_relabel(LabelSet d, std::uint32_t i, std::uint32_t j) {
    const LabelSet ij = label_bit(i) | label_bit(j);
    if ((d & ij) == ij) return d;
    return (d | label_bit(i)) & ~label_bit(j);
}

/// Union of the non-zero label sets touching {i, j}.
inline LabelSet merged_component(const Signature& s, std::uint32_t i, std::uint32_t j) {
    const LabelSet ij = label_bit(i) | label_bit(j);
    LabelSet c0 = 0;
    for (LabelSet c = 0; c < s.size(); ++c)
        if (s[c] != Tribool::zero && (c & ij)) c0 |= c;
    return c0;
}

inline Signature sig_edge(const Signature& s, std::uint32_t i, std::uint32_t j) {
    const LabelSet ij = label_bit(i) | label_bit(j);
    const LabelSet c0 = merged_component(s, i, j);
    if ((c0 & ij) != ij) return s;
    Signature out = s;
    for (LabelSet c = 0; c < out.size(); ++c)
        if (c & ij) out[c] = Tribool::zero;
    out[c0] = Tribool::one;
    return out;
}

inline LabelSet dom_edge(const Signature& s, LabelSet d, std::uint32_t i, std::uint32_t j) {
    const LabelSet c0 = merged_component(s, i, j);
    if (c0 & label_bit(i)) d |= label_bit(j);
    if (c0 & label_bit(j)) d |= label_bit(i);
    return d;
}

struct Trace {
    Signature signature;
    LabelSet domination = 0;

    friend bool operator==(const Trace&, const Trace&) = default;
    friend auto operator<=>(const Trace& a, const Trace& b) {
        if (auto c = a.signature <=> b.signature; c != 0) return c;
        return a.domination <=> b.domination;
    }
};

/// Bucketed candidates; missing keys stand for Empty.
using TraceTable = std::map<Trace, ExprHandle>;

/// Label set of S and its domination set, used by the plain dominating-set DP.
struct LabelTrace {
    LabelSet labels = 0;
    LabelSet domination = 0;
    friend bool operator==(const LabelTrace&, const LabelTrace&) = default;
    friend auto operator<=>(const LabelTrace&, const LabelTrace&) = default;
};

using LabelTraceTable = std::map<LabelTrace, ExprHandle>;

struct CdsStats {
    std::uint64_t max_oplus_pairs = 0;   // largest |T1| * |T2| seen at an oplus
    std::uint64_t total_oplus_pairs = 0;
    std::size_t max_table_size = 0;
    std::size_t oplus_nodes = 0;
};

struct CdsOptions {
    std::uint32_t max_k = 4;
};

namespace detail {

template <class Table, class Key>
void merge_into(ExprStore& store, Table& table, Key key, ExprHandle h) {
    if (store.node(h).is_empty) return;
    auto [it, inserted] = table.try_emplace(std::move(key), h);
    if (!inserted) it->second = store.make_uplus(it->second, h);
}

inline std::uint32_t checked_width(const KExpr& e, std::uint32_t k, const CdsOptions& options) {
    if (k == 0) k = max_label(e);
    if (k > options.max_k)
        throw ResourceError("width " + std::to_string(k) + " exceeds the configured limit " + std::to_string(options.max_k));
    validate_kexpr(e, k);
    return k;
}

}  // namespace detail

/// Observer called after each node's table is complete.
using CdsObserver = std::function<void(const KExpr&, const TraceTable&)>;

/// Trace table of every subset of the vertices of e, as join/union
/// expressions over indicator functions in `store`.
inline TraceTable cds_tables(ExprStore& store, const KExpr& e, std::uint32_t k, CdsStats* stats = nullptr,
                             const CdsObserver& observer = {}) {
    const LabelSet all = full_label_set(k);
    const auto zero = store.universe().find_codomain("0");
    const auto one = store.universe().find_codomain("1");
    if (!zero || !one) throw UsageError("indicator store needs codomain {0, 1}");

    std::function<TraceTable(const KExpr&)> run = [&](const KExpr& n) -> TraceTable {
        TraceTable out;
        switch (n.kind) {
            case KExprKind::vertex: {
                const auto u = store.universe().domain_index(n.name);
                Signature chosen(k);
                chosen[label_bit(n.i)] = Tribool::one;
                detail::merge_into(store, out, Trace{chosen, all}, store.make_leaf(u, *one));
                detail::merge_into(store, out, Trace{Signature(k), all & ~label_bit(n.i)}, store.make_leaf(u, *zero));
                break;
            }
            case KExprKind::relabel: {
                for (const auto& [t, h] : run(*n.left))
                    detail::merge_into(store, out,
                                       Trace{sig_relabel(t.signature, n.i, n.j), dom_relabel(t.domination, n.i, n.j)}, h);
                break;
            }
            case KExprKind::edge: {
                for (const auto& [t, h] : run(*n.left))
                    detail::merge_into(store, out,
                                       Trace{sig_edge(t.signature, n.i, n.j), dom_edge(t.signature, t.domination, n.i, n.j)},
                                       h);
                break;
            }
            case KExprKind::oplus: {
                const TraceTable left = run(*n.left);
                const TraceTable right = run(*n.right);
                if (stats) {
                    const std::uint64_t pairs = std::uint64_t{left.size()} * right.size();
                    stats->max_oplus_pairs = std::max(stats->max_oplus_pairs, pairs);
                    stats->total_oplus_pairs += pairs;
                    ++stats->oplus_nodes;
                }
                for (const auto& [t1, h1] : left)
                    for (const auto& [t2, h2] : right)
                        detail::merge_into(store, out,
                                           Trace{sig_add(t1.signature, t2.signature), t1.domination & t2.domination},
                                           store.make_join(h1, h2));
                break;
            }
        }
        if (stats) stats->max_table_size = std::max(stats->max_table_size, out.size());
        if (observer) observer(n, out);
        return out;
    };
    return run(e);
}

/// Join/union expression whose semantics is the set of indicator functions
/// of the connected dominating sets of eval_kexpr(e). The store must use
/// indicator_universe(e). Pass k = 0 to use the largest label.
inline ExprHandle solve_semiring_cds(ExprStore& store, const KExpr& e, std::uint32_t k = 0, CdsStats* stats = nullptr,
                                     const CdsOptions& options = {}, const CdsObserver& observer = {}) {
    k = detail::checked_width(e, k, options);
    const TraceTable table = cds_tables(store, e, k, stats, observer);
    const LabelSet all = full_label_set(k);
    ExprHandle result = store.make_empty();
    for (const auto& [t, h] : table)
        if (t.domination == all && t.signature.norm() == Tribool::one)
            result = store.node(result).is_empty ? h : store.make_uplus(result, h);
    return result;
}

/// Same recursion with traces (labels of S, domination); yields all
/// dominating sets.
inline ExprHandle solve_semiring_ds(ExprStore& store, const KExpr& e, std::uint32_t k = 0, CdsStats* stats = nullptr,
                                    const CdsOptions& options = {}) {
    k = detail::checked_width(e, k, options);
    const LabelSet all = full_label_set(k);
    const auto zero = store.universe().find_codomain("0");
    const auto one = store.universe().find_codomain("1");
    if (!zero || !one) throw UsageError("indicator store needs codomain {0, 1}");

    std::function<LabelTraceTable(const KExpr&)> run = [&](const KExpr& n) -> LabelTraceTable {
        LabelTraceTable out;
        switch (n.kind) {
            case KExprKind::vertex: {
                const auto u = store.universe().domain_index(n.name);
                detail::merge_into(store, out, LabelTrace{label_bit(n.i), all}, store.make_leaf(u, *one));
                detail::merge_into(store, out, LabelTrace{0, all & ~label_bit(n.i)}, store.make_leaf(u, *zero));
                break;
            }
            case KExprKind::relabel:
                for (const auto& [t, h] : run(*n.left))
                    detail::merge_into(store, out,
                                       LabelTrace{relabel_set(t.labels, n.i, n.j), dom_relabel(t.domination, n.i, n.j)}, h);
                break;
            case KExprKind::edge:
                for (const auto& [t, h] : run(*n.left)) {
                    LabelSet d = t.domination;
                    if (t.labels & label_bit(n.i)) d |= label_bit(n.j);
                    if (t.labels & label_bit(n.j)) d |= label_bit(n.i);
                    detail::merge_into(store, out, LabelTrace{t.labels, d}, h);
                }
                break;
            case KExprKind::oplus: {
                const LabelTraceTable left = run(*n.left);
                const LabelTraceTable right = run(*n.right);
                if (stats) {
                    const std::uint64_t pairs = std::uint64_t{left.size()} * right.size();
                    stats->max_oplus_pairs = std::max(stats->max_oplus_pairs, pairs);
                    stats->total_oplus_pairs += pairs;
                    ++stats->oplus_nodes;
                }
                for (const auto& [t1, h1] : left)
                    for (const auto& [t2, h2] : right)
                        detail::merge_into(store, out, LabelTrace{t1.labels | t2.labels, t1.domination & t2.domination},
                                           store.make_join(h1, h2));
                break;
            }
        }
        if (stats) stats->max_table_size = std::max(stats->max_table_size, out.size());
        return out;
    };
    ExprHandle result = store.make_empty();
    for (const auto& [t, h] : run(e))
        if (t.domination == all) result = store.node(result).is_empty ? h : store.make_uplus(result, h);
    return result;
}

/// Upper bound (3^(2^k) * 2^k)^2 on oplus pair combinations; saturates at
/// UINT64_MAX.
inline std::uint64_t cds_oplus_pair_bound(std::uint32_t k) {
    auto mul = [](std::uint64_t a, std::uint64_t b) {
        std::uint64_t out = 0;
        return __builtin_mul_overflow(a, b, &out) ? UINT64_MAX : out;
    };
    const std::uint64_t cells = std::uint64_t{1} << k;
    std::uint64_t traces = cells;
    for (std::uint64_t c = 0; c < cells && traces != UINT64_MAX; ++c) traces = mul(traces, 3);
    return mul(traces, traces);
}

/// Incremental trace of the subset S (given as a predicate on names),
/// computed with the transfer functions bottom-up.
inline Trace incremental_trace(const KExpr& e, std::uint32_t k, const std::function<bool(const std::string&)>& in_set) {
    const LabelSet all = full_label_set(k);
    switch (e.kind) {
        case KExprKind::vertex: {
            Signature s(k);
            if (in_set(e.name)) {
                s[label_bit(e.i)] = Tribool::one;
                return {s, all};
            }
            return {s, all & ~label_bit(e.i)};
        }
        case KExprKind::relabel: {
            const Trace t = incremental_trace(*e.left, k, in_set);
            return {sig_relabel(t.signature, e.i, e.j), dom_relabel(t.domination, e.i, e.j)};
        }
        case KExprKind::edge: {
            const Trace t = incremental_trace(*e.left, k, in_set);
            return {sig_edge(t.signature, e.i, e.j), dom_edge(t.signature, t.domination, e.i, e.j)};
        }
        case KExprKind::oplus: {
            const Trace a = incremental_trace(*e.left, k, in_set);
            const Trace b = incremental_trace(*e.right, k, in_set);
            return {sig_add(a.signature, b.signature), a.domination & b.domination};
        }
    }
    throw UsageError("bad k-expression node");
}

}  // namespace semidp
