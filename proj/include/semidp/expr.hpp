#pragma once

// Join/union expressions over a universe (S, T), stored as a hash-consed DAG.
//
//   E ::= empty | unit | (s -> t) | E uplus E | E join E
//
// [empty] is the empty set, [unit] the one-element set holding the empty
// function, uplus is disjoint union of function sets over one domain and join
// combines functions over disjoint domains. Builders enforce only the cheap
// structural rules; semantic disjointness of uplus operands is the caller's
// obligation and is checked by materialize().

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"

namespace semidp {

/// Ordered finite domain S and codomain T, addressed by name or index.
class Universe {
public:
    Universe(std::vector<std::string> domain, std::vector<std::string> codomain)
        : domain_(std::move(domain)), codomain_(std::move(codomain)) {
        if (codomain_.empty()) throw UsageError("universe codomain must be non-empty");
        index(domain_, domain_index_, "domain");
        index(codomain_, codomain_index_, "codomain");
    }

    std::size_t domain_size() const noexcept { return domain_.size(); }
    std::size_t codomain_size() const noexcept { return codomain_.size(); }

    /// S is empty; only Empty and Unit expressions exist over it.
    bool degenerate() const noexcept { return domain_.empty(); }

    const std::string& domain_name(std::uint32_t s) const { return domain_.at(s); }
    const std::string& codomain_name(std::uint32_t t) const { return codomain_.at(t); }
    const std::vector<std::string>& domain() const noexcept { return domain_; }
    const std::vector<std::string>& codomain() const noexcept { return codomain_; }

    std::optional<std::uint32_t> find_domain(const std::string& name) const { return find(domain_index_, name); }
    std::optional<std::uint32_t> find_codomain(const std::string& name) const {
        return find(codomain_index_, name);
    }

    std::uint32_t domain_index(const std::string& name) const {
        if (auto i = find_domain(name)) return *i;
        throw UsageError("unknown domain element '" + name + "'");
    }
    std::uint32_t codomain_index(const std::string& name) const {
        if (auto i = find_codomain(name)) return *i;
        throw UsageError("unknown codomain element '" + name + "'");
    }

    friend bool operator==(const Universe& a, const Universe& b) {
        return a.domain_ == b.domain_ && a.codomain_ == b.codomain_;
    }

private:
    using Index = std::unordered_map<std::string, std::uint32_t>;

    static void index(const std::vector<std::string>& names, Index& out, const char* what) {
        for (std::uint32_t i = 0; i < names.size(); ++i)
            if (!out.emplace(names[i], i).second)
                throw UsageError(std::string("duplicate ") + what + " element '" + names[i] + "'");
    }
    static std::optional<std::uint32_t> find(const Index& idx, const std::string& name) {
        auto it = idx.find(name);
        if (it == idx.end()) return std::nullopt;
        return it->second;
    }

    std::vector<std::string> domain_;
    std::vector<std::string> codomain_;
    Index domain_index_;
    Index codomain_index_;
};

/// Universe with S = T = {1..n}, named by decimal strings.
inline std::shared_ptr<const Universe> square_universe(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back(std::to_string(i));
    return std::make_shared<const Universe>(names, names);
}

/// Subset of S as a bitset.
class DomainSet {
public:
    DomainSet() = default;
    explicit DomainSet(std::size_t universe_size) : words_((universe_size + 63) / 64, 0) {}

    void insert(std::uint32_t s) { words_.at(s / 64) |= std::uint64_t{1} << (s % 64); }
    bool contains(std::uint32_t s) const {
        return s / 64 < words_.size() && (words_[s / 64] >> (s % 64)) & 1U;
    }
    bool empty() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
    }
    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }
    bool intersects(const DomainSet& other) const noexcept {
        for (std::size_t i = 0; i < std::min(words_.size(), other.words_.size()); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }
    DomainSet operator|(const DomainSet& other) const {
        DomainSet out = words_.size() >= other.words_.size() ? *this : other;
        const DomainSet& small = words_.size() >= other.words_.size() ? other : *this;
        for (std::size_t i = 0; i < small.words_.size(); ++i) out.words_[i] |= small.words_[i];
        return out;
    }
    std::vector<std::uint32_t> elements() const {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < words_.size(); ++i)
            for (std::uint64_t w = words_[i]; w != 0; w &= w - 1)
                out.push_back(static_cast<std::uint32_t>(i * 64 + static_cast<std::size_t>(__builtin_ctzll(w))));
        return out;
    }

    friend bool operator==(const DomainSet& a, const DomainSet& b) noexcept {
        const std::size_t n = std::max(a.words_.size(), b.words_.size());
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t x = i < a.words_.size() ? a.words_[i] : 0;
            const std::uint64_t y = i < b.words_.size() ? b.words_[i] : 0;
            if (x != y) return false;
        }
        return true;
    }

private:
    std::vector<std::uint64_t> words_;
};

enum class ExprKind : std::uint8_t { empty, unit, leaf, uplus, join };

struct ExprHandle {
    std::uint32_t id = 0;
    friend auto operator<=>(ExprHandle, ExprHandle) = default;
};

struct ExprNode {
    explicit ExprNode(ExprKind k, std::uint32_t x = 0, std::uint32_t y = 0) : kind(k), a(x), b(y) {}

    ExprKind kind;
    // leaf: (s, t); uplus/join: child ids; otherwise unused.
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    DomainSet domain;
    bool is_empty = false;
    Natural tree_size;  // leaves of the unfolded tree

    bool is_binary() const noexcept { return kind == ExprKind::uplus || kind == ExprKind::join; }
};

/// Append-only hash-consing store of expression nodes.
///
/// Handles are stable and nodes immutable once created; children always have
/// smaller ids than their parents. Insertions must not race with each other
/// or with readers; after construction the store may be read concurrently.
class ExprStore {
public:
    explicit ExprStore(std::shared_ptr<const Universe> universe) : universe_(std::move(universe)) {
        if (!universe_) throw UsageError("null universe");
        empty_ = intern(ExprKind::empty, 0, 0, [&] {
            ExprNode n{ExprKind::empty};
            n.domain = DomainSet(universe_->domain_size());
            n.is_empty = true;
            n.tree_size = 1;
            return n;
        });
        unit_ = intern(ExprKind::unit, 0, 0, [&] {
            ExprNode n{ExprKind::unit};
            n.domain = DomainSet(universe_->domain_size());
            n.tree_size = 1;
            return n;
        });
    }

    const Universe& universe() const noexcept { return *universe_; }
    const std::shared_ptr<const Universe>& universe_ptr() const noexcept { return universe_; }

    ExprHandle make_empty() const noexcept { return empty_; }
    ExprHandle make_unit() const noexcept { return unit_; }

    ExprHandle make_leaf(std::uint32_t s, std::uint32_t t) {
        if (s >= universe_->domain_size()) throw UsageError("leaf: domain index out of range");
        if (t >= universe_->codomain_size()) throw UsageError("leaf: codomain index out of range");
        return intern(ExprKind::leaf, s, t, [&] {
            ExprNode n{ExprKind::leaf, s, t};
            n.domain = DomainSet(universe_->domain_size());
            n.domain.insert(s);
            n.tree_size = 1;
            return n;
        });
    }

    ExprHandle make_leaf(const std::string& s, const std::string& t) {
        return make_leaf(universe_->domain_index(s), universe_->codomain_index(t));
    }

    /// Disjoint union. With one side empty the node denotes the other side;
    /// otherwise both sides must share one domain.
    ExprHandle make_uplus(ExprHandle x, ExprHandle y) {
        const ExprNode& l = node(x);
        const ExprNode& r = node(y);
        if (!l.is_empty && !r.is_empty && !(l.domain == r.domain))
            throw LegalityError("uplus of expressions over different domains");
        return intern(ExprKind::uplus, x.id, y.id, [&] {
            ExprNode n{ExprKind::uplus, x.id, y.id};
            n.domain = l.is_empty ? r.domain : l.domain;
            n.is_empty = l.is_empty && r.is_empty;
            n.tree_size = l.tree_size + r.tree_size;
            return n;
        });
    }

    ExprHandle make_join(ExprHandle x, ExprHandle y) {
        const ExprNode& l = node(x);
        const ExprNode& r = node(y);
        if (l.domain.intersects(r.domain)) throw LegalityError("join of expressions over overlapping domains");
        return intern(ExprKind::join, x.id, y.id, [&] {
            ExprNode n{ExprKind::join, x.id, y.id};
            n.domain = l.domain | r.domain;
            n.is_empty = l.is_empty || r.is_empty;
            n.tree_size = l.tree_size + r.tree_size;
            return n;
        });
    }

    const ExprNode& node(ExprHandle h) const {
        if (h.id >= nodes_.size()) throw UsageError("expression handle out of range");
        return nodes_[h.id];
    }

    /// Number of nodes in the store.
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Ids of the nodes reachable from h, in increasing (topological) order.
    std::vector<std::uint32_t> reachable(ExprHandle h) const {
        node(h);
        std::vector<char> seen(h.id + 1, 0);
        std::vector<std::uint32_t> stack{h.id};
        seen[h.id] = 1;
        while (!stack.empty()) {
            const ExprNode& n = nodes_[stack.back()];
            stack.pop_back();
            if (!n.is_binary()) continue;
            for (std::uint32_t c : {n.a, n.b})
                if (!seen[c]) {
                    seen[c] = 1;
                    stack.push_back(c);
                }
        }
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i <= h.id; ++i)
            if (seen[i]) out.push_back(i);
        return out;
    }

private:
    struct Key {
        ExprKind kind;
        std::uint32_t a, b;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = (std::uint64_t{k.a} << 32) ^ k.b;
            h ^= static_cast<std::uint64_t>(k.kind) * 0x9e3779b97f4a7c15ULL;
            h ^= h >> 29;
            h *= 0xbf58476d1ce4e5b9ULL;
            return static_cast<std::size_t>(h ^ (h >> 32));
        }
    };

    template <class Make>
    ExprHandle intern(ExprKind kind, std::uint32_t a, std::uint32_t b, Make make) {
        const Key key{kind, a, b};
        if (auto it = index_.find(key); it != index_.end()) return ExprHandle{it->second};
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(make());
        index_.emplace(key, id);
        return ExprHandle{id};
    }

    std::shared_ptr<const Universe> universe_;
    std::deque<ExprNode> nodes_;
    std::unordered_map<Key, std::uint32_t, KeyHash> index_;
    ExprHandle empty_;
    ExprHandle unit_;
};

// ---------------------------------------------------------------------------
// Exact semantics

/// Sentinel in an assignment vector for elements outside the function's domain.
inline constexpr std::uint32_t kUnassigned = 0xffffffffU;

/// A function dom -> T written as a vector over all of S (kUnassigned outside dom).
using Assignment = std::vector<std::uint32_t>;

/// A set of functions sharing one domain, kept in canonical (lexicographic) order.
struct FunctionSet {
    DomainSet domain;
    std::set<Assignment> members;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }

    friend bool operator==(const FunctionSet& a, const FunctionSet& b) {
        return a.members == b.members && (a.members.empty() || a.domain == b.domain);
    }
};

/// Result of materialize: either FAIL (with a reason) or a function set.
struct Semantics {
    std::optional<FunctionSet> set;
    std::string failure;

    bool is_fail() const noexcept { return !set.has_value(); }
};

/// Exact semantics by the inductive definition; the ground-truth oracle for
/// expressions. Domains of intermediate sets follow the cached-domain rule
/// (the domain of a uplus with one empty side is the other side's).
inline Semantics materialize(const ExprStore& store, ExprHandle root, std::size_t node_budget,
                             std::size_t member_budget) {
    if (node_budget == 0 || member_budget == 0) throw UsageError("materialize budgets must be positive");
    const std::size_t width = store.universe().domain_size();
    const auto order = store.reachable(root);
    if (order.size() > node_budget)
        throw ResourceError("materialize: " + std::to_string(order.size()) + " nodes exceed budget");

    std::unordered_map<std::uint32_t, std::shared_ptr<const Semantics>> memo;
    auto fail = [](std::string why) { return std::make_shared<const Semantics>(Semantics{std::nullopt, std::move(why)}); };

    for (std::uint32_t id : order) {
        const ExprNode& n = store.node(ExprHandle{id});
        std::shared_ptr<const Semantics> out;
        switch (n.kind) {
            case ExprKind::empty:
                out = std::make_shared<const Semantics>(Semantics{FunctionSet{DomainSet(width), {}}, {}});
                break;
            case ExprKind::unit:
                out = std::make_shared<const Semantics>(
                    Semantics{FunctionSet{DomainSet(width), {Assignment(width, kUnassigned)}}, {}});
                break;
            case ExprKind::leaf: {
                FunctionSet fs{DomainSet(width), {}};
                fs.domain.insert(n.a);
                Assignment f(width, kUnassigned);
                f[n.a] = n.b;
                fs.members.insert(std::move(f));
                out = std::make_shared<const Semantics>(Semantics{std::move(fs), {}});
                break;
            }
            case ExprKind::uplus: {
                const auto& l = memo.at(n.a);
                const auto& r = memo.at(n.b);
                if (l->is_fail()) { out = l; break; }
                if (r->is_fail()) { out = r; break; }
                if (r->set->empty()) { out = l; break; }
                if (l->set->empty()) { out = r; break; }
                if (!(l->set->domain == r->set->domain)) { out = fail("uplus over different domains"); break; }
                FunctionSet fs = *l->set;
                bool overlap = false;
                for (const auto& f : r->set->members)
                    if (!fs.members.insert(f).second) overlap = true;
                if (overlap) { out = fail("uplus of intersecting sets"); break; }
                if (fs.size() > member_budget) throw ResourceError("materialize: member budget exceeded");
                out = std::make_shared<const Semantics>(Semantics{std::move(fs), {}});
                break;
            }
            case ExprKind::join: {
                const auto& l = memo.at(n.a);
                const auto& r = memo.at(n.b);
                if (l->is_fail()) { out = l; break; }
                if (r->is_fail()) { out = r; break; }
                if (l->set->domain.intersects(r->set->domain)) { out = fail("join over overlapping domains"); break; }
                if (l->set->size() * r->set->size() > member_budget)
                    throw ResourceError("materialize: member budget exceeded");
                FunctionSet fs{l->set->domain | r->set->domain, {}};
                const auto right_dom = r->set->domain.elements();
                for (const auto& f : l->set->members)
                    for (const auto& g : r->set->members) {
                        Assignment h = f;
                        for (auto s : right_dom) h[s] = g[s];
                        fs.members.insert(std::move(h));
                    }
                out = std::make_shared<const Semantics>(Semantics{std::move(fs), {}});
                break;
            }
        }
        memo.emplace(id, std::move(out));
    }
    return *memo.at(root.id);
}

// ---------------------------------------------------------------------------
// Measure evaluation

struct EvalStats {
    std::size_t reachable_nodes = 0;
    std::size_t semiring_ops = 0;  // one add or mul per reachable uplus/join node
};

/// Evaluates a measure given by its matrix over the expression, bottom-up,
/// each DAG node once: empty -> 0, unit -> 1, leaf -> M[s,t], uplus -> +,
/// join -> *. `Matrix` needs semiring() and at(s, t).
template <class Matrix>
Value evaluate(const ExprStore& store, ExprHandle root, const Matrix& matrix, EvalStats* stats = nullptr) {
    if (!(matrix.universe() == store.universe())) throw UsageError("evaluate: measure universe mismatch");
    const Semiring& sr = matrix.semiring();
    const auto order = store.reachable(root);
    std::unordered_map<std::uint32_t, Value> memo;
    memo.reserve(order.size());
    std::size_t ops = 0;
    for (std::uint32_t id : order) {
        const ExprNode& n = store.node(ExprHandle{id});
        switch (n.kind) {
            case ExprKind::empty: memo.emplace(id, zero(sr)); break;
            case ExprKind::unit: memo.emplace(id, one(sr)); break;
            case ExprKind::leaf: memo.emplace(id, matrix.at(n.a, n.b)); break;
            case ExprKind::uplus:
                ++ops;
                memo.emplace(id, add(memo.at(n.a), memo.at(n.b)));
                break;
            case ExprKind::join:
                ++ops;
                memo.emplace(id, mul(memo.at(n.a), memo.at(n.b)));
                break;
        }
    }
    if (stats) *stats = EvalStats{order.size(), ops};
    return memo.at(root.id);
}

// ---------------------------------------------------------------------------

/// Left fold of uplus over the handles; empty input gives Empty.
inline ExprHandle uplus_all(ExprStore& store, const std::vector<ExprHandle>& parts) {
    if (parts.empty()) return store.make_empty();
    ExprHandle acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = store.make_uplus(acc, parts[i]);
    return acc;
}

/// Left fold of join over the handles; empty input gives Unit.
inline ExprHandle join_all(ExprStore& store, const std::vector<ExprHandle>& parts) {
    if (parts.empty()) return store.make_unit();
    ExprHandle acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = store.make_join(acc, parts[i]);
    return acc;
}

/// The expression join_{s in S} uplus_{t in T} (s -> t) of all functions S -> T.
/// On square_universe(n) it has n^2 leaves.
inline ExprHandle all_functions_expr(ExprStore& store) {
    const Universe& u = store.universe();
    std::vector<ExprHandle> columns;
    for (std::uint32_t s = 0; s < u.domain_size(); ++s) {
        std::vector<ExprHandle> choices;
        for (std::uint32_t t = 0; t < u.codomain_size(); ++t) choices.push_back(store.make_leaf(s, t));
        columns.push_back(uplus_all(store, choices));
    }
    return join_all(store, columns);
}

}  // namespace semidp
