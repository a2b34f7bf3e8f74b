#pragma once

// Text form of expressions:
//
//   E ::= empty | unit | (leaf <s> <t>) | (uplus E E) | (join E E)
//       | (share <id> E) | (ref <id>)
//
// The writer wraps every binary node with more than one parent in the
// reachable DAG in a (share ...) on first occurrence and emits (ref ...)
// afterwards, numbering shares 0, 1, ... in output order.

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "expr.hpp"
#include "sexpr.hpp"

namespace semidp {

inline std::string write_expr(const ExprStore& store, ExprHandle root) {
    std::unordered_map<std::uint32_t, std::uint32_t> parents;
    for (std::uint32_t id : store.reachable(root)) {
        const ExprNode& n = store.node(ExprHandle{id});
        if (n.is_binary()) {
            ++parents[n.a];
            ++parents[n.b];
        }
    }
    std::unordered_map<std::uint32_t, std::uint32_t> share_ids;
    std::string out;
    const Universe& u = store.universe();

    std::function<void(std::uint32_t)> emit = [&](std::uint32_t id) {
        const ExprNode& n = store.node(ExprHandle{id});
        switch (n.kind) {
            case ExprKind::empty: out += "empty"; return;
            case ExprKind::unit: out += "unit"; return;
            case ExprKind::leaf:
                out += "(leaf " + u.domain_name(n.a) + " " + u.codomain_name(n.b) + ")";
                return;
            default: break;
        }
        const bool shared = parents[id] > 1;
        if (shared) {
            if (auto it = share_ids.find(id); it != share_ids.end()) {
                out += "(ref " + std::to_string(it->second) + ")";
                return;
            }
            const auto sid = static_cast<std::uint32_t>(share_ids.size());
            share_ids.emplace(id, sid);
            out += "(share " + std::to_string(sid) + " ";
        }
        out += n.kind == ExprKind::uplus ? "(uplus " : "(join ";
        emit(n.a);
        out += " ";
        emit(n.b);
        out += ")";
        if (shared) out += ")";
    };
    emit(root.id);
    return out;
}

/// Parses an expression into the store; leaf names must belong to its universe.
inline ExprHandle read_expr(ExprStore& store, std::string_view text) {
    const SExpr tree = parse_sexpr(text);
    std::unordered_map<std::string, ExprHandle> shares;

    std::function<ExprHandle(const SExpr&)> build = [&](const SExpr& e) -> ExprHandle {
        if (e.is_atom) {
            if (e.atom == "empty") return store.make_empty();
            if (e.atom == "unit") return store.make_unit();
            e.fail("unknown expression atom '" + e.atom + "'");
        }
        const std::string& head = e.head();
        auto arity = [&](std::size_t n) {
            if (e.items.size() != n + 1) e.fail("'" + head + "' expects " + std::to_string(n) + " arguments");
        };
        auto atom = [&](std::size_t i) -> const std::string& {
            if (!e.items[i].is_atom) e.items[i].fail("expected a name");
            return e.items[i].atom;
        };
        if (head == "leaf") {
            arity(2);
            const auto s = store.universe().find_domain(atom(1));
            if (!s) e.items[1].fail("unknown domain element '" + atom(1) + "'");
            const auto t = store.universe().find_codomain(atom(2));
            if (!t) e.items[2].fail("unknown codomain element '" + atom(2) + "'");
            return store.make_leaf(*s, *t);
        }
        if (head == "uplus" || head == "join") {
            arity(2);
            const ExprHandle l = build(e.items[1]);
            const ExprHandle r = build(e.items[2]);
            return head == "uplus" ? store.make_uplus(l, r) : store.make_join(l, r);
        }
        if (head == "share") {
            arity(2);
            const ExprHandle h = build(e.items[2]);
            if (!shares.emplace(atom(1), h).second) e.fail("share id '" + atom(1) + "' defined twice");
            return h;
        }
        if (head == "ref") {
            arity(1);
            auto it = shares.find(atom(1));
            if (it == shares.end()) e.fail("reference to undefined share '" + atom(1) + "'");
            return it->second;
        }
        e.fail("unknown expression form '" + head + "'");
    };
    return build(tree);
}

}  // namespace semidp
