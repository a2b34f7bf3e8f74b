#pragma once

// k-expression files, one expression per file, 1-based labels:
//
//   E ::= (vertex <i> <name>) | (oplus E E) | (relabel <i> <j> E) | (edge <i> <j> E)

#include <charconv>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>

#include "cds.hpp"
#include "sexpr.hpp"

namespace semidp {

inline KExprPtr read_kexpr(std::string_view text) {
    const SExpr tree = parse_sexpr(text);
    std::unordered_set<std::string> names;

    auto label = [](const SExpr& e) -> std::uint32_t {
        if (!e.is_atom) e.fail("expected a label");
        std::uint32_t v = 0;
        const char* first = e.atom.data();
        const char* last = first + e.atom.size();
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || p != last || v == 0) e.fail("label must be a positive integer, got '" + e.atom + "'");
        return v;
    };

    std::function<KExprPtr(const SExpr&)> build = [&](const SExpr& e) -> KExprPtr {
        const std::string& head = e.head();
        auto arity = [&](std::size_t n) {
            if (e.items.size() != n + 1) e.fail("'" + head + "' expects " + std::to_string(n) + " arguments");
        };
        if (head == "vertex") {
            arity(2);
            if (!e.items[2].is_atom) e.items[2].fail("expected a vertex name");
            const std::string& name = e.items[2].atom;
            if (!names.insert(name).second) e.items[2].fail("duplicate vertex name '" + name + "'");
            return kx_vertex(label(e.items[1]), name);
        }
        if (head == "oplus") {
            arity(2);
            auto l = build(e.items[1]);
            return kx_oplus(std::move(l), build(e.items[2]));
        }
        if (head == "relabel" || head == "edge") {
            arity(3);
            const auto i = label(e.items[1]);
            const auto j = label(e.items[2]);
            if (i == j) e.fail("'" + head + "' needs two distinct labels");
            auto child = build(e.items[3]);
            return head == "relabel" ? kx_relabel(i, j, std::move(child)) : kx_edge(i, j, std::move(child));
        }
        e.fail("unknown k-expression form '" + head + "'");
    };
    return build(tree);
}

inline std::string write_kexpr(const KExpr& e) {
    switch (e.kind) {
        case KExprKind::vertex: return "(vertex " + std::to_string(e.i) + " " + e.name + ")";
        case KExprKind::oplus: return "(oplus " + write_kexpr(*e.left) + " " + write_kexpr(*e.right) + ")";
        case KExprKind::relabel:
            return "(relabel " + std::to_string(e.i) + " " + std::to_string(e.j) + " " + write_kexpr(*e.left) + ")";
        case KExprKind::edge:
            return "(edge " + std::to_string(e.i) + " " + std::to_string(e.j) + " " + write_kexpr(*e.left) + ")";
    }
    return {};
}

}  // namespace semidp
