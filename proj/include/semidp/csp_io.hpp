#pragma once

// CSP instance files (JSON):
//
//   {"variables": ["a", "b"], "domain": [1, 2, 3],
//    "constraints": [{"scope": ["a", "b"], "tuples": [[1, 2], [2, 1]]}]}
//
// Sum-product files carry "semiring": "<descriptor>" and give each
// constraint a total "table": [{"args": [1, 2], "value": "<literal>"}].
// Domain values may be JSON strings or numbers; numbers are named by their
// JSON text.
//
// Tree decompositions use the PACE .td layout with 1-based bag and vertex
// numbers, vertices numbered in variable order:
//
//   s td <bags> <width + 1> <vertices>
//   b 1 1 2
//   b 2 2 3
//   1 2

#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "csp.hpp"

namespace semidp {

namespace detail {

using json = nlohmann::json;

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(std::string("malformed JSON: ") + e.what(), line, column);
    }
}

inline std::string atom_name(const json& j, const char* what) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.dump();
    throw ParseError(std::string(what) + " must be a string or a number");
}

inline const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return obj.at(key);
}

inline const json& array_field(const json& obj, const char* key) {
    const json& f = field(obj, key);
    if (!f.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
    return f;
}

struct NameIndex {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::uint32_t> index;

    NameIndex(const json& arr, const char* what) {
        for (const json& j : arr) {
            std::string n = atom_name(j, what);
            if (!index.emplace(n, static_cast<std::uint32_t>(names.size())).second)
                throw ParseError(std::string("duplicate ") + what + " '" + n + "'");
            names.push_back(std::move(n));
        }
    }

    std::uint32_t at(const json& j, const char* what) const {
        const std::string n = atom_name(j, what);
        auto it = index.find(n);
        if (it == index.end()) throw ParseError(std::string("unknown ") + what + " '" + n + "'");
        return it->second;
    }
};

inline std::vector<std::uint32_t> read_scope(const json& c, const NameIndex& vars) {
    std::vector<std::uint32_t> scope;
    for (const json& v : array_field(c, "scope")) scope.push_back(vars.at(v, "variable"));
    if (scope.empty()) throw ParseError("constraint scope must be non-empty");
    return scope;
}

inline json name_json(const std::string& name) {
    // Numbers written back as numbers keep files stable under round trips.
    if (!name.empty() && name.find_first_not_of("-0123456789") == std::string::npos && name != "-") {
        try {
            const json j = json::parse(name);
            if (j.is_number_integer() && j.dump() == name) return j;
        } catch (const json::exception&) {
        }
    }
    return name;
}

}  // namespace detail

inline CspInstance read_csp(std::string_view text) {
    const auto doc = detail::parse_json(text);
    const detail::NameIndex vars(detail::array_field(doc, "variables"), "variable");
    const detail::NameIndex dom(detail::array_field(doc, "domain"), "domain value");
    CspInstance csp{vars.names, dom.names, {}};
    if (doc.contains("constraints")) {
        for (const auto& c : detail::array_field(doc, "constraints")) {
            Constraint con{detail::read_scope(c, vars), {}};
            for (const auto& t : detail::array_field(c, "tuples")) {
                if (!t.is_array() || t.size() != con.scope.size())
                    throw ParseError("tuple arity differs from scope size");
                Tuple tuple;
                for (const auto& x : t) tuple.push_back(dom.at(x, "domain value"));
                con.tuples.insert(std::move(tuple));
            }
            csp.constraints.push_back(std::move(con));
        }
    }
    csp.validate();
    return csp;
}

inline SumProductInstance read_sum_product(std::string_view text) {
    const auto doc = detail::parse_json(text);
    const detail::NameIndex vars(detail::array_field(doc, "variables"), "variable");
    const detail::NameIndex dom(detail::array_field(doc, "domain"), "domain value");
    const auto& sr = detail::field(doc, "semiring");
    if (!sr.is_string()) throw ParseError("'semiring' must be a descriptor string");
    SumProductInstance sp{vars.names, dom.names, parse_semiring(sr.get<std::string>()), {}};
    if (doc.contains("constraints")) {
        for (const auto& c : detail::array_field(doc, "constraints")) {
            ValuedConstraint vc{detail::read_scope(c, vars), {}};
            std::size_t size = 1;
            for (std::size_t i = 0; i < vc.scope.size(); ++i) size *= dom.names.size();
            std::vector<std::optional<Value>> cells(size);
            for (const auto& row : detail::array_field(c, "table")) {
                const auto& args = detail::array_field(row, "args");
                if (args.size() != vc.scope.size()) throw ParseError("table args arity differs from scope size");
                Tuple t;
                for (const auto& x : args) t.push_back(dom.at(x, "domain value"));
                const auto& v = detail::field(row, "value");
                auto& cell = cells[tuple_index(t, dom.names.size())];
                if (cell) throw ParseError("duplicate table row");
                cell = parse_value(v.is_string() ? v.get<std::string>() : v.dump(), sp.semiring);
            }
            for (auto& cell : cells) {
                if (!cell) throw ParseError("valuation table is not total");
                vc.table.push_back(std::move(*cell));
            }
            sp.constraints.push_back(std::move(vc));
        }
    }
    sp.validate();
    return sp;
}

inline std::string write_csp(const CspInstance& csp) {
    using detail::json;
    json doc;
    doc["variables"] = json::array();
    for (const auto& v : csp.variables) doc["variables"].push_back(detail::name_json(v));
    doc["domain"] = json::array();
    for (const auto& d : csp.domain) doc["domain"].push_back(detail::name_json(d));
    doc["constraints"] = json::array();
    for (const auto& c : csp.constraints) {
        json jc;
        jc["scope"] = json::array();
        for (auto v : c.scope) jc["scope"].push_back(detail::name_json(csp.variables[v]));
        std::vector<Tuple> tuples(c.tuples.begin(), c.tuples.end());
        std::sort(tuples.begin(), tuples.end());
        jc["tuples"] = json::array();
        for (const auto& t : tuples) {
            json jt = json::array();
            for (auto x : t) jt.push_back(detail::name_json(csp.domain[x]));
            jc["tuples"].push_back(std::move(jt));
        }
        doc["constraints"].push_back(std::move(jc));
    }
    return doc.dump(1) + "\n";
}

inline std::string write_sum_product(const SumProductInstance& sp) {
    using detail::json;
    json doc;
    doc["semiring"] = sp.semiring.to_string();
    doc["variables"] = json::array();
    for (const auto& v : sp.variables) doc["variables"].push_back(detail::name_json(v));
    doc["domain"] = json::array();
    for (const auto& d : sp.domain) doc["domain"].push_back(detail::name_json(d));
    doc["constraints"] = json::array();
    for (const auto& c : sp.constraints) {
        json jc;
        jc["scope"] = json::array();
        for (auto v : c.scope) jc["scope"].push_back(detail::name_json(sp.variables[v]));
        jc["table"] = json::array();
        for (std::size_t i = 0; i < c.table.size(); ++i) {
            json args = json::array();
            for (auto x : tuple_at(i, c.scope.size(), sp.domain.size())) args.push_back(detail::name_json(sp.domain[x]));
            jc["table"].push_back(json{{"args", std::move(args)}, {"value", c.table[i].to_string()}});
        }
        doc["constraints"].push_back(std::move(jc));
    }
    return doc.dump(1) + "\n";
}

/// Reads a PACE .td file; the vertex count must equal n_vertices.
inline TreeDecomposition read_td(std::string_view text, std::size_t n_vertices) {
    TreeDecomposition td;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t n_bags = 0;
    std::vector<bool> seen;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok == "c") continue;
        auto number = [&](const char* what) -> std::int64_t {
            std::int64_t x = 0;
            if (!(ls >> x)) throw ParseError(std::string("expected ") + what, line_no, 1);
            return x;
        };
        if (tok == "s") {
            if (header) throw ParseError("duplicate 's td' header", line_no, 1);
            std::string kind;
            if (!(ls >> kind) || kind != "td") throw ParseError("expected 's td <bags> <width+1> <vertices>'", line_no, 1);
            const auto bags = number("bag count");
            const auto width1 = number("width + 1");
            const auto n = number("vertex count");
            if (bags < 0 || width1 < 0 || n < 0) throw ParseError("negative header field", line_no, 1);
            if (static_cast<std::size_t>(n) != n_vertices)
                throw ParseError("decomposition has " + std::to_string(n) + " vertices, instance has " +
                                     std::to_string(n_vertices),
                                 line_no, 1);
            n_bags = static_cast<std::size_t>(bags);
            td.bags.assign(n_bags, {});
            seen.assign(n_bags, false);
            header = true;
            continue;
        }
        if (!header) throw ParseError("missing 's td' header", line_no, 1);
        if (tok == "b") {
            const auto id = number("bag id");
            if (id < 1 || static_cast<std::size_t>(id) > n_bags) throw ParseError("bag id out of range", line_no, 1);
            if (seen[id - 1]) throw ParseError("bag " + std::to_string(id) + " defined twice", line_no, 1);
            seen[id - 1] = true;
            auto& bag = td.bags[id - 1];
            std::int64_t v = 0;
            while (ls >> v) {
                if (v < 1 || static_cast<std::size_t>(v) > n_vertices)
                    throw ParseError("vertex " + std::to_string(v) + " out of range", line_no, 1);
                bag.push_back(static_cast<std::uint32_t>(v - 1));
            }
            if (!ls.eof()) throw ParseError("bad vertex number", line_no, 1);
            std::sort(bag.begin(), bag.end());
            if (std::adjacent_find(bag.begin(), bag.end()) != bag.end())
                throw ParseError("repeated vertex in a bag", line_no, 1);
            continue;
        }
        std::int64_t a = 0, b = 0;
        try {
            a = std::stoll(tok);
        } catch (const std::exception&) {
            throw ParseError("unexpected token '" + tok + "'", line_no, 1);
        }
        b = number("second bag id");
        if (a < 1 || b < 1 || static_cast<std::size_t>(a) > n_bags || static_cast<std::size_t>(b) > n_bags)
            throw ParseError("tree edge refers to an unknown bag", line_no, 1);
        td.edges.emplace_back(static_cast<std::uint32_t>(a - 1), static_cast<std::uint32_t>(b - 1));
    }
    if (!header) throw ParseError("missing 's td' header", line_no == 0 ? 1 : line_no, 1);
    for (std::size_t i = 0; i < n_bags; ++i)
        if (!seen[i]) throw ParseError("bag " + std::to_string(i + 1) + " is never defined");
    return td;
}

inline std::string write_td(const TreeDecomposition& td, std::size_t n_vertices) {
    std::size_t largest = 0;
    for (const auto& b : td.bags) largest = std::max(largest, b.size());
    std::string out = "s td " + std::to_string(td.bags.size()) + " " + std::to_string(largest) + " " +
                      std::to_string(n_vertices) + "\n";
    for (std::size_t i = 0; i < td.bags.size(); ++i) {
        out += "b " + std::to_string(i + 1);
        for (auto v : td.bags[i]) out += " " + std::to_string(v + 1);
        out += "\n";
    }
    for (auto [a, b] : td.edges) out += std::to_string(a + 1) + " " + std::to_string(b + 1) + "\n";
    return out;
}

}  // namespace semidp
