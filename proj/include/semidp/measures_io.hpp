#pragma once

// Matrix files:
//
//   semiring: delta(trop,nat)
//   # comment
//   a 0 (0,1)
//   a 1 (1,1)
//
// One row "s t value" per pair of S x T; the value is the rest of the line.
// Without a given universe, S and T are taken in order of first appearance.

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "measures.hpp"

namespace semidp {

namespace detail {
inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}
}  // namespace detail

inline MeasureMatrix read_matrix(std::string_view text, std::shared_ptr<const Universe> universe = nullptr) {
    struct Row {
        std::string s, t, value;
        std::size_t line, column;
    };
    std::optional<Semiring> semiring;
    std::vector<Row> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (!semiring) {
            constexpr std::string_view key = "semiring:";
            if (body.substr(0, key.size()) != key) throw ParseError("expected 'semiring: <descriptor>' header", line_no, 1);
            try {
                semiring = parse_semiring(body.substr(key.size()));
            } catch (const ParseError& e) {
                throw ParseError(e.what(), line_no, 1);
            }
            continue;
        }
        std::istringstream in{std::string(body)};
        Row r;
        r.line = line_no;
        r.column = 1;
        if (!(in >> r.s >> r.t)) throw ParseError("expected 's t value'", line_no, 1);
        std::getline(in, r.value);
        r.value = std::string(detail::trim(r.value));
        if (r.value.empty()) throw ParseError("missing value", line_no, 1);
        rows.push_back(std::move(r));
    }
    if (!semiring) throw ParseError("missing 'semiring:' header", line_no, 1);

    if (!universe) {
        std::vector<std::string> dom, cod;
        std::unordered_map<std::string, int> seen_s, seen_t;
        for (const Row& r : rows) {
            if (seen_s.emplace(r.s, 0).second) dom.push_back(r.s);
            if (seen_t.emplace(r.t, 0).second) cod.push_back(r.t);
        }
        if (cod.empty()) throw ParseError("matrix has no rows", line_no, 1);
        universe = std::make_shared<const Universe>(dom, cod);
    }
    const Universe& u = *universe;
    std::vector<std::optional<Value>> cells(u.domain_size() * u.codomain_size());
    for (const Row& r : rows) {
        const auto s = u.find_domain(r.s);
        const auto t = u.find_codomain(r.t);
        if (!s || !t) throw ParseError("pair (" + r.s + "," + r.t + ") outside the universe", r.line, r.column);
        auto& cell = cells[*s * u.codomain_size() + *t];
        if (cell) throw ParseError("duplicate pair (" + r.s + "," + r.t + ")", r.line, r.column);
        try {
            cell = parse_value(r.value, *semiring);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), r.line, r.column);
        }
    }
    std::vector<Value> entries;
    entries.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i])
            throw ParseError("missing pair (" + u.domain_name(static_cast<std::uint32_t>(i / u.codomain_size())) + "," +
                                 u.codomain_name(static_cast<std::uint32_t>(i % u.codomain_size())) + ")",
                             line_no, 1);
        entries.push_back(*cells[i]);
    }
    return MeasureMatrix(std::move(universe), *semiring, std::move(entries));
}

inline std::string write_matrix(const MeasureMatrix& m) {
    std::string out = "semiring: " + m.semiring().to_string() + "\n";
    const Universe& u = m.universe();
    for (std::uint32_t s = 0; s < u.domain_size(); ++s)
        for (std::uint32_t t = 0; t < u.codomain_size(); ++t)
            out += u.domain_name(s) + " " + u.codomain_name(t) + " " + m.at(s, t).to_string() + "\n";
    return out;
}

}  // namespace semidp
