#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace semidp {

/// Simple undirected graph with named vertices and optional integer labels.
class LabeledGraph {
public:
    /// Adds a vertex and returns its index; names must be unique.
    std::uint32_t add_vertex(const std::string& name, std::uint32_t label = 0) {
        if (!index_.emplace(name, static_cast<std::uint32_t>(names_.size())).second)
            throw LegalityError("duplicate vertex name '" + name + "'");
        names_.push_back(name);
        labels_.push_back(label);
        adj_.emplace_back();
        return static_cast<std::uint32_t>(names_.size() - 1);
    }

    /// Adds {u, v}; self-loops are ignored, duplicates collapse.
    void add_edge(std::uint32_t u, std::uint32_t v) {
        if (u >= size() || v >= size()) throw UsageError("edge endpoint out of range");
        if (u == v) return;
        auto insert = [](std::vector<std::uint32_t>& list, std::uint32_t x) {
            auto it = std::lower_bound(list.begin(), list.end(), x);
            if (it == list.end() || *it != x) list.insert(it, x);
        };
        insert(adj_[u], v);
        insert(adj_[v], u);
    }

    bool has_edge(std::uint32_t u, std::uint32_t v) const {
        return u < size() && std::binary_search(adj_[u].begin(), adj_[u].end(), v);
    }

    std::size_t size() const noexcept { return names_.size(); }
    std::size_t edge_count() const noexcept {
        std::size_t twice = 0;
        for (const auto& a : adj_) twice += a.size();
        return twice / 2;
    }

    const std::string& name(std::uint32_t v) const { return names_.at(v); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::uint32_t label(std::uint32_t v) const { return labels_.at(v); }
    void set_label(std::uint32_t v, std::uint32_t label) { labels_.at(v) = label; }
    const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const { return adj_.at(v); }

    std::uint32_t index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw UsageError("unknown vertex '" + name + "'");
        return it->second;
    }

    /// Edges {u, v} with u < v in lexicographic order.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        for (std::uint32_t u = 0; u < size(); ++u)
            for (auto v : adj_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::vector<std::uint32_t>> adj_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Edge-list export: "n m" then one "u v" line per edge, 1-based indices in
/// vertex order.
inline std::string write_edge_list(const LabeledGraph& g) {
    std::string out = std::to_string(g.size()) + " " + std::to_string(g.edge_count()) + "\n";
    for (auto [u, v] : g.edges()) out += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
    return out;
}

}  // namespace semidp
