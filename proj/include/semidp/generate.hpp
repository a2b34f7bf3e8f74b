#pragma once

// Seeded random instances. Randomness comes from the raw output of
// std::mt19937_64, whose sequence is fixed by the standard; bounded draws use
// rejection sampling so results are identical on every platform.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "cds.hpp"
#include "csp.hpp"
#include "errors.hpp"

namespace semidp {

class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw UsageError("below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// True with probability num / den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

struct KExprParams {
    std::uint32_t k = 2;
    std::uint32_t vertices = 6;
    std::uint64_t seed = 1;
};

/// Random k-expression over vertices v1..vn: random initial labels, then
/// repeated merges of random pool members, each followed by a few random
/// edge or relabel operations.
inline KExprPtr generate_kexpr(const KExprParams& p) {
    if (p.k < 1 || p.k > 4) throw UsageError("generated k-expressions need 1 <= k <= 4");
    if (p.vertices < 1 || p.vertices > 12) throw UsageError("generated k-expressions need 1..12 vertices");
    SeededRng rng(p.seed);
    auto label = [&] { return static_cast<std::uint32_t>(rng.below(p.k)) + 1; };
    auto unary = [&](KExprPtr e) {
        if (p.k < 2) return e;
        const std::uint32_t i = label();
        std::uint32_t j = label();
        while (j == i) j = label();
        return rng.chance(3, 4) ? kx_edge(i, j, std::move(e)) : kx_relabel(i, j, std::move(e));
    };

    std::vector<KExprPtr> pool;
    for (std::uint32_t v = 1; v <= p.vertices; ++v) pool.push_back(kx_vertex(label(), "v" + std::to_string(v)));
    while (pool.size() > 1) {
        const std::size_t a = rng.below(pool.size());
        std::size_t b = rng.below(pool.size() - 1);
        if (b >= a) ++b;
        KExprPtr merged = kx_oplus(pool[a], pool[b]);
        const auto ops = 1 + rng.below(3);
        for (std::uint64_t i = 0; i < ops; ++i) merged = unary(std::move(merged));
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::max(a, b)));
        pool[std::min(a, b)] = std::move(merged);
    }
    KExprPtr e = pool.front();
    const auto tail = rng.below(3);
    for (std::uint64_t i = 0; i < tail; ++i) e = unary(std::move(e));
    return e;
}

struct CspParams {
    std::uint32_t variables = 5;
    std::uint32_t domain = 3;
    std::uint32_t max_arity = 3;
    std::uint32_t max_bag = 3;  // bag size cap, so width <= max_bag - 1
    std::uint64_t seed = 1;
};

struct GeneratedCsp {
    CspInstance instance;
    TreeDecomposition td;
};

/// Random instance with a decomposition built alongside it: bag i holds
/// variable i plus a random part of an earlier bag (its tree parent), and
/// every scope is drawn from inside one bag.
inline GeneratedCsp generate_csp(const CspParams& p) {
    if (p.variables < 1 || p.variables > 12) throw UsageError("generated instances need 1..12 variables");
    if (p.domain < 1 || p.domain > 6) throw UsageError("generated instances need 1..6 domain values");
    if (p.max_arity < 1 || p.max_arity > 4) throw UsageError("generated arity must be in 1..4");
    if (p.max_bag < 1) throw UsageError("bag cap must be positive");
    SeededRng rng(p.seed);
    GeneratedCsp out;
    for (std::uint32_t v = 0; v < p.variables; ++v) out.instance.variables.push_back("x" + std::to_string(v + 1));
    for (std::uint32_t d = 0; d < p.domain; ++d) out.instance.domain.push_back(std::to_string(d + 1));

    auto& bags = out.td.bags;
    for (std::uint32_t v = 0; v < p.variables; ++v) {
        std::vector<std::uint32_t> bag{v};
        if (v > 0) {
            const auto parent = static_cast<std::uint32_t>(rng.below(v));
            std::vector<std::uint32_t> inherited = bags[parent];
            rng.shuffle(inherited);
            // At least one shared vertex when bags may grow, so the Gaifman graph
            // tends to be connected.
            const std::size_t cap = std::min<std::size_t>(inherited.size(), p.max_bag - 1);
            const auto keep = cap == 0 ? 0 : 1 + rng.below(cap);
            bag.insert(bag.end(), inherited.begin(), inherited.begin() + static_cast<std::ptrdiff_t>(keep));
            out.td.edges.emplace_back(parent, v);
        }
        std::sort(bag.begin(), bag.end());
        bags.push_back(std::move(bag));
    }

    const auto n_constraints = rng.below(p.variables + 1) + 1;
    for (std::uint64_t c = 0; c < n_constraints; ++c) {
        std::vector<std::uint32_t> scope = bags[rng.below(bags.size())];
        rng.shuffle(scope);
        const std::size_t widest = std::min<std::size_t>(scope.size(), p.max_arity);
        const auto arity = rng.chance(2, 3) ? widest : rng.below(widest) + 1;
        scope.resize(arity);
        Constraint con{scope, {}};
        std::size_t size = 1;
        for (std::size_t i = 0; i < arity; ++i) size *= p.domain;
        // Dense relations keep most instances satisfiable.
        for (std::size_t i = 0; i < size; ++i)
            if (rng.chance(3, 4)) con.tuples.insert(tuple_at(i, arity, p.domain));
        out.instance.constraints.push_back(std::move(con));
    }
    return out;
}

/// Random element of a base semiring (bool, nat or trop), small magnitudes.
inline Value random_value(SeededRng& rng, const Semiring& s) {
    switch (s.kind()) {
        case SemiringKind::boolean: return Value::boolean(rng.chance(1, 2));
        case SemiringKind::natural: return Value::natural(rng.below(4));
        case SemiringKind::tropical:
            return Value::tropical(rng.chance(1, 8) ? Cost::infinity() : Cost(rng.between(0, 5)));
        default: throw UsageError("random_value supports bool, nat and trop only");
    }
}

/// Random valuations on the scopes of a generated instance.
inline SumProductInstance random_sum_product(const CspInstance& csp, const Semiring& s, std::uint64_t seed) {
    SeededRng rng(seed);
    SumProductInstance sp{csp.variables, csp.domain, s, {}};
    for (const Constraint& c : csp.constraints) {
        ValuedConstraint vc{c.scope, {}};
        std::size_t size = 1;
        for (std::size_t i = 0; i < c.scope.size(); ++i) size *= csp.domain.size();
        for (std::size_t i = 0; i < size; ++i) vc.table.push_back(random_value(rng, s));
        sp.constraints.push_back(std::move(vc));
    }
    return sp;
}

}  // namespace semidp
