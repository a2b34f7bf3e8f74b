#pragma once

// Shared corpora and random samplers for the test binaries.

#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "semidp/semidp.hpp"

namespace testing_support {

using namespace semidp;

inline std::string fixture_path(const std::string& name) { return std::string(SEMIDP_FIXTURE_DIR) + "/" + name; }

inline std::string fixture(const std::string& name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct NamedKExpr {
    std::string name;
    KExprPtr expr;
    std::uint32_t k;
};

/// Shipped fixtures plus seeded random k-expressions with k <= 3 and at most
/// 8 vertices.
inline std::vector<NamedKExpr> kexpr_corpus(std::size_t random_count = 60) {
    std::vector<NamedKExpr> out;
    for (const char* f : {"k3.kx", "p3.kx", "single.kx", "edgeless2.kx"}) {
        KExprPtr e = read_kexpr(fixture(f));
        out.push_back({f, e, max_label(*e)});
    }
    SeededRng rng(20240601);
    for (std::size_t i = 0; i < random_count; ++i) {
        // Width 1 only yields edgeless graphs, so keep it rare.
        const auto k = rng.chance(1, 10) ? 1U : static_cast<std::uint32_t>(rng.between(2, 3));
        const auto n = static_cast<std::uint32_t>(rng.between(3, 8));
        KExprPtr e = generate_kexpr({k, n, 1000 + i});
        out.push_back({"random-" + std::to_string(i), e, k});
    }
    return out;
}

struct NamedCsp {
    std::string name;
    CspInstance instance;
    TreeDecomposition td;
};

/// Shipped fixtures plus seeded random instances (<= 6 variables, |D| <= 3,
/// arity <= 3).
inline std::vector<NamedCsp> csp_corpus(std::size_t random_count = 120) {
    std::vector<NamedCsp> out;
    const std::pair<const char*, const char*> files[] = {
        {"triangle_3col.json", "triangle.td"}, {"c5_3col.json", "c5.td"}, {"p3_2col.json", "p3.td"}};
    for (auto [inst, td] : files) {
        CspInstance csp = read_csp(fixture(inst));
        TreeDecomposition t = read_td(fixture(td), csp.variables.size());
        out.push_back({inst, std::move(csp), std::move(t)});
    }
    SeededRng rng(77);
    for (std::size_t i = 0; i < random_count; ++i) {
        CspParams p;
        p.variables = static_cast<std::uint32_t>(rng.between(1, 6));
        p.domain = static_cast<std::uint32_t>(rng.between(1, 3));
        p.max_arity = static_cast<std::uint32_t>(rng.between(2, 3));
        p.max_bag = static_cast<std::uint32_t>(rng.between(2, 4));
        p.seed = 5000 + i;
        GeneratedCsp g = generate_csp(p);
        out.push_back({"random-" + std::to_string(i), std::move(g.instance), std::move(g.td)});
    }
    return out;
}

/// Random element of any descriptor; delta elements are packed.
inline Value random_element(SeededRng& rng, const Semiring& s) {
    switch (s.kind()) {
        case SemiringKind::boolean: return Value::boolean(rng.chance(1, 2));
        case SemiringKind::natural: {
            // Mostly small, sometimes beyond 64 bits.
            if (rng.chance(1, 10)) return Value::natural(Natural(rng.below(UINT64_MAX)) * Natural(rng.below(UINT64_MAX)));
            return Value::natural(rng.below(6));
        }
        case SemiringKind::tropical:
            if (rng.chance(1, 6)) return Value::tropical(Cost::infinity());
            return Value::tropical(Cost(rng.between(-20, 20)));
        case SemiringKind::delta:
            return delta_pack(s, random_element(rng, s.first()), random_element(rng, s.second()));
        case SemiringKind::product:
            return Value::pair(s, random_element(rng, s.first()), random_element(rng, s.second()));
    }
    throw UsageError("unreachable");
}

/// Random measure matrix over u in s.
inline MeasureMatrix random_matrix(SeededRng& rng, std::shared_ptr<const Universe> u, const Semiring& s) {
    return MeasureMatrix::generate(std::move(u), s, [&](auto, auto) { return random_element(rng, s); });
}

/// Non-negative finite tropical costs, so products stay well inside 64 bits.
inline MeasureMatrix random_costs(SeededRng& rng, std::shared_ptr<const Universe> u, bool allow_infinite = true) {
    return MeasureMatrix::generate(std::move(u), Semiring::tropical(), [&](auto, auto) {
        if (allow_infinite && rng.chance(1, 10)) return Value::tropical(Cost::infinity());
        return Value::tropical(Cost(rng.between(0, 4)));
    });
}

/// Random boolean list matrix.
inline MeasureMatrix random_lists(SeededRng& rng, std::shared_ptr<const Universe> u) {
    return MeasureMatrix::generate(std::move(u), Semiring::boolean(),
                                   [&](auto, auto) { return Value::boolean(rng.chance(3, 4)); });
}

/// The five measures of the end-to-end comparisons; count-min-cost is
/// covered through the delta measure.
inline std::vector<std::pair<std::string, MeasureMatrix>> five_measures(SeededRng& rng,
                                                                       const std::shared_ptr<const Universe>& u) {
    const MeasureMatrix costs = random_costs(rng, u);
    return {{"decision", decision_measure(u)},
            {"count", counting_measure(u)},
            {"cost", costs},
            {"deltanat", delta_measure(costs, counting_measure(u))},
            {"list", random_lists(rng, u)}};
}

}  // namespace testing_support
