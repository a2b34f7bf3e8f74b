#pragma once

// Measures are represented by their S x T matrix M[s,t] = mu({s -> t}); the
// measure of a set F is then sum_{f in F} prod_{s in dom f} M[s, f(s)].

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "expr.hpp"

namespace semidp {

class MeasureMatrix {
public:
    MeasureMatrix(std::shared_ptr<const Universe> universe, Semiring semiring, std::vector<Value> entries)
        : universe_(std::move(universe)), semiring_(std::move(semiring)), entries_(std::move(entries)) {
        if (!universe_) throw UsageError("null universe");
        if (entries_.size() != universe_->domain_size() * universe_->codomain_size())
            throw UsageError("measure matrix is not total over S x T");
        for (const Value& v : entries_)
            if (!(v.semiring() == semiring_))
                throw UsageError("matrix entry " + v.to_string() + " is not in " + semiring_.to_string());
    }

    /// Matrix filled by a callable (s, t) -> Value.
    template <class Fn>
    static MeasureMatrix generate(std::shared_ptr<const Universe> universe, Semiring semiring, Fn&& fn) {
        std::vector<Value> entries;
        entries.reserve(universe->domain_size() * universe->codomain_size());
        for (std::uint32_t s = 0; s < universe->domain_size(); ++s)
            for (std::uint32_t t = 0; t < universe->codomain_size(); ++t) entries.push_back(fn(s, t));
        return MeasureMatrix(std::move(universe), std::move(semiring), std::move(entries));
    }

    const Universe& universe() const noexcept { return *universe_; }
    const std::shared_ptr<const Universe>& universe_ptr() const noexcept { return universe_; }
    const Semiring& semiring() const noexcept { return semiring_; }

    const Value& at(std::uint32_t s, std::uint32_t t) const {
        if (s >= universe_->domain_size() || t >= universe_->codomain_size())
            throw UsageError("measure matrix index out of range");
        return entries_[s * universe_->codomain_size() + t];
    }

private:
    std::shared_ptr<const Universe> universe_;
    Semiring semiring_;
    std::vector<Value> entries_;
};

/// Boolean matrix of all T: the measure is "F is non-empty".
inline MeasureMatrix decision_measure(std::shared_ptr<const Universe> u) {
    return MeasureMatrix::generate(std::move(u), Semiring::boolean(),
                                   [](auto, auto) { return Value::boolean(true); });
}

/// Natural matrix of all 1: the measure is |F|.
inline MeasureMatrix counting_measure(std::shared_ptr<const Universe> u) {
    return MeasureMatrix::generate(std::move(u), Semiring::natural(),
                                   [](auto, auto) { return Value::natural(1); });
}

/// Boolean matrix with M[s,t] = T iff t is in allowed[s].
inline MeasureMatrix list_measure(std::shared_ptr<const Universe> u,
                                  const std::vector<std::vector<std::uint32_t>>& allowed) {
    if (allowed.size() != u->domain_size()) throw UsageError("list measure needs one list per domain element");
    std::vector<std::vector<char>> ok(u->domain_size(), std::vector<char>(u->codomain_size(), 0));
    for (std::size_t s = 0; s < allowed.size(); ++s)
        for (auto t : allowed[s]) {
            if (t >= u->codomain_size()) throw UsageError("list measure: codomain index out of range");
            ok[s][t] = 1;
        }
    return MeasureMatrix::generate(std::move(u), Semiring::boolean(),
                                   [&](auto s, auto t) { return Value::boolean(ok[s][t] != 0); });
}

/// Row-major S x T table of extended costs.
using CostTable = std::vector<Cost>;

inline MeasureMatrix cost_measure(std::shared_ptr<const Universe> u, const CostTable& costs) {
    if (costs.size() != u->domain_size() * u->codomain_size()) throw UsageError("cost table is not total");
    const std::size_t width = u->codomain_size();
    return MeasureMatrix::generate(std::move(u), Semiring::tropical(),
                                   [&](auto s, auto t) { return Value::tropical(costs[s * width + t]); });
}

/// Entry-wise w[s,t] delta mu[s,t]; w must be valued in a dioid.
inline MeasureMatrix delta_measure(const MeasureMatrix& w, const MeasureMatrix& mu) {
    if (!(w.universe() == mu.universe())) throw UsageError("delta_measure: universe mismatch");
    if (!w.semiring().is_dioid()) throw UsageError("delta_measure: " + w.semiring().to_string() + " is not a dioid");
    const Semiring s = Semiring::delta(w.semiring(), mu.semiring());
    return MeasureMatrix::generate(w.universe_ptr(), s,
                                   [&](auto i, auto j) { return delta_pack(s, w.at(i, j), mu.at(i, j)); });
}

/// Cartesian product of two measures.
inline MeasureMatrix product_measure(const MeasureMatrix& m1, const MeasureMatrix& m2) {
    if (!(m1.universe() == m2.universe())) throw UsageError("product_measure: universe mismatch");
    const Semiring s = Semiring::product(m1.semiring(), m2.semiring());
    return MeasureMatrix::generate(m1.universe_ptr(), s,
                                   [&](auto i, auto j) { return Value::pair(s, m1.at(i, j), m2.at(i, j)); });
}

struct MinCostCount {
    Cost min_cost;
    Natural count;
    friend bool operator==(const MinCostCount&, const MinCostCount&) = default;
};

/// Minimum cost over [e] and the number of functions attaining it, in one
/// evaluation of (costs delta #) x #. When every member costs infinity the
/// delta part is (inf, 0) and all members are minimal, so the plain count is
/// reported.
inline MinCostCount count_min_cost(const ExprStore& store, ExprHandle e, const MeasureMatrix& costs) {
    if (costs.semiring().kind() != SemiringKind::tropical) throw UsageError("count_min_cost needs tropical costs");
    const MeasureMatrix counting = counting_measure(costs.universe_ptr());
    const MeasureMatrix m = product_measure(delta_measure(costs, counting), counting);
    const Value v = evaluate(store, e, m);
    const Cost min = v.first().first().as_cost();
    if (min.is_infinite()) return {min, v.second().as_natural()};
    return {min, v.first().second().as_natural()};
}

// ---------------------------------------------------------------------------
// Weight families for #Min-Card / #Min-Weight / #Min-Lex over a Boolean codomain.

struct MinCard {};
struct MinWeight {
    std::vector<std::int64_t> weights;  // per domain element, non-negative
};
struct MinLex {
    std::vector<std::uint32_t> order;  // x_1 .. x_l as domain indices
};
using WeightFamily = std::variant<MinCard, MinWeight, MinLex>;

/// Cost table with W[x, true] = w(x) and W[x, other] = 0.
inline CostTable sat_weight_table(const Universe& u, std::uint32_t true_value, const WeightFamily& family) {
    if (u.codomain_size() != 2) throw UsageError("weight families need a two-element codomain");
    if (true_value >= 2) throw UsageError("true value index out of range");
    std::vector<std::int64_t> w(u.domain_size(), 0);
    if (std::holds_alternative<MinCard>(family)) {
        std::fill(w.begin(), w.end(), 1);
    } else if (const auto* mw = std::get_if<MinWeight>(&family)) {
        if (mw->weights.size() != u.domain_size()) throw UsageError("one weight per variable expected");
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (mw->weights[i] < 0) throw UsageError("weights must be non-negative");
            w[i] = mw->weights[i];
        }
    } else {
        const auto& order = std::get<MinLex>(family).order;
        const std::size_t l = order.size();
        if (l > 62) throw OverflowError("min-lex over more than 62 variables exceeds 64-bit costs");
        for (std::size_t i = 0; i < l; ++i) {
            if (order[i] >= u.domain_size()) throw UsageError("min-lex variable out of range");
            if (w[order[i]] != 0) throw UsageError("min-lex variables must be distinct");
            w[order[i]] = std::int64_t{1} << (l - 1 - i);  // 2^(l - i) for 1-based i
        }
    }
    CostTable table(u.domain_size() * 2, Cost(0));
    for (std::size_t s = 0; s < w.size(); ++s) table[s * 2 + true_value] = Cost(w[s]);
    return table;
}

}  // namespace semidp
