#include <gtest/gtest.h>

#include "laws.hpp"

using namespace semidp;
using namespace testing_support;

namespace {

struct CdsFixture {
    std::shared_ptr<const Universe> universe;
    ExprStore store;
    ExprHandle root;
};

CdsFixture cds_of(const std::string& file) {
    const KExprPtr e = read_kexpr(fixture(file));
    CdsFixture out{indicator_universe(*e), ExprStore(indicator_universe(*e)), {}};
    out.root = solve_semiring_cds(out.store, *e);
    return out;
}

MeasureMatrix unit_costs(const std::shared_ptr<const Universe>& u) {
    return MeasureMatrix::generate(u, Semiring::tropical(), [](auto, auto t) { return Value::tropical(Cost(t == 1 ? 1 : 0)); });
}

Value delta_nat(Cost c, Natural n) {
    return delta_pack(parse_semiring("delta(trop,nat)"), Value::tropical(c), Value::natural(std::move(n)));
}

}  // namespace

TEST(Constructors, DecisionAndCounting) {
    const auto u = square_universe(3);
    ExprStore store(u);
    EXPECT_EQ(evaluate(store, store.make_empty(), decision_measure(u)), Value::boolean(false));
    EXPECT_EQ(evaluate(store, store.make_leaf("1", "1"), decision_measure(u)), Value::boolean(true));
    EXPECT_EQ(evaluate(store, all_functions_expr(store), counting_measure(u)), Value::natural(27));
    EXPECT_EQ(evaluate(store, store.make_unit(), counting_measure(u)), Value::natural(1));

    auto k3 = cds_of("k3.kx");
    EXPECT_EQ(evaluate(k3.store, k3.root, decision_measure(k3.universe)), Value::boolean(true));
    EXPECT_EQ(evaluate(k3.store, k3.root, counting_measure(k3.universe)), Value::natural(7));
}

TEST(Constructors, Lists) {
    const auto u = std::make_shared<const Universe>(std::vector<std::string>{"a", "b", "c"},
                                                    std::vector<std::string>{"1", "2"});
    ExprStore store(u);
    const auto all = all_functions_expr(store);
    EXPECT_EQ(evaluate(store, all, list_measure(u, {{}, {}, {}})), Value::boolean(false));
    EXPECT_EQ(evaluate(store, all, list_measure(u, {{0, 1}, {0, 1}, {0, 1}})),
              evaluate(store, all, decision_measure(u)));
    EXPECT_THROW(list_measure(u, {{0}, {0}}), UsageError);
    EXPECT_THROW(list_measure(u, {{0}, {5}, {0}}), UsageError);
    const MeasureMatrix from_file = read_matrix(fixture("p3.lists"), u);
    EXPECT_EQ(write_matrix(from_file), write_matrix(list_measure(u, {{0}, {0, 1}, {0}})));
}

TEST(Constructors, Costs) {
    auto p3 = cds_of("p3.kx");
    EXPECT_EQ(evaluate(p3.store, p3.root, unit_costs(p3.universe)), Value::tropical(Cost(1)));
    const auto zeros = MeasureMatrix::generate(p3.universe, Semiring::tropical(), [](auto, auto) { return Value::tropical(Cost(0)); });
    EXPECT_EQ(evaluate(p3.store, p3.root, zeros), Value::tropical(Cost(0)));
    const auto blocked = MeasureMatrix::generate(p3.universe, Semiring::tropical(), [](auto s, auto) {
        return Value::tropical(s == 0 ? Cost::infinity() : Cost(0));
    });
    EXPECT_EQ(evaluate(p3.store, p3.root, blocked), Value::tropical(Cost::infinity()));
    EXPECT_THROW(cost_measure(p3.universe, CostTable(2, Cost(0))), UsageError);
}

TEST(Constructors, Delta) {
    const auto u = square_universe(1);
    const auto one_cost = MeasureMatrix::generate(u, Semiring::tropical(), [](auto, auto) { return Value::tropical(Cost(1)); });
    const auto inf_cost =
        MeasureMatrix::generate(u, Semiring::tropical(), [](auto, auto) { return Value::tropical(Cost::infinity()); });
    EXPECT_EQ(delta_measure(one_cost, counting_measure(u)).at(0, 0), delta_nat(Cost(1), 1));
    const Value packed = delta_measure(inf_cost, counting_measure(u)).at(0, 0);
    EXPECT_TRUE(packed.first().as_cost().is_infinite());
    EXPECT_EQ(packed.second(), Value::natural(0));
    EXPECT_THROW(delta_measure(counting_measure(u), counting_measure(u)), UsageError);
    EXPECT_THROW(delta_measure(one_cost, counting_measure(square_universe(2))), UsageError);

    auto p3 = cds_of("p3.kx");
    const auto dm = delta_measure(unit_costs(p3.universe), counting_measure(p3.universe));
    EXPECT_EQ(evaluate(p3.store, p3.root, dm), delta_nat(Cost(1), 1));
}

TEST(Constructors, Product) {
    auto p3 = cds_of("p3.kx");
    const auto count = counting_measure(p3.universe);
    const auto pm = product_measure(delta_measure(unit_costs(p3.universe), count), count);
    const Value v = evaluate(p3.store, p3.root, pm);
    EXPECT_EQ(v.first(), delta_nat(Cost(1), 1));
    EXPECT_EQ(v.second(), Value::natural(4));
    EXPECT_EQ(pm.at(0, 1).first(), delta_nat(Cost(1), 1));
    EXPECT_EQ(pm.at(0, 1).second(), Value::natural(1));
    const Value z = zero(pm.semiring());
    EXPECT_EQ(z.first(), zero(pm.semiring().first()));
    EXPECT_EQ(z.second(), Value::natural(0));
}

TEST(CountMinCost, Examples) {
    auto p3 = cds_of("p3.kx");
    EXPECT_EQ(count_min_cost(p3.store, p3.root, unit_costs(p3.universe)), (MinCostCount{Cost(1), 1}));
    auto k3 = cds_of("k3.kx");
    EXPECT_EQ(count_min_cost(k3.store, k3.root, unit_costs(k3.universe)), (MinCostCount{Cost(1), 3}));
    EXPECT_EQ(count_min_cost(k3.store, k3.store.make_empty(), unit_costs(k3.universe)),
              (MinCostCount{Cost::infinity(), 0}));
    // Every solution infinitely expensive: all of them count as minimal.
    const auto inf = MeasureMatrix::generate(k3.universe, Semiring::tropical(),
                                             [](auto, auto) { return Value::tropical(Cost::infinity()); });
    EXPECT_EQ(count_min_cost(k3.store, k3.root, inf), (MinCostCount{Cost::infinity(), 7}));
    EXPECT_THROW(count_min_cost(k3.store, k3.root, counting_measure(k3.universe)), UsageError);
}

TEST(CountMinCost, AgreesWithScan) {
    SeededRng rng(77);
    for (const auto& item : kexpr_corpus(40)) {
        const auto u = indicator_universe(*item.expr);
        ExprStore store(u);
        const ExprHandle root = solve_semiring_cds(store, *item.expr);
        const FunctionSet fs = *materialize(store, root, 1U << 20, 1U << 20).set;
        const MeasureMatrix costs = random_costs(rng, u);
        const ArgminResult scan = argmin_scan(fs, costs);
        const MinCostCount got = count_min_cost(store, root, costs);
        EXPECT_EQ(Value::tropical(got.min_cost), scan.min) << item.name;
        const Natural expected = scan.min.as_cost().is_infinite() ? Natural(fs.size()) : Natural(scan.set.size());
        EXPECT_EQ(got.count, expected) << item.name;
    }
}

TEST(WeightFamilies, Tables) {
    const auto u = std::make_shared<const Universe>(std::vector<std::string>{"x1", "x2", "x3"},
                                                    std::vector<std::string>{"F", "T"});
    const CostTable card = sat_weight_table(*u, 1, MinCard{});
    for (std::size_t s = 0; s < 3; ++s) {
        EXPECT_EQ(card[s * 2 + 1], Cost(1));
        EXPECT_EQ(card[s * 2], Cost(0));
    }
    const CostTable lex = sat_weight_table(*u, 1, MinLex{{0, 1, 2}});
    EXPECT_EQ(lex[1], Cost(4));
    EXPECT_EQ(lex[3], Cost(2));
    EXPECT_EQ(lex[5], Cost(1));

    ExprStore store(u);
    const auto all = all_functions_expr(store);
    const auto zero_weights = cost_measure(u, sat_weight_table(*u, 1, MinWeight{{0, 0, 0}}));
    EXPECT_EQ(count_min_cost(store, all, zero_weights), (MinCostCount{Cost(0), 8}));
    EXPECT_EQ(count_min_cost(store, all, cost_measure(u, lex)), (MinCostCount{Cost(0), 1}));

    EXPECT_THROW(sat_weight_table(*u, 1, MinWeight{{1, -1, 0}}), UsageError);
    EXPECT_THROW(sat_weight_table(*u, 1, MinLex{{0, 0}}), UsageError);
    EXPECT_THROW(sat_weight_table(*square_universe(3), 1, MinCard{}), UsageError);
    std::vector<std::string> many;
    for (int i = 0; i < 63; ++i) many.push_back("x" + std::to_string(i));
    const Universe wide(many, {"F", "T"});
    std::vector<std::uint32_t> order(63);
    for (std::uint32_t i = 0; i < 63; ++i) order[i] = i;
    EXPECT_THROW(sat_weight_table(wide, 1, MinLex{order}), OverflowError);
    order.pop_back();
    EXPECT_NO_THROW(sat_weight_table(wide, 1, MinLex{order}));
}

TEST(MeasureLaws, RandomFunctionSets) {
    const auto failure = check_measure_axioms(400, 12);
    EXPECT_FALSE(failure.has_value()) << failure.value_or("");
}

TEST(MatrixIo, RoundTrip) {
    SeededRng rng(5);
    const auto u = square_universe(3);
    for (const Semiring& s : axiom_descriptors()) {
        const MeasureMatrix m = random_matrix(rng, u, s);
        const std::string text = write_matrix(m);
        EXPECT_EQ(write_matrix(read_matrix(text)), text) << s.to_string();
        EXPECT_EQ(write_matrix(read_matrix(text, u)), text);
    }
}

TEST(MatrixIo, Errors) {
    EXPECT_THROW(read_matrix("a 1 T\n"), ParseError);
    EXPECT_THROW(read_matrix("semiring: bool\n"), ParseError);
    EXPECT_THROW(read_matrix("semiring: frob\na 1 T\n"), ParseError);
    EXPECT_THROW(read_matrix("semiring: bool\na 1 T\na 1 F\n"), ParseError);
    EXPECT_THROW(read_matrix("semiring: bool\na 1 T\nb 2 F\n"), ParseError);  // missing pairs
    EXPECT_THROW(read_matrix("semiring: nat\na 1 -3\n"), ParseError);
    EXPECT_THROW(read_matrix("semiring: bool\na 1\n"), ParseError);
    try {
        read_matrix("semiring: trop\n# note\na 1 zz\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 3U);
    }
    const auto u = square_universe(1);
    EXPECT_THROW(read_matrix("semiring: nat\n1 1 2\nq 1 2\n", u), ParseError);
    EXPECT_EQ(read_matrix("semiring: nat\n\n1 1 2\n", u).at(0, 0), Value::natural(2));
}
