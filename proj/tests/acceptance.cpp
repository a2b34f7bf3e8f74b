// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "properties.hpp"

using namespace semidp;
using namespace testing_support;

namespace {

using Check = std::function<std::optional<std::string>(std::string&)>;

std::optional<std::string> expect_equal(const std::string& what, const Value& got, const Value& want) {
    if (got == want) return std::nullopt;
    return what + ": got " + got.to_string() + ", expected " + want.to_string();
}

Value count_cds(const std::string& file, bool connected) {
    const KExprPtr e = read_kexpr(fixture(file));
    ExprStore store(indicator_universe(*e));
    const ExprHandle root = connected ? solve_semiring_cds(store, *e) : solve_semiring_ds(store, *e);
    return evaluate(store, root, counting_measure(store.universe_ptr()));
}

Value count_csp(const std::string& inst, const std::string& td) {
    const CspInstance csp = read_csp(fixture(inst));
    const auto ntd = make_nice(gaifman(csp), read_td(fixture(td), csp.variables.size()));
    ExprStore store(csp.universe());
    return evaluate(store, solve_semiring_csp(store, csp, ntd), counting_measure(store.universe_ptr()));
}

constexpr std::size_t kSamples = 10000;

std::optional<std::string> axioms(std::string& detail) {
    const auto descriptors = axiom_descriptors();
    for (std::size_t i = 0; i < descriptors.size(); ++i)
        if (auto f = check_semiring_axioms(descriptors[i], kSamples, 100 + i)) return f;
    detail = std::to_string(descriptors.size()) + " descriptors x " + std::to_string(kSamples) + " triples";
    return std::nullopt;
}

std::optional<std::string> lexicographic(std::string& detail) {
    for (const char* d : {"delta(trop,trop)", "delta(bool,trop)"})
        if (auto f = check_lexicographic_order(parse_semiring(d), kSamples, 200)) return f;
    detail = "2 dioids x " + std::to_string(kSamples) + " pairs";
    return std::nullopt;
}

std::optional<std::string> associativity(std::string& detail) {
    detail = std::to_string(kSamples) + " pairs";
    return check_delta_associativity(kSamples, 300);
}

std::optional<std::string> kleene(std::string& detail) {
    const int cells = kleene_cells_matching();
    detail = std::to_string(cells) + "/18 cells";
    if (cells != 18) return detail + " reproduced";
    return std::nullopt;
}

std::optional<std::string> evaluation(std::string& detail) {
    for (std::size_t n = 1; n <= 6; ++n) {
        ExprStore store(square_universe(n));
        const ExprHandle e = all_functions_expr(store);
        EvalStats stats;
        Natural expected = 1;
        for (std::size_t i = 0; i < n; ++i) expected *= n;
        const Value v = evaluate(store, e, counting_measure(store.universe_ptr()), &stats);
        if (auto f = expect_equal("n=" + std::to_string(n), v, Value::natural(expected))) return f;
        if (Natural(stats.semiring_ops) > 2 * store.node(e).tree_size)
            return "n=" + std::to_string(n) + ": " + std::to_string(stats.semiring_ops) + " operations exceed twice the tree size";
    }
    detail = "n = 1..6";
    return std::nullopt;
}

std::optional<std::string> cds(std::string& detail) {
    const auto corpus = kexpr_corpus(60);
    if (auto f = check_graph_corpus(corpus, true, 600)) return f;
    if (auto f = expect_equal("K3", count_cds("k3.kx", true), Value::natural(7))) return f;
    if (auto f = expect_equal("P3", count_cds("p3.kx", true), Value::natural(4))) return f;
    const KExprPtr p3 = read_kexpr(fixture("p3.kx"));
    const auto u = indicator_universe(*p3);
    ExprStore store(u);
    const auto unit = MeasureMatrix::generate(u, Semiring::tropical(), [](auto, auto t) { return Value::tropical(Cost(t)); });
    const Value min_cost = evaluate(store, solve_semiring_cds(store, *p3), delta_measure(unit, counting_measure(u)));
    const Value want = delta_pack(min_cost.semiring(), Value::tropical(Cost(1)), Value::natural(1));
    if (auto f = expect_equal("P3 min-cost", min_cost, want)) return f;
    detail = std::to_string(corpus.size()) + " k-expressions x 5 measures, pinned K3=7 P3=4 P3 min-cost=(1,1)";
    return std::nullopt;
}

std::optional<std::string> ds(std::string& detail) {
    const auto corpus = kexpr_corpus(60);
    if (auto f = check_graph_corpus(corpus, false, 700)) return f;
    if (auto f = expect_equal("K3", count_cds("k3.kx", false), Value::natural(7))) return f;
    if (auto f = expect_equal("P3", count_cds("p3.kx", false), Value::natural(5))) return f;
    detail = std::to_string(corpus.size()) + " k-expressions x 5 measures, pinned K3=7 P3=5";
    return std::nullopt;
}

std::optional<std::string> csp(std::string& detail) {
    const auto corpus = csp_corpus(120);
    if (auto f = check_csp_corpus(corpus, 800)) return f;
    if (auto f = expect_equal("triangle", count_csp("triangle_3col.json", "triangle.td"), Value::natural(6))) return f;
    if (auto f = expect_equal("C5", count_csp("c5_3col.json", "c5.td"), Value::natural(30))) return f;
    // List colouring of P3: count the colourings the lists allow.
    const CspInstance p3 = read_csp(fixture("p3_2col.json"));
    const auto u = p3.universe();
    ExprStore store(u);
    const ExprHandle root = solve_semiring_csp(store, p3, make_nice(gaifman(p3), read_td(fixture("p3.td"), 3)));
    const MeasureMatrix lists = read_matrix(fixture("p3.lists"), u);
    if (auto f = expect_equal("P3 lists", evaluate(store, root, lists), Value::boolean(true))) return f;
    const MeasureMatrix allowed_count = MeasureMatrix::generate(u, Semiring::natural(), [&](auto s, auto t) {
        return Value::natural(lists.at(s, t).as_bool() ? 1 : 0);
    });
    if (auto f = expect_equal("P3 list count", evaluate(store, root, allowed_count), Value::natural(1))) return f;
    detail = std::to_string(corpus.size()) + " instances x 5 measures, pinned triangle=6 C5=30 P3 lists=1";
    return std::nullopt;
}

std::optional<std::string> sum_product(std::string& detail) {
    const auto corpus = csp_corpus(120);
    detail = std::to_string(corpus.size()) + " instances x {bool, nat, trop} plus Boolean vs decision";
    return check_sum_product_corpus(corpus, 900);
}

std::optional<std::string> work(std::string& detail) {
    const auto graphs = kexpr_corpus(60);
    const auto csps = csp_corpus(120);
    detail = std::to_string(graphs.size()) + " k-expressions, " + std::to_string(csps.size()) + " instances";
    return check_work_bounds(graphs, csps);
}

std::optional<std::string> traces(std::string& detail) {
    std::vector<NamedKExpr> corpus;
    for (auto& item : kexpr_corpus(60))
        if (item.k <= 3) corpus.push_back(std::move(item));
    std::uint64_t checked = 0;
    if (auto f = check_trace_soundness(corpus, &checked)) return f;
    detail = std::to_string(checked) + " (node, subset) pairs over " + std::to_string(corpus.size()) + " k-expressions";
    return std::nullopt;
}

std::optional<std::string> measure_axioms(std::string& detail) {
    detail = "2000 random universes and function sets";
    return check_measure_axioms(2000, 1200);
}

}  // namespace

int main() {
    const std::pair<int, Check> criteria[] = {
        {1, axioms}, {2, lexicographic}, {3, associativity}, {4, kleene},   {5, evaluation},  {6, cds},
        {7, ds},     {8, csp},           {9, sum_product},   {10, work},    {11, traces},     {12, measure_axioms}};
    int failures = 0;
    for (const auto& [id, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        std::optional<std::string> failure;
        try {
            failure = check(detail);
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        if (failure) {
            ++failures;
            std::cout << "criterion " << id << ": FAIL " << *failure << "\n";
        } else {
            std::cout << "criterion " << id << ": PASS " << detail << " (" << ms << " ms)\n";
        }
    }
    return failures == 0 ? 0 : 1;
}
