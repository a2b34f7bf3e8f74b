#include <gtest/gtest.h>

#include <filesystem>

#include "semidp/app.hpp"
#include "support.hpp"

using namespace semidp;
using namespace testing_support;
using nlohmann::json;

namespace {

RunConfig config(const std::string& command) {
    RunConfig cfg;
    cfg.command = command;
    return cfg;
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / ("semidp_app_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Run, SolveCds) {
    RunConfig cfg = config("solve-cds");
    cfg.kexpr_path = fixture_path("k3.kx");
    cfg.measures = {"count", "decision", "cost", "deltanat", "count-min-cost"};
    cfg.check_oracle = true;
    const ResultReport r = run(cfg);
    EXPECT_EQ(r.results["count"], "7");
    EXPECT_EQ(r.results["decision"], "T");
    EXPECT_EQ(r.results["cost"], "1");
    EXPECT_EQ(r.results["deltanat"], "(1,3)");
    EXPECT_EQ(r.results["count-min-cost"], json::parse(R"({"min":1,"count":"3"})"));
    EXPECT_EQ(r.oracle, "agree");
    EXPECT_EQ(r.expr_stats["domain_size"], 3);
    EXPECT_TRUE(r.inputs.contains("kexpr"));

    cfg.command = "solve-ds";
    cfg.kexpr_path = fixture_path("p3.kx");
    cfg.measures = {"count"};
    EXPECT_EQ(run(cfg).results["count"], "5");
    cfg.max_k = 1;
    try {
        run(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(exit_code(e.kind()), 4);
    }
}

TEST(Run, SolveCsp) {
    RunConfig cfg = config("solve-csp");
    cfg.instance_path = fixture_path("c5_3col.json");
    cfg.td_path = fixture_path("c5.td");
    cfg.measures = {"count", "count-min-cost"};
    cfg.costs_path = fixture_path("c5_unit.costs");
    cfg.check_oracle = true;
    const ResultReport r = run(cfg);
    EXPECT_EQ(r.results["count"], "30");
    EXPECT_EQ(r.results["count-min-cost"].dump(), R"({"count":"30","min":5})");
    EXPECT_EQ(r.work["width"], 2);
    EXPECT_EQ(r.work["node_assignment_bound"], "27");

    cfg.costs_path = fixture_path("c5_value.costs");
    cfg.measures = {"cost", "count-min-cost"};
    const ResultReport v = run(cfg);
    // Three colours on an odd cycle: one vertex needs colour 3, so 0+1+0+1+2.
    EXPECT_EQ(v.results["cost"], "4");
    EXPECT_EQ(v.oracle, "agree");

    cfg.costs_path.clear();
    cfg.measures = {"cost"};
    EXPECT_THROW(run(cfg), UsageError);

    cfg.instance_path = fixture_path("p3_2col.json");
    cfg.td_path = fixture_path("p3.td");
    cfg.measures = {"list"};
    cfg.lists_path = fixture_path("p3.lists");
    EXPECT_EQ(run(cfg).results["list"], "T");
}

TEST(Run, SumProductAndEval) {
    RunConfig cfg = config("sum-product");
    cfg.instance_path = fixture_path("xy_sum.json");
    cfg.td_path = fixture_path("xy.td");
    cfg.check_oracle = true;
    const ResultReport r = run(cfg);
    EXPECT_EQ(r.results["value"], "4");
    EXPECT_EQ(r.oracle, "agree");

    RunConfig ev = config("eval-expr");
    ev.expr_path = fixture_path("square2_all.expr");
    ev.matrix_path = fixture_path("square2_count.mat");
    ev.check_oracle = true;
    const ResultReport e = run(ev);
    EXPECT_EQ(e.results["matrix"], "4");
    EXPECT_EQ(e.work["semiring_ops"], 3);
    EXPECT_EQ(e.expr_stats["tree_size"], "4");

    ev.expr_path = fixture_path("square2_fail.expr");
    EXPECT_THROW(run(ev), LegalityError);
    ev.check_oracle = false;
    EXPECT_NO_THROW(run(ev));
    ev.matrix_path.clear();
    EXPECT_THROW(run(ev), UsageError);
}

TEST(Run, OracleAndValidate) {
    RunConfig cfg = config("oracle");
    cfg.kexpr_path = fixture_path("p3.kx");
    cfg.problem = "ds";
    const ResultReport r = run(cfg);
    EXPECT_EQ(r.results["count"], "5");
    EXPECT_EQ(r.oracle, "only");
    cfg.problem = "other";
    EXPECT_THROW(run(cfg), UsageError);

    RunConfig val = config("validate");
    val.instance_path = fixture_path("c5_3col.json");
    val.td_path = fixture_path("p3.td");
    EXPECT_THROW(run(val), ParseError);  // vertex count differs
    val.td_path = fixture_path("c5.td");
    const ResultReport ok = run(val);
    EXPECT_TRUE(ok.ok);
    EXPECT_EQ(ok.results["width"], 2);

    const auto dir = scratch_dir();
    detail::write_file((dir / "bad.td").string(), "s td 2 2 5\nb 1 1 2 3\nb 2 4 5\n1 2\n");
    val.td_path = (dir / "bad.td").string();
    const ResultReport bad = run(val);
    EXPECT_FALSE(bad.ok);
    EXPECT_EQ(bad.results["violated_property"], 2);

    RunConfig kv = config("validate");
    kv.kexpr_path = fixture_path("k3.kx");
    kv.edges_out = (dir / "k3.edges").string();
    EXPECT_EQ(run(kv).results["edges"], 3);
    EXPECT_EQ(detail::read_file(kv.edges_out), "3 3\n1 2\n1 3\n2 3\n");
    kv.k = 1;
    EXPECT_FALSE(run(kv).ok);
    std::filesystem::remove_all(dir);
}

TEST(Run, JsonRoundTrip) {
    RunConfig cfg = config("solve-cds");
    cfg.kexpr_path = fixture_path("p3.kx");
    cfg.measures = {"count", "count-min-cost", "deltanat"};
    const std::string text = run(cfg).render_json();
    EXPECT_EQ(json::parse(text).dump(2) + "\n", text);
    const json j = json::parse(text);
    for (const char* key : {"command", "results", "expr_stats", "work", "timings_us", "inputs", "oracle", "ok"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["results"]["count-min-cost"]["min"], 1);
}

TEST(Run, GenIsDeterministicAndValid) {
    RunConfig cfg = config("gen");
    cfg.gen_kind = "kexpr";
    cfg.k = 2;
    cfg.gen_vertices = 6;
    cfg.seed = 1;
    const std::string first = run(cfg).results["kexpr"];
    EXPECT_EQ(run(cfg).results["kexpr"], first);
    cfg.k = 3;
    cfg.gen_vertices = 8;
    EXPECT_EQ(eval_kexpr(*read_kexpr(run(cfg).results["kexpr"].get<std::string>())).size(), 8U);

    RunConfig csp = config("gen");
    csp.gen_kind = "csp";
    csp.gen_variables = 5;
    csp.gen_domain = 3;
    csp.seed = 7;
    const ResultReport r = run(csp);
    const CspInstance inst = read_csp(r.results["instance"].get<std::string>());
    const TreeDecomposition td = read_td(r.results["td"].get<std::string>(), inst.variables.size());
    EXPECT_TRUE(validate_td(gaifman(inst), td));
    EXPECT_EQ(run(csp).results, r.results);

    csp.gen_kind = "sum-product";
    csp.semiring = "trop";
    EXPECT_EQ(read_sum_product(run(csp).results["instance"].get<std::string>()).semiring, Semiring::tropical());
    csp.gen_variables = 13;
    EXPECT_THROW(run(csp), UsageError);
    csp.gen_kind = "graph";
    EXPECT_THROW(run(csp), UsageError);
}

TEST(Run, ErrorsMapToExitCodes) {
    EXPECT_EQ(exit_code(ErrorKind::usage), 1);
    EXPECT_EQ(exit_code(ErrorKind::parse), 2);
    EXPECT_EQ(exit_code(ErrorKind::legality), 3);
    EXPECT_EQ(exit_code(ErrorKind::resource), 4);
    EXPECT_EQ(exit_code(ErrorKind::mismatch), 5);
    EXPECT_EQ(exit_code(ErrorKind::overflow), 6);
    EXPECT_THROW(run(config("frob")), UsageError);
    RunConfig cfg = config("solve-cds");
    cfg.kexpr_path = fixture_path("missing.kx");
    EXPECT_THROW(run(cfg), UsageError);
    cfg.kexpr_path = fixture_path("k3.kx");
    cfg.check_oracle = true;
    cfg.budget.max_candidates = 4;
    EXPECT_THROW(run(cfg), ResourceError);
}
