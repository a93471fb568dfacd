#include <bincsp/bench.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bincsp;

namespace {
    auto parity_matrix(int largest) -> std::vector<MatrixEntry>
    {
        std::vector<MatrixEntry> m;
        for (int n = 2; n <= largest; ++n) {
            MatrixEntry e;
            e.generator = GeneratorSpec{"parity", {{"n", std::to_string(n)}}, 0};
            e.algorithms = {"MHAC-2001", "MAC-PW-ACd"};
            e.ordering = Ordering::fixed;
            m.push_back(e);
        }
        return m;
    }

    auto slurp(const std::filesystem::path & p) -> std::string
    {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }
}

TEST_CASE("parity matrix gives six insoluble rows")
{
    // MHAC-2001 needs about 1.9e8 nodes at n=4; this case takes minutes.
    auto report = run_matrix(parity_matrix(4), {1, true});
    REQUIRE(report.runs.size() == 6);
    for (auto & r : report.runs) {
        CHECK(r.verdict == "UNSAT");
        CHECK(r.ordering == "fixed");
        CHECK(r.time_ms == 0);
        CHECK(r.nodes > 0);
        CHECK(r.mem_bytes > 0);
    }
    CHECK(report.runs[0].instance == "parity:n=2/0");
    CHECK(report.runs[0].algorithm == "MHAC-2001");
    CHECK(report.runs[1].algorithm == "MAC-PW-ACd");
    auto csv = emit_csv(report.runs);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("an empty matrix writes only the header")
{
    auto report = run_matrix({}, {1, true});
    CHECK(report.runs.empty());
    CHECK(emit_csv(report.runs) == std::string{csv_header} + "\n");
}

TEST_CASE("failing cells become rows")
{
    MatrixEntry e;
    e.generator = GeneratorSpec{"rlfa", {{"topology", "prob1"}, {"adjacent", "1"}}, 0};
    e.algorithms = {"MAC-PW-ACd", "NOT-AN-ALGORITHM", "MAC-hybrid"};
    e.limits.node_limit = 50;
    auto report = run_matrix({e}, {1, true});
    REQUIRE(report.runs.size() == 3);
    CHECK(report.runs[0].verdict == "ERROR");
    CHECK(report.runs[1].verdict == "ERROR");
    CHECK(report.runs[2].verdict != "ERROR");
}

TEST_CASE("limits are reported as verdicts")
{
    MatrixEntry e;
    e.generator = GeneratorSpec{"parity", {{"n", "4"}}, 0};
    e.algorithms = {"MHAC-2001"};
    e.ordering = Ordering::fixed;
    e.limits.node_limit = 5;
    auto report = run_matrix({e}, {1, true});
    REQUIRE(report.runs.size() == 1);
    CHECK(report.runs[0].verdict == "NODE_LIMIT");
    CHECK(report.runs[0].nodes == 5);
}

TEST_CASE("paired runs report node-set inclusion")
{
    MatrixEntry e;
    e.generator = GeneratorSpec{"modelb", parse_params("n=8,d=3,k=3,p=15,q=45"), 0};
    e.algorithms = {};
    e.ordering = Ordering::fixed;
    e.seeds = {0, 1, 2, 3};
    e.pairs = {{"hFC5", "hFC3"}, {"hFC3", "hFC2"}, {"MHAC-2001", "hFC5"}, {"dFC3", "hFC3"}, {"MAC-PW-ACd", "dFC5"}};
    auto report = run_matrix({e}, {1, true});
    CHECK(report.runs.empty());
    REQUIRE(report.inclusions.size() == 20);
    for (auto & r : report.inclusions) {
        CAPTURE(r.instance);
        CAPTURE(r.smaller);
        CHECK(r.holds);
        CHECK(r.smaller_nodes <= r.larger_nodes);
    }
    auto csv = emit_inclusions_csv(report.inclusions);
    CHECK(csv.starts_with("instance,smaller,larger,holds"));
}

TEST_CASE("deterministic reports are byte-identical across runs and job counts")
{
    auto m = parity_matrix(3);
    MatrixEntry rand;
    rand.generator = GeneratorSpec{"modelb", parse_params("n=10,d=4,k=3,p=10,q=50"), 0};
    rand.algorithms = {"MGAC-2001", "MHAC-2001", "MAC-PW-ACd", "hFC3"};
    rand.seeds = {1, 2, 3};
    m.push_back(rand);
    auto a = emit_csv(run_matrix(m, {1, true}).runs);
    auto b = emit_csv(run_matrix(m, {1, true}).runs);
    auto c = emit_csv(run_matrix(m, {3, true}).runs);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(emit_json_summary(parse_csv(a)) == emit_json_summary(parse_csv(b)));
}

TEST_CASE("matrix documents")
{
    auto m = parse_matrix(R"([
      {"generator": {"family": "modelb", "params": "n=10,d=4,k=3,p=10,q=50"},
       "algorithms": ["MGAC-2001", "MAC-PW-ACd"], "ordering": "fixed", "node_limit": 1000,
       "seed": 5, "repeats": 3},
      {"generator": {"family": "parity", "params": {"n": 3}}, "algorithms": ["MHAC-2001"],
       "seeds": [0], "pairs": [["MAC-PW-ACd", "dFC5"]]}
    ])");
    REQUIRE(m.size() == 2);
    CHECK(m[0].seeds == std::vector<std::uint64_t>{5, 6, 7});
    CHECK(m[0].ordering == Ordering::fixed);
    CHECK(m[0].limits.node_limit == 1000);
    CHECK(m[0].generator->params.at("q") == "50");
    CHECK(m[1].generator->params.at("n") == "3");
    CHECK(m[1].pairs.size() == 1);
    CHECK_THROWS_AS(parse_matrix(R"({"not": "a list"})"), ParseError);
    CHECK_THROWS_AS(parse_matrix(R"([{"algorithms": []}])"), ParseError);
}

TEST_CASE("generator specs")
{
    CHECK(instance_id({"modelb", parse_params("n=10,d=4"), 3}) == "modelb:d=4,n=10/3");
    CHECK_THROWS_AS(generate({"modelb", parse_params("n=10,colour=red"), 0}), UsageError);
    CHECK_THROWS_AS(generate({"sudoku", {}, 0}), UsageError);
    CHECK_THROWS_AS(parse_params("n10"), UsageError);
    for (auto & f : generator_families()) {
        CAPTURE(f);
        std::map<std::string, std::string> params;
        if (f == "modelb" || f == "clique")
            params = parse_params("n=10,d=4,k=3,p=10,q=50");
        if (f == "clique")
            params["size"] = "6";
        if (f == "parity")
            params["n"] = "2";
        auto p = generate({f, params, 1});
        CHECK(p.n() > 0);
        p.validate();
    }
}

TEST_CASE("reports land in the output directory")
{
    auto dir = std::filesystem::temp_directory_path() / "bincsp_test_reports";
    std::filesystem::remove_all(dir);
    auto m = parity_matrix(3);
    m[0].pairs = {{"MAC-PW-ACd", "dFC5"}};
    auto report = run_matrix(m, {1, true});
    write_reports(report, dir.string());
    CHECK(slurp(dir / "results.csv") == emit_csv(report.runs));
    CHECK(parse_json_records(slurp(dir / "summary.json")) == report.runs);
    CHECK(std::filesystem::exists(dir / "inclusions.csv"));
    std::filesystem::remove_all(dir);
}
