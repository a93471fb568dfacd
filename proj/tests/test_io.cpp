#include <bincsp/io.hpp>

#include "fixtures.hpp"

#include <doctest.h>

using namespace bincsp;

namespace {
    auto error_of(const std::string & doc) -> std::string
    {
        try {
            parse_instance(doc);
        }
        catch (const ParseError & e) {
            return e.what();
        }
        return {};
    }

    const char * six_var_doc = R"({
      "variables": [
        {"name": "x1", "domain": [0, 1]}, {"name": "x2", "domain": [0, 1]},
        {"name": "x3", "domain": [0, 1]}, {"name": "x4", "domain": [0, 1]},
        {"name": "x5", "domain": [0, 1]}, {"name": "x6", "domain": [0, 1]}
      ],
      "constraints": [
        {"scope": ["x1", "x2", "x6"], "type": "predicate",
         "predicate": {"kind": "linear", "coeffs": [1, 1, 1], "relation": "=", "rhs": 1}},
        {"scope": ["x1", "x3", "x4"], "type": "predicate",
         "predicate": {"kind": "linear", "coeffs": [1, -1, 1], "relation": "=", "rhs": 1}},
        {"scope": ["x4", "x5", "x6"], "type": "predicate",
         "predicate": {"kind": "linear", "coeffs": [1, 1, -1], "relation": ">=", "rhs": 1}},
        {"scope": ["x2", "x5", "x6"], "type": "predicate",
         "predicate": {"kind": "linear", "coeffs": [1, 1, -1], "relation": "=", "rhs": 0}}
      ]
    })";
}

TEST_CASE("the six-variable linear document parses")
{
    auto p = parse_instance(six_var_doc);
    CHECK(p.n() == 6);
    CHECK(p.e() == 4);
    CHECK(expand_predicate(p, p.constraints[2]).size() == 4);
    CHECK(enumerate_solutions(p, SIZE_MAX) == enumerate_solutions(fixtures::six_var_linear(), SIZE_MAX));
}

TEST_CASE("emit then parse is the identity up to canonical order")
{
    std::vector<Problem> corpus{fixtures::six_var_linear(), fixtures::pw_saving(), gen_parity_chain(2), tshirt(),
        gen_model_b({8, 3, 3, 15, 40, 2}), fixtures::toy_crossword()};
    RlfaParams rl;
    rl.not_all_equal = true;
    corpus.push_back(gen_rlfa(rl, 2));
    for (auto & p : corpus) {
        auto text = emit_instance(p);
        auto back = parse_instance(text);
        CHECK(emit_instance(back) == text);
        CHECK(back.n() == p.n());
        CHECK(back.e() == p.e());
        double space = 1;
        for (auto & v : p.variables)
            space *= v.size();
        if (space <= 1e6)
            CHECK(enumerate_solutions(back, SIZE_MAX) == enumerate_solutions(p, SIZE_MAX));
    }
}

TEST_CASE("tuples are written with labels and sorted on read")
{
    auto p = parse_instance(R"({"variables":[{"name":"a","domain":[5,7]},{"name":"b","domain":[1,2]}],
        "constraints":[{"scope":["a","b"],"type":"extension","tuples":[[7,1],[5,2]]}]})");
    CHECK(p.constraints[0].table().rows() == std::vector<Tuple>{{0, 1}, {1, 0}});
    auto text = emit_instance(p);
    CHECK(text.find("7") != std::string::npos);
    CHECK(emit_instance(parse_instance(text)) == text);
}

TEST_CASE("an empty constraint list is trivially soluble")
{
    auto p = parse_instance(R"({"variables":[{"name":"a","domain":[1,2,3]}],"constraints":[]})");
    CHECK(p.e() == 0);
    CHECK(enumerate_solutions(p, SIZE_MAX).size() == 3);
}

TEST_CASE("malformed documents report where they fail")
{
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[0]},{"name":"a","domain":[1]}],"constraints":[]})")
              .starts_with("/variables/1/name: duplicate"));
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[0,1]}],
        "constraints":[{"scope":["a"],"type":"extension","tuples":[[0],[4]]}]})")
              .starts_with("/constraints/0/tuples/1/0:"));
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[0,1]}],
        "constraints":[{"scope":["a"],"type":"predicate","predicate":{"kind":"golomb"}}]})")
              .starts_with("/constraints/0/predicate/kind: unknown predicate kind"));
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[0,1]}],
        "constraints":[{"scope":["z"],"type":"extension","tuples":[]}]})")
              .starts_with("/constraints/0/scope/0:"));
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[]}],"constraints":[]})").starts_with("/variables/0/domain:"));
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[0,1]}],
        "constraints":[{"scope":["a","a"],"type":"extension","tuples":[]}]})")
              .starts_with("/constraints/0/scope/1:"));
    CHECK(error_of(R"({"variables":[{"name":"a","domain":[0,1]}],
        "constraints":[{"scope":["a"],"type":"extension","tuples":[[0,1]]}]})")
              .starts_with("/constraints/0/tuples/0:"));
    CHECK(error_of(R"({"variables": [)").starts_with("document:"));
    CHECK(error_of(R"({"constraints":[]})").starts_with("/: missing field 'variables'"));
}

TEST_CASE("one record gives a header and one row")
{
    RunRecord r{"parity:n=2/0", "MAC-PW-ACd", "double", "fixed", 0, "UNSAT", 6, 10, 20, 30, 0, 4096};
    auto csv = emit_csv({r});
    CHECK(csv == std::string{csv_header} + "\n" + "parity:n=2/0,MAC-PW-ACd,double,fixed,0,UNSAT,6,10,20,30,0.000,4096\n");
    CHECK(emit_csv({}) == std::string{csv_header} + "\n");
}

TEST_CASE("reports parse back to equal records")
{
    std::vector<RunRecord> records;
    for (int i = 0; i < 6; ++i)
        records.push_back({"modelb:n=10/" + std::to_string(i), i % 2 ? "MGAC-2001" : "MHAC-2001", "hidden",
            "heuristic", static_cast<std::uint64_t>(i), i % 3 ? "SAT" : "UNSAT", 10u + i, 100u * i, 7u, 3u,
            0.25 * i, 1024});
    CHECK(parse_csv(emit_csv(records)) == records);
    CHECK(parse_json_records(emit_json_summary(records)) == records);
    CHECK_THROWS_AS(parse_csv("bad,header\n"), ParseError);
}

TEST_CASE("aggregates pool seeds of one class")
{
    CHECK(instance_class("modelb:n=10,d=4/17") == "modelb:n=10,d=4");
    CHECK(instance_class("file.json") == "file.json");
    std::vector<RunRecord> records;
    for (int seed = 0; seed < 100; ++seed)
        for (std::string alg : {"MGAC-2001", "MAC-PW-ACd"})
            records.push_back({"modelb:n=10/" + std::to_string(seed), alg, "", "heuristic",
                static_cast<std::uint64_t>(seed), seed < 40 ? "SAT" : "UNSAT", static_cast<std::uint64_t>(seed), 0, 0,
                0, 2.0, 0});
    auto agg = aggregate(records);
    REQUIRE(agg.size() == 2);
    for (auto & a : agg) {
        CHECK(a.instance_class == "modelb:n=10");
        CHECK(a.runs == 100);
        CHECK(a.mean_nodes == doctest::Approx(49.5));
        CHECK(a.mean_time_ms == doctest::Approx(2.0));
        CHECK(a.sat == 40);
        CHECK(a.unsat == 60);
    }
}
