#include <bincsp/encode.hpp>
#include <bincsp/gen.hpp>
#include <bincsp/io.hpp>
#include <bincsp/propagate.hpp>

#include "fixtures.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace bincsp;

TEST_CASE("model B counts follow half-up rounding")
{
    ModelBParams m{30, 6, 3, 1.847, 50, 1};
    CHECK(model_b_constraint_count(m) == 75);
    CHECK(model_b_tuple_count(m) == 108);
    auto p = gen_model_b(m);
    CHECK(p.n() == 30);
    CHECK(p.e() == 75);
    CHECK(is_connected(p));
    std::set<std::vector<int>> scopes;
    for (auto & c : p.constraints) {
        CHECK(c.arity() == 3);
        CHECK(c.table().size() == 108);
        CHECK(std::is_sorted(c.scope.begin(), c.scope.end()));
        scopes.insert(c.scope);
    }
    CHECK(scopes.size() == 75);
    for (auto & v : p.variables)
        CHECK(v.size() == 6);
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(2.4999) == 2);
    CHECK(binomial(30, 3) == 4060);
}

TEST_CASE("model B is a pure function of its seed")
{
    ModelBParams m{10, 4, 3, 20, 50, 42};
    CHECK(emit_instance(gen_model_b(m)) == emit_instance(gen_model_b(m)));
    auto other = m;
    other.seed = 43;
    CHECK(emit_instance(gen_model_b(m)) != emit_instance(gen_model_b(other)));
}

TEST_CASE("full looseness gives a trivially soluble instance")
{
    auto p = gen_model_b({10, 4, 3, 20, 100, 3});
    for (auto & c : p.constraints)
        CHECK(c.table().size() == 64);
    CHECK(! enumerate_solutions(p, 1).empty());
}

TEST_CASE("model B rejects parameters that cannot connect")
{
    CHECK_THROWS_AS(gen_model_b({30, 4, 3, 0.1, 50, 0}), UsageError);
}

TEST_CASE("clique embedding")
{
    ModelBParams base{30, 10, 3, 5, 50, 4};
    CHECK(emit_instance(gen_clique_embedded(base, 0, 9)) == emit_instance(gen_model_b(base)));
    auto base_count = gen_model_b(base).e();
    for (int size : {10, 20, 30}) {
        CAPTURE(size);
        auto p = gen_clique_embedded(base, size, 9);
        REQUIRE(p.e() > base_count);
        std::set<int> covered;
        std::set<std::vector<int>> scopes;
        for (auto & c : p.constraints)
            CHECK(scopes.insert(c.scope).second);
        for (int i = base_count; i < p.e(); ++i) {
            covered.insert(p.constraints[i].scope.begin(), p.constraints[i].scope.end());
            for (int j = base_count; j < i; ++j) {
                std::vector<int> shared;
                std::set_intersection(p.constraints[i].scope.begin(), p.constraints[i].scope.end(),
                    p.constraints[j].scope.begin(), p.constraints[j].scope.end(), std::back_inserter(shared));
                CHECK(! shared.empty());
                CHECK(shared.size() <= 2);
            }
        }
        CHECK(static_cast<int>(covered.size()) == size);
    }
    CHECK_THROWS_AS(gen_clique_embedded(base, 31, 9), UsageError);
}

TEST_CASE("crossword slots and letters")
{
    std::vector<std::string> blank(6, std::string(6, '.'));
    auto p = gen_crossword({blank, bundled_dictionary()});
    CHECK(p.n() == 36);
    CHECK(p.e() == 12);
    CHECK(crossword_slots(blank).size() == 12);
    for (auto & v : p.variables)
        CHECK(v.size() == 26);
    auto de = build_de(p);
    CHECK(de.duals.size() == 12);
    for (auto & dc : de.dual_constraints)
        CHECK(dc.shared.size() == 1);

    auto grid = bundled_grid();
    REQUIRE(grid.size() == 5);
    auto slots = crossword_slots(grid);
    for (auto & s : slots)
        CHECK(s.size() >= 2);
}

TEST_CASE("toy crossword has one solution per word")
{
    auto p = fixtures::toy_crossword();
    CHECK(p.n() == 3);
    CHECK(p.e() == 1);
    CHECK(enumerate_solutions(p, SIZE_MAX).size() == 2);
}

TEST_CASE("a slot length missing from the dictionary gives an empty relation")
{
    auto p = gen_crossword({{"...."}, {"cat", "dog"}});
    REQUIRE(p.e() == 1);
    CHECK(p.constraints[0].table().size() == 0);
    CHECK(enumerate_solutions(p, 1).empty());
}

TEST_CASE("the bundled dictionary covers the needed lengths")
{
    auto words = bundled_dictionary();
    CHECK(words.size() == 500);
    std::map<std::size_t, int> by_length;
    for (auto & w : words)
        ++by_length[w.size()];
    CHECK(by_length[3] > 0);
    CHECK(by_length[5] > 0);
}

TEST_CASE("parity chain structure")
{
    for (int n = 1; n <= 5; ++n) {
        CAPTURE(n);
        auto p = gen_parity_chain(n);
        CHECK(p.n() == 4 * n + 2);
        CHECK(p.e() == 2 * n + 1);
        for (auto & v : p.variables) {
            REQUIRE(v.size() == n);
            CHECK(v.labels.front() == 1);
            CHECK(v.labels.back() == n);
        }
        for (auto & c : p.constraints)
            CHECK(c.arity() == 4);
        CHECK(is_connected(p));
    }
    CHECK(gac2001(gen_parity_chain(1)).verdict == Verdict::inconsistent);
    CHECK(enumerate_solutions(gen_parity_chain(1), 1).empty());
    CHECK(enumerate_solutions(gen_parity_chain(2), 1).empty());
}

TEST_CASE("frequency assignment topologies")
{
    for (std::string topo : {"prob1", "prob2", "prob3", "prob4", "prob5"}) {
        CAPTURE(topo);
        RlfaParams params;
        params.topology = topo;
        auto p = gen_rlfa(params, 5);
        CHECK(is_connected(p));
        CHECK(emit_instance(p) == emit_instance(gen_rlfa(params, 5)));
        for (auto & v : p.variables)
            CHECK(v.size() == 20);
        for (auto & c : p.constraints) {
            CHECK(c.arity() >= 3);
            CHECK(c.arity() <= 5);
            CHECK_FALSE(c.extensional());
        }
    }
    RlfaParams prob5;
    prob5.topology = "prob5";
    prob5.domain = 25;
    auto p = gen_rlfa(prob5, 1);
    std::map<std::string, int> group_sizes;
    for (auto & v : p.variables)
        ++group_sizes[v.name.substr(0, v.name.find('_'))];
    CHECK(group_sizes.size() == 5);
    for (auto & [g, size] : group_sizes) {
        CHECK(size >= 8);
        CHECK(size <= 10);
    }
    // A 4-ary separation never reaches the full relation.
    for (auto & c : p.constraints)
        if (c.arity() == 4)
            if (auto s = std::get_if<Separation>(&c.predicate()))
                CHECK(s->gap >= 3);

    prob5.adjacent_channel = true;
    prob5.not_all_equal = true;
    auto q = gen_rlfa(prob5, 1);
    int eight = 0, nae = 0;
    for (auto & c : q.constraints) {
        eight += c.arity() == 8;
        nae += ! c.extensional() && std::holds_alternative<NotAllEqual>(c.predicate());
    }
    CHECK(eight == 1);
    CHECK(nae > 0);
    CHECK_THROWS_AS(gen_rlfa({"prob9", 20, false, false}, 0), UsageError);
}

TEST_CASE("configuration-like extension")
{
    auto base = tshirt();
    REQUIRE(base.n() == 3);
    CHECK(base.domain_size(0) == 3);
    CHECK(base.domain_size(1) == 2);
    CHECK(base.domain_size(2) == 3);
    CHECK(base.e() == 2);
    CHECK(emit_instance(gen_config_like(base, 0, 1)) == emit_instance(base));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto p = gen_config_like(base, 6, seed);
        CHECK(p.n() == 9);
        CHECK(p.e() - base.e() >= 8);
        CHECK(p.e() - base.e() <= 10);
        for (int i = base.e(); i < p.e(); ++i) {
            CHECK(p.constraints[i].arity() >= 2);
            CHECK(p.constraints[i].arity() <= 4);
        }
        CHECK(is_connected(p));
        p.validate();
    }
}

TEST_CASE("random draws are bounded and reproducible")
{
    Rng a(7), b(7);
    for (int i = 0; i < 1000; ++i) {
        auto x = a.below(13);
        CHECK(x < 13);
        CHECK(x == b.below(13));
    }
    CHECK_THROWS_AS(a.below(0), UsageError);
}
