#include <bincsp/encode.hpp>

#include "fixtures.hpp"

#include <doctest.h>

using namespace bincsp;

TEST_CASE("hidden encoding has one dual variable per constraint")
{
    auto p = fixtures::six_var_linear();
    auto ep = build_hve(p);
    CHECK(ep.kind == Encoding::hve);
    CHECK(ep.has_originals);
    REQUIRE(ep.duals.size() == 4);
    CHECK(ep.duals[2].tuples.rows() == std::vector<Tuple>{{0, 1, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}});
    CHECK(ep.duals[3].tuples.rows() == std::vector<Tuple>{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}});
    CHECK(ep.hidden.size() == 12);
    CHECK(ep.dual_constraints.empty());
    for (auto & h : ep.hidden)
        CHECK(ep.duals[h.dual].scope[h.pos] == h.var);
}

TEST_CASE("dual encoding links constraints sharing variables")
{
    auto p = fixtures::six_var_linear();
    auto ep = build_de(p);
    CHECK(ep.kind == Encoding::de);
    CHECK_FALSE(ep.has_originals);
    CHECK(ep.hidden.empty());
    // c1-c2 share x1, c1-c4 share x2,x6, c1-c3 share x6, c2-c3 share x4, c3-c4 share x5,x6.
    CHECK(ep.dual_constraints.size() == 5);
    CHECK(ep.decompositions.size() == 2 * ep.dual_constraints.size());
    for (auto & dc : ep.dual_constraints) {
        CHECK(dc.vi < dc.vj);
        for (auto & s : dc.shared) {
            CHECK(ep.duals[dc.vi].scope[s.pos_i] == s.var);
            CHECK(ep.duals[dc.vj].scope[s.pos_j] == s.var);
        }
    }
}

TEST_CASE("piecewise decomposition groups tuples by the shared projection")
{
    auto ep = build_de(fixtures::shared_first_variable());
    REQUIRE(ep.dual_constraints.size() == 1);
    auto & a = ep.decompositions[0];
    auto & b = ep.decompositions[1];
    CHECK(a.groups() == 3);
    CHECK(b.groups() == 3);
    for (int g = 0; g < 3; ++g) {
        CHECK(a.members[g].size() == 9);
        CHECK(b.keys[a.sup[g]] == a.keys[g]);
        CHECK(a.sup[b.sup[g]] == g);
        for (int t : a.members[g])
            CHECK(ep.duals[0].tuples.row(t)[0] == a.keys[g]);
    }
}

TEST_CASE("groups without a partner key have no support")
{
    auto ep = build_de(fixtures::pw_saving());
    // c2 (x2,x3,x4) against c3 (x2,x4,x5): key (x2,x4)=(0,0) exists only in c2.
    int found = 0;
    for (auto & d : ep.decompositions) {
        if (d.owner != 1 || d.peer != 2)
            continue;
        for (int g = 0; g < d.groups(); ++g)
            if (d.sup[g] == Decomposition::none) {
                ++found;
                CHECK(d.members[g] == std::vector<int>{0});
            }
    }
    CHECK(found == 1);
}

TEST_CASE("naive dual fixpoint deletes the unsupported tuples")
{
    auto ep = build_de(fixtures::pw_saving());
    auto r = ac1_dual_fixpoint(ep, ep.state());
    REQUIRE_FALSE(r.wipeout);
    CHECK_FALSE(r.state.duals[1].test(0));
    CHECK_FALSE(r.state.duals[0].test(0));
    CHECK_FALSE(r.state.duals[0].test(1));
    CHECK(r.state.duals[0].count() == 1);
    CHECK(r.state.duals[1].count() == 6);
    CHECK(r.state.duals[2].count() == 6);
}

TEST_CASE("dual fixpoint detects the parity conflict")
{
    auto ep = build_de(fixtures::singleton_consistent_insoluble());
    CHECK(ac1_dual_fixpoint(ep, ep.state()).wipeout);
}

TEST_CASE("double encoding over a subset is a hybrid")
{
    auto p = fixtures::six_var_linear();
    auto full = build_double(p);
    CHECK(full.kind == Encoding::dbl);
    CHECK(full.has_originals);
    CHECK(full.residual.empty());
    CHECK(full.hidden.size() == 12);

    auto part = build_double(p, std::vector<int>{0, 2, 3});
    CHECK(part.kind == Encoding::hybrid);
    CHECK(part.duals.size() == 3);
    CHECK(part.residual == std::vector<int>{1});
    CHECK(part.dual_of_constraint == std::vector<int>{0, -1, 1, 2});
}

TEST_CASE("identical scopes still get a dual constraint")
{
    Problem p;
    p.add_variable("a", 2);
    p.add_variable("b", 2);
    p.add_extension({0, 1}, {{0, 0}, {1, 1}});
    p.add_extension({0, 1}, {{0, 1}, {1, 0}});
    auto ep = build_de(p);
    REQUIRE(ep.dual_constraints.size() == 1);
    CHECK(ep.dual_constraints[0].shared.size() == 2);
    CHECK(ac1_dual_fixpoint(ep, ep.state()).wipeout);
}

TEST_CASE("induced assignment reads values off the chosen tuples")
{
    auto p = fixtures::six_var_linear();
    auto ep = build_de(p);
    std::vector<int> all(p.n());
    std::iota(all.begin(), all.end(), 0);
    for (auto & s : enumerate_solutions(p, SIZE_MAX)) {
        std::vector<int> choice;
        for (auto & d : ep.duals)
            choice.push_back(static_cast<int>(d.tuples.find(project(s, all, d.scope))));
        CHECK(induced_assignment(ep, choice) == s);
    }
}

TEST_CASE("tuple bytes follow arity times rows")
{
    auto ep = build_hve(fixtures::six_var_linear());
    std::size_t expected = 0;
    for (auto & d : ep.duals)
        expected += d.tuples.size() * d.scope.size() * sizeof(Value);
    CHECK(ep.tuple_bytes() == expected);
}

TEST_CASE("oversized predicates cannot be encoded")
{
    Problem p;
    for (int i = 0; i < 8; ++i)
        p.add_variable("f" + std::to_string(i), 20);
    std::vector<int> scope(8);
    std::iota(scope.begin(), scope.end(), 0);
    p.add_predicate(scope, Separation{1});
    CHECK_THROWS_AS(build_hve(p), CapacityError);
}
