#pragma once

#include <bincsp/core.hpp>
#include <bincsp/gen.hpp>

#include <numeric>

// Small hand-built problems reproducing the worked examples, shared by unit and
// acceptance tests.
namespace fixtures {

using namespace bincsp;

inline auto binary_vars(Problem & p, int count, int first_index = 1) -> void
{
    for (int i = 0; i < count; ++i)
        p.add_variable("x" + std::to_string(first_index + i), 2);
}

// Six 0/1 variables: x1+x2+x6=1, x1-x3+x4=1, x4+x5-x6>=1, x2+x5-x6=0.
inline auto six_var_linear() -> Problem
{
    Problem p;
    binary_vars(p, 6);
    p.add_predicate({0, 1, 5}, Linear{{1, 1, 1}, Relation::eq, 1});
    p.add_predicate({0, 2, 3}, Linear{{1, -1, 1}, Relation::eq, 1});
    p.add_predicate({3, 4, 5}, Linear{{1, 1, -1}, Relation::ge, 1});
    p.add_predicate({1, 4, 5}, Linear{{1, 1, -1}, Relation::eq, 0});
    return p;
}

// Two dual variables over (x1,x2,x3) and (x1,x4,x5), all domains {0,1,2}; every
// tuple is allowed, so each partition towards the other has three groups.
inline auto shared_first_variable() -> Problem
{
    Problem p;
    for (int i = 1; i <= 5; ++i)
        p.add_variable("x" + std::to_string(i), 3);
    std::vector<Tuple> all;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                all.push_back({a, b, c});
    p.add_extension({0, 1, 2}, all);
    p.add_extension({0, 3, 4}, all);
    return p;
}

// c1(x0,x1,x3), c2(x2,x3,x4), c3(x2,x4,x5). The leading tuple of c2 is the only one
// with x3=0 and has no partner in c3; the two leading tuples of c1 need x3=0.
inline auto pw_saving() -> Problem
{
    Problem p;
    p.add_variable("x0", 2);
    p.add_variable("x1", 2);
    p.add_variable("x2", 3);
    p.add_variable("x3", 2);
    p.add_variable("x4", 3);
    p.add_variable("x5", 1);
    p.add_extension({0, 1, 3}, {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}});
    p.add_extension({2, 3, 4}, {{0, 0, 0}, {0, 1, 1}, {0, 1, 2}, {1, 1, 0}, {1, 1, 1}, {2, 1, 0}, {2, 1, 1}});
    p.add_extension({2, 4, 5}, {{0, 1, 0}, {0, 2, 0}, {1, 0, 0}, {1, 1, 0}, {2, 0, 0}, {2, 1, 0}});
    return p;
}

// Two constraints sharing x1,x2,x3: even parity of the three in one, odd in the other.
// Insoluble, yet every single instantiation leaves a GAC problem.
inline auto singleton_consistent_insoluble() -> Problem
{
    Problem p;
    binary_vars(p, 5);
    std::vector<Tuple> even, odd;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    ((a + b + c) % 2 == 0 ? even : odd).push_back({a, b, c, d});
    p.add_extension({0, 1, 2, 3}, even);
    p.add_extension({0, 1, 2, 4}, odd);
    return p;
}

// x1,x2,x4 in {0,1}, x3 in {0..9}; c1(x1,x2,x3) pairs x2=0 with x1=1 and x2=1 with
// x1=0, c2(x1,x2,x4) only allows x2=0. Propagating D(x1)={0} wipes out.
inline auto early_dual_wipeout() -> Problem
{
    Problem p;
    p.add_variable("x1", 2);
    p.add_variable("x2", 2);
    p.add_variable("x3", 10);
    p.add_variable("x4", 2);
    std::vector<Tuple> c1;
    for (int v = 0; v < 10; ++v) {
        c1.push_back({0, 1, v});
        c1.push_back({1, 0, v});
    }
    p.add_extension({0, 1, 2}, c1);
    p.add_extension({0, 1, 3}, {{0, 0, 0}, {1, 0, 1}});
    return p;
}

inline auto early_dual_wipeout_start(const Problem & p) -> DomainState
{
    auto s = DomainState::full(p);
    s.vars[0].reset(1);
    return s;
}

// c1(x1,x2,x3,x4) and c2(x1,x2,x3,x5) over {0,1}; after x1=0 the surviving tuples
// disagree on (x2,x3).
inline auto double_beats_hidden() -> Problem
{
    Problem p;
    binary_vars(p, 5);
    p.add_extension({0, 1, 2, 3}, {{0, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 1}});
    p.add_extension({0, 1, 2, 4}, {{0, 0, 0, 0}, {0, 1, 1, 1}, {1, 0, 0, 0}});
    return p;
}

// One row of three cells and a two-word dictionary.
inline auto toy_crossword() -> Problem
{
    return gen_crossword({{"..."}, {"cat", "dog"}});
}

} // namespace fixtures
