#include <bincsp/gen.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace bincsp {

auto Rng::below(std::uint64_t bound) -> std::uint64_t
{
    if (bound == 0)
        throw UsageError{"random draw below zero"};
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = engine_();
        if (x >= threshold)
            return x % bound;
    }
}

auto Rng::chance(double p) -> bool
{
    return static_cast<double>(below(1'000'000)) < p * 1'000'000.0;
}

auto round_half_up(double x) -> std::int64_t
{
    return static_cast<std::int64_t>(std::floor(x + 0.5 + 1e-9));
}

auto binomial(int n, int k) -> std::int64_t
{
    if (k < 0 || k > n)
        return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

auto is_connected(const Problem & p) -> bool
{
    if (p.n() <= 1)
        return true;
    std::vector<int> parent(p.n());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto & c : p.constraints)
        for (std::size_t i = 1; i < c.scope.size(); ++i)
            parent[find(c.scope[i])] = find(c.scope[0]);
    int root = find(0);
    for (int x = 1; x < p.n(); ++x)
        if (find(x) != root)
            return false;
    return true;
}

namespace {
    constexpr int connect_attempts = 1000;
    constexpr std::int64_t max_scope_universe = 5'000'000;
    constexpr std::int64_t max_dense_universe = std::int64_t{1} << 22;

    auto combinations(int n, int k) -> std::vector<std::vector<int>>
    {
        std::vector<std::vector<int>> out;
        std::vector<int> c(k);
        std::iota(c.begin(), c.end(), 0);
        if (k == 0 || k > n)
            return out;
        for (;;) {
            out.push_back(c);
            int i = k - 1;
            while (i >= 0 && c[i] == n - k + i)
                --i;
            if (i < 0)
                return out;
            ++c[i];
            for (int j = i + 1; j < k; ++j)
                c[j] = c[j - 1] + 1;
        }
    }

    // count distinct tuples drawn uniformly over the product of the given domain sizes
    auto random_rows(Rng & rng, const std::vector<int> & sizes, std::int64_t count) -> std::vector<Tuple>
    {
        std::int64_t universe = 1;
        for (int s : sizes)
            universe *= s;
        if (count > universe)
            throw UsageError{"more tuples requested than the scope admits"};
        auto decode = [&](std::int64_t idx) {
            Tuple t(sizes.size());
            for (int i = static_cast<int>(sizes.size()) - 1; i >= 0; --i) {
                t[i] = static_cast<Value>(idx % sizes[i]);
                idx /= sizes[i];
            }
            return t;
        };
        std::vector<Tuple> rows;
        if (universe <= max_dense_universe) {
            std::vector<std::int64_t> idx(universe);
            std::iota(idx.begin(), idx.end(), 0);
            rng.shuffle_prefix(idx, static_cast<std::size_t>(count));
            for (std::int64_t i = 0; i < count; ++i)
                rows.push_back(decode(idx[i]));
        }
        else {
            std::set<std::int64_t> seen;
            while (static_cast<std::int64_t>(seen.size()) < count)
                if (auto i = static_cast<std::int64_t>(rng.below(universe)); seen.insert(i).second)
                    rows.push_back(decode(i));
        }
        return rows;
    }

    auto check_model_b(const ModelBParams & m) -> void
    {
        if (m.n < 1 || m.d < 1 || m.k < 1 || m.k > m.n)
            throw UsageError{"model B needs n >= k >= 1 and d >= 1"};
        if (! (m.p > 0 && m.p <= 100) || ! (m.q > 0 && m.q <= 100))
            throw UsageError{"model B density and looseness must lie in (0, 100]"};
        if (binomial(m.n, m.k) > max_scope_universe)
            throw UsageError{"model B scope universe too large"};
    }
}

auto model_b_constraint_count(const ModelBParams & m) -> std::int64_t
{
    return round_half_up(m.p / 100.0 * static_cast<double>(binomial(m.n, m.k)));
}

auto model_b_tuple_count(const ModelBParams & m) -> std::int64_t
{
    return round_half_up(m.q / 100.0 * std::pow(static_cast<double>(m.d), m.k));
}

auto gen_model_b(const ModelBParams & m) -> Problem
{
    check_model_b(m);
    auto count = model_b_constraint_count(m);
    auto tuples = model_b_tuple_count(m);
    if (m.n > 1 && count * (m.k - 1) < m.n - 1)
        throw UsageError{"model B parameters cannot yield a connected constraint graph"};
    Rng rng(m.seed);
    auto universe = combinations(m.n, m.k);
    for (int attempt = 0; attempt < connect_attempts; ++attempt) {
        rng.shuffle_prefix(universe, static_cast<std::size_t>(count));
        std::vector<std::vector<int>> scopes(universe.begin(), universe.begin() + count);
        std::sort(scopes.begin(), scopes.end());
        Problem p;
        for (int x = 0; x < m.n; ++x)
            p.add_variable("x" + std::to_string(x), m.d);
        for (auto & s : scopes)
            p.constraints.push_back({s, Table{m.k}});
        if (! is_connected(p))
            continue;
        std::vector<int> sizes(m.k, m.d);
        for (auto & c : p.constraints)
            c.body = Table::from_rows(m.k, random_rows(rng, sizes, tuples));
        return p;
    }
    throw UsageError{"no connected model B instance after " + std::to_string(connect_attempts) + " attempts"};
}

auto gen_clique_embedded(const ModelBParams & base, int clique_size, std::uint64_t seed) -> Problem
{
    auto p = gen_model_b(base);
    if (clique_size == 0)
        return p;
    int k = base.k;
    if (clique_size < k || clique_size > base.n || k < 2)
        throw UsageError{"clique size must lie in [k, n] with k >= 2"};
    Rng rng(seed);
    std::vector<int> vars(base.n);
    std::iota(vars.begin(), vars.end(), 0);
    rng.shuffle_prefix(vars, static_cast<std::size_t>(clique_size));
    int pivot = vars[0];
    std::vector<int> rest(vars.begin() + 1, vars.begin() + clique_size);

    std::set<std::vector<int>> taken;
    for (auto & c : p.constraints)
        taken.insert(c.scope);
    auto tuples = model_b_tuple_count(base);
    std::vector<int> used; // non-pivot variables of earlier clique constraints
    std::size_t next = 0;  // first clique variable not yet in any clique constraint
    for (int round = 0; next < rest.size() && round < 1000; ++round) {
        // Share one to k-1 variables with earlier clique constraints, at random;
        // the pivot is always shared, the rest come from earlier scopes.
        int extra = used.empty() ? 0 : std::min(rng.between(0, k - 2), static_cast<int>(used.size()));
        std::vector<int> scope{pivot};
        std::vector<int> pool = used;
        rng.shuffle_prefix(pool, static_cast<std::size_t>(extra));
        scope.insert(scope.end(), pool.begin(), pool.begin() + extra);
        auto fresh = next;
        while (static_cast<int>(scope.size()) < k && fresh < rest.size())
            scope.push_back(rest[fresh++]);
        while (static_cast<int>(scope.size()) < k) {
            int y = rest[rng.below(rest.size())];
            if (std::find(scope.begin(), scope.end(), y) == scope.end())
                scope.push_back(y);
        }
        std::sort(scope.begin(), scope.end());
        if (! taken.insert(scope).second)
            continue;
        next = fresh;
        for (int y : scope)
            if (y != pivot && std::find(used.begin(), used.end(), y) == used.end())
                used.push_back(y);
        std::vector<int> sizes(k, base.d);
        p.add_extension(scope, Table::from_rows(k, random_rows(rng, sizes, tuples)));
    }
    if (next < rest.size())
        throw UsageError{"could not place the clique constraints without repeating a scope"};
    return p;
}

auto crossword_slots(const std::vector<std::string> & grid) -> std::vector<std::vector<std::pair<int, int>>>
{
    std::vector<std::vector<std::pair<int, int>>> slots;
    int rows = static_cast<int>(grid.size());
    int cols = rows ? static_cast<int>(grid[0].size()) : 0;
    for (auto & r : grid)
        if (static_cast<int>(r.size()) != cols)
            throw UsageError{"crossword grid must be rectangular"};
    auto open = [&](int r, int c) { return grid[r][c] == '.'; };
    auto flush = [&](std::vector<std::pair<int, int>> & run) {
        if (run.size() >= 2)
            slots.push_back(run);
        run.clear();
    };
    for (int r = 0; r < rows; ++r) {
        std::vector<std::pair<int, int>> run;
        for (int c = 0; c < cols; ++c)
            if (open(r, c))
                run.emplace_back(r, c);
            else
                flush(run);
        flush(run);
    }
    for (int c = 0; c < cols; ++c) {
        std::vector<std::pair<int, int>> run;
        for (int r = 0; r < rows; ++r)
            if (open(r, c))
                run.emplace_back(r, c);
            else
                flush(run);
        flush(run);
    }
    return slots;
}

auto gen_crossword(const CrosswordSpec & spec) -> Problem
{
    Problem p;
    std::vector<int> labels(26);
    std::iota(labels.begin(), labels.end(), 0);
    std::vector<std::string> symbols;
    for (char ch = 'a'; ch <= 'z'; ++ch)
        symbols.emplace_back(1, ch);
    std::vector<std::vector<int>> var_of(spec.grid.size());
    for (std::size_t r = 0; r < spec.grid.size(); ++r)
        for (std::size_t c = 0; c < spec.grid[r].size(); ++c) {
            char ch = spec.grid[r][c];
            if (ch != '.' && ch != '#')
                throw UsageError{"crossword cells must be '.' or '#'"};
            var_of[r].push_back(ch == '.' ? p.add_variable("r" + std::to_string(r) + "c" + std::to_string(c), labels, symbols) : -1);
        }
    for (auto & slot : crossword_slots(spec.grid)) {
        std::vector<int> scope;
        for (auto [r, c] : slot)
            scope.push_back(var_of[r][c]);
        std::vector<Tuple> rows;
        for (auto & w : spec.words) {
            if (w.size() != slot.size())
                continue;
            Tuple t;
            for (char ch : w)
                if (ch >= 'a' && ch <= 'z')
                    t.push_back(ch - 'a');
            if (t.size() == w.size())
                rows.push_back(std::move(t));
        }
        p.add_extension(scope, std::move(rows));
    }
    return p;
}

auto read_lines(const std::string & path) -> std::vector<std::string>
{
    std::ifstream in(path);
    if (! in)
        throw UsageError{"cannot open " + path};
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        while (! line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (! line.empty())
            out.push_back(line);
    }
    return out;
}

auto bundled_data_dir() -> std::string
{
#ifdef BINCSP_DATA_DIR
    return BINCSP_DATA_DIR;
#else
    return "data";
#endif
}

auto bundled_dictionary() -> std::vector<std::string>
{
    return read_lines(bundled_data_dir() + "/words.txt");
}

auto bundled_grid() -> std::vector<std::string>
{
    return read_lines(bundled_data_dir() + "/grid5x5.txt");
}

auto gen_parity_chain(int n) -> Problem
{
    if (n < 1)
        throw UsageError{"parity chain needs n >= 1"};
    Problem p;
    std::vector<int> labels(n);
    std::iota(labels.begin(), labels.end(), 1);
    int vars = 4 * n + 2;
    for (int i = 1; i <= vars; ++i)
        p.add_variable("x" + std::to_string(i), labels);
    int pairs = 2 * n + 1;
    for (int i = 0; i < pairs; ++i) {
        int j = (i + 1) % pairs;
        p.add_predicate({2 * i, 2 * i + 1, 2 * j, 2 * j + 1}, ParityNeq{});
    }
    return p;
}

namespace {
    struct Topology {
        int groups, min_size, max_size;
        bool chords;
    };

    auto topology(const std::string & id) -> Topology
    {
        if (id == "prob1")
            return {2, 6, 6, false};
        if (id == "prob2")
            return {3, 6, 6, false};
        if (id == "prob3")
            return {4, 6, 6, false};
        if (id == "prob4")
            return {4, 8, 8, false};
        if (id == "prob5")
            return {5, 8, 10, true};
        throw UsageError{"unknown topology '" + id + "' (expected prob1..prob5)"};
    }

    // Largest gap for which k pairwise-separated values fit in d, and one below it,
    // so no constraint is close to the full relation.
    auto tight_gap(Rng & rng, int k, int d) -> int
    {
        int top = k <= 1 ? d : (d - 1) / (k - 1) - 1;
        top = std::max(top, 1);
        return rng.between(std::max(1, top - 1), top);
    }

    auto pick(Rng & rng, std::vector<int> pool, int count) -> std::vector<int>
    {
        rng.shuffle_prefix(pool, static_cast<std::size_t>(count));
        std::vector<int> out(pool.begin(), pool.begin() + count);
        std::sort(out.begin(), out.end());
        return out;
    }
}

auto gen_rlfa(const RlfaParams & params, std::uint64_t seed) -> Problem
{
    auto topo = topology(params.topology);
    if (params.domain < 2)
        throw UsageError{"frequency domains need at least two values"};
    Rng rng(seed);
    Problem p;
    std::vector<std::vector<int>> groups(topo.groups);
    for (int g = 0; g < topo.groups; ++g) {
        int size = rng.between(topo.min_size, topo.max_size);
        for (int i = 0; i < size; ++i)
            groups[g].push_back(p.add_variable("f" + std::to_string(g) + "_" + std::to_string(i), params.domain));
    }
    auto add_separation = [&](std::vector<int> scope) {
        int k = static_cast<int>(scope.size());
        int gap = tight_gap(rng, k, params.domain);
        if (k >= 3 && rng.chance(0.3)) {
            int wide = rng.between(0, k - 1);
            p.add_predicate(std::move(scope), RichSeparation{gap, gap + 1, {wide}});
        }
        else
            p.add_predicate(std::move(scope), Separation{gap});
    };
    for (auto & g : groups) {
        std::vector<char> covered(p.n(), 0);
        int count = rng.between(3, 5);
        for (int i = 0; i < count; ++i) {
            int k = std::min(rng.between(3, 5), static_cast<int>(g.size()));
            auto scope = pick(rng, g, k);
            for (int x : scope)
                covered[x] = 1;
            add_separation(scope);
        }
        for (int x : g) {
            if (covered[x])
                continue;
            std::vector<int> others;
            for (int y : g)
                if (y != x)
                    others.push_back(y);
            auto scope = pick(rng, others, 2);
            scope.push_back(x);
            std::sort(scope.begin(), scope.end());
            for (int y : scope)
                covered[y] = 1;
            add_separation(scope);
        }
    }
    auto link = [&](int a, int b) {
        auto scope = pick(rng, groups[a], 2);
        auto other = pick(rng, groups[b], 1);
        scope.push_back(other[0]);
        std::sort(scope.begin(), scope.end());
        add_separation(scope);
        if (params.not_all_equal) {
            auto na = pick(rng, groups[a], 2);
            auto nb = pick(rng, groups[b], 2);
            na.insert(na.end(), nb.begin(), nb.end());
            std::sort(na.begin(), na.end());
            p.add_predicate(na, NotAllEqual{});
        }
    };
    for (int g = 0; g + 1 < topo.groups; ++g)
        link(g, g + 1);
    if (topo.groups > 2)
        link(topo.groups - 1, 0);
    if (topo.chords)
        for (int g = 0; g + 2 < topo.groups; g += 2)
            link(g, g + 2);
    if (params.adjacent_channel && topo.groups >= 2) {
        auto a = pick(rng, groups[0], 4);
        auto b = pick(rng, groups[1], 4);
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        p.add_predicate(a, Separation{1});
    }
    return p;
}

auto tshirt() -> Problem
{
    Problem p;
    int size = p.add_variable("size", {0, 1, 2}, {"small", "medium", "large"});
    int print = p.add_variable("print", {0, 1}, {"MIB", "STW"});
    int color = p.add_variable("color", {0, 1, 2}, {"black", "white", "red"});
    p.add_extension({size, print}, {{0, 0}, {1, 0}, {1, 1}, {2, 0}, {2, 1}});
    p.add_extension({print, color}, {{0, 0}, {1, 1}, {1, 2}});
    return p;
}

auto gen_config_like(const Problem & base, int extra_vars, std::uint64_t seed) -> Problem
{
    if (extra_vars == 0)
        return base;
    if (extra_vars < 0)
        throw UsageError{"extra variable count must be non-negative"};
    Rng rng(seed);
    for (int attempt = 0; attempt < connect_attempts; ++attempt) {
        Problem p = base;
        for (int i = 0; i < extra_vars; ++i)
            p.add_variable("e" + std::to_string(i), rng.between(2, 6));
        std::vector<int> all(p.n());
        std::iota(all.begin(), all.end(), 0);
        std::set<std::vector<int>> taken;
        for (auto & c : p.constraints)
            taken.insert(c.scope);
        int count = rng.between(8, 10);
        for (int added = 0, draws = 0; added < count && draws < 1000; ++draws) {
            int k = std::min(rng.between(2, 4), p.n());
            auto scope = pick(rng, all, k);
            if (! taken.insert(scope).second)
                continue;
            ++added;
            std::vector<int> sizes;
            std::int64_t universe = 1;
            for (int x : scope) {
                sizes.push_back(p.domain_size(x));
                universe *= p.domain_size(x);
            }
            int looseness = rng.between(20, 80);
            auto tuples = std::max<std::int64_t>(1, round_half_up(looseness / 100.0 * static_cast<double>(universe)));
            p.add_extension(scope, Table::from_rows(k, random_rows(rng, sizes, tuples)));
        }
        if (is_connected(p))
            return p;
    }
    throw UsageError{"no connected configuration-like instance after " + std::to_string(connect_attempts) + " attempts"};
}

} // namespace bincsp
