#include <bincsp/core.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

namespace bincsp {

auto Counters::operator+=(const Counters & o) -> Counters &
{
    tuple_checks += o.tuple_checks;
    micro_ops += o.micro_ops;
    value_removals += o.value_removals;
    tuple_removals += o.tuple_removals;
    counter_updates += o.counter_updates;
    resumed_checks += o.resumed_checks;
    return *this;
}

auto Table::from_rows(int arity, std::vector<Tuple> rows) -> Table
{
    for (auto & r : rows)
        if (static_cast<int>(r.size()) != arity)
            throw UsageError{"tuple arity does not match table arity"};
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    Table t{arity};
    t.cells_.reserve(rows.size() * arity);
    for (auto & r : rows)
        t.cells_.insert(t.cells_.end(), r.begin(), r.end());
    return t;
}

auto Table::rows() const -> std::vector<Tuple>
{
    std::vector<Tuple> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto r = row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

auto Table::find(std::span<const Value> t) const -> std::ptrdiff_t
{
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        auto mid = (lo + hi) / 2;
        auto c = lex_compare(row(mid), t);
        if (c == std::strong_ordering::equal)
            return static_cast<std::ptrdiff_t>(mid);
        if (c == std::strong_ordering::less)
            lo = mid + 1;
        else
            hi = mid;
    }
    return -1;
}

auto Table::append(std::span<const Value> t) -> void
{
    if (static_cast<int>(t.size()) != arity_)
        throw UsageError{"tuple arity does not match table arity"};
    if (size() > 0 && lex_compare(row(size() - 1), t) != std::strong_ordering::less)
        throw UsageError{"rows must be appended in increasing order"};
    cells_.insert(cells_.end(), t.begin(), t.end());
}

namespace {
    auto pairwise_apart(std::span<const int> l, std::size_t upto, int gap) -> bool
    {
        for (std::size_t j = 0; j < upto; ++j)
            if (std::abs(l[upto] - l[j]) <= gap)
                return false;
        return true;
    }

    auto is_wide(const RichSeparation & r, std::size_t pos) -> bool
    {
        return std::find(r.wide.begin(), r.wide.end(), static_cast<int>(pos)) != r.wide.end();
    }

    // Whether position i, given positions 0..i-1, can still lead to a satisfying tuple.
    // Only the separation family prunes early; the rest are judged when complete.
    auto partial_ok(const Predicate & p, std::span<const int> l, std::size_t i) -> bool
    {
        if (auto s = std::get_if<Separation>(&p))
            return pairwise_apart(l, i, s->gap);
        if (auto r = std::get_if<RichSeparation>(&p)) {
            bool wide_i = is_wide(*r, i);
            for (std::size_t j = 0; j < i; ++j) {
                int need = (wide_i || is_wide(*r, j)) ? std::max(r->gap, r->wide_gap) : r->gap;
                if (std::abs(l[i] - l[j]) <= need)
                    return false;
            }
            return true;
        }
        return true;
    }
}

auto evaluate(const Predicate & p, std::span<const int> l) -> bool
{
    return std::visit(
        [&](const auto & q) -> bool {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Linear>) {
                long sum = 0;
                for (std::size_t i = 0; i < l.size(); ++i)
                    sum += static_cast<long>(q.coeffs.at(i)) * l[i];
                switch (q.rel) {
                case Relation::eq: return sum == q.rhs;
                case Relation::ge: return sum >= q.rhs;
                case Relation::le: return sum <= q.rhs;
                case Relation::ne: return sum != q.rhs;
                }
                return false;
            }
            else if constexpr (std::is_same_v<T, NotAllEqual>) {
                if (l.size() < 2)
                    return true;
                return std::any_of(l.begin(), l.end(), [&](int v) { return v != l[0]; });
            }
            else if constexpr (std::is_same_v<T, ParityNeq>) {
                auto par = [](int a, int b) { return ((a + b) % 2 + 2) % 2; };
                return par(l[q.a], l[q.b]) != par(l[q.c], l[q.d]);
            }
            else {
                for (std::size_t i = 1; i < l.size(); ++i)
                    if (! partial_ok(p, l, i))
                        return false;
                return true;
            }
        },
        p);
}

auto predicate_kind(const Predicate & p) -> std::string
{
    static const char * names[] = {"linear", "separation", "rich_separation", "not_all_equal", "parity_neq"};
    return names[p.index()];
}

auto Problem::add_variable(std::string name, std::vector<int> labels, std::vector<std::string> symbols) -> int
{
    if (! symbols.empty() && symbols.size() != labels.size())
        throw UsageError{"symbol table size must match domain size"};
    variables.push_back({std::move(name), std::move(labels), std::move(symbols)});
    return n() - 1;
}

auto Problem::add_variable(std::string name, int domain_size) -> int
{
    std::vector<int> labels(domain_size);
    std::iota(labels.begin(), labels.end(), 0);
    return add_variable(std::move(name), std::move(labels));
}

auto Problem::add_extension(std::vector<int> scope, std::vector<Tuple> rows) -> int
{
    int arity = static_cast<int>(scope.size());
    return add_extension(std::move(scope), Table::from_rows(arity, std::move(rows)));
}

auto Problem::add_extension(std::vector<int> scope, Table table) -> int
{
    constraints.push_back({std::move(scope), std::move(table)});
    return e() - 1;
}

auto Problem::add_predicate(std::vector<int> scope, Predicate p) -> int
{
    constraints.push_back({std::move(scope), std::move(p)});
    return e() - 1;
}

auto Problem::max_domain() const -> int
{
    int d = 0;
    for (auto & v : variables)
        d = std::max(d, v.size());
    return d;
}

auto Problem::max_arity() const -> int
{
    int k = 0;
    for (auto & c : constraints)
        k = std::max(k, c.arity());
    return k;
}

auto Problem::labels_of(const Constraint & c, std::span<const Value> t) const -> std::vector<int>
{
    std::vector<int> l(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        l[i] = variables[c.scope[i]].labels[t[i]];
    return l;
}

auto Problem::degree(int x) const -> int
{
    int d = 0;
    for (auto & c : constraints)
        d += std::count(c.scope.begin(), c.scope.end(), x) > 0;
    return d;
}

auto Problem::constraints_of(int x) const -> std::vector<int>
{
    std::vector<int> out;
    for (int c = 0; c < e(); ++c)
        if (std::find(constraints[c].scope.begin(), constraints[c].scope.end(), x) != constraints[c].scope.end())
            out.push_back(c);
    return out;
}

auto Problem::validate() const -> void
{
    std::set<std::string> names;
    for (auto & v : variables) {
        if (! names.insert(v.name).second)
            throw UsageError{"duplicate variable name '" + v.name + "'"};
        if (v.labels.empty())
            throw UsageError{"variable '" + v.name + "' has an empty domain"};
    }
    for (int ci = 0; ci < e(); ++ci) {
        auto & c = constraints[ci];
        auto where = "constraint " + std::to_string(ci);
        std::set<int> seen;
        for (int x : c.scope) {
            if (x < 0 || x >= n())
                throw UsageError{where + ": scope names an unknown variable"};
            if (! seen.insert(x).second)
                throw UsageError{where + ": scope repeats a variable"};
        }
        if (c.extensional()) {
            auto & t = c.table();
            if (t.arity() != c.arity())
                throw UsageError{where + ": table arity differs from scope size"};
            for (std::size_t r = 0; r < t.size(); ++r) {
                auto row = t.row(r);
                for (int i = 0; i < c.arity(); ++i)
                    if (row[i] < 0 || row[i] >= domain_size(c.scope[i]))
                        throw UsageError{where + ": tuple value outside the domain"};
                if (r > 0 && lex_compare(t.row(r - 1), row) != std::strong_ordering::less)
                    throw UsageError{where + ": tuples are not sorted and unique"};
            }
        }
        else if (auto lin = std::get_if<Linear>(&c.predicate()); lin && static_cast<int>(lin->coeffs.size()) != c.arity())
            throw UsageError{where + ": linear coefficient count differs from scope size"};
        else if (auto par = std::get_if<ParityNeq>(&c.predicate())) {
            for (int q : {par->a, par->b, par->c, par->d})
                if (q < 0 || q >= c.arity())
                    throw UsageError{where + ": parity position outside scope"};
        }
        else if (auto rich = std::get_if<RichSeparation>(&c.predicate())) {
            for (int q : rich->wide)
                if (q < 0 || q >= c.arity())
                    throw UsageError{where + ": wide position outside scope"};
        }
    }
}

Bitset::Bitset(int size, bool full) : size_(size), live_(full ? size : 0), words_((size + 63) / 64, 0)
{
    if (full) {
        for (int i = 0; i < size / 64; ++i)
            words_[i] = ~std::uint64_t{0};
        if (size % 64)
            words_[size / 64] = (std::uint64_t{1} << (size % 64)) - 1;
    }
}

auto Bitset::reset(int i) -> bool
{
    auto bit = std::uint64_t{1} << (i & 63);
    if (! (words_[i >> 6] & bit))
        return false;
    words_[i >> 6] &= ~bit;
    --live_;
    return true;
}

auto Bitset::set(int i) -> bool
{
    auto bit = std::uint64_t{1} << (i & 63);
    if (words_[i >> 6] & bit)
        return false;
    words_[i >> 6] |= bit;
    ++live_;
    return true;
}

auto Bitset::first() const -> int
{
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w])
            return static_cast<int>(w * 64 + std::countr_zero(words_[w]));
    return -1;
}

auto Bitset::members() const -> std::vector<int>
{
    std::vector<int> out;
    out.reserve(live_);
    for (std::size_t w = 0; w < words_.size(); ++w)
        for (auto bits = words_[w]; bits; bits &= bits - 1)
            out.push_back(static_cast<int>(w * 64 + std::countr_zero(bits)));
    return out;
}

auto Bitset::recount() -> void
{
    live_ = 0;
    for (auto w : words_)
        live_ += std::popcount(w);
}

auto DomainState::full(const Problem & p) -> DomainState
{
    DomainState s;
    for (auto & v : p.variables)
        s.vars.emplace_back(v.size());
    return s;
}

auto DomainState::any_empty() const -> bool
{
    return std::any_of(vars.begin(), vars.end(), [](auto & b) { return b.empty(); }) ||
        std::any_of(duals.begin(), duals.end(), [](auto & b) { return b.empty(); });
}

auto lex_compare(std::span<const Value> a, std::span<const Value> b) -> std::strong_ordering
{
    if (a.size() != b.size())
        throw UsageError{"lex_compare on tuples of different arity"};
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i])
            return a[i] <=> b[i];
    return std::strong_ordering::equal;
}

auto project(std::span<const Value> t, std::span<const int> scope, std::span<const int> sub) -> Tuple
{
    if (t.size() != scope.size())
        throw UsageError{"tuple arity differs from scope size"};
    Tuple out;
    out.reserve(sub.size());
    for (int x : sub) {
        auto it = std::find(scope.begin(), scope.end(), x);
        if (it == scope.end())
            throw UsageError{"projection onto a variable outside the scope"};
        out.push_back(t[it - scope.begin()]);
    }
    return out;
}

auto check_tuple(const Problem & p, const Constraint & c, std::span<const Value> t, Counters & counters) -> bool
{
    if (static_cast<int>(t.size()) != c.arity())
        throw UsageError{"tuple arity differs from constraint arity"};
    ++counters.tuple_checks;
    if (c.extensional())
        return c.table().contains(t);
    return evaluate(c.predicate(), p.labels_of(c, t));
}

auto is_valid(std::span<const Value> t, std::span<const int> scope, const DomainState & s, Counters & counters)
    -> bool
{
    counters.micro_ops += t.size();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (! s.vars[scope[i]].test(t[i]))
            return false;
    return true;
}

auto is_valid_dual(int dual, int tuple_index, const DomainState & s, Counters & counters) -> bool
{
    ++counters.micro_ops;
    return s.duals[dual].test(tuple_index);
}

auto expand_predicate(const Problem & p, const Constraint & c, std::size_t budget) -> Table
{
    if (c.extensional())
        throw UsageError{"expand_predicate on an extensional constraint"};
    auto & pred = c.predicate();
    int k = c.arity();
    Table out{k};
    if (k == 0)
        return out;
    std::size_t count = 0;
    Tuple t(k, 0);
    std::vector<int> l(k, 0);
    // Depth-first in lexicographic order; emitted rows are therefore already sorted.
    int i = 0;
    t[0] = -1;
    while (i >= 0) {
        int d = p.domain_size(c.scope[i]);
        if (++t[i] >= d) {
            --i;
            continue;
        }
        l[i] = p.variables[c.scope[i]].labels[t[i]];
        if (! partial_ok(pred, l, i))
            continue;
        if (i + 1 < k) {
            ++i;
            t[i] = -1;
            continue;
        }
        if (evaluate(pred, l)) {
            if (++count > budget)
                throw CapacityError{"expansion of a " + predicate_kind(pred) + " constraint of arity " +
                    std::to_string(k) + " exceeds the tuple budget of " + std::to_string(budget)};
            out.append(t);
        }
    }
    return out;
}

auto relation_of(const Problem & p, const Constraint & c, std::size_t budget) -> Table
{
    return c.extensional() ? c.table() : expand_predicate(p, c, budget);
}

auto expanded(const Problem & p, std::size_t budget) -> Problem
{
    Problem out;
    out.variables = p.variables;
    for (auto & c : p.constraints)
        out.add_extension(c.scope, relation_of(p, c, budget));
    return out;
}

auto satisfies(const Problem & p, std::span<const Value> a) -> bool
{
    if (static_cast<int>(a.size()) != p.n())
        return false;
    for (auto & c : p.constraints) {
        Tuple t;
        for (int x : c.scope)
            t.push_back(a[x]);
        bool ok = c.extensional() ? c.table().contains(t) : evaluate(c.predicate(), p.labels_of(c, t));
        if (! ok)
            return false;
    }
    return true;
}

auto enumerate_solutions(const Problem & p, std::size_t limit, double bound) -> std::vector<Tuple>
{
    double product = 1;
    for (auto & v : p.variables)
        product *= v.size();
    if (product > bound)
        throw UsageError{"instance exceeds the brute-force bound"};

    // Each constraint is checked once its last scope variable is set.
    std::vector<Table> tables;
    std::vector<std::vector<int>> due(p.n());
    for (int ci = 0; ci < p.e(); ++ci) {
        auto & c = p.constraints[ci];
        tables.push_back(relation_of(p, c, SIZE_MAX));
        int last = c.scope.empty() ? -1 : *std::max_element(c.scope.begin(), c.scope.end());
        if (last >= 0)
            due[last].push_back(ci);
        else if (tables.back().empty())
            return {};
    }

    std::vector<Tuple> out;
    if (p.n() == 0) {
        if (limit > 0)
            out.push_back({});
        return out;
    }
    Tuple a(p.n(), -1);
    Tuple t;
    int x = 0;
    while (x >= 0 && out.size() < limit) {
        if (++a[x] >= p.domain_size(x)) {
            a[x] = -1;
            --x;
            continue;
        }
        bool ok = true;
        for (int ci : due[x]) {
            auto & c = p.constraints[ci];
            t.assign(c.scope.size(), 0);
            for (std::size_t i = 0; i < c.scope.size(); ++i)
                t[i] = a[c.scope[i]];
            if (! tables[ci].contains(t)) {
                ok = false;
                break;
            }
        }
        if (! ok)
            continue;
        if (x + 1 == p.n())
            out.push_back(a);
        else
            ++x;
    }
    return out;
}

auto ac1_fixpoint(const Problem & p, const DomainState & start, std::span<const int> order) -> FixpointResult
{
    std::vector<int> seq(order.begin(), order.end());
    if (seq.empty()) {
        seq.resize(p.e());
        std::iota(seq.begin(), seq.end(), 0);
    }
    std::vector<Table> tables;
    for (auto & c : p.constraints)
        tables.push_back(relation_of(p, c, SIZE_MAX));

    FixpointResult r{start, start.any_empty()};
    auto & dom = r.state.vars;
    bool changed = ! r.wipeout;
    while (changed) {
        changed = false;
        for (int ci : seq) {
            auto & c = p.constraints[ci];
            auto & tab = tables[ci];
            for (int i = 0; i < c.arity(); ++i) {
                int x = c.scope[i];
                for (int a : dom[x].members()) {
                    bool supported = false;
                    for (std::size_t row = 0; row < tab.size() && ! supported; ++row) {
                        auto t = tab.row(row);
                        if (t[i] != a)
                            continue;
                        supported = true;
                        for (int j = 0; j < c.arity() && supported; ++j)
                            supported = dom[c.scope[j]].test(t[j]);
                    }
                    if (! supported) {
                        dom[x].reset(a);
                        changed = true;
                    }
                }
                if (dom[x].empty()) {
                    r.wipeout = true;
                    return r;
                }
            }
        }
    }
    return r;
}

auto ac1_fixpoint(const Problem & p) -> FixpointResult
{
    return ac1_fixpoint(p, DomainState::full(p));
}

} // namespace bincsp
