#include <bincsp/search.hpp>

#include <algorithm>

namespace bincsp {

namespace {
    struct NamedSpec {
        const char * name;
        AlgorithmSpec spec;
    };

    auto fixed_names() -> const std::vector<NamedSpec> &
    {
        using R = Representation;
        using P = PropagatorKind;
        using B = BranchSet;
        static const std::vector<NamedSpec> names{
            {"MGAC-2001", {R::nonbinary, Scheme::mac, 0, P::generic_2001, B::original_only}},
            {"MHAC-2001", {R::hve, Scheme::mac, 0, P::specialized, B::original_only}},
            {"MHAC-2001-full", {R::hve, Scheme::mac, 0, P::specialized, B::all_variables}},
            {"MAC-2001", {R::de, Scheme::mac, 0, P::generic_2001, B::all_variables}},
            {"MAC-PW-AC", {R::de, Scheme::mac, 0, P::specialized, B::all_variables}},
            {"MAC-2001d", {R::dbl, Scheme::mac, 0, P::generic_2001, B::original_only}},
            {"MAC-PW-ACd", {R::dbl, Scheme::mac, 0, P::specialized, B::original_only}},
            {"MAC-hybrid", {R::hybrid, Scheme::mac, 0, P::specialized, B::original_only}},
        };
        return names;
    }

    auto fc_prefix(Representation r) -> char
    {
        switch (r) {
        case Representation::nonbinary: return 'n';
        case Representation::hve: return 'h';
        case Representation::dbl: return 'd';
        default: return '?';
        }
    }
}

auto parse_algorithm(std::string_view name) -> AlgorithmSpec
{
    for (auto & n : fixed_names())
        if (name == n.name)
            return n.spec;
    if (name.size() == 4 && name.substr(1, 2) == "FC" && name[3] >= '0' && name[3] <= '5') {
        AlgorithmSpec s;
        s.scheme = Scheme::fc;
        s.level = name[3] - '0';
        switch (name[0]) {
        case 'n': s.representation = Representation::nonbinary; break;
        case 'h':
            s.representation = Representation::hve;
            s.propagator = PropagatorKind::specialized;
            break;
        case 'd':
            s.representation = Representation::dbl;
            s.propagator = PropagatorKind::specialized;
            break;
        default: throw UsageError{"unknown algorithm '" + std::string{name} + "'"};
        }
        return s;
    }
    throw UsageError{"unknown algorithm '" + std::string{name} + "'"};
}

auto algorithm_name(const AlgorithmSpec & spec) -> std::string
{
    if (spec.scheme == Scheme::fc)
        return std::string{fc_prefix(spec.representation)} + "FC" + std::to_string(spec.level);
    for (auto & n : fixed_names())
        if (n.spec == spec)
            return n.name;
    return "custom";
}

auto algorithm_names() -> std::vector<std::string>
{
    std::vector<std::string> out;
    for (auto & n : fixed_names())
        out.emplace_back(n.name);
    for (char c : {'n', 'h', 'd'})
        for (int i = 0; i <= 5; ++i)
            out.push_back(std::string{c} + "FC" + std::to_string(i));
    return out;
}

auto to_string(Representation r) -> std::string
{
    switch (r) {
    case Representation::nonbinary: return "nonbinary";
    case Representation::hve: return "hve";
    case Representation::de: return "de";
    case Representation::dbl: return "double";
    case Representation::hybrid: return "hybrid";
    }
    return "?";
}

auto to_string(SearchVerdict v) -> std::string
{
    switch (v) {
    case SearchVerdict::sat: return "SAT";
    case SearchVerdict::unsat: return "UNSAT";
    case SearchVerdict::node_limit: return "NODE_LIMIT";
    case SearchVerdict::time_limit: return "TIME_LIMIT";
    }
    return "?";
}

auto to_string(Ordering o) -> std::string
{
    return o == Ordering::fixed ? "fixed" : "heuristic";
}

auto parse_ordering(std::string_view s) -> Ordering
{
    if (s == "fixed")
        return Ordering::fixed;
    if (s == "heuristic")
        return Ordering::heuristic;
    throw UsageError{"ordering must be 'heuristic' or 'fixed', got '" + std::string{s} + "'"};
}

auto lookahead_set(int level, int current, std::span<const char> assigned, std::span<const std::vector<int>> scopes)
    -> Lookahead
{
    Lookahead la;
    la.fixpoint = level == 3 || level == 5 || level == mac_level;
    for (int u = 0; u < static_cast<int>(scopes.size()); ++u) {
        int past = 0, future = 0;
        bool has_current = false;
        for (int x : scopes[u]) {
            has_current = has_current || x == current;
            ++(assigned[x] ? past : future);
        }
        bool take = false;
        switch (level) {
        case 0:
        case 1: take = has_current && future == 1; break;
        case 2:
        case 3: take = has_current && future >= 1; break;
        case 4:
        case 5: take = past >= 1 && future >= 1; break;
        default: take = true;
        }
        if (take)
            la.units.push_back(u);
    }
    return la;
}

auto select_variable_dom_deg(std::span<const Candidate> c) -> std::size_t
{
    if (c.empty())
        throw UsageError{"dom/deg selection needs at least one candidate"};
    std::size_t best = 0;
    auto better = [](const Candidate & a, const Candidate & b) {
        if (a.degree == 0 || b.degree == 0)
            return a.degree != 0 && b.degree == 0;
        return std::int64_t{a.size} * b.degree < std::int64_t{b.size} * a.degree;
    };
    for (std::size_t i = 1; i < c.size(); ++i)
        if (better(c[i], c[best]))
            best = i;
    return best;
}

auto complete_dual_assignments(const Network & net) -> std::vector<int>
{
    std::vector<int> out;
    for (int v = 0; v < net.duals(); ++v) {
        if (net.dual_size(v) != 1)
            throw std::logic_error{"dual variable " + std::to_string(v) + " is not a singleton at a leaf"};
        out.push_back(net.tuples(v).front());
    }
    return out;
}

auto hybrid_subset(const Problem & p, std::size_t budget) -> std::vector<int>
{
    std::vector<int> out;
    for (int c = 0; c < p.e(); ++c) {
        if (! p.constraints[c].extensional()) {
            try {
                expand_predicate(p, p.constraints[c], budget);
            }
            catch (const CapacityError &) {
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

auto build_model(const Problem & p, const AlgorithmSpec & spec, std::size_t hybrid_budget)
    -> std::optional<EncodedProblem>
{
    switch (spec.representation) {
    case Representation::nonbinary: return std::nullopt;
    case Representation::hve: return build_hve(p);
    case Representation::de: return build_de(p);
    case Representation::dbl: return build_double(p);
    case Representation::hybrid: return build_double(p, hybrid_subset(p, hybrid_budget));
    }
    return std::nullopt;
}

Solver::Solver(const Problem & p, const AlgorithmSpec & spec, SearchOptions options) :
    problem_(p), spec_(spec), options_(options)
{
    auto r = spec.representation;
    if (spec.scheme == Scheme::fc) {
        if (r != Representation::nonbinary && r != Representation::hve && r != Representation::dbl)
            throw UsageError{"forward checking is defined on the non-binary, hidden and double models only"};
        if (spec.level < 0 || spec.level > 5)
            throw UsageError{"forward-checking level must be 0..5"};
    }
    if (r == Representation::de && spec.branch != BranchSet::all_variables)
        throw UsageError{"dual-encoding search branches on dual variables"};
    if (spec.branch == BranchSet::all_variables && r != Representation::de && r != Representation::hve)
        throw UsageError{"branching on dual variables needs the hidden or dual model"};

    model_ = build_model(p, spec, options.hybrid_budget);
    bool view = spec.propagator == PropagatorKind::generic_2001 && (r == Representation::de || r == Representation::dbl);
    if (model_)
        net_ = std::make_unique<Network>(*model_, view);
    else
        net_ = std::make_unique<Network>(p);
    net_->trail.enable(true);

    for (int x = 0; x < p.n(); ++x)
        original_degree_.push_back(p.degree(x));
    if (model_)
        for (int v = 0; v < static_cast<int>(model_->duals.size()); ++v) {
            dual_degree_.push_back(model_->dual_degree(v));
            unit_scopes_.push_back(model_->duals[v].scope);
        }
    else
        for (auto & c : p.constraints)
            unit_scopes_.push_back(c.scope);
}

Solver::~Solver() = default;

auto Solver::hve_units_of(int x) const -> std::vector<int>
{
    std::vector<int> out;
    for (auto [u, pos] : net_->units_of(x))
        out.push_back(u);
    return out;
}

auto Solver::root() -> bool
{
    auto & net = *net_;
    auto r = spec_.representation;
    bool view = net.view_size() > 0;
    net.report_all_dual_wipeouts(true);
    if (r != Representation::de)
        for (auto & c : problem_.constraints) {
            if (c.arity() != 1)
                continue;
            int x = c.scope[0];
            for (int a : net.values(x)) {
                Tuple t{a};
                if (! check_tuple(problem_, c, t, net.counters) && net.remove_value(x, a, ! view) == Revision::wipeout)
                    return false;
            }
            if (net.size(x) == 0)
                return false;
        }
    if (net.any_dual_empty())
        return false;

    if (spec_.scheme == Scheme::fc) {
        net.count_groups();
        net.count_hidden();
        return true;
    }
    Verdict v = Verdict::consistent;
    if (view)
        v = net.ac2001(true);
    else if (r == Representation::nonbinary || r == Representation::hve)
        v = net.units_fixpoint(true);
    else if (r == Representation::de) {
        net.count_groups();
        v = net.queue_empty_groups();
        if (v == Verdict::consistent)
            v = net.pw_propagate();
    }
    else {
        net.count_groups();
        net.count_hidden();
        v = net.queue_empty_groups();
        if (v == Verdict::consistent) {
            net.queue_unsupported_values();
            for (int u = 0; u < net.units(); ++u)
                if (net.unit_dual(u) < 0)
                    net.queue_unit(u);
            v = net.double_propagate(DoubleMode::both);
        }
    }
    return v == Verdict::consistent;
}

auto Solver::assign(int x, int a) -> bool
{
    auto & net = *net_;
    net.trail.mark();
    net.clear_queues();
    frames_.push_back({{x}, -1});
    net.assigned[x] = 1;
    return lookahead(x, a);
}

auto Solver::lookahead(int x, int a) -> bool
{
    auto & net = *net_;
    auto r = spec_.representation;
    bool view = net.view_size() > 0;
    int level = spec_.scheme == Scheme::mac ? mac_level : spec_.level;
    Lookahead la;
    if (! view && level != mac_level)
        la = lookahead_set(level, x, net.assigned, unit_scopes_);

    // Which dual wipeouts count: every one under MAC, those of the restricted set for
    // fixpoint levels, the duals next to x for the two lowest levels, none otherwise.
    if (level == mac_level)
        net.report_all_dual_wipeouts(true);
    else if (level == 3 || level == 5)
        net.report_dual_wipeouts(r == Representation::nonbinary ? std::span<const int>{} : la.units);
    else if (level <= 1 && r != Representation::nonbinary)
        net.report_dual_wipeouts(hve_units_of(x));
    else
        net.report_all_dual_wipeouts(false);

    for (int b : net.values(x))
        if (b != a && net.remove_value(x, b, ! view) == Revision::wipeout)
            return false;

    if (view)
        return net.ac2001(false, std::span<const int>{&x, 1}) == Verdict::consistent;

    if (level == mac_level) {
        if (r == Representation::nonbinary || r == Representation::hve)
            return net.units_fixpoint(false, hve_units_of(x)) == Verdict::consistent;
        for (int u : hve_units_of(x))
            if (net.unit_dual(u) < 0)
                net.queue_unit(u);
        return net.double_propagate(DoubleMode::both) == Verdict::consistent;
    }

    if (r != Representation::nonbinary && level <= 1) {
        if (level == 0)
            return true;
        // FC+: each adjacent dual revises its other variables once.
        for (int v : hve_units_of(x)) {
            auto & scope = net.unit_scope(v);
            for (int p = 0; p < static_cast<int>(scope.size()); ++p) {
                int y = scope[p];
                if (net.assigned[y])
                    continue;
                if (net.revise(v, p) == Revision::wipeout || net.size(y) == 0)
                    return false;
            }
        }
        return true;
    }

    if (r == Representation::dbl) {
        net.activate_duals(la.units);
        Verdict v = Verdict::consistent;
        if (! la.fixpoint)
            v = net.double_one_pass(la.units);
        else {
            v = net.queue_empty_groups();
            if (v == Verdict::consistent) {
                net.queue_unsupported_values();
                v = net.double_propagate(DoubleMode::both);
            }
        }
        net.activate_all();
        return v == Verdict::consistent;
    }

    if (! la.fixpoint) {
        for (int u : la.units)
            if (net.unit_local(u) == Verdict::inconsistent)
                return false;
        return true;
    }
    net.activate_units(la.units);
    auto v = net.units_fixpoint(true);
    net.activate_all();
    return v == Verdict::consistent;
}

auto Solver::assign_dual(int v, int t) -> bool
{
    auto & net = *net_;
    net.trail.mark();
    net.clear_queues();
    frames_.push_back({{}, v});
    net.dual_assigned[v] = 1;
    net.report_all_dual_wipeouts(true);
    if (spec_.representation == Representation::de) {
        for (int s : net.tuples(v))
            if (s != t)
                net.remove_tuple(v, s);
        if (net.view_size() > 0) {
            int u = net.view_var_of_dual(v);
            return net.ac2001(false, std::span<const int>{&u, 1}) == Verdict::consistent;
        }
        return net.pw_propagate() == Verdict::consistent;
    }
    // Hidden model: the tuple fixes every variable of its scope at once.
    auto & dv = model_->duals[v];
    auto row = dv.tuples.row(t);
    std::vector<int> seeds;
    for (int i = 0; i < static_cast<int>(dv.scope.size()); ++i) {
        int x = dv.scope[i];
        if (net.assigned[x])
            continue;
        net.assigned[x] = 1;
        frames_.back().vars.push_back(x);
        for (int b : net.values(x))
            if (b != row[i] && net.remove_value(x, b, true) == Revision::wipeout)
                return false;
        for (int u : hve_units_of(x))
            seeds.push_back(u);
    }
    return net.units_fixpoint(false, seeds) == Verdict::consistent;
}

auto Solver::undo() -> void
{
    auto & net = *net_;
    net.trail.undo();
    net.clear_queues();
    auto & f = frames_.back();
    for (int x : f.vars)
        net.assigned[x] = 0;
    if (f.dual >= 0)
        net.dual_assigned[f.dual] = 0;
    frames_.pop_back();
}

auto Solver::dual_done(int v) const -> bool
{
    if (net_->dual_assigned[v])
        return true;
    if (spec_.representation == Representation::de)
        return false;
    for (int x : model_->duals[v].scope)
        if (! net_->assigned[x])
            return false;
    return true;
}

auto Solver::pick(int & var, bool & is_dual) -> bool
{
    auto & net = *net_;
    std::vector<Candidate> cands;
    std::vector<char> dual_flag;
    if (spec_.representation != Representation::de)
        for (int x = 0; x < net.n(); ++x)
            if (! net.assigned[x]) {
                cands.push_back({x, net.size(x), original_degree_[x]});
                dual_flag.push_back(0);
            }
    bool originals_left = ! cands.empty();
    if (spec_.branch == BranchSet::all_variables && (spec_.representation == Representation::de || originals_left))
        for (int v = 0; v < net.duals(); ++v)
            if (! dual_done(v)) {
                cands.push_back({v, net.dual_size(v), dual_degree_[v]});
                dual_flag.push_back(1);
            }
    if (cands.empty())
        return false;
    std::size_t i = options_.ordering == Ordering::fixed ? 0 : select_variable_dom_deg(cands);
    var = cands[i].id;
    is_dual = dual_flag[i];
    return true;
}

auto Solver::finish() -> bool
{
    auto & net = *net_;
    Tuple sol(problem_.n(), 0);
    if (spec_.representation == Representation::de) {
        sol = induced_assignment(*model_, complete_dual_assignments(net));
    }
    else {
        for (int x = 0; x < net.n(); ++x) {
            if (net.size(x) != 1)
                throw std::logic_error{"original variable " + std::to_string(x) + " is not a singleton at a leaf"};
            sol[x] = net.values(x).front();
        }
        if (model_) {
            auto induced = induced_assignment(*model_, complete_dual_assignments(net));
            for (auto & dv : model_->duals)
                for (int x : dv.scope)
                    if (induced[x] != sol[x])
                        throw std::logic_error{"dual completion disagrees with the original assignment"};
        }
    }
    if (! satisfies(problem_, sol))
        throw std::logic_error{"search produced an assignment violating a constraint"};
    solution_ = std::move(sol);
    return true;
}

auto Solver::out_of_budget() -> bool
{
    if (options_.node_limit && nodes_ >= options_.node_limit) {
        limit_verdict_ = SearchVerdict::node_limit;
        return true;
    }
    if (timed_ && std::chrono::steady_clock::now() >= deadline_) {
        limit_verdict_ = SearchVerdict::time_limit;
        return true;
    }
    return false;
}

auto Solver::dfs() -> Outcome
{
    int var = -1;
    bool is_dual = false;
    if (! pick(var, is_dual))
        return finish() ? Outcome::solved : Outcome::exhausted;
    auto choices = is_dual ? net_->tuples(var) : net_->values(var);
    for (int a : choices) {
        if (out_of_budget())
            return Outcome::limit;
        ++nodes_;
        path_.emplace_back(is_dual ? net_->n() + var : var, a);
        if (options_.record_nodes)
            trace_.push_back(path_);
        bool ok = is_dual ? assign_dual(var, a) : assign(var, a);
        if (ok) {
            auto r = dfs();
            if (r != Outcome::exhausted)
                return r;
        }
        undo();
        path_.pop_back();
    }
    return Outcome::exhausted;
}

auto Solver::run() -> SearchResult
{
    auto start = std::chrono::steady_clock::now();
    timed_ = options_.time_limit.count() > 0;
    deadline_ = start + options_.time_limit;
    nodes_ = 0;
    trace_.clear();
    path_.clear();

    SearchResult res;
    Outcome o = root() ? dfs() : Outcome::exhausted;
    switch (o) {
    case Outcome::solved:
        res.verdict = SearchVerdict::sat;
        res.solution = solution_;
        break;
    case Outcome::exhausted: res.verdict = SearchVerdict::unsat; break;
    case Outcome::limit: res.verdict = limit_verdict_; break;
    }
    res.nodes = nodes_;
    res.counters = net_->counters;
    res.mem_bytes = net_->table_bytes() + (model_ ? model_->tuple_bytes() : 0);
    res.trace = std::move(trace_);
    res.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return res;
}

auto solve(const Problem & p, const AlgorithmSpec & spec, const SearchOptions & options) -> SearchResult
{
    Solver s(p, spec, options);
    return s.run();
}

} // namespace bincsp
