#include <bincsp/encode.hpp>

#include <algorithm>
#include <map>

namespace bincsp {

auto to_string(Encoding e) -> std::string
{
    switch (e) {
    case Encoding::hve: return "hve";
    case Encoding::de: return "de";
    case Encoding::dbl: return "double";
    case Encoding::hybrid: return "hybrid";
    }
    return "?";
}

auto DualVariable::pos(int x) const -> int
{
    auto it = std::find(scope.begin(), scope.end(), x);
    return it == scope.end() ? -1 : static_cast<int>(it - scope.begin());
}

auto EncodedProblem::duals_of(int x) const -> std::vector<int>
{
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(duals.size()); ++v)
        if (duals[v].pos(x) >= 0)
            out.push_back(v);
    return out;
}

auto EncodedProblem::neighbours(int dual) const -> std::vector<int>
{
    std::vector<int> out;
    for (auto & dc : dual_constraints) {
        if (dc.vi == dual)
            out.push_back(dc.vj);
        else if (dc.vj == dual)
            out.push_back(dc.vi);
    }
    return out;
}

auto EncodedProblem::dual_degree(int dual) const -> int
{
    int d = static_cast<int>(neighbours(dual).size());
    if (has_originals)
        d += static_cast<int>(duals[dual].scope.size());
    return d;
}

auto EncodedProblem::state() const -> DomainState
{
    auto s = DomainState::full(source);
    for (auto & v : duals)
        s.duals.emplace_back(v.size());
    return s;
}

auto EncodedProblem::tuple_bytes() const -> std::size_t
{
    std::size_t bytes = 0;
    for (auto & v : duals)
        bytes += v.scope.size() * v.tuples.size() * sizeof(Value);
    return bytes;
}

namespace {
    auto make_duals(EncodedProblem & ep, const std::vector<int> & encoded, std::size_t budget) -> void
    {
        auto & p = ep.source;
        ep.dual_of_constraint.assign(p.e(), -1);
        for (int c : encoded) {
            ep.dual_of_constraint[c] = static_cast<int>(ep.duals.size());
            ep.duals.push_back({c, p.constraints[c].scope, relation_of(p, p.constraints[c], budget)});
        }
        for (int c = 0; c < p.e(); ++c)
            if (ep.dual_of_constraint[c] < 0)
                ep.residual.push_back(c);
    }

    auto make_hidden(EncodedProblem & ep) -> void
    {
        for (int v = 0; v < static_cast<int>(ep.duals.size()); ++v)
            for (int i = 0; i < static_cast<int>(ep.duals[v].scope.size()); ++i)
                ep.hidden.push_back({v, ep.duals[v].scope[i], i});
    }

    auto make_dual_constraints(EncodedProblem & ep) -> void
    {
        int m = static_cast<int>(ep.duals.size());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                DualConstraint dc{i, j, {}};
                auto & a = ep.duals[i];
                auto & b = ep.duals[j];
                for (int pi = 0; pi < static_cast<int>(a.scope.size()); ++pi)
                    if (int pj = b.pos(a.scope[pi]); pj >= 0)
                        dc.shared.push_back({a.scope[pi], pi, pj});
                if (dc.shared.empty())
                    continue;
                auto s_ij = piecewise_decomposition(ep.source, a, i, b, j, dc.shared, true);
                auto s_ji = piecewise_decomposition(ep.source, b, j, a, i, dc.shared, false);
                link_decompositions(s_ij, s_ji);
                ep.decompositions.push_back(std::move(s_ij));
                ep.decompositions.push_back(std::move(s_ji));
                ep.dual_constraints.push_back(std::move(dc));
            }
    }

    auto all_constraints(const Problem & p) -> std::vector<int>
    {
        std::vector<int> all(p.e());
        for (int c = 0; c < p.e(); ++c)
            all[c] = c;
        return all;
    }
}

auto piecewise_decomposition(const Problem & p, const DualVariable & owner, int owner_id, const DualVariable &,
    int peer_id, std::span<const SharedVariable> shared, bool owner_is_first) -> Decomposition
{
    if (shared.empty())
        throw UsageError{"piecewise decomposition needs at least one shared variable"};
    Decomposition d;
    d.owner = owner_id;
    d.peer = peer_id;
    for (auto & s : shared)
        d.positions.push_back(owner_is_first ? s.pos_i : s.pos_j);

    std::map<std::int64_t, int> id_of_key;
    d.group_of_tuple.resize(owner.size());
    for (int t = 0; t < owner.size(); ++t) {
        auto row = owner.tuples.row(t);
        std::int64_t key = 0;
        for (int q : d.positions)
            key = key * p.domain_size(owner.scope[q]) + row[q];
        auto [it, fresh] = id_of_key.try_emplace(key, d.groups());
        if (fresh) {
            d.keys.push_back(key);
            d.members.emplace_back();
        }
        d.group_of_tuple[t] = it->second;
        d.members[it->second].push_back(t);
    }
    d.sup.assign(d.groups(), Decomposition::none);
    return d;
}

auto link_decompositions(Decomposition & a, Decomposition & b) -> void
{
    std::map<std::int64_t, int> in_b;
    for (int g = 0; g < b.groups(); ++g)
        in_b.emplace(b.keys[g], g);
    b.sup.assign(b.groups(), Decomposition::none);
    for (int g = 0; g < a.groups(); ++g) {
        auto it = in_b.find(a.keys[g]);
        a.sup[g] = it == in_b.end() ? Decomposition::none : it->second;
        if (it != in_b.end())
            b.sup[it->second] = g;
    }
}

auto build_hve(const Problem & p, std::size_t budget) -> EncodedProblem
{
    EncodedProblem ep;
    ep.kind = Encoding::hve;
    ep.source = p;
    make_duals(ep, all_constraints(p), budget);
    make_hidden(ep);
    return ep;
}

auto build_de(const Problem & p, std::size_t budget) -> EncodedProblem
{
    EncodedProblem ep;
    ep.kind = Encoding::de;
    ep.source = p;
    ep.has_originals = false;
    make_duals(ep, all_constraints(p), budget);
    make_dual_constraints(ep);
    return ep;
}

auto build_double(const Problem & p, std::optional<std::vector<int>> subset, std::size_t budget) -> EncodedProblem
{
    EncodedProblem ep;
    ep.source = p;
    auto chosen = subset ? *subset : all_constraints(p);
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    for (int c : chosen)
        if (c < 0 || c >= p.e())
            throw UsageError{"encoded subset names an unknown constraint"};
    ep.kind = static_cast<int>(chosen.size()) == p.e() ? Encoding::dbl : Encoding::hybrid;
    make_duals(ep, chosen, budget);
    make_hidden(ep);
    make_dual_constraints(ep);
    return ep;
}

auto ac1_dual_fixpoint(const EncodedProblem & ep, const DomainState & start) -> FixpointResult
{
    FixpointResult r{start, false};
    auto & dom = r.state.duals;
    auto agree = [&](const DualConstraint & dc, int ti, int tj) {
        auto a = ep.duals[dc.vi].tuples.row(ti);
        auto b = ep.duals[dc.vj].tuples.row(tj);
        for (auto & s : dc.shared)
            if (a[s.pos_i] != b[s.pos_j])
                return false;
        return true;
    };
    r.wipeout = std::any_of(dom.begin(), dom.end(), [](auto & b) { return b.empty(); });
    bool changed = ! r.wipeout;
    while (changed) {
        changed = false;
        for (auto & dc : ep.dual_constraints)
            for (int side = 0; side < 2; ++side) {
                int u = side == 0 ? dc.vi : dc.vj;
                int w = side == 0 ? dc.vj : dc.vi;
                auto peer = dom[w].members();
                for (int t : dom[u].members()) {
                    bool ok = std::any_of(peer.begin(), peer.end(),
                        [&](int s) { return side == 0 ? agree(dc, t, s) : agree(dc, s, t); });
                    if (! ok) {
                        dom[u].reset(t);
                        changed = true;
                    }
                }
                if (dom[u].empty()) {
                    r.wipeout = true;
                    return r;
                }
            }
    }
    return r;
}

auto induced_assignment(const EncodedProblem & ep, std::span<const int> tuple_of_dual) -> Tuple
{
    Tuple a(ep.source.n(), 0);
    for (std::size_t v = 0; v < ep.duals.size(); ++v) {
        auto row = ep.duals[v].tuples.row(tuple_of_dual[v]);
        for (std::size_t i = 0; i < row.size(); ++i)
            a[ep.duals[v].scope[i]] = row[i];
    }
    return a;
}

} // namespace bincsp
