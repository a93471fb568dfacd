#include <bincsp/network.hpp>

#include <algorithm>

namespace bincsp {

auto to_string(Verdict v) -> std::string
{
    return v == Verdict::consistent ? "consistent" : "inconsistent";
}

auto Trail::undo() -> void
{
    auto [w, i] = marks_.back();
    marks_.pop_back();
    while (words_.size() > w) {
        *words_.back().first = words_.back().second;
        words_.pop_back();
    }
    while (ints_.size() > i) {
        *ints_.back().first = ints_.back().second;
        ints_.pop_back();
    }
}

namespace {
    auto words_for(int bits) -> int { return (bits + 63) / 64; }

    auto fill(std::vector<std::uint64_t> & w, int base, int bits) -> void
    {
        for (int i = 0; i < bits; ++i)
            w[base + (i >> 6)] |= std::uint64_t{1} << (i & 63);
    }
}

Network::Network(const Problem & p, std::size_t budget) : problem_(&p)
{
    init_domains();
    owned_tables_.reserve(p.e());
    for (int c = 0; c < p.e(); ++c) {
        auto & con = p.constraints[c];
        if (con.extensional()) {
            add_unit(c, -1, con.scope, &con.table(), nullptr);
            continue;
        }
        try {
            owned_tables_.push_back(expand_predicate(p, con, budget));
            add_unit(c, -1, con.scope, &owned_tables_.back(), nullptr);
        }
        catch (const CapacityError &) {
            add_unit(c, -1, con.scope, nullptr, &con.predicate());
        }
    }
    index_units();
}

Network::Network(const EncodedProblem & ep, bool binary_view) : problem_(&ep.source), enc_(&ep)
{
    auto & p = ep.source;
    init_domains();
    int m = static_cast<int>(ep.duals.size());
    if (ep.has_originals) {
        var_duals_.resize(p.n());
        for (int v = 0; v < m; ++v) {
            add_unit(ep.duals[v].source, v, ep.duals[v].scope, &ep.duals[v].tuples, nullptr);
            for (int i = 0; i < static_cast<int>(ep.duals[v].scope.size()); ++i)
                var_duals_[ep.duals[v].scope[i]].emplace_back(v, i);
        }
        owned_tables_.reserve(ep.residual.size());
        for (int c : ep.residual) {
            auto & con = p.constraints[c];
            if (con.extensional())
                add_unit(c, -1, con.scope, &con.table(), nullptr);
            else
                add_unit(c, -1, con.scope, nullptr, &con.predicate());
        }
    }
    index_units();

    decomps_of_dual_.resize(m);
    for (int d = 0; d < static_cast<int>(ep.decompositions.size()); ++d)
        decomps_of_dual_[ep.decompositions[d].owner].push_back(d);
    for (auto & list : decomps_of_dual_)
        std::sort(list.begin(), list.end(), [&](int a, int b) {
            return ep.decompositions[a].peer < ep.decompositions[b].peer;
        });

    if (binary_view) {
        view_ = true;
        build_view();
    }
    else if (! ep.decompositions.empty()) {
        groups_ = true;
        for (int d = 0; d < static_cast<int>(ep.decompositions.size()); ++d) {
            group_base_.push_back(static_cast<int>(cnt_.size()));
            for (int g = 0; g < ep.decompositions[d].groups(); ++g) {
                cnt_.push_back(0);
                decomp_of_group_.push_back(d);
            }
        }
        group_queued_.assign(cnt_.size(), 0);
    }
    // Double and hybrid models count hidden supports even without dual-dual
    // constraints (a single constraint still prunes its originals through the dual).
    if (! binary_view)
        hidden_counts_ = ep.kind == Encoding::dbl || ep.kind == Encoding::hybrid;
    if (hidden_counts_) {
        hc_base_.resize(m);
        for (int v = 0; v < m; ++v)
            for (int x : ep.duals[v].scope) {
                hc_base_[v].push_back(static_cast<int>(hc_.size()));
                hc_.resize(hc_.size() + p.domain_size(x), 0);
            }
    }
    activate_all();
}

auto Network::init_domains() -> void
{
    auto & p = *problem_;
    for (int x = 0; x < p.n(); ++x) {
        var_base_.push_back(static_cast<int>(var_words_.size()));
        var_words_.resize(var_words_.size() + words_for(p.domain_size(x)), 0);
        fill(var_words_, var_base_.back(), p.domain_size(x));
        var_size_.push_back(p.domain_size(x));
    }
    if (enc_)
        for (auto & v : enc_->duals) {
            dual_base_.push_back(static_cast<int>(dual_words_.size()));
            dual_words_.resize(dual_words_.size() + words_for(v.size()), 0);
            fill(dual_words_, dual_base_.back(), v.size());
            dual_size_.push_back(v.size());
        }
    assigned.assign(p.n(), 0);
    dual_assigned.assign(dual_size_.size(), 0);
    report_dual_.assign(dual_size_.size(), 1);
}

auto Network::add_unit(int constraint, int dual, const std::vector<int> & scope, const Table * table,
    const Predicate * predicate) -> void
{
    auto & p = *problem_;
    Unit u;
    u.constraint = constraint;
    u.dual = dual;
    u.scope = scope;
    u.table = table;
    u.predicate = predicate;
    int k = static_cast<int>(scope.size());
    if (table) {
        for (int i = 0; i < k; ++i) {
            int d = p.domain_size(scope[i]);
            u.bucket_base.push_back(static_cast<int>(u.bucket_start.size()));
            std::vector<std::vector<int>> lists(d);
            for (std::size_t t = 0; t < table->size(); ++t)
                lists[table->row(t)[i]].push_back(static_cast<int>(t));
            for (auto & l : lists) {
                u.bucket_start.push_back(static_cast<int>(u.bucket_items.size()));
                u.bucket_items.insert(u.bucket_items.end(), l.begin(), l.end());
            }
            u.bucket_start.push_back(static_cast<int>(u.bucket_items.size()));
            u.support_base.push_back(static_cast<int>(support_.size()));
            support_.resize(support_.size() + d, -1);
        }
    }
    else {
        u.weight.assign(k, 1);
        u.total = 1;
        for (int i = k - 1; i >= 0; --i) {
            u.weight[i] = u.total;
            u.total *= p.domain_size(scope[i]);
        }
        for (int i = 0; i < k; ++i) {
            u.support_base.push_back(static_cast<int>(isupport_.size()));
            isupport_.resize(isupport_.size() + p.domain_size(scope[i]), 0);
        }
    }
    units_.push_back(std::move(u));
}

auto Network::index_units() -> void
{
    var_units_.assign(problem_->n(), {});
    for (int u = 0; u < units(); ++u)
        for (int i = 0; i < static_cast<int>(units_[u].scope.size()); ++i)
            var_units_[units_[u].scope[i]].emplace_back(u, i);
    unit_active_.assign(units_.size(), 1);
    unit_queued_.assign(units_.size(), 0);
}

auto Network::values(int x) const -> std::vector<int>
{
    std::vector<int> out;
    for (int a = 0; a < problem_->domain_size(x); ++a)
        if (live(x, a))
            out.push_back(a);
    return out;
}

auto Network::tuples(int v) const -> std::vector<int>
{
    std::vector<int> out;
    for (int t = 0; t < enc_->duals[v].size(); ++t)
        if (dual_live(v, t))
            out.push_back(t);
    return out;
}

auto Network::any_original_empty() const -> bool
{
    return std::any_of(var_size_.begin(), var_size_.end(), [](auto s) { return s == 0; });
}

auto Network::any_dual_empty() const -> bool
{
    return std::any_of(dual_size_.begin(), dual_size_.end(), [](auto s) { return s == 0; });
}

auto Network::state() const -> DomainState
{
    DomainState s;
    for (int x = 0; x < n(); ++x) {
        Bitset b(problem_->domain_size(x), false);
        for (int a : values(x))
            b.set(a);
        s.vars.push_back(std::move(b));
    }
    for (int v = 0; v < duals(); ++v) {
        Bitset b(enc_->duals[v].size(), false);
        for (int t : tuples(v))
            b.set(t);
        s.duals.push_back(std::move(b));
    }
    return s;
}

auto Network::load(const DomainState & s) -> void
{
    if (static_cast<int>(s.vars.size()) != n())
        throw UsageError{"domain state has the wrong number of variables"};
    for (int x = 0; x < n(); ++x) {
        if (s.vars[x].size() != problem_->domain_size(x))
            throw UsageError{"domain state has the wrong domain size"};
        for (int a = 0; a < s.vars[x].size(); ++a)
            if (! s.vars[x].test(a) && live(x, a))
                clear_var(x, a);
    }
    if (! enc_)
        return;
    bool with_duals = static_cast<int>(s.duals.size()) == duals();
    for (int v = 0; v < duals(); ++v) {
        auto & dv = enc_->duals[v];
        for (int t = 0; t < dv.size(); ++t) {
            if (! dual_live(v, t))
                continue;
            bool keep = ! with_duals || s.duals[v].test(t);
            auto row = dv.tuples.row(t);
            for (int i = 0; keep && i < static_cast<int>(row.size()); ++i)
                keep = live(dv.scope[i], row[i]);
            if (! keep) {
                dual_words_[dual_base_[v] + (t >> 6)] &= ~(std::uint64_t{1} << (t & 63));
                --dual_size_[v];
            }
        }
    }
}

auto Network::activate_all() -> void
{
    std::fill(unit_active_.begin(), unit_active_.end(), 1);
    dual_active_.assign(dual_size_.size(), 1);
    if (enc_)
        decomp_active_.assign(enc_->decompositions.size(), 1);
}

auto Network::activate_units(std::span<const int> list) -> void
{
    std::fill(unit_active_.begin(), unit_active_.end(), 0);
    dual_active_.assign(dual_size_.size(), 0);
    for (int u : list) {
        unit_active_[u] = 1;
        if (units_[u].dual >= 0)
            dual_active_[units_[u].dual] = 1;
    }
    if (enc_) {
        decomp_active_.assign(enc_->decompositions.size(), 0);
        for (std::size_t d = 0; d < enc_->decompositions.size(); ++d)
            decomp_active_[d] = dual_active_[enc_->decompositions[d].owner] && dual_active_[enc_->decompositions[d].peer];
    }
}

auto Network::activate_duals(std::span<const int> list) -> void
{
    std::vector<int> hidden_units;
    for (int v : list)
        if (enc_ && enc_->has_originals)
            hidden_units.push_back(v); // hidden unit ids coincide with dual ids
    activate_units(hidden_units);
    for (int v : list)
        dual_active_[v] = 1;
    if (enc_)
        for (std::size_t d = 0; d < enc_->decompositions.size(); ++d)
            decomp_active_[d] = dual_active_[enc_->decompositions[d].owner] && dual_active_[enc_->decompositions[d].peer];
}

auto Network::report_all_dual_wipeouts(bool on) -> void
{
    std::fill(report_dual_.begin(), report_dual_.end(), on ? 1 : 0);
}

auto Network::report_dual_wipeouts(std::span<const int> list) -> void
{
    report_all_dual_wipeouts(false);
    for (int v : list)
        report_dual_[v] = 1;
}

auto Network::clear_var(int x, int a) -> void
{
    auto & w = var_words_[var_base_[x] + (a >> 6)];
    trail.save(w);
    trail.save(var_size_[x]);
    w &= ~(std::uint64_t{1} << (a & 63));
    --var_size_[x];
}

auto Network::remove_value(int x, int a, bool eager) -> Revision
{
    if (! live(x, a))
        return Revision::no_change;
    clear_var(x, a);
    ++counters.value_removals;
    if (push_on_removal_)
        for (auto [u, p] : var_units_[x])
            if (units_[u].dual < 0 && unit_active_[u])
                push_unit(u);
    if (eager && ! var_duals_.empty())
        for (auto [v, pos] : var_duals_[x]) {
            for (int t : bucket(units_[v], pos, a))
                if (dual_live(v, t))
                    remove_tuple(v, t);
            if (dual_size_[v] == 0 && report_dual_[v])
                return Revision::wipeout;
        }
    return Revision::changed;
}

auto Network::remove_tuple(int v, int t) -> void
{
    if (! dual_live(v, t))
        return;
    auto & w = dual_words_[dual_base_[v] + (t >> 6)];
    trail.save(w);
    trail.save(dual_size_[v]);
    w &= ~(std::uint64_t{1} << (t & 63));
    --dual_size_[v];
    ++counters.tuple_removals;
    if (groups_)
        for (int d : decomps_of_dual_[v]) {
            int gid = group_base_[d] + enc_->decompositions[d].group_of(t);
            trail.save(cnt_[gid]);
            ++counters.counter_updates;
            if (--cnt_[gid] == 0)
                pending_groups_.push_back(gid);
        }
    if (hidden_counts_) {
        auto & dv = enc_->duals[v];
        auto row = dv.tuples.row(t);
        for (int i = 0; i < static_cast<int>(row.size()); ++i) {
            int idx = hc_base_[v][i] + row[i];
            trail.save(hc_[idx]);
            ++counters.counter_updates;
            if (--hc_[idx] == 0)
                pending_values_.push_back({v, dv.scope[i], row[i]});
        }
    }
}

auto Network::bucket(const Unit & u, int p, int a) const -> std::span<const int>
{
    int s = u.bucket_start[u.bucket_base[p] + a];
    int e = u.bucket_start[u.bucket_base[p] + a + 1];
    return {u.bucket_items.data() + s, static_cast<std::size_t>(e - s)};
}

auto Network::tuple_valid(const Unit & u, int t) -> bool
{
    if (u.dual >= 0) {
        ++counters.micro_ops;
        return dual_live(u.dual, t);
    }
    auto row = u.table->row(t);
    counters.micro_ops += row.size();
    for (std::size_t i = 0; i < row.size(); ++i)
        if (! live(u.scope[i], row[i]))
            return false;
    return true;
}

auto Network::revise(int ui, int p) -> Revision
{
    auto & u = units_[ui];
    int x = u.scope[p];
    bool deleted = false;
    for (int a = 0; a < problem_->domain_size(x); ++a) {
        if (! live(x, a))
            continue;
        bool supported = false;
        if (u.table) {
            auto & cs = support_[u.support_base[p] + a];
            auto items = bucket(u, p, a);
            if (cs >= 0 && tuple_valid(u, items[cs]))
                continue;
            bool resumed = cs >= 0;
            for (int r = cs + 1; r < static_cast<int>(items.size()); ++r) {
                ++counters.tuple_checks;
                if (resumed)
                    ++counters.resumed_checks;
                if (tuple_valid(u, items[r])) {
                    trail.save(cs);
                    cs = r;
                    supported = true;
                    break;
                }
            }
        }
        else
            supported = revise_intensional(u, p, a);
        if (supported)
            continue;
        deleted = true;
        if (remove_value(x, a, eager_rule_deletions_) == Revision::wipeout)
            return Revision::wipeout;
    }
    return deleted ? Revision::changed : Revision::no_change;
}

auto Network::revise_intensional(Unit & u, int p, int a) -> bool
{
    int k = static_cast<int>(u.scope.size());
    auto & cs = isupport_[u.support_base[p] + a];
    std::vector<int> t(k);
    if (cs > 0) {
        auto rank = static_cast<std::int64_t>(cs - 1);
        for (int i = 0; i < k; ++i)
            t[i] = static_cast<int>(rank / u.weight[i] % problem_->domain_size(u.scope[i]));
        counters.micro_ops += k;
        bool valid = true;
        for (int i = 0; i < k && valid; ++i)
            valid = live(u.scope[i], t[i]);
        if (valid)
            return true;
    }
    if (! next_valid(u, p, a, static_cast<std::int64_t>(cs), t, cs > 0))
        return false;
    std::int64_t rank = 0;
    for (int i = 0; i < k; ++i)
        rank += t[i] * u.weight[i];
    trail.save(cs);
    cs = static_cast<std::uint64_t>(rank + 1);
    return true;
}

// Smallest tuple of rank >= from, with value a at position p, made of live values
// and satisfying the predicate. Every predicate evaluation is one check.
auto Network::next_valid(const Unit & u, int p, int a, std::int64_t from, std::vector<int> & out, bool resumed)
    -> bool
{
    if (from >= u.total)
        return false;
    auto & pb = *problem_;
    int k = static_cast<int>(u.scope.size());
    std::vector<int> floor(k), labels(k);
    for (int i = 0; i < k; ++i)
        floor[i] = static_cast<int>(from / u.weight[i] % pb.domain_size(u.scope[i]));
    auto rec = [&](auto & self, int i, bool tight) -> bool {
        if (i == k) {
            ++counters.tuple_checks;
            if (resumed)
                ++counters.resumed_checks;
            return evaluate(*u.predicate, labels);
        }
        int x = u.scope[i];
        int lo = tight ? floor[i] : 0;
        int hi = pb.domain_size(x) - 1;
        if (i == p) {
            if (a < lo)
                return false;
            lo = hi = a;
        }
        for (int b = lo; b <= hi; ++b) {
            if (! live(x, b))
                continue;
            out[i] = b;
            labels[i] = pb.variables[x].labels[b];
            if (self(self, i + 1, tight && b == floor[i]))
                return true;
        }
        return false;
    };
    return rec(rec, 0, true);
}

auto Network::push_unit(int u) -> void
{
    if (unit_queued_[u])
        return;
    unit_queued_[u] = 1;
    unit_stack_.push_back(u);
}

auto Network::push_units_of(int x) -> void
{
    for (auto [u, p] : var_units_[x])
        if (unit_active_[u])
            push_unit(u);
}

auto Network::clear_queues() -> void
{
    for (int u : unit_stack_)
        unit_queued_[u] = 0;
    unit_stack_.clear();
    for (int g : group_stack_)
        group_queued_[g] = 0;
    group_stack_.clear();
    pending_groups_.clear();
    pending_values_.clear();
    for (int u : view_stack_)
        view_queued_[u] = 0;
    view_stack_.clear();
}

auto Network::units_fixpoint(bool init, std::span<const int> seed) -> Verdict
{
    clear_queues();
    auto visit = [&](int u) {
        auto & scope = units_[u].scope;
        for (int p = 0; p < static_cast<int>(scope.size()); ++p) {
            int x = scope[p];
            if (assigned[x])
                continue;
            auto r = revise(u, p);
            if (r == Revision::wipeout)
                return false;
            if (r == Revision::changed) {
                if (var_size_[x] == 0)
                    return false;
                push_units_of(x);
            }
        }
        return true;
    };
    if (init) {
        for (int u = 0; u < units(); ++u)
            if (unit_active_[u] && ! visit(u)) {
                clear_queues();
                return Verdict::inconsistent;
            }
    }
    else
        for (int u : seed)
            if (unit_active_[u])
                push_unit(u);
    while (! unit_stack_.empty()) {
        int u = unit_stack_.back();
        unit_stack_.pop_back();
        unit_queued_[u] = 0;
        if (! visit(u)) {
            clear_queues();
            return Verdict::inconsistent;
        }
    }
    return Verdict::consistent;
}

auto Network::unit_local(int u) -> Verdict
{
    auto & scope = units_[u].scope;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int p = 0; p < static_cast<int>(scope.size()); ++p) {
            int x = scope[p];
            if (assigned[x])
                continue;
            auto r = revise(u, p);
            if (r == Revision::wipeout || var_size_[x] == 0)
                return Verdict::inconsistent;
            changed = changed || r == Revision::changed;
        }
    }
    return Verdict::consistent;
}

auto Network::count_groups() -> void
{
    if (! groups_)
        return;
    for (int d = 0; d < static_cast<int>(enc_->decompositions.size()); ++d) {
        auto & dec = enc_->decompositions[d];
        for (int g = 0; g < dec.groups(); ++g) {
            auto & c = cnt_[group_base_[d] + g];
            trail.save(c);
            c = 0;
            for (int t : dec.members[g])
                if (dual_live(dec.owner, t)) {
                    ++c;
                    ++counters.counter_updates;
                }
        }
    }
}

auto Network::count_hidden() -> void
{
    if (! hidden_counts_)
        return;
    for (int v = 0; v < duals(); ++v) {
        auto & dv = enc_->duals[v];
        for (int i = 0; i < static_cast<int>(dv.scope.size()); ++i)
            for (int a = 0; a < problem_->domain_size(dv.scope[i]); ++a) {
                trail.save(hc_[hc_base_[v][i] + a]);
                hc_[hc_base_[v][i] + a] = 0;
            }
        for (int t = 0; t < dv.size(); ++t) {
            if (! dual_live(v, t))
                continue;
            auto row = dv.tuples.row(t);
            for (int i = 0; i < static_cast<int>(row.size()); ++i) {
                ++hc_[hc_base_[v][i] + row[i]];
                ++counters.counter_updates;
            }
        }
    }
}

auto Network::flush_groups() -> void
{
    for (int gid : pending_groups_)
        if (decomp_active_[decomp_of_group_[gid]] && ! group_queued_[gid]) {
            group_queued_[gid] = 1;
            group_stack_.push_back(gid);
        }
    pending_groups_.clear();
}

auto Network::queue_empty_groups() -> Verdict
{
    if (! groups_)
        return Verdict::consistent;
    auto & decs = enc_->decompositions;
    for (int v = 0; v < duals(); ++v)
        for (int d : decomps_of_dual_[v]) {
            if (! decomp_active_[d])
                continue;
            for (int g = 0; g < decs[d].groups(); ++g)
                if (cnt_[group_base_[d] + g] == 0)
                    pending_groups_.push_back(group_base_[d] + g);
        }
    // A group whose key never occurs on the peer side supports nothing there, so its
    // tuples have no support at all. The strip is one simultaneous pass; emptiness is
    // judged once it is complete.
    for (int v = 0; v < duals(); ++v)
        for (int d : decomps_of_dual_[v]) {
            if (! decomp_active_[d])
                continue;
            for (int g = 0; g < decs[d].groups(); ++g)
                if (decs[d].sup[g] == Decomposition::none && cnt_[group_base_[d] + g] > 0)
                    for (int t : decs[d].members[g])
                        remove_tuple(v, t);
        }
    for (int v = 0; v < duals(); ++v)
        if (dual_size_[v] == 0 && report_dual_[v])
            return Verdict::inconsistent;
    flush_groups();
    return Verdict::consistent;
}

auto Network::queue_unsupported_values() -> void
{
    if (! hidden_counts_)
        return;
    for (int v = 0; v < duals(); ++v) {
        if (! dual_active_[v])
            continue;
        auto & dv = enc_->duals[v];
        for (int i = 0; i < static_cast<int>(dv.scope.size()); ++i)
            for (int a = 0; a < problem_->domain_size(dv.scope[i]); ++a)
                if (live(dv.scope[i], a) && hc_[hc_base_[v][i] + a] == 0)
                    pending_values_.push_back({v, dv.scope[i], a});
    }
}

auto Network::pw_revise(int gid) -> Verdict
{
    int d = decomp_of_group_[gid];
    int g = gid - group_base_[d];
    int sg = enc_->decompositions[d].sup[g];
    if (sg == Decomposition::none)
        return Verdict::consistent;
    auto & other = enc_->decompositions[d ^ 1];
    int vj = other.owner;
    for (int t : other.members[sg])
        if (dual_live(vj, t))
            remove_tuple(vj, t);
    if (dual_size_[vj] == 0 && report_dual_[vj])
        return Verdict::inconsistent;
    flush_groups();
    return Verdict::consistent;
}

auto Network::pw_propagate() -> Verdict
{
    flush_groups();
    while (! group_stack_.empty()) {
        int gid = group_stack_.back();
        group_stack_.pop_back();
        group_queued_[gid] = 0;
        if (pw_revise(gid) == Verdict::inconsistent) {
            clear_queues();
            return Verdict::inconsistent;
        }
    }
    return Verdict::consistent;
}

auto Network::pw_strip(int v) -> void
{
    if (! groups_)
        return;
    auto & decs = enc_->decompositions;
    for (int d : decomps_of_dual_[v]) {
        if (! decomp_active_[d])
            continue;
        int partner_base = group_base_[d ^ 1];
        for (int g = 0; g < decs[d].groups(); ++g) {
            if (cnt_[group_base_[d] + g] == 0)
                continue;
            int sg = decs[d].sup[g];
            if (sg != Decomposition::none && cnt_[partner_base + sg] > 0)
                continue;
            for (int t : decs[d].members[g])
                remove_tuple(v, t);
        }
    }
    pending_groups_.clear();
    pending_values_.clear();
}

auto Network::double_one_pass(std::span<const int> list) -> Verdict
{
    for (int v : list)
        if (unit_local(v) == Verdict::inconsistent)
            return Verdict::inconsistent;
    for (int v : list)
        pw_strip(v);
    for (int v : list)
        if (dual_size_[v] == 0)
            return Verdict::inconsistent;
    for (int v : list)
        if (unit_local(v) == Verdict::inconsistent)
            return Verdict::inconsistent;
    return Verdict::consistent;
}

auto Network::double_propagate(DoubleMode mode) -> Verdict
{
    bool saved_eager = eager_rule_deletions_;
    eager_rule_deletions_ = mode != DoubleMode::dual_dual;
    push_on_removal_ = true;
    auto fail = [&] {
        clear_queues();
        eager_rule_deletions_ = saved_eager;
        push_on_removal_ = false;
        return Verdict::inconsistent;
    };
    for (;;) {
        if (! pending_values_.empty()) {
            auto pv = pending_values_.back();
            pending_values_.pop_back();
            if (! dual_active_[pv.dual] || ! live(pv.var, pv.value))
                continue;
            if (remove_value(pv.var, pv.value, eager_rule_deletions_) == Revision::wipeout || var_size_[pv.var] == 0)
                return fail();
            continue;
        }
        flush_groups();
        if (! group_stack_.empty()) {
            int gid = group_stack_.back();
            group_stack_.pop_back();
            group_queued_[gid] = 0;
            if (pw_revise(gid) == Verdict::inconsistent)
                return fail();
            continue;
        }
        if (! unit_stack_.empty()) {
            int u = unit_stack_.back();
            unit_stack_.pop_back();
            unit_queued_[u] = 0;
            auto & scope = units_[u].scope;
            for (int p = 0; p < static_cast<int>(scope.size()); ++p) {
                int x = scope[p];
                if (assigned[x])
                    continue;
                auto r = revise(u, p);
                if (r == Revision::wipeout || var_size_[x] == 0)
                    return fail();
            }
            continue;
        }
        break;
    }
    eager_rule_deletions_ = saved_eager;
    push_on_removal_ = false;
    return Verdict::consistent;
}

auto Network::table_bytes() const -> std::size_t
{
    std::size_t bytes = 0;
    for (auto & u : units_)
        if (u.table && u.dual < 0)
            bytes += u.scope.size() * u.table->size() * sizeof(Value);
    return bytes;
}

auto Network::counters_consistent() const -> bool
{
    if (! groups_)
        return true;
    for (int d = 0; d < static_cast<int>(enc_->decompositions.size()); ++d) {
        auto & dec = enc_->decompositions[d];
        for (int g = 0; g < dec.groups(); ++g) {
            int live_members = 0;
            for (int t : dec.members[g])
                live_members += dual_live(dec.owner, t) ? 1 : 0;
            if (live_members != cnt_[group_base_[d] + g])
                return false;
        }
    }
    return true;
}

auto Network::build_view() -> void
{
    auto & ep = *enc_;
    int m = duals();
    view_dual_base_ = ep.has_originals ? n() : 0;
    int total = view_dual_base_ + m;
    view_arcs_from_.assign(total, {});
    view_arcs_into_.assign(total, {});
    auto add = [&](Arc a) {
        a.last_base = static_cast<int>(last_.size());
        last_.resize(last_.size() + view_domain(a.from), -1);
        view_arcs_from_[a.from].push_back(static_cast<int>(arcs_.size()));
        view_arcs_into_[a.to].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back(a);
    };
    if (ep.has_originals)
        for (int x = 0; x < n(); ++x)
            for (auto [v, pos] : var_duals_[x])
                add({x, view_dual_base_ + v, 1, v, pos, -1, true, 0});
    for (int v = 0; v < m; ++v) {
        if (ep.has_originals)
            for (int pos = 0; pos < static_cast<int>(ep.duals[v].scope.size()); ++pos)
                add({view_dual_base_ + v, ep.duals[v].scope[pos], 0, v, pos, -1, true, 0});
        std::vector<std::pair<int, int>> peers;
        for (int c = 0; c < static_cast<int>(ep.dual_constraints.size()); ++c) {
            auto & dc = ep.dual_constraints[c];
            if (dc.vi == v)
                peers.emplace_back(dc.vj, c);
            else if (dc.vj == v)
                peers.emplace_back(dc.vi, c);
        }
        std::sort(peers.begin(), peers.end());
        for (auto [w, c] : peers)
            add({view_dual_base_ + v, view_dual_base_ + w, 2, -1, -1, c, ep.dual_constraints[c].vi == v, 0});
    }
    view_queued_.assign(total, 0);
}

auto Network::view_live(int u, int a) const -> bool
{
    return u < view_dual_base_ ? live(u, a) : dual_live(u - view_dual_base_, a);
}

auto Network::view_domain(int u) const -> int
{
    return u < view_dual_base_ ? problem_->domain_size(u) : enc_->duals[u - view_dual_base_].size();
}

auto Network::view_remove(int u, int a) -> void
{
    if (u < view_dual_base_)
        remove_value(u, a, false);
    else
        remove_tuple(u - view_dual_base_, a);
}

auto Network::view_empty(int u) const -> bool
{
    return u < view_dual_base_ ? var_size_[u] == 0 : dual_size_[u - view_dual_base_] == 0;
}

auto Network::compatible(const Arc & arc, int a, int b) -> bool
{
    ++counters.tuple_checks;
    auto & ep = *enc_;
    switch (arc.kind) {
    case 0: return ep.duals[arc.dual].tuples.row(a)[arc.pos] == b;
    case 1: return ep.duals[arc.dual].tuples.row(b)[arc.pos] == a;
    default: {
        auto & dc = ep.dual_constraints[arc.dc];
        int ti = arc.forward ? a : b;
        int tj = arc.forward ? b : a;
        auto ri = ep.duals[dc.vi].tuples.row(ti);
        auto rj = ep.duals[dc.vj].tuples.row(tj);
        for (auto & s : dc.shared)
            if (ri[s.pos_i] != rj[s.pos_j])
                return false;
        return true;
    }
    }
}

auto Network::revise_arc(int ai) -> Revision
{
    auto & arc = arcs_[ai];
    int u = arc.from, w = arc.to;
    int dw = view_domain(w);
    bool deleted = false;
    for (int a = 0; a < view_domain(u); ++a) {
        if (! view_live(u, a))
            continue;
        auto & last = last_[arc.last_base + a];
        if (last >= 0) {
            ++counters.micro_ops;
            if (view_live(w, last))
                continue;
        }
        bool resumed = last >= 0;
        int found = -1;
        for (int b = last + 1; b < dw && found < 0; ++b) {
            if (! view_live(w, b))
                continue;
            if (resumed)
                ++counters.resumed_checks;
            if (compatible(arc, a, b))
                found = b;
        }
        if (found >= 0) {
            trail.save(last);
            last = found;
            continue;
        }
        view_remove(u, a);
        deleted = true;
    }
    if (view_empty(u))
        return Revision::wipeout;
    return deleted ? Revision::changed : Revision::no_change;
}

auto Network::push_view(int u) -> void
{
    if (view_queued_[u])
        return;
    view_queued_[u] = 1;
    view_stack_.push_back(u);
}

auto Network::ac2001(bool init, std::span<const int> seed) -> Verdict
{
    if (! view_)
        throw UsageError{"ac2001 needs a network built with the binary view"};
    clear_queues();
    if (init) {
        for (int u = 0; u < view_size(); ++u)
            for (int ai : view_arcs_from_[u]) {
                auto r = revise_arc(ai);
                if (r == Revision::wipeout) {
                    clear_queues();
                    return Verdict::inconsistent;
                }
                if (r == Revision::changed)
                    push_view(u);
            }
    }
    else
        for (int u : seed)
            push_view(u);
    while (! view_stack_.empty()) {
        int w = view_stack_.back();
        view_stack_.pop_back();
        view_queued_[w] = 0;
        for (int ai : view_arcs_into_[w]) {
            auto r = revise_arc(ai);
            if (r == Revision::wipeout) {
                clear_queues();
                return Verdict::inconsistent;
            }
            if (r == Revision::changed)
                push_view(arcs_[ai].from);
        }
    }
    return Verdict::consistent;
}

} // namespace bincsp
