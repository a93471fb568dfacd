#include <bincsp/propagate.hpp>

namespace bincsp {

namespace {
    auto finish(Network & net, Verdict v) -> PropagationResult
    {
        return {v, net.state(), net.counters};
    }

    auto require_originals(const EncodedProblem & ep, const char * what) -> void
    {
        if (! ep.has_originals)
            throw UsageError{std::string{what} + " needs original variables in the encoding"};
    }
}

auto gac2001(const Problem & p, const PropagationInput & in) -> PropagationResult
{
    Network net(p);
    if (in.start)
        net.load(*in.start);
    if (net.any_original_empty())
        return finish(net, Verdict::inconsistent);
    auto v = in.seed ? net.units_fixpoint(false, *in.seed) : net.units_fixpoint(true);
    return finish(net, v);
}

auto hac(const EncodedProblem & ep, const PropagationInput & in) -> PropagationResult
{
    require_originals(ep, "hac");
    Network net(ep);
    if (in.start)
        net.load(*in.start);
    if (net.any_original_empty() || net.any_dual_empty())
        return finish(net, Verdict::inconsistent);
    auto v = in.seed ? net.units_fixpoint(false, *in.seed) : net.units_fixpoint(true);
    return finish(net, v);
}

auto ac2001(const EncodedProblem & ep, const PropagationInput & in) -> PropagationResult
{
    Network net(ep, true);
    if (in.start)
        net.load(*in.start);
    if (net.any_original_empty() || net.any_dual_empty())
        return finish(net, Verdict::inconsistent);
    auto v = in.seed ? net.ac2001(false, *in.seed) : net.ac2001(true);
    return finish(net, v);
}

auto pwac(const EncodedProblem & ep, const PropagationInput & in) -> PropagationResult
{
    Network net(ep);
    if (in.start)
        net.load(*in.start);
    if (net.any_original_empty() || net.any_dual_empty())
        return finish(net, Verdict::inconsistent);
    net.count_groups();
    auto v = net.queue_empty_groups();
    if (v == Verdict::consistent)
        v = net.pw_propagate();
    return finish(net, v);
}

auto double_ac(const EncodedProblem & ep, DoubleMode mode, const PropagationInput & in) -> PropagationResult
{
    require_originals(ep, "double_ac");
    Network net(ep);
    if (in.start)
        net.load(*in.start);
    if (net.any_original_empty() || net.any_dual_empty())
        return finish(net, Verdict::inconsistent);
    if (mode == DoubleMode::hidden_only)
        return finish(net, net.units_fixpoint(true));
    net.count_groups();
    net.count_hidden();
    auto v = net.queue_empty_groups();
    if (v == Verdict::consistent) {
        net.queue_unsupported_values();
        for (int u = 0; u < net.units(); ++u)
            if (net.unit_dual(u) < 0)
                net.queue_unit(u);
        v = net.double_propagate(mode);
    }
    return finish(net, v);
}

auto sgac_check(const Problem & p) -> bool
{
    auto base = gac2001(p);
    if (base.verdict == Verdict::inconsistent)
        return false;
    for (int x = 0; x < p.n(); ++x)
        for (int a : base.state.vars[x].members()) {
            auto s = base.state;
            s.vars[x] = Bitset(p.domain_size(x), false);
            s.vars[x].set(a);
            if (gac2001(p, {s, std::nullopt}).verdict == Verdict::inconsistent)
                return false;
        }
    return true;
}

} // namespace bincsp
