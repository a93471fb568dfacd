#pragma once

#include <bincsp/network.hpp>

#include <optional>

namespace bincsp {

struct PropagationResult {
    Verdict verdict = Verdict::consistent;
    DomainState state;
    Counters counters;
};

struct PropagationInput {
    std::optional<DomainState> start;
    // Units (constraints or dual variables) to queue instead of the full
    // initialization pass; for ac2001 these are binary-view variables. Group-based
    // propagators always run their counting pass and ignore it.
    std::optional<std::vector<int>> seed;
};

auto gac2001(const Problem & p, const PropagationInput & in = {}) -> PropagationResult;
// Hidden model (or a double model's hidden part).
auto hac(const EncodedProblem & ep, const PropagationInput & in = {}) -> PropagationResult;
// Dual model (or a double model's dual part), over the binary view.
auto ac2001(const EncodedProblem & ep, const PropagationInput & in = {}) -> PropagationResult;
auto pwac(const EncodedProblem & ep, const PropagationInput & in = {}) -> PropagationResult;
auto double_ac(const EncodedProblem & ep, DoubleMode mode, const PropagationInput & in = {}) -> PropagationResult;

// True iff GAC survives every single-variable instantiation (false if GAC itself fails).
auto sgac_check(const Problem & p) -> bool;

} // namespace bincsp
