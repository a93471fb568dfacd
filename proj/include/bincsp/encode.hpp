#pragma once

#include <bincsp/core.hpp>

#include <optional>

namespace bincsp {

enum class Encoding { hve, de, dbl, hybrid };

auto to_string(Encoding e) -> std::string;

struct DualVariable {
    int source = -1;            // constraint index in the original problem
    std::vector<int> scope;     // original variables; pos(x) is the index in here
    Table tuples;

    auto pos(int x) const -> int;
    auto size() const -> int { return static_cast<int>(tuples.size()); }
};

struct HiddenConstraint {
    int dual = -1;
    int var = -1;
    int pos = -1;
};

struct SharedVariable {
    int var = -1;
    int pos_i = -1; // position in the first dual's scope
    int pos_j = -1; // position in the second dual's scope
};

struct DualConstraint {
    int vi = -1, vj = -1;
    std::vector<SharedVariable> shared;
};

// Partition of an owner dual variable's tuples by their projection on the
// variables shared with a peer. Keys absent on this side have no group here, and
// the peer's group with that key has sup == none.
struct Decomposition {
    static constexpr int none = -1;

    int owner = -1, peer = -1;
    std::vector<int> positions;           // shared-variable positions in the owner's scope
    std::vector<std::int64_t> keys;       // group id -> mixed-radix key
    std::vector<int> group_of_tuple;      // tuple index -> group id
    std::vector<int> sup;                 // group id -> peer group id, or none
    std::vector<std::vector<int>> members; // group id -> tuple indices, ascending

    auto groups() const -> int { return static_cast<int>(keys.size()); }
    auto group_of(int tuple_index) const -> int { return group_of_tuple[tuple_index]; }
};

struct EncodedProblem {
    Encoding kind = Encoding::hve;
    Problem source;
    bool has_originals = true;
    std::vector<DualVariable> duals;
    std::vector<HiddenConstraint> hidden;
    std::vector<DualConstraint> dual_constraints;
    // Two per dual constraint: 2i is S(vi, vj), 2i+1 is S(vj, vi).
    std::vector<Decomposition> decompositions;
    std::vector<int> residual;           // constraints kept non-binary
    std::vector<int> dual_of_constraint; // -1 when the constraint is not encoded

    auto duals_of(int x) const -> std::vector<int>;
    auto neighbours(int dual) const -> std::vector<int>;
    auto dual_degree(int dual) const -> int;
    auto state() const -> DomainState;
    auto tuple_bytes() const -> std::size_t;
};

auto build_hve(const Problem & p, std::size_t budget = default_tuple_budget) -> EncodedProblem;
auto build_de(const Problem & p, std::size_t budget = default_tuple_budget) -> EncodedProblem;
// Every constraint when subset is empty-optional; otherwise only the listed ones
// (kind becomes hybrid unless the subset covers everything).
auto build_double(const Problem & p, std::optional<std::vector<int>> subset = std::nullopt,
    std::size_t budget = default_tuple_budget) -> EncodedProblem;

auto piecewise_decomposition(const Problem & p, const DualVariable & owner, int owner_id,
    const DualVariable & peer, int peer_id, std::span<const SharedVariable> shared, bool owner_is_first)
    -> Decomposition;

// Links sup between the two halves of one dual constraint.
auto link_decompositions(Decomposition & a, Decomposition & b) -> void;

// Naive AC on the dual encoding: drop tuples without an agreeing tuple in some
// neighbouring dual variable until nothing changes.
auto ac1_dual_fixpoint(const EncodedProblem & ep, const DomainState & start) -> FixpointResult;

// Original-variable assignment induced by one live tuple per dual variable.
auto induced_assignment(const EncodedProblem & ep, std::span<const int> tuple_of_dual) -> Tuple;

} // namespace bincsp
