#pragma once

#include <bincsp/core.hpp>
#include <bincsp/encode.hpp>

#include <utility>

namespace bincsp {

enum class Verdict { consistent, inconsistent };
enum class Revision { no_change, changed, wipeout };
enum class DoubleMode { hidden_only, dual_dual, both };

auto to_string(Verdict v) -> std::string;

// Undo log of machine words and counters, with one mark per search node.
class Trail {
  public:
    auto enable(bool on) -> void { on_ = on; }
    auto save(std::uint64_t & w) -> void
    {
        if (on_)
            words_.emplace_back(&w, w);
    }
    auto save(std::int32_t & x) -> void
    {
        if (on_)
            ints_.emplace_back(&x, x);
    }
    auto mark() -> void { marks_.emplace_back(words_.size(), ints_.size()); }
    auto undo() -> void;
    auto depth() const -> std::size_t { return marks_.size(); }

  private:
    bool on_ = false;
    std::vector<std::pair<std::uint64_t *, std::uint64_t>> words_;
    std::vector<std::pair<std::int32_t *, std::int32_t>> ints_;
    std::vector<std::pair<std::size_t, std::size_t>> marks_;
};

// Mutable propagation state over one immutable model: a non-binary problem, or an
// encoding of one. All propagators of the library run on this.
class Network {
  public:
    // Non-binary: one GAC unit per constraint. Predicates are expanded when they fit
    // the budget and handled intensionally otherwise.
    explicit Network(const Problem & p, std::size_t budget = default_tuple_budget);
    // Encoded: one hidden unit per dual variable, GAC units for residual constraints,
    // group counters when dual constraints exist. binary_view adds AC-2001 arcs.
    explicit Network(const EncodedProblem & ep, bool binary_view = false);

    Network(const Network &) = delete;
    auto operator=(const Network &) -> Network & = delete;

    Counters counters;
    Trail trail;

    auto problem() const -> const Problem & { return *problem_; }
    auto encoded() const -> const EncodedProblem * { return enc_; }
    auto n() const -> int { return problem_->n(); }
    auto duals() const -> int { return static_cast<int>(dual_size_.size()); }
    auto units() const -> int { return static_cast<int>(units_.size()); }
    auto unit_scope(int u) const -> const std::vector<int> & { return units_[u].scope; }
    auto unit_dual(int u) const -> int { return units_[u].dual; }
    auto units_of(int x) const -> const std::vector<std::pair<int, int>> & { return var_units_[x]; }

    auto live(int x, int a) const -> bool { return test(var_words_, var_base_[x], a); }
    auto size(int x) const -> int { return var_size_[x]; }
    auto dual_live(int v, int t) const -> bool { return test(dual_words_, dual_base_[v], t); }
    auto dual_size(int v) const -> int { return dual_size_[v]; }
    auto values(int x) const -> std::vector<int>;
    auto tuples(int v) const -> std::vector<int>;
    auto any_original_empty() const -> bool;
    auto any_dual_empty() const -> bool;

    auto state() const -> DomainState;
    // Installs domains; for encodings, tuples using a dead value are dropped too.
    auto load(const DomainState & s) -> void;

    std::vector<char> assigned;      // original variables
    std::vector<char> dual_assigned; // dual variables (dual-encoding search)

    // Which units / decompositions take part in queue-based propagation, and which
    // dual wipeouts count as inconsistency.
    auto activate_all() -> void;
    auto activate_units(std::span<const int> units) -> void;
    auto activate_duals(std::span<const int> duals) -> void;
    auto report_all_dual_wipeouts(bool on) -> void;
    auto report_dual_wipeouts(std::span<const int> duals) -> void;
    auto is_active_unit(int u) const -> bool { return unit_active_[u]; }

    auto remove_value(int x, int a, bool eager) -> Revision;
    auto remove_tuple(int v, int t) -> void;

    // GAC-2001 / HAC style support revision of scope position p of unit u.
    auto revise(int u, int p) -> Revision;
    // Constraint-based fixpoint over active units: with init, every active unit's
    // variables are revised once first; otherwise the queue starts from seed.
    auto units_fixpoint(bool init, std::span<const int> seed = {}) -> Verdict;
    // Revise the unassigned variables of one unit until nothing changes.
    auto unit_local(int u) -> Verdict;

    // Group counters from scratch over live tuples.
    auto count_groups() -> void;
    auto count_hidden() -> void;
    // Queue every empty active group and strip groups whose key the peer lacks.
    auto queue_empty_groups() -> Verdict;
    auto queue_unsupported_values() -> void;
    auto pw_propagate() -> Verdict;
    // Remove from dual v every tuple whose group towards an active neighbour is
    // unsupported (one pass, no queueing).
    auto pw_strip(int v) -> void;
    // Bounded lookahead on a double encoding: hidden revision of each listed dual,
    // then one strip pass of every listed dual, then hidden revision again.
    auto double_one_pass(std::span<const int> duals) -> Verdict;
    // Joint fixpoint for double / hybrid encodings.
    auto double_propagate(DoubleMode mode) -> Verdict;

    // AC-2001 over the binary view (originals if present, then duals).
    auto view_size() const -> int { return static_cast<int>(view_arcs_from_.size()); }
    auto view_var_of_original(int x) const -> int { return x; }
    auto view_var_of_dual(int v) const -> int { return view_dual_base_ + v; }
    auto ac2001(bool init, std::span<const int> seed = {}) -> Verdict;

    auto clear_queues() -> void;
    auto queue_unit(int u) -> void { push_unit(u); }
    // Tuple storage of the non-dual tables the units read (arity * rows * value width).
    auto table_bytes() const -> std::size_t;
    auto counters_consistent() const -> bool;
    auto group_count(int decomposition, int group) const -> int { return cnt_[group_base_[decomposition] + group]; }
    auto uses_groups() const -> bool { return groups_; }
    auto uses_hidden_counts() const -> bool { return hidden_counts_; }
    auto decompositions_of(int v) const -> const std::vector<int> & { return decomps_of_dual_[v]; }

  private:
    struct Unit {
        int constraint = -1;
        int dual = -1;
        std::vector<int> scope;
        const Table * table = nullptr;
        const Predicate * predicate = nullptr;
        std::vector<int> bucket_base;
        std::vector<int> bucket_start;
        std::vector<int> bucket_items;
        std::vector<int> support_base;
        std::vector<std::int64_t> weight;
        std::int64_t total = 0;
    };

    struct Arc {
        int from = -1, to = -1;
        int kind = 0; // 0: dual->original, 1: original->dual, 2: dual->dual
        int dual = -1, pos = -1, dc = -1;
        bool forward = true;
        int last_base = 0;
    };

    static auto test(const std::vector<std::uint64_t> & w, int base, int i) -> bool
    {
        return (w[base + (i >> 6)] >> (i & 63)) & 1U;
    }

    auto init_domains() -> void;
    auto add_unit(int constraint, int dual, const std::vector<int> & scope, const Table * table,
        const Predicate * predicate) -> void;
    auto index_units() -> void;
    auto bucket(const Unit & u, int p, int a) const -> std::span<const int>;
    auto tuple_valid(const Unit & u, int t) -> bool;
    auto revise_intensional(Unit & u, int p, int a) -> bool;
    auto next_valid(const Unit & u, int p, int a, std::int64_t from, std::vector<int> & out, bool resumed) -> bool;
    auto clear_var(int x, int a) -> void;
    auto push_unit(int u) -> void;
    auto push_units_of(int x) -> void;
    auto flush_groups() -> void;
    auto pw_revise(int gid) -> Verdict;
    auto build_view() -> void;
    auto view_live(int u, int a) const -> bool;
    auto view_domain(int u) const -> int;
    auto view_remove(int u, int a) -> void;
    auto view_empty(int u) const -> bool;
    auto compatible(const Arc & arc, int a, int b) -> bool;
    auto revise_arc(int arc) -> Revision;
    auto push_view(int u) -> void;

    const Problem * problem_ = nullptr;
    const EncodedProblem * enc_ = nullptr;
    std::vector<Table> owned_tables_;

    std::vector<std::uint64_t> var_words_;
    std::vector<int> var_base_;
    std::vector<std::int32_t> var_size_;
    std::vector<std::uint64_t> dual_words_;
    std::vector<int> dual_base_;
    std::vector<std::int32_t> dual_size_;

    std::vector<Unit> units_;
    std::vector<std::vector<std::pair<int, int>>> var_units_; // x -> (unit, pos)
    std::vector<std::vector<std::pair<int, int>>> var_duals_; // x -> (dual, pos)
    std::vector<std::int32_t> support_;
    std::vector<std::uint64_t> isupport_; // intensional supports: rank + 1
    std::vector<int> isupport_base_;
    std::vector<char> unit_active_;
    std::vector<int> unit_stack_;
    std::vector<char> unit_queued_;
    std::vector<char> report_dual_;
    bool push_on_removal_ = false;

    bool groups_ = false;
    std::vector<int> group_base_;
    std::vector<int> decomp_of_group_;
    std::vector<std::int32_t> cnt_;
    std::vector<std::vector<int>> decomps_of_dual_;
    std::vector<char> decomp_active_;
    std::vector<char> dual_active_;
    std::vector<int> group_stack_;
    std::vector<char> group_queued_;
    std::vector<int> pending_groups_;

    bool hidden_counts_ = false;
    std::vector<std::vector<int>> hc_base_; // dual -> per position offset
    std::vector<std::int32_t> hc_;
    struct PendingValue {
        int dual, var, value;
    };
    std::vector<PendingValue> pending_values_;
    bool eager_rule_deletions_ = true;

    bool view_ = false;
    int view_dual_base_ = 0;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> view_arcs_from_;
    std::vector<std::vector<int>> view_arcs_into_;
    std::vector<std::int32_t> last_;
    std::vector<int> view_stack_;
    std::vector<char> view_queued_;
};

} // namespace bincsp
