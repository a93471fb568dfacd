#pragma once

#include <bincsp/network.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <string_view>

namespace bincsp {

enum class Representation { nonbinary, hve, de, dbl, hybrid };
enum class Scheme { fc, mac };
enum class PropagatorKind { generic_2001, specialized };
enum class BranchSet { original_only, all_variables };

struct AlgorithmSpec {
    Representation representation = Representation::nonbinary;
    Scheme scheme = Scheme::mac;
    int level = 0; // forward-checking level 0..5; ignored for MAC
    PropagatorKind propagator = PropagatorKind::generic_2001;
    BranchSet branch = BranchSet::original_only;

    auto operator==(const AlgorithmSpec &) const -> bool = default;
};

// Accepts MGAC-2001, MHAC-2001, MHAC-2001-full, MAC-2001, MAC-PW-AC, MAC-2001d,
// MAC-PW-ACd, MAC-hybrid, nFC0..5, hFC0..5, dFC0..5.
auto parse_algorithm(std::string_view name) -> AlgorithmSpec;
auto algorithm_name(const AlgorithmSpec & spec) -> std::string;
auto algorithm_names() -> std::vector<std::string>;
auto to_string(Representation r) -> std::string;

enum class Ordering { heuristic, fixed };
enum class SearchVerdict { sat, unsat, node_limit, time_limit };
auto to_string(SearchVerdict v) -> std::string;
auto to_string(Ordering o) -> std::string;
auto parse_ordering(std::string_view s) -> Ordering;

struct SearchOptions {
    Ordering ordering = Ordering::heuristic;
    std::uint64_t node_limit = 0;              // 0: unlimited
    std::chrono::milliseconds time_limit{0};   // 0: unlimited
    bool record_nodes = false;
    // Hybrid models encode a constraint only when its relation fits this many tuples.
    std::size_t hybrid_budget = default_tuple_budget;
};

// A node is identified by its assignment path from the root. Dual variables of the
// searched model are numbered after the originals (n + dual index).
using NodePath = std::vector<std::pair<int, int>>;

struct SearchResult {
    SearchVerdict verdict = SearchVerdict::unsat;
    std::optional<Tuple> solution;
    std::uint64_t nodes = 0;
    Counters counters;
    double elapsed_ms = 0;
    std::size_t mem_bytes = 0;
    std::vector<NodePath> trace;
};

struct Lookahead {
    std::vector<int> units;
    bool fixpoint = false;
};

inline constexpr int mac_level = 6;

// Units (constraints or dual variables, given by their scopes) to propagate after
// current was assigned. level is 0..5 or mac_level.
auto lookahead_set(int level, int current, std::span<const char> assigned,
    std::span<const std::vector<int>> scopes) -> Lookahead;

struct Candidate {
    int id = -1;
    int size = 0;
    int degree = 0;
};

// Index into candidates minimizing size / degree; zero degree ranks last and ties
// go to the earliest candidate.
auto select_variable_dom_deg(std::span<const Candidate> candidates) -> std::size_t;

// Tuple index of every dual variable, each domain being a singleton.
auto complete_dual_assignments(const Network & net) -> std::vector<int>;

// Constraints a hybrid model encodes: tables, and predicates expanding within budget.
auto hybrid_subset(const Problem & p, std::size_t budget) -> std::vector<int>;

auto build_model(const Problem & p, const AlgorithmSpec & spec, std::size_t hybrid_budget)
    -> std::optional<EncodedProblem>;

class Solver {
  public:
    Solver(const Problem & p, const AlgorithmSpec & spec, SearchOptions options = {});
    ~Solver();
    Solver(const Solver &) = delete;
    auto operator=(const Solver &) -> Solver & = delete;

    // Root filtering: unary constraints, then full propagation for MAC schemes.
    auto root() -> bool;
    // One search node: assign and run the lookahead. The state is kept until undo().
    auto assign(int x, int a) -> bool;
    auto assign_dual(int v, int t) -> bool;
    auto undo() -> void;

    auto run() -> SearchResult;

    auto network() -> Network & { return *net_; }
    auto encoding() const -> const EncodedProblem * { return model_ ? &*model_ : nullptr; }

  private:
    enum class Outcome { exhausted, solved, limit };

    auto dfs() -> Outcome;
    auto lookahead(int x, int a) -> bool;
    auto hve_units_of(int x) const -> std::vector<int>;
    auto pick(int & var, bool & is_dual) -> bool;
    auto dual_done(int v) const -> bool;
    auto finish() -> bool;
    auto out_of_budget() -> bool;

    const Problem & problem_;
    AlgorithmSpec spec_;
    SearchOptions options_;
    std::optional<EncodedProblem> model_;
    std::unique_ptr<Network> net_;
    std::vector<int> original_degree_;
    std::vector<int> dual_degree_;
    std::vector<std::vector<int>> unit_scopes_;
    struct Frame {
        std::vector<int> vars;
        int dual = -1;
    };
    std::vector<Frame> frames_;
    std::uint64_t nodes_ = 0;
    std::chrono::steady_clock::time_point deadline_;
    bool timed_ = false;
    SearchVerdict limit_verdict_ = SearchVerdict::node_limit;
    NodePath path_;
    std::vector<NodePath> trace_;
    Tuple solution_;
};

auto solve(const Problem & p, const AlgorithmSpec & spec, const SearchOptions & options = {}) -> SearchResult;

} // namespace bincsp
