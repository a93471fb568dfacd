#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bincsp {

// Values are dense indices 0..d-1 into a variable's domain. Labels (the integers a
// predicate sees) and display symbols live on the Variable.
using Value = std::int32_t;
using Tuple = std::vector<Value>;

class UsageError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Counters {
    std::uint64_t tuple_checks = 0;
    std::uint64_t micro_ops = 0;
    std::uint64_t value_removals = 0;
    std::uint64_t tuple_removals = 0;
    std::uint64_t counter_updates = 0;
    // Checks spent resuming a support search after the remembered support died.
    std::uint64_t resumed_checks = 0;

    auto operator+=(const Counters & other) -> Counters &;
    auto operator==(const Counters &) const -> bool = default;
};

// Flat row-major tuple list, kept sorted lexicographically without duplicates.
class Table {
  public:
    Table() = default;
    explicit Table(int arity) : arity_(arity) {}

    static auto from_rows(int arity, std::vector<Tuple> rows) -> Table;

    auto arity() const -> int { return arity_; }
    auto size() const -> std::size_t { return arity_ == 0 ? 0 : cells_.size() / arity_; }
    auto empty() const -> bool { return cells_.empty(); }
    auto row(std::size_t i) const -> std::span<const Value>
    {
        return {cells_.data() + i * arity_, static_cast<std::size_t>(arity_)};
    }
    auto rows() const -> std::vector<Tuple>;
    auto find(std::span<const Value> t) const -> std::ptrdiff_t;
    auto contains(std::span<const Value> t) const -> bool { return find(t) >= 0; }

    // Appends a row that must compare greater than the current last row.
    auto append(std::span<const Value> t) -> void;

    auto operator==(const Table &) const -> bool = default;

  private:
    int arity_ = 0;
    std::vector<Value> cells_;
};

enum class Relation { eq, ge, le, ne };

struct Linear {
    std::vector<int> coeffs;
    Relation rel = Relation::eq;
    int rhs = 0;
    auto operator==(const Linear &) const -> bool = default;
};

// Every pair of labels differs by more than gap.
struct Separation {
    int gap = 0;
    auto operator==(const Separation &) const -> bool = default;
};

// Separation with gap, and the scope positions listed in wide differ by more than
// wide_gap from every other position.
struct RichSeparation {
    int gap = 0;
    int wide_gap = 0;
    std::vector<int> wide;
    auto operator==(const RichSeparation &) const -> bool = default;
};

struct NotAllEqual {
    auto operator==(const NotAllEqual &) const -> bool = default;
};

// (l[a] + l[b]) mod 2 != (l[c] + l[d]) mod 2, a..d being scope positions.
struct ParityNeq {
    int a = 0, b = 1, c = 2, d = 3;
    auto operator==(const ParityNeq &) const -> bool = default;
};

using Predicate = std::variant<Linear, Separation, RichSeparation, NotAllEqual, ParityNeq>;

auto evaluate(const Predicate & p, std::span<const int> labels) -> bool;
auto predicate_kind(const Predicate & p) -> std::string;

struct Constraint {
    std::vector<int> scope;
    std::variant<Table, Predicate> body;

    auto arity() const -> int { return static_cast<int>(scope.size()); }
    auto extensional() const -> bool { return std::holds_alternative<Table>(body); }
    auto table() const -> const Table & { return std::get<Table>(body); }
    auto predicate() const -> const Predicate & { return std::get<Predicate>(body); }
};

struct Variable {
    std::string name;
    std::vector<int> labels;
    std::vector<std::string> symbols; // empty, or one per value

    auto size() const -> int { return static_cast<int>(labels.size()); }
};

class Problem {
  public:
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;

    auto add_variable(std::string name, std::vector<int> labels, std::vector<std::string> symbols = {}) -> int;
    auto add_variable(std::string name, int domain_size) -> int;
    // Rows are value indices; they are sorted and deduplicated here.
    auto add_extension(std::vector<int> scope, std::vector<Tuple> rows) -> int;
    auto add_extension(std::vector<int> scope, Table table) -> int;
    auto add_predicate(std::vector<int> scope, Predicate p) -> int;

    auto n() const -> int { return static_cast<int>(variables.size()); }
    auto e() const -> int { return static_cast<int>(constraints.size()); }
    auto domain_size(int x) const -> int { return variables[x].size(); }
    auto max_domain() const -> int;
    auto max_arity() const -> int;
    auto labels_of(const Constraint & c, std::span<const Value> t) const -> std::vector<int>;
    auto degree(int x) const -> int;
    auto constraints_of(int x) const -> std::vector<int>;

    // Throws UsageError naming the first broken invariant.
    auto validate() const -> void;
};

// Fixed-size membership mask with a cached live count.
class Bitset {
  public:
    Bitset() = default;
    explicit Bitset(int size, bool full = true);

    auto size() const -> int { return size_; }
    auto count() const -> int { return live_; }
    auto empty() const -> bool { return live_ == 0; }
    auto test(int i) const -> bool { return (words_[i >> 6] >> (i & 63)) & 1U; }
    auto reset(int i) -> bool;
    auto set(int i) -> bool;
    auto first() const -> int;
    auto members() const -> std::vector<int>;
    auto words() const -> std::span<const std::uint64_t> { return words_; }
    auto words() -> std::span<std::uint64_t> { return words_; }
    auto recount() -> void;

    auto operator==(const Bitset &) const -> bool = default;

  private:
    int size_ = 0;
    int live_ = 0;
    std::vector<std::uint64_t> words_;
};

// Current domains of the original variables and, when an encoding is in play,
// of the dual variables (one bit per tuple).
struct DomainState {
    std::vector<Bitset> vars;
    std::vector<Bitset> duals;

    static auto full(const Problem & p) -> DomainState;
    auto any_empty() const -> bool;
    auto operator==(const DomainState &) const -> bool = default;
};

auto lex_compare(std::span<const Value> a, std::span<const Value> b) -> std::strong_ordering;
auto project(std::span<const Value> t, std::span<const int> scope, std::span<const int> sub) -> Tuple;

// One tuple check: membership for tables, evaluation for predicates.
auto check_tuple(const Problem & p, const Constraint & c, std::span<const Value> t, Counters & counters) -> bool;

// Value-by-value validity: costs arity micro-ops.
auto is_valid(std::span<const Value> t, std::span<const int> scope, const DomainState & s, Counters & counters)
    -> bool;
// Validity answered by dual-domain membership: costs one micro-op.
auto is_valid_dual(int dual, int tuple_index, const DomainState & s, Counters & counters) -> bool;

inline constexpr std::size_t default_tuple_budget = std::size_t{1} << 21;

auto expand_predicate(const Problem & p, const Constraint & c, std::size_t budget = default_tuple_budget) -> Table;

// Table of c, expanding a predicate if needed.
auto relation_of(const Problem & p, const Constraint & c, std::size_t budget = default_tuple_budget) -> Table;

// Copy of p where every predicate constraint is replaced by its expansion.
auto expanded(const Problem & p, std::size_t budget = default_tuple_budget) -> Problem;

inline constexpr double default_enumeration_bound = 1e9;

// All solutions (value-index vectors) in lexicographic order, at most limit of them.
auto enumerate_solutions(const Problem & p, std::size_t limit, double bound = default_enumeration_bound)
    -> std::vector<Tuple>;

auto satisfies(const Problem & p, std::span<const Value> assignment) -> bool;

struct FixpointResult {
    DomainState state;
    bool wipeout = false;
};

// Naive GAC: sweep constraints in the given order until nothing changes.
auto ac1_fixpoint(const Problem & p, const DomainState & start, std::span<const int> order = {}) -> FixpointResult;
auto ac1_fixpoint(const Problem & p) -> FixpointResult;

} // namespace bincsp
