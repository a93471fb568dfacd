#pragma once

#include <bincsp/core.hpp>

#include <string>
#include <vector>

namespace bincsp {

// Malformed instance or report documents. what() starts with a location: a JSON
// pointer such as /constraints/2/tuples/0/1, or line and column for syntax errors.
class ParseError : public UsageError {
  public:
    ParseError(const std::string & where, const std::string & message) : UsageError{where + ": " + message} {}
};

// Tuples and domains are written with labels; symbols are optional display names.
auto parse_instance(const std::string & text) -> Problem;
auto emit_instance(const Problem & p) -> std::string;
auto load_instance(const std::string & path) -> Problem;
auto save_instance(const Problem & p, const std::string & path) -> void;

struct RunRecord {
    std::string instance;
    std::string algorithm;
    std::string encoding;
    std::string ordering;
    std::uint64_t seed = 0;
    std::string verdict;
    std::uint64_t nodes = 0;
    std::uint64_t checks = 0;
    std::uint64_t microops = 0;
    std::uint64_t removals = 0;
    double time_ms = 0;
    std::uint64_t mem_bytes = 0;

    auto operator==(const RunRecord &) const -> bool = default;
};

inline constexpr const char * csv_header =
    "instance,algorithm,encoding,ordering,seed,verdict,nodes,checks,microops,removals,time_ms,mem_bytes";

auto csv_row(const RunRecord & r) -> std::string;
auto emit_csv(const std::vector<RunRecord> & records) -> std::string;
auto parse_csv(const std::string & text) -> std::vector<RunRecord>;

// Instance class: the id up to its last '/', so seeds of one generator class pool.
auto instance_class(const std::string & instance) -> std::string;

struct ClassAggregate {
    std::string instance_class;
    std::string algorithm;
    std::size_t runs = 0;
    double mean_nodes = 0;
    double mean_time_ms = 0;
    std::size_t sat = 0;
    std::size_t unsat = 0;
    std::size_t unfinished = 0;
};

auto aggregate(const std::vector<RunRecord> & records) -> std::vector<ClassAggregate>;
// {"records":[...], "aggregates":[...]}
auto emit_json_summary(const std::vector<RunRecord> & records) -> std::string;
auto parse_json_records(const std::string & text) -> std::vector<RunRecord>;

} // namespace bincsp
