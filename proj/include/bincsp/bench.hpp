#pragma once

#include <bincsp/io.hpp>
#include <bincsp/search.hpp>

#include <map>
#include <string>
#include <vector>

namespace bincsp {

// A named generator with key=value parameters, e.g. family "modelb" with
// n=10,d=4,k=3,p=20,q=50.
struct GeneratorSpec {
    std::string family;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
};

auto parse_params(const std::string & text) -> std::map<std::string, std::string>;
auto generate(const GeneratorSpec & spec) -> Problem;
// "family:k1=v1,k2=v2/seed"; everything before the '/' names the instance class.
auto instance_id(const GeneratorSpec & spec) -> std::string;
auto generator_families() -> std::vector<std::string>;

struct Limits {
    std::uint64_t node_limit = 0;
    std::uint64_t time_limit_ms = 0;
};

// Pairs (smaller, larger) whose node sets are compared on every instance.
using InclusionPair = std::pair<std::string, std::string>;

struct MatrixEntry {
    std::string instance_path;                // either a file ...
    std::optional<GeneratorSpec> generator;   // ... or a generator (seed taken from seeds)
    std::vector<std::string> algorithms;
    Ordering ordering = Ordering::heuristic;
    Limits limits;
    std::vector<std::uint64_t> seeds{0};
    std::vector<InclusionPair> pairs;
};

// Accepts a JSON list of entries, each with "instance" or "generator" {"family",
// "params", optionally "seed"}, "algorithms", "ordering", "node_limit",
// "time_limit_ms", and either "seeds" or "seed" plus "repeats".
auto parse_matrix(const std::string & text) -> std::vector<MatrixEntry>;

struct InclusionRecord {
    std::string instance;
    std::string smaller;
    std::string larger;
    bool holds = false;
    std::uint64_t smaller_nodes = 0;
    std::uint64_t larger_nodes = 0;
};

struct MatrixReport {
    std::vector<RunRecord> runs;
    std::vector<InclusionRecord> inclusions;
};

struct RunSettings {
    int jobs = 1;
    // Reports time_ms as 0 so reports depend on seeds alone.
    bool deterministic = false;
};

// One run; failures become a row with verdict ERROR rather than exceptions.
auto run_cell(const Problem & p, const std::string & instance, const std::string & algorithm, Ordering ordering,
    std::uint64_t seed, const Limits & limits, bool deterministic) -> RunRecord;

// True iff every node visited by smaller is also visited by larger (same model numbering).
auto node_set_included(const Problem & p, const AlgorithmSpec & smaller, const AlgorithmSpec & larger,
    Ordering ordering, std::uint64_t node_limit = 0) -> InclusionRecord;

auto run_matrix(const std::vector<MatrixEntry> & entries, const RunSettings & settings) -> MatrixReport;
auto emit_inclusions_csv(const std::vector<InclusionRecord> & records) -> std::string;

// Writes results.csv, summary.json and, when pairs were requested, inclusions.csv.
auto write_reports(const MatrixReport & report, const std::string & out_dir) -> void;

} // namespace bincsp
