#include <bincsp/bench.hpp>
#include <bincsp/propagate.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace bincsp;

namespace {
    auto read_file(const std::string & path) -> std::string
    {
        std::ifstream in(path);
        if (! in)
            throw UsageError{"cannot open " + path};
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    auto value_text(const Variable & v, Value a) -> std::string
    {
        return v.symbols.empty() ? std::to_string(v.labels[a]) : v.symbols[a];
    }

    auto cmd_solve(const std::string & path, const std::string & algorithm, const std::string & ordering,
        std::uint64_t seed, std::uint64_t time_limit, std::uint64_t node_limit) -> int
    {
        auto p = load_instance(path);
        auto spec = parse_algorithm(algorithm);
        SearchOptions opts;
        opts.ordering = parse_ordering(ordering);
        opts.node_limit = node_limit;
        opts.time_limit = std::chrono::milliseconds{time_limit};
        auto res = solve(p, spec, opts);
        RunRecord r{path, algorithm, to_string(spec.representation), ordering, seed, to_string(res.verdict), res.nodes,
            res.counters.tuple_checks, res.counters.micro_ops,
            res.counters.value_removals + res.counters.tuple_removals, res.elapsed_ms, res.mem_bytes};
        std::cout << csv_header << '\n' << csv_row(r);
        if (res.solution) {
            std::cout << "solution:";
            for (int x = 0; x < p.n(); ++x)
                std::cout << ' ' << p.variables[x].name << '=' << value_text(p.variables[x], (*res.solution)[x]);
            std::cout << '\n';
        }
        return 0;
    }

    auto cmd_gen(const std::string & family, const std::string & params, std::uint64_t seed, const std::string & out)
        -> int
    {
        auto p = generate({family, parse_params(params), seed});
        if (out.empty() || out == "-")
            std::cout << emit_instance(p);
        else
            save_instance(p, out);
        return 0;
    }

    auto cmd_bench(const std::string & matrix, const std::string & out_dir, int jobs, bool deterministic) -> int
    {
        auto entries = parse_matrix(read_file(matrix));
        auto report = run_matrix(entries, {jobs, deterministic});
        write_reports(report, out_dir);
        std::size_t errors = 0;
        for (auto & r : report.runs)
            errors += r.verdict == "ERROR";
        std::size_t broken = 0;
        for (auto & i : report.inclusions)
            broken += ! i.holds;
        std::cout << report.runs.size() << " runs (" << errors << " failed), " << report.inclusions.size()
                  << " inclusion checks (" << broken << " violated) written to " << out_dir << '\n';
        return 0;
    }

    // Validates the instance and, when it is small enough to enumerate, compares
    // every complete algorithm and propagator against brute force.
    auto cmd_check(const std::string & path) -> int
    {
        auto p = load_instance(path);
        std::cout << "valid: " << p.n() << " variables, " << p.e() << " constraints\n";
        double space = 1;
        for (auto & v : p.variables)
            space *= v.size();
        if (space > 1e7) {
            std::cout << "search space " << space << " too large for the brute-force comparison\n";
            return 0;
        }
        auto solutions = enumerate_solutions(p, SIZE_MAX);
        bool sat = ! solutions.empty();
        std::cout << "solutions: " << solutions.size() << '\n';
        int mismatches = 0;
        auto gac = gac2001(p);
        auto oracle = ac1_fixpoint(p);
        if ((gac.verdict == Verdict::inconsistent) != oracle.wipeout
            || (! oracle.wipeout && gac.state.vars != oracle.state.vars)) {
            std::cout << "MISMATCH gac2001 vs naive fixpoint\n";
            ++mismatches;
        }
        for (auto & name : algorithm_names()) {
            SearchResult res;
            try {
                res = solve(p, parse_algorithm(name), {});
            }
            catch (const CapacityError &) {
                std::cout << name << ": skipped (relation too large to encode)\n";
                continue;
            }
            bool ok = (res.verdict == SearchVerdict::sat) == sat && (! res.solution || satisfies(p, *res.solution));
            std::cout << name << ": " << to_string(res.verdict) << (ok ? "" : "  MISMATCH") << '\n';
            mismatches += ! ok;
        }
        return mismatches == 0 ? 0 : 1;
    }
}

auto main(int argc, char ** argv) -> int
{
    CLI::App app{"Non-binary constraint solving through binary encodings"};
    app.require_subcommand(1);

    std::string instance, algorithm = "MGAC-2001", ordering = "heuristic";
    std::uint64_t seed = 0, time_limit = 0, node_limit = 0;
    auto * solve_cmd = app.add_subcommand("solve", "Solve one instance");
    solve_cmd->add_option("--instance", instance, "Instance JSON file")->required();
    solve_cmd->add_option("--algorithm", algorithm, "Algorithm name, e.g. MAC-PW-ACd or hFC3");
    solve_cmd->add_option("--ordering", ordering, "heuristic (dom/deg) or fixed");
    solve_cmd->add_option("--seed", seed, "Seed recorded in the report row");
    solve_cmd->add_option("--time-limit", time_limit, "Milliseconds, 0 for none");
    solve_cmd->add_option("--node-limit", node_limit, "Nodes, 0 for none");

    std::string family, params, out;
    auto * gen_cmd = app.add_subcommand("gen", "Generate an instance");
    gen_cmd->add_option("--family", family, "modelb, clique, crossword, parity, rlfa or config")->required();
    gen_cmd->add_option("--params", params, "Comma-separated key=value list");
    gen_cmd->add_option("--seed", seed, "Generator seed");
    gen_cmd->add_option("--out", out, "Output file (stdout if omitted)");

    std::string matrix, out_dir = "results";
    int jobs = 1;
    bool deterministic = false;
    auto * bench_cmd = app.add_subcommand("bench", "Run an algorithm x instance matrix");
    bench_cmd->add_option("--matrix", matrix, "Matrix JSON file")->required();
    bench_cmd->add_option("--out-dir", out_dir, "Directory for results.csv and summary.json");
    bench_cmd->add_option("--jobs", jobs, "Parallel workers");
    bench_cmd->add_flag("--deterministic", deterministic, "Report time_ms as 0 for byte-stable output");

    auto * check_cmd = app.add_subcommand("check", "Validate an instance and compare against brute force");
    check_cmd->add_option("--instance", instance, "Instance JSON file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*solve_cmd)
            return cmd_solve(instance, algorithm, ordering, seed, time_limit, node_limit);
        if (*gen_cmd)
            return cmd_gen(family, params, seed, out);
        if (*bench_cmd)
            return cmd_bench(matrix, out_dir, jobs, deterministic);
        if (*check_cmd)
            return cmd_check(instance);
    }
    catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
