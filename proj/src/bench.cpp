#include <bincsp/bench.hpp>
#include <bincsp/gen.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace bincsp {

using nlohmann::json;

auto parse_params(const std::string & text) -> std::map<std::string, std::string>
{
    std::map<std::string, std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError{"parameter '" + item + "' is not of the form key=value"};
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

namespace {
    class Params {
      public:
        explicit Params(const GeneratorSpec & spec) : spec_(spec) {}

        auto integer(const std::string & key, int fallback) -> int
        {
            used_.insert(key);
            auto it = spec_.params.find(key);
            if (it == spec_.params.end())
                return fallback;
            try {
                std::size_t n = 0;
                int v = std::stoi(it->second, &n);
                if (n == it->second.size())
                    return v;
            }
            catch (const std::exception &) {
            }
            throw UsageError{"parameter " + key + " must be an integer, got '" + it->second + "'"};
        }

        auto real(const std::string & key, double fallback) -> double
        {
            used_.insert(key);
            auto it = spec_.params.find(key);
            if (it == spec_.params.end())
                return fallback;
            try {
                std::size_t n = 0;
                double v = std::stod(it->second, &n);
                if (n == it->second.size())
                    return v;
            }
            catch (const std::exception &) {
            }
            throw UsageError{"parameter " + key + " must be a number, got '" + it->second + "'"};
        }

        auto text(const std::string & key, const std::string & fallback) -> std::string
        {
            used_.insert(key);
            auto it = spec_.params.find(key);
            return it == spec_.params.end() ? fallback : it->second;
        }

        auto reject_unknown() const -> void
        {
            for (auto & [k, v] : spec_.params)
                if (! used_.count(k))
                    throw UsageError{"unknown parameter '" + k + "' for family " + spec_.family};
        }

      private:
        const GeneratorSpec & spec_;
        std::set<std::string> used_;
    };

    auto model_b_params(Params & ps, std::uint64_t seed) -> ModelBParams
    {
        ModelBParams m;
        m.n = ps.integer("n", m.n);
        m.d = ps.integer("d", m.d);
        m.k = ps.integer("k", m.k);
        m.p = ps.real("p", m.p);
        m.q = ps.real("q", m.q);
        m.seed = seed;
        return m;
    }
}

auto generator_families() -> std::vector<std::string>
{
    return {"modelb", "clique", "crossword", "parity", "rlfa", "config"};
}

auto generate(const GeneratorSpec & spec) -> Problem
{
    Params ps(spec);
    Problem p;
    if (spec.family == "modelb") {
        auto m = model_b_params(ps, spec.seed);
        ps.reject_unknown();
        p = gen_model_b(m);
    }
    else if (spec.family == "clique") {
        auto m = model_b_params(ps, spec.seed);
        int size = ps.integer("size", m.k);
        ps.reject_unknown();
        p = gen_clique_embedded(m, size, spec.seed + 1);
    }
    else if (spec.family == "crossword") {
        auto grid = ps.text("grid", "");
        auto words = ps.text("words", "");
        ps.reject_unknown();
        CrosswordSpec cs{grid.empty() ? bundled_grid() : read_lines(grid),
            words.empty() ? bundled_dictionary() : read_lines(words)};
        p = gen_crossword(cs);
    }
    else if (spec.family == "parity") {
        int n = ps.integer("n", 2);
        ps.reject_unknown();
        p = gen_parity_chain(n);
    }
    else if (spec.family == "rlfa") {
        RlfaParams r;
        r.topology = ps.text("topology", r.topology);
        r.domain = ps.integer("domain", r.domain);
        r.adjacent_channel = ps.integer("adjacent", 0) != 0;
        r.not_all_equal = ps.integer("nae", 0) != 0;
        ps.reject_unknown();
        p = gen_rlfa(r, spec.seed);
    }
    else if (spec.family == "config") {
        int extra = ps.integer("extra", 5);
        ps.reject_unknown();
        p = gen_config_like(tshirt(), extra, spec.seed);
    }
    else
        throw UsageError{"unknown generator family '" + spec.family + "'"};
    return p;
}

auto instance_id(const GeneratorSpec & spec) -> std::string
{
    std::string id = spec.family;
    char sep = ':';
    for (auto & [k, v] : spec.params) {
        id += sep + k + "=" + v;
        sep = ',';
    }
    return id + "/" + std::to_string(spec.seed);
}

namespace {
    auto u64(const json & j, const char * key, std::uint64_t fallback, const std::string & path) -> std::uint64_t
    {
        if (! j.contains(key))
            return fallback;
        if (! j[key].is_number_unsigned())
            throw ParseError{path + "/" + key, "expected a non-negative integer"};
        return j[key].get<std::uint64_t>();
    }

    auto param_text(const json & v) -> std::string
    {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }
}

auto parse_matrix(const std::string & text) -> std::vector<MatrixEntry>
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::parse_error & e) {
        throw ParseError{"document", e.what()};
    }
    if (! doc.is_array())
        throw ParseError{"/", "matrix must be a list of entries"};
    std::vector<MatrixEntry> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        auto path = "/" + std::to_string(i);
        auto & j = doc[i];
        if (! j.is_object())
            throw ParseError{path, "expected an object"};
        MatrixEntry e;
        if (j.contains("instance")) {
            if (! j["instance"].is_string())
                throw ParseError{path + "/instance", "expected a file path"};
            e.instance_path = j["instance"].get<std::string>();
        }
        else if (j.contains("generator")) {
            auto & g = j["generator"];
            if (! g.is_object() || ! g.contains("family") || ! g["family"].is_string())
                throw ParseError{path + "/generator", "expected {\"family\": ..., \"params\": {...}}"};
            GeneratorSpec spec{g["family"].get<std::string>(), {}, 0};
            if (g.contains("params")) {
                if (g["params"].is_string())
                    spec.params = parse_params(g["params"].get<std::string>());
                else if (g["params"].is_object())
                    for (auto & [k, v] : g["params"].items())
                        spec.params[k] = param_text(v);
                else
                    throw ParseError{path + "/generator/params", "expected an object or key=value list"};
            }
            e.generator = spec;
        }
        else
            throw ParseError{path, "entry needs \"instance\" or \"generator\""};
        if (! j.contains("algorithms") || ! j["algorithms"].is_array())
            throw ParseError{path + "/algorithms", "expected a list of algorithm names"};
        for (std::size_t a = 0; a < j["algorithms"].size(); ++a) {
            auto & name = j["algorithms"][a];
            if (! name.is_string())
                throw ParseError{path + "/algorithms/" + std::to_string(a), "expected a string"};
            e.algorithms.push_back(name.get<std::string>());
        }
        if (j.contains("ordering")) {
            if (! j["ordering"].is_string())
                throw ParseError{path + "/ordering", "expected \"heuristic\" or \"fixed\""};
            e.ordering = parse_ordering(j["ordering"].get<std::string>());
        }
        e.limits.node_limit = u64(j, "node_limit", 0, path);
        e.limits.time_limit_ms = u64(j, "time_limit_ms", 0, path);
        if (j.contains("seeds")) {
            if (! j["seeds"].is_array())
                throw ParseError{path + "/seeds", "expected a list"};
            e.seeds.clear();
            for (auto & s : j["seeds"]) {
                if (! s.is_number_unsigned())
                    throw ParseError{path + "/seeds", "seeds must be non-negative integers"};
                e.seeds.push_back(s.get<std::uint64_t>());
            }
        }
        else {
            auto first = u64(j, "seed", 0, path);
            auto repeats = u64(j, "repeats", 1, path);
            e.seeds.clear();
            for (std::uint64_t r = 0; r < repeats; ++r)
                e.seeds.push_back(first + r);
        }
        if (j.contains("pairs")) {
            for (auto & pr : j["pairs"]) {
                if (! pr.is_array() || pr.size() != 2 || ! pr[0].is_string() || ! pr[1].is_string())
                    throw ParseError{path + "/pairs", "each pair is [smaller, larger]"};
                e.pairs.emplace_back(pr[0].get<std::string>(), pr[1].get<std::string>());
            }
        }
        for (auto & name : e.algorithms)
            parse_algorithm(name);
        for (auto & [a, b] : e.pairs) {
            parse_algorithm(a);
            parse_algorithm(b);
        }
        out.push_back(std::move(e));
    }
    return out;
}

auto run_cell(const Problem & p, const std::string & instance, const std::string & algorithm, Ordering ordering,
    std::uint64_t seed, const Limits & limits, bool deterministic) -> RunRecord
{
    RunRecord r;
    r.instance = instance;
    r.algorithm = algorithm;
    r.ordering = to_string(ordering);
    r.seed = seed;
    try {
        auto spec = parse_algorithm(algorithm);
        r.encoding = to_string(spec.representation);
        SearchOptions opts;
        opts.ordering = ordering;
        opts.node_limit = limits.node_limit;
        opts.time_limit = std::chrono::milliseconds{limits.time_limit_ms};
        auto res = solve(p, spec, opts);
        r.verdict = to_string(res.verdict);
        r.nodes = res.nodes;
        r.checks = res.counters.tuple_checks;
        r.microops = res.counters.micro_ops;
        r.removals = res.counters.value_removals + res.counters.tuple_removals;
        r.time_ms = deterministic ? 0.0 : res.elapsed_ms;
        r.mem_bytes = res.mem_bytes;
    }
    catch (const std::exception &) {
        r.verdict = "ERROR";
    }
    return r;
}

auto node_set_included(const Problem & p, const AlgorithmSpec & smaller, const AlgorithmSpec & larger,
    Ordering ordering, std::uint64_t node_limit) -> InclusionRecord
{
    SearchOptions opts;
    opts.ordering = ordering;
    opts.node_limit = node_limit;
    opts.record_nodes = true;
    auto a = solve(p, smaller, opts);
    auto b = solve(p, larger, opts);
    std::set<NodePath> seen(b.trace.begin(), b.trace.end());
    InclusionRecord r;
    r.smaller = algorithm_name(smaller);
    r.larger = algorithm_name(larger);
    r.smaller_nodes = a.nodes;
    r.larger_nodes = b.nodes;
    r.holds = std::all_of(a.trace.begin(), a.trace.end(), [&](const NodePath & n) { return seen.count(n) > 0; });
    return r;
}

auto run_matrix(const std::vector<MatrixEntry> & entries, const RunSettings & settings) -> MatrixReport
{
    struct Instance {
        std::string id;
        Problem problem;
        const MatrixEntry * entry;
        std::uint64_t seed;
    };
    std::vector<Instance> instances;
    for (auto & e : entries)
        for (auto seed : e.seeds) {
            if (e.generator) {
                auto spec = *e.generator;
                spec.seed = seed;
                instances.push_back({instance_id(spec), generate(spec), &e, seed});
            }
            else {
                instances.push_back({e.instance_path, load_instance(e.instance_path), &e, seed});
                if (e.seeds.size() > 1)
                    instances.back().id += "/" + std::to_string(seed);
            }
        }

    struct Cell {
        std::size_t instance;
        std::size_t task; // algorithm index, then pair index after the algorithms
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (std::size_t t = 0; t < instances[i].entry->algorithms.size() + instances[i].entry->pairs.size(); ++t)
            cells.push_back({i, t});

    std::vector<RunRecord> runs(cells.size());
    std::vector<std::optional<InclusionRecord>> inclusions(cells.size());
    auto run_one = [&](std::size_t c) {
        auto & inst = instances[cells[c].instance];
        auto & e = *inst.entry;
        auto t = cells[c].task;
        if (t < e.algorithms.size()) {
            runs[c] = run_cell(inst.problem, inst.id, e.algorithms[t], e.ordering, inst.seed, e.limits,
                settings.deterministic);
            return;
        }
        auto & [small, large] = e.pairs[t - e.algorithms.size()];
        InclusionRecord r;
        try {
            r = node_set_included(inst.problem, parse_algorithm(small), parse_algorithm(large), e.ordering,
                e.limits.node_limit);
        }
        catch (const std::exception &) {
            r.smaller = small;
            r.larger = large;
        }
        r.instance = inst.id;
        inclusions[c] = r;
    };

    int jobs = std::max(1, settings.jobs);
    auto count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
    for (std::ptrdiff_t c = 0; c < count; ++c)
        run_one(static_cast<std::size_t>(c));

    MatrixReport report;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (inclusions[c])
            report.inclusions.push_back(*inclusions[c]);
        else
            report.runs.push_back(std::move(runs[c]));
    }
    return report;
}

auto emit_inclusions_csv(const std::vector<InclusionRecord> & records) -> std::string
{
    std::string out = "instance,smaller,larger,holds,smaller_nodes,larger_nodes\n";
    for (auto & r : records)
        out += r.instance + "," + r.smaller + "," + r.larger + "," + (r.holds ? "true" : "false") + ","
            + std::to_string(r.smaller_nodes) + "," + std::to_string(r.larger_nodes) + "\n";
    return out;
}

auto write_reports(const MatrixReport & report, const std::string & out_dir) -> void
{
    std::filesystem::create_directories(out_dir);
    auto write = [&](const std::string & name, const std::string & text) {
        std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
        if (! out)
            throw UsageError{"cannot write " + out_dir + "/" + name};
        out << text;
    };
    write("results.csv", emit_csv(report.runs));
    write("summary.json", emit_json_summary(report.runs));
    if (! report.inclusions.empty())
        write("inclusions.csv", emit_inclusions_csv(report.inclusions));
}

} // namespace bincsp
