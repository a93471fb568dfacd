#include <bincsp/io.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace bincsp {

using nlohmann::json;

namespace {
    auto at(const std::string & path, std::size_t i) -> std::string { return path + "/" + std::to_string(i); }
    auto at(const std::string & path, const char * key) -> std::string { return path + "/" + key; }

    auto field(const json & obj, const std::string & path, const char * key) -> const json &
    {
        if (! obj.is_object())
            throw ParseError{path.empty() ? "/" : path, "expected an object"};
        auto it = obj.find(key);
        if (it == obj.end())
            throw ParseError{path.empty() ? "/" : path, std::string{"missing field '"} + key + "'"};
        return *it;
    }

    auto integer(const json & v, const std::string & path) -> int
    {
        if (! v.is_number_integer())
            throw ParseError{path, "expected an integer"};
        auto x = v.get<std::int64_t>();
        if (x < INT32_MIN || x > INT32_MAX)
            throw ParseError{path, "integer out of range"};
        return static_cast<int>(x);
    }

    auto array(const json & v, const std::string & path) -> const json &
    {
        if (! v.is_array())
            throw ParseError{path, "expected an array"};
        return v;
    }

    auto integers(const json & v, const std::string & path) -> std::vector<int>
    {
        std::vector<int> out;
        for (std::size_t i = 0; i < array(v, path).size(); ++i)
            out.push_back(integer(v[i], at(path, i)));
        return out;
    }

    auto positions(const json & v, const std::string & path, int arity) -> std::vector<int>
    {
        auto out = integers(v, path);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out[i] < 0 || out[i] >= arity)
                throw ParseError{at(path, i), "scope position out of range"};
        return out;
    }

    auto parse_relation(const json & v, const std::string & path) -> Relation
    {
        if (! v.is_string())
            throw ParseError{path, "expected a relation string"};
        auto s = v.get<std::string>();
        if (s == "=" || s == "==")
            return Relation::eq;
        if (s == ">=")
            return Relation::ge;
        if (s == "<=")
            return Relation::le;
        if (s == "!=")
            return Relation::ne;
        throw ParseError{path, "unknown relation '" + s + "' (expected =, >=, <=, !=)"};
    }

    auto relation_text(Relation r) -> std::string
    {
        switch (r) {
        case Relation::eq: return "=";
        case Relation::ge: return ">=";
        case Relation::le: return "<=";
        case Relation::ne: return "!=";
        }
        return "=";
    }

    auto parse_gap(const json & obj, const std::string & path, const char * key) -> int
    {
        int g = integer(field(obj, path, key), at(path, key));
        if (g < 0)
            throw ParseError{at(path, key), "gap must be non-negative"};
        return g;
    }

    auto parse_predicate(const json & v, const std::string & path, int arity) -> Predicate
    {
        auto & kind_field = field(v, path, "kind");
        if (! kind_field.is_string())
            throw ParseError{at(path, "kind"), "expected a string"};
        auto kind = kind_field.get<std::string>();
        if (kind == "linear") {
            Linear l;
            l.coeffs = integers(field(v, path, "coeffs"), at(path, "coeffs"));
            if (static_cast<int>(l.coeffs.size()) != arity)
                throw ParseError{at(path, "coeffs"), "needs one coefficient per scope variable"};
            l.rel = parse_relation(field(v, path, "relation"), at(path, "relation"));
            l.rhs = integer(field(v, path, "rhs"), at(path, "rhs"));
            return l;
        }
        if (kind == "separation")
            return Separation{parse_gap(v, path, "gap")};
        if (kind == "rich_separation") {
            RichSeparation r;
            r.gap = parse_gap(v, path, "gap");
            r.wide_gap = parse_gap(v, path, "wide_gap");
            r.wide = positions(field(v, path, "wide"), at(path, "wide"), arity);
            return r;
        }
        if (kind == "not_all_equal")
            return NotAllEqual{};
        if (kind == "parity_neq") {
            if (arity < 2)
                throw ParseError{path, "parity_neq needs at least two scope variables"};
            ParityNeq q;
            if (v.contains("pairs")) {
                auto & pairs = array(v["pairs"], at(path, "pairs"));
                if (pairs.size() != 2)
                    throw ParseError{at(path, "pairs"), "expected two index pairs"};
                auto first = positions(pairs[0], at(at(path, "pairs"), std::size_t{0}), arity);
                auto second = positions(pairs[1], at(at(path, "pairs"), std::size_t{1}), arity);
                if (first.size() != 2 || second.size() != 2)
                    throw ParseError{at(path, "pairs"), "each pair needs two scope positions"};
                q = ParityNeq{first[0], first[1], second[0], second[1]};
            }
            else if (arity != 4)
                throw ParseError{path, "parity_neq without pairs needs a 4-variable scope"};
            return q;
        }
        throw ParseError{at(path, "kind"), "unknown predicate kind '" + kind + "'"};
    }

    auto predicate_json(const Predicate & p) -> json
    {
        json out;
        out["kind"] = predicate_kind(p);
        std::visit(
            [&](const auto & q) {
                using T = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<T, Linear>) {
                    out["coeffs"] = q.coeffs;
                    out["relation"] = relation_text(q.rel);
                    out["rhs"] = q.rhs;
                }
                else if constexpr (std::is_same_v<T, Separation>)
                    out["gap"] = q.gap;
                else if constexpr (std::is_same_v<T, RichSeparation>) {
                    out["gap"] = q.gap;
                    out["wide_gap"] = q.wide_gap;
                    out["wide"] = q.wide;
                }
                else if constexpr (std::is_same_v<T, ParityNeq>)
                    out["pairs"] = json::array({json::array({q.a, q.b}), json::array({q.c, q.d})});
            },
            p);
        return out;
    }
}

auto parse_instance(const std::string & text) -> Problem
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::parse_error & e) {
        throw ParseError{"document", e.what()};
    }
    Problem p;
    std::unordered_map<std::string, int> by_name;
    auto & vars = array(field(doc, "", "variables"), "/variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        auto path = at("/variables", i);
        auto & name_field = field(vars[i], path, "name");
        if (! name_field.is_string())
            throw ParseError{at(path, "name"), "expected a string"};
        auto name = name_field.get<std::string>();
        if (by_name.count(name))
            throw ParseError{at(path, "name"), "duplicate variable name '" + name + "'"};
        auto labels = integers(field(vars[i], path, "domain"), at(path, "domain"));
        if (labels.empty())
            throw ParseError{at(path, "domain"), "domain is empty"};
        std::set<int> distinct(labels.begin(), labels.end());
        if (distinct.size() != labels.size())
            throw ParseError{at(path, "domain"), "domain repeats a value"};
        std::vector<std::string> symbols;
        if (vars[i].contains("symbols")) {
            auto & s = array(vars[i]["symbols"], at(path, "symbols"));
            if (s.size() != labels.size())
                throw ParseError{at(path, "symbols"), "needs one symbol per domain value"};
            for (std::size_t j = 0; j < s.size(); ++j) {
                if (! s[j].is_string())
                    throw ParseError{at(at(path, "symbols"), j), "expected a string"};
                symbols.push_back(s[j].get<std::string>());
            }
        }
        by_name[name] = p.add_variable(name, std::move(labels), std::move(symbols));
    }

    auto & cons = array(field(doc, "", "constraints"), "/constraints");
    for (std::size_t i = 0; i < cons.size(); ++i) {
        auto path = at("/constraints", i);
        auto & scope_field = array(field(cons[i], path, "scope"), at(path, "scope"));
        std::vector<int> scope;
        for (std::size_t j = 0; j < scope_field.size(); ++j) {
            auto spath = at(at(path, "scope"), j);
            if (! scope_field[j].is_string())
                throw ParseError{spath, "expected a variable name"};
            auto it = by_name.find(scope_field[j].get<std::string>());
            if (it == by_name.end())
                throw ParseError{spath, "unknown variable '" + scope_field[j].get<std::string>() + "'"};
            if (std::find(scope.begin(), scope.end(), it->second) != scope.end())
                throw ParseError{spath, "variable repeated in scope"};
            scope.push_back(it->second);
        }
        if (scope.empty())
            throw ParseError{at(path, "scope"), "scope is empty"};
        auto & type_field = field(cons[i], path, "type");
        auto type = type_field.is_string() ? type_field.get<std::string>() : std::string{};
        int arity = static_cast<int>(scope.size());
        if (type == "extension") {
            auto tpath = at(path, "tuples");
            auto & tuples = array(field(cons[i], path, "tuples"), tpath);
            std::vector<Tuple> rows;
            for (std::size_t r = 0; r < tuples.size(); ++r) {
                auto labels = integers(tuples[r], at(tpath, r));
                if (static_cast<int>(labels.size()) != arity)
                    throw ParseError{at(tpath, r), "tuple arity differs from scope size"};
                Tuple t;
                for (int j = 0; j < arity; ++j) {
                    auto & dom = p.variables[scope[j]].labels;
                    auto it = std::find(dom.begin(), dom.end(), labels[j]);
                    if (it == dom.end())
                        throw ParseError{at(at(tpath, r), j), "value " + std::to_string(labels[j]) + " not in the domain of '"
                                + p.variables[scope[j]].name + "'"};
                    t.push_back(static_cast<Value>(it - dom.begin()));
                }
                rows.push_back(std::move(t));
            }
            p.add_extension(std::move(scope), std::move(rows));
        }
        else if (type == "predicate")
            p.add_predicate(std::move(scope), parse_predicate(field(cons[i], path, "predicate"), at(path, "predicate"), arity));
        else
            throw ParseError{at(path, "type"), "expected \"extension\" or \"predicate\""};
    }
    try {
        p.validate();
    }
    catch (const UsageError & e) {
        throw ParseError{"/", e.what()};
    }
    return p;
}

auto emit_instance(const Problem & p) -> std::string
{
    json doc;
    doc["variables"] = json::array();
    for (auto & v : p.variables) {
        json var{{"name", v.name}, {"domain", v.labels}};
        if (! v.symbols.empty())
            var["symbols"] = v.symbols;
        doc["variables"].push_back(std::move(var));
    }
    doc["constraints"] = json::array();
    for (auto & c : p.constraints) {
        json con;
        con["scope"] = json::array();
        for (int x : c.scope)
            con["scope"].push_back(p.variables[x].name);
        if (c.extensional()) {
            con["type"] = "extension";
            con["tuples"] = json::array();
            auto & table = c.table();
            for (std::size_t r = 0; r < table.size(); ++r)
                con["tuples"].push_back(p.labels_of(c, table.row(r)));
        }
        else {
            con["type"] = "predicate";
            con["predicate"] = predicate_json(c.predicate());
        }
        doc["constraints"].push_back(std::move(con));
    }
    return doc.dump(1) + "\n";
}

auto load_instance(const std::string & path) -> Problem
{
    std::ifstream in(path);
    if (! in)
        throw UsageError{"cannot open " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_instance(ss.str());
    }
    catch (const ParseError & e) {
        throw ParseError{path, e.what()};
    }
}

auto save_instance(const Problem & p, const std::string & path) -> void
{
    std::ofstream out(path);
    if (! out)
        throw UsageError{"cannot write " + path};
    out << emit_instance(p);
}

namespace {
    auto csv_field(const std::string & s) -> std::string
    {
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"')
                out += '"';
            out += ch;
        }
        return out + "\"";
    }

    auto split_csv(const std::string & line, std::size_t lineno) -> std::vector<std::string>
    {
        std::vector<std::string> out(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char ch = line[i];
            if (quoted) {
                if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    out.back() += '"';
                    ++i;
                }
                else if (ch == '"')
                    quoted = false;
                else
                    out.back() += ch;
            }
            else if (ch == '"')
                quoted = true;
            else if (ch == ',')
                out.emplace_back();
            else
                out.back() += ch;
        }
        if (quoted)
            throw ParseError{"line " + std::to_string(lineno), "unterminated quoted field"};
        return out;
    }

    auto format_ms(double ms) -> std::string
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", ms);
        return buf;
    }

    auto to_u64(const std::string & s, const std::string & where) -> std::uint64_t
    {
        try {
            std::size_t used = 0;
            auto v = std::stoull(s, &used);
            if (used != s.size())
                throw std::invalid_argument{s};
            return v;
        }
        catch (const std::exception &) {
            throw ParseError{where, "expected a non-negative integer, got '" + s + "'"};
        }
    }
}

auto csv_row(const RunRecord & r) -> std::string
{
    std::ostringstream out;
    out << csv_field(r.instance) << ',' << csv_field(r.algorithm) << ',' << csv_field(r.encoding) << ','
        << csv_field(r.ordering) << ',' << r.seed << ',' << csv_field(r.verdict) << ',' << r.nodes << ',' << r.checks
        << ',' << r.microops << ',' << r.removals << ',' << format_ms(r.time_ms) << ',' << r.mem_bytes << '\n';
    return out.str();
}

auto emit_csv(const std::vector<RunRecord> & records) -> std::string
{
    std::string out = std::string{csv_header} + "\n";
    for (auto & r : records)
        out += csv_row(r);
    return out;
}

auto parse_csv(const std::string & text) -> std::vector<RunRecord>
{
    std::istringstream in(text);
    std::string line;
    if (! std::getline(in, line) || line != csv_header)
        throw ParseError{"line 1", "missing or unexpected report header"};
    std::vector<RunRecord> out;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty())
            continue;
        auto where = "line " + std::to_string(lineno);
        auto f = split_csv(line, lineno);
        if (f.size() != 12)
            throw ParseError{where, "expected 12 fields, got " + std::to_string(f.size())};
        RunRecord r;
        r.instance = f[0];
        r.algorithm = f[1];
        r.encoding = f[2];
        r.ordering = f[3];
        r.seed = to_u64(f[4], where);
        r.verdict = f[5];
        r.nodes = to_u64(f[6], where);
        r.checks = to_u64(f[7], where);
        r.microops = to_u64(f[8], where);
        r.removals = to_u64(f[9], where);
        try {
            r.time_ms = std::stod(f[10]);
        }
        catch (const std::exception &) {
            throw ParseError{where, "bad time_ms '" + f[10] + "'"};
        }
        r.mem_bytes = to_u64(f[11], where);
        out.push_back(std::move(r));
    }
    return out;
}

auto instance_class(const std::string & instance) -> std::string
{
    auto slash = instance.rfind('/');
    return slash == std::string::npos ? instance : instance.substr(0, slash);
}

auto aggregate(const std::vector<RunRecord> & records) -> std::vector<ClassAggregate>
{
    std::map<std::pair<std::string, std::string>, ClassAggregate> by_key;
    for (auto & r : records) {
        auto cls = instance_class(r.instance);
        auto & a = by_key[{cls, r.algorithm}];
        a.instance_class = cls;
        a.algorithm = r.algorithm;
        ++a.runs;
        a.mean_nodes += static_cast<double>(r.nodes);
        a.mean_time_ms += r.time_ms;
        if (r.verdict == "SAT")
            ++a.sat;
        else if (r.verdict == "UNSAT")
            ++a.unsat;
        else
            ++a.unfinished;
    }
    std::vector<ClassAggregate> out;
    for (auto & [key, a] : by_key) {
        a.mean_nodes /= static_cast<double>(a.runs);
        a.mean_time_ms /= static_cast<double>(a.runs);
        out.push_back(a);
    }
    return out;
}

auto emit_json_summary(const std::vector<RunRecord> & records) -> std::string
{
    json doc;
    doc["records"] = json::array();
    for (auto & r : records)
        doc["records"].push_back({{"instance", r.instance}, {"algorithm", r.algorithm}, {"encoding", r.encoding},
            {"ordering", r.ordering}, {"seed", r.seed}, {"verdict", r.verdict}, {"nodes", r.nodes},
            {"checks", r.checks}, {"microops", r.microops}, {"removals", r.removals}, {"time_ms", r.time_ms},
            {"mem_bytes", r.mem_bytes}});
    doc["aggregates"] = json::array();
    for (auto & a : aggregate(records))
        doc["aggregates"].push_back({{"class", a.instance_class}, {"algorithm", a.algorithm}, {"runs", a.runs},
            {"mean_nodes", a.mean_nodes}, {"mean_time_ms", a.mean_time_ms}, {"sat", a.sat}, {"unsat", a.unsat},
            {"unfinished", a.unfinished}});
    return doc.dump(1) + "\n";
}

auto parse_json_records(const std::string & text) -> std::vector<RunRecord>
{
    json doc;
    try {
        doc = json::parse(text);
    }
    catch (const json::parse_error & e) {
        throw ParseError{"document", e.what()};
    }
    std::vector<RunRecord> out;
    auto & recs = array(field(doc, "", "records"), "/records");
    for (std::size_t i = 0; i < recs.size(); ++i) {
        auto path = at("/records", i);
        try {
            auto & j = recs[i];
            RunRecord r;
            r.instance = j.at("instance").get<std::string>();
            r.algorithm = j.at("algorithm").get<std::string>();
            r.encoding = j.at("encoding").get<std::string>();
            r.ordering = j.at("ordering").get<std::string>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.verdict = j.at("verdict").get<std::string>();
            r.nodes = j.at("nodes").get<std::uint64_t>();
            r.checks = j.at("checks").get<std::uint64_t>();
            r.microops = j.at("microops").get<std::uint64_t>();
            r.removals = j.at("removals").get<std::uint64_t>();
            r.time_ms = j.at("time_ms").get<double>();
            r.mem_bytes = j.at("mem_bytes").get<std::uint64_t>();
            out.push_back(std::move(r));
        }
        catch (const json::exception & e) {
            throw ParseError{path, e.what()};
        }
    }
    return out;
}

} // namespace bincsp
