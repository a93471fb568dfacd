#pragma once

#include <bincsp/core.hpp>

#include <random>
#include <string>

namespace bincsp {

// Portable seeded source: mt19937_64 output is fixed by the standard, and bounded
// draws use rejection sampling instead of the library's unspecified distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    auto below(std::uint64_t bound) -> std::uint64_t;
    auto between(int lo, int hi) -> int { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    auto chance(double p) -> bool;
    template <typename T>
    auto shuffle_prefix(std::vector<T> & v, std::size_t prefix) -> void
    {
        for (std::size_t i = 0; i < prefix && i + 1 < v.size(); ++i)
            std::swap(v[i], v[i + below(v.size() - i)]);
    }

  private:
    std::mt19937_64 engine_;
};

// Half-up rounding used for every percentage-derived count.
auto round_half_up(double x) -> std::int64_t;
auto binomial(int n, int k) -> std::int64_t;
// Hypergraph connectivity over all variables (a variable in no scope disconnects).
auto is_connected(const Problem & p) -> bool;

struct ModelBParams {
    int n = 10, d = 4, k = 3;
    double p = 10, q = 50; // percentages
    std::uint64_t seed = 0;
};

auto model_b_constraint_count(const ModelBParams & m) -> std::int64_t;
auto model_b_tuple_count(const ModelBParams & m) -> std::int64_t;
auto gen_model_b(const ModelBParams & params) -> Problem;
// Adds constraints whose dual variables pairwise intersect over clique_size variables.
auto gen_clique_embedded(const ModelBParams & base, int clique_size, std::uint64_t seed) -> Problem;

struct CrosswordSpec {
    std::vector<std::string> grid; // '.' open, '#' blocked
    std::vector<std::string> words;
};

auto gen_crossword(const CrosswordSpec & spec) -> Problem;
auto crossword_slots(const std::vector<std::string> & grid) -> std::vector<std::vector<std::pair<int, int>>>;
auto read_lines(const std::string & path) -> std::vector<std::string>;
auto bundled_data_dir() -> std::string;
auto bundled_dictionary() -> std::vector<std::string>;
auto bundled_grid() -> std::vector<std::string>;

auto gen_parity_chain(int n) -> Problem;

struct RlfaParams {
    std::string topology = "prob1"; // prob1 .. prob5
    int domain = 20;
    bool adjacent_channel = false;  // 8-ary separation with gap 1 across groups
    bool not_all_equal = false;     // co-channel style constraints across groups
};

auto gen_rlfa(const RlfaParams & params, std::uint64_t seed) -> Problem;

auto tshirt() -> Problem;
// Adds extra_vars variables and 8-10 random constraints of arity 2-4 (none when
// extra_vars is 0), retrying until the whole instance is connected.
auto gen_config_like(const Problem & base, int extra_vars, std::uint64_t seed) -> Problem;

} // namespace bincsp
