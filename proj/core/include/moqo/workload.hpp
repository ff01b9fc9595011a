#pragma once

#include <cstdint>
#include <moqo/catalog.hpp>
#include <moqo/cost.hpp>
#include <moqo/optimizer.hpp>
#include <moqo/oracle.hpp>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>


namespace moqo {

/*======================================================================================================================
 * Query generation
 *====================================================================================================================*/

/** Join graph shape of a generated query.  RANDOM connects each pair with probability `edge_probability` and then adds
 * a spanning chain. */
struct QueryShape
{
    enum Kind { CHAIN, STAR, CLIQUE, RANDOM };

    Kind kind = CHAIN;
    double edge_probability = 0.5;

    /** `chain`, `star`, `clique`, `random`, or `random(p)`.  Throws `InvalidInput` otherwise. */
    static QueryShape parse(std::string_view text);
    std::string to_string() const;
};

/** Tables `T1..Tn` with cardinalities log-uniform in [10, max_cardinality] and predicates following `shape` with
 * selectivities log-uniform in [10⁻⁴, 1]. */
std::pair<TableCatalog, Query> generate_query(QueryShape shape, std::size_t n, std::mt19937_64 &rng,
                                              double max_cardinality = 1e6);
std::pair<TableCatalog, Query> generate_query(QueryShape shape, std::size_t n, std::uint64_t seed,
                                              double max_cardinality = 1e6);


/*======================================================================================================================
 * Test cases
 *====================================================================================================================*/

/** One algorithm configuration to run on every generated instance. */
struct RunSpec
{
    Algorithm algorithm = Algorithm::EXA;
    double alpha = 1.0;
};

/** How per-objective minima for bound generation are obtained. */
enum class BoundMinima { AUTO, ORACLE, EXA };

/** Ranges from which test cases are drawn. */
struct Profile
{
    std::size_t tables_min = 4, tables_max = 4;
    std::size_t objectives_min = 3, objectives_max = 3;
    std::vector<QueryShape> shapes = { QueryShape{} };
    double max_cardinality = 1e6;
    std::optional<std::size_t> operators; ///< uniform operator space with this many configurations; standard if unset
    double bound_probability = 0; ///< probability that an objective receives a bound
    BoundMinima bound_minima = BoundMinima::AUTO;
    std::vector<RunSpec> runs = { RunSpec{} };
    double deadline_ms = 60'000;
    unsigned max_iterations = 64;
    std::size_t oracle_cap = DEFAULT_ENUMERATION_CAP;
    std::uint64_t oracle_plan_limit = 2'000'000; ///< instances with more plans are not checked against the oracle

    /** Parses the JSON form.  Throws `InvalidInput` naming the offending field. */
    static Profile parse(std::string_view json);
    static Profile load(const std::string &path);
};

/** A generated instance together with the algorithm configuration to run on it.  Reproducible from seed and profile
 * alone. */
struct TestCase
{
    std::uint64_t seed = 0;
    QueryShape shape;
    std::size_t n = 0;
    TableCatalog catalog;
    Query query;
    ObjectiveList objectives;
    std::optional<std::size_t> operators;
    WeightVector weights;
    BoundVector bounds;
    RunSpec run;

    SearchSpace search_space() const;
    ProblemInstance instance() const;
};

/** Draws the instance for `seed`, configured for `profile.runs[run]`.  Throws `InvalidInput` if the profile demands
 * oracle bound generation beyond the oracle's reach. */
TestCase generate_testcase(std::uint64_t seed, const Profile &profile, std::size_t run = 0);

/** One test case per seed in [first, last] and run of the profile, ordered by seed, then run. */
std::vector<TestCase> generate_suite(std::uint64_t first, std::uint64_t last, const Profile &profile);


/*======================================================================================================================
 * Benchmark execution
 *====================================================================================================================*/

struct RunMetrics
{
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::EXA;
    double alpha = 1;
    std::size_t n = 0;
    std::size_t l = 0;
    double wall_ms = 0;
    std::size_t plans_total = 0;
    std::size_t plans_max_set = 0;
    std::size_t iterations = 0;
    double weighted_cost = 0;
    std::optional<double> rho; ///< set when the oracle checked the run
    bool guarantee_violated = false;
    bool timeout = false;
    bool iteration_cap = false;
    std::string error; ///< non-empty if the run failed
};

struct BenchmarkOptions
{
    double deadline_ms = 60'000;
    unsigned max_iterations = 64;
    std::size_t oracle_cap = DEFAULT_ENUMERATION_CAP;
    std::uint64_t oracle_plan_limit = 2'000'000;
    unsigned jobs = 1;

    static BenchmarkOptions from(const Profile &profile);
};

/** Runs every test case, in parallel over `jobs` threads.  Failures are recorded in the metrics, never thrown.  Rows
 * are in suite order. */
std::vector<RunMetrics> run_benchmark(const std::vector<TestCase> &suite, const BenchmarkOptions &options);

RunMetrics run_testcase(const TestCase &test, const BenchmarkOptions &options);

}
