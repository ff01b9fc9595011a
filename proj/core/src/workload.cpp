#include <moqo/workload.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <moqo/error.hpp>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>


using namespace moqo;
using json = nlohmann::json;


namespace {

/* Distributions are written out rather than taken from <random> so that draws do not depend on the standard library
 * implementation. */

double uniform01(std::mt19937_64 &rng) { return double(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64 &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double log_uniform(std::mt19937_64 &rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/** Uniform in [lo, hi]. */
std::size_t uniform_int(std::mt19937_64 &rng, std::size_t lo, std::size_t hi)
{
    const std::uint64_t span = hi - lo + 1;
    return lo + std::size_t(rng() % span);
}

}


/*======================================================================================================================
 * Query generation
 *====================================================================================================================*/

QueryShape QueryShape::parse(std::string_view text)
{
    QueryShape s;
    if (text == "chain") s.kind = CHAIN;
    else if (text == "star") s.kind = STAR;
    else if (text == "clique") s.kind = CLIQUE;
    else if (text == "random") s.kind = RANDOM;
    else if (text.starts_with("random(") and text.ends_with(")")) {
        s.kind = RANDOM;
        const std::string p(text.substr(7, text.size() - 8));
        std::size_t used = 0;
        try {
            s.edge_probability = std::stod(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p.size() or not(s.edge_probability >= 0 and s.edge_probability <= 1))
            throw InvalidInput("edge probability must be a number in [0,1]: " + std::string(text));
    } else {
        throw InvalidInput("unknown query shape " + std::string(text));
    }
    return s;
}

std::string QueryShape::to_string() const
{
    switch (kind) {
        case CHAIN: return "chain";
        case STAR: return "star";
        case CLIQUE: return "clique";
        case RANDOM: {
            std::ostringstream os;
            os << "random(" << edge_probability << ")";
            return os.str();
        }
    }
    return "?";
}

std::pair<TableCatalog, Query> moqo::generate_query(QueryShape shape, std::size_t n, std::mt19937_64 &rng,
                                                    double max_cardinality)
{
    if (n == 0) throw InvalidInput("a query needs at least one table");
    if (n > JoinGraph::MAX_TABLES) throw InvalidInput("too many tables");
    if (not(max_cardinality >= 10)) throw InvalidInput("maximum cardinality must be at least 10");

    TableCatalog catalog;
    Query query;
    for (std::size_t i = 0; i != n; ++i) {
        const auto name = "T" + std::to_string(i + 1);
        const auto card = std::uint64_t(std::llround(log_uniform(rng, 10, max_cardinality)));
        const bool index = uniform01(rng) < 0.5;
        catalog.add({ name, std::max<std::uint64_t>(card, 1), index });
        query.tables.push_back(name);
    }

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    switch (shape.kind) {
        case QueryShape::CHAIN:
            for (std::size_t i = 1; i < n; ++i) edges.emplace_back(i - 1, i);
            break;
        case QueryShape::STAR:
            for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
            break;
        case QueryShape::CLIQUE:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
            break;
        case QueryShape::RANDOM: {
            std::vector<bool> present(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    present[i * n + j] = uniform01(rng) < shape.edge_probability;
            for (std::size_t i = 1; i < n; ++i) present[(i - 1) * n + i] = true;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (present[i * n + j]) edges.emplace_back(i, j);
            break;
        }
    }
    for (auto [i, j] : edges)
        query.predicates.push_back({ query.tables[i], query.tables[j], log_uniform(rng, 1e-4, 1) });

    validate_catalog(catalog, query);
    return { std::move(catalog), std::move(query) };
}

std::pair<TableCatalog, Query> moqo::generate_query(QueryShape shape, std::size_t n, std::uint64_t seed,
                                                    double max_cardinality)
{
    std::mt19937_64 rng(seed);
    return generate_query(shape, n, rng, max_cardinality);
}


/*======================================================================================================================
 * Profiles
 *====================================================================================================================*/

namespace {

[[noreturn]] void field_error(const std::string &path, const std::string &what)
{
    throw InvalidInput(path + ": " + what);
}

double number(const json &j, const std::string &path)
{
    if (not j.is_number()) field_error(path, "expected a number");
    return j.get<double>();
}

std::size_t count(const json &j, const std::string &path)
{
    if (not j.is_number_unsigned() and not(j.is_number_integer() and j.get<std::int64_t>() >= 0))
        field_error(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

/** `k` or `[lo, hi]`. */
std::pair<std::size_t, std::size_t> range(const json &j, const std::string &path)
{
    if (j.is_array()) {
        if (j.size() != 2) field_error(path, "expected [min, max]");
        const auto lo = count(j[0], path + "[0]"), hi = count(j[1], path + "[1]");
        if (lo > hi) field_error(path, "min exceeds max");
        return { lo, hi };
    }
    const auto k = count(j, path);
    return { k, k };
}

}

Profile Profile::parse(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InvalidInput(std::string("profile is not valid JSON: ") + e.what());
    }
    if (not doc.is_object()) throw InvalidInput("profile must be a JSON object");

    Profile p;
    for (auto &[key, value] : doc.items()) {
        const std::string path = "profile." + key;
        if (key == "tables") {
            std::tie(p.tables_min, p.tables_max) = range(value, path);
            if (p.tables_min == 0) field_error(path, "a query needs at least one table");
            if (p.tables_max > JoinGraph::MAX_TABLES) field_error(path, "too many tables");
        } else if (key == "objectives") {
            std::tie(p.objectives_min, p.objectives_max) = range(value, path);
            if (p.objectives_min == 0 or p.objectives_max > NUM_OBJECTIVES)
                field_error(path, "objective count must lie in [1, 9]");
        } else if (key == "shapes") {
            if (not value.is_array() or value.empty()) field_error(path, "expected a non-empty list of shapes");
            p.shapes.clear();
            for (std::size_t i = 0; i != value.size(); ++i) {
                if (not value[i].is_string()) field_error(path + "[" + std::to_string(i) + "]", "expected a string");
                try {
                    p.shapes.push_back(QueryShape::parse(value[i].get<std::string>()));
                } catch (const InvalidInput &e) {
                    field_error(path + "[" + std::to_string(i) + "]", e.what());
                }
            }
        } else if (key == "max_cardinality") {
            p.max_cardinality = number(value, path);
            if (not(p.max_cardinality >= 10)) field_error(path, "must be at least 10");
        } else if (key == "operators") {
            if (value.is_string() and value.get<std::string>() == "standard") {
                p.operators.reset();
            } else {
                const auto j = count(value, path);
                if (j < 1 or j > 6) field_error(path, "expected \"standard\" or a count in [1, 6]");
                p.operators = j;
            }
        } else if (key == "bound_probability") {
            p.bound_probability = number(value, path);
            if (not(p.bound_probability >= 0 and p.bound_probability <= 1)) field_error(path, "must lie in [0, 1]");
        } else if (key == "bound_minima") {
            const auto s = value.is_string() ? value.get<std::string>() : std::string();
            if (s == "auto") p.bound_minima = BoundMinima::AUTO;
            else if (s == "oracle") p.bound_minima = BoundMinima::ORACLE;
            else if (s == "exa") p.bound_minima = BoundMinima::EXA;
            else field_error(path, "expected \"auto\", \"oracle\", or \"exa\"");
        } else if (key == "runs") {
            if (not value.is_array() or value.empty()) field_error(path, "expected a non-empty list of runs");
            p.runs.clear();
            for (std::size_t i = 0; i != value.size(); ++i) {
                const auto rpath = path + "[" + std::to_string(i) + "]";
                const json &r = value[i];
                if (not r.is_object()) field_error(rpath, "expected an object");
                RunSpec run;
                for (auto &[rkey, rvalue] : r.items()) {
                    if (rkey == "algorithm") {
                        auto a = rvalue.is_string() ? parse_algorithm(rvalue.get<std::string>()) : std::nullopt;
                        if (not a) field_error(rpath + ".algorithm", "expected \"exa\", \"rta\", or \"ira\"");
                        run.algorithm = *a;
                    } else if (rkey == "alpha") {
                        run.alpha = number(rvalue, rpath + ".alpha");
                        if (not(run.alpha >= 1)) field_error(rpath + ".alpha", "alpha must be ≥ 1");
                    } else {
                        field_error(rpath + "." + rkey, "unknown field");
                    }
                }
                p.runs.push_back(run);
            }
        } else if (key == "deadline_ms") {
            p.deadline_ms = number(value, path);
            if (not(p.deadline_ms > 0)) field_error(path, "must be positive");
        } else if (key == "max_iterations") {
            p.max_iterations = unsigned(count(value, path));
            if (p.max_iterations == 0) field_error(path, "must be positive");
        } else if (key == "oracle_cap") {
            p.oracle_cap = count(value, path);
        } else if (key == "oracle_plan_limit") {
            p.oracle_plan_limit = count(value, path);
        } else {
            field_error(path, "unknown field");
        }
    }
    return p;
}

Profile Profile::load(const std::string &path)
{
    std::ifstream in(path);
    if (not in) throw InvalidInput("cannot read profile " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}


/*======================================================================================================================
 * Test cases
 *====================================================================================================================*/

SearchSpace TestCase::search_space() const
{
    SearchSpace space(JoinGraph(catalog, query), objectives);
    if (operators) space.operators = OperatorSpace::uniform(*operators);
    return space;
}

ProblemInstance TestCase::instance() const
{
    return ProblemInstance(search_space(), weights, bounds, Precision(run.alpha));
}

namespace {

bool oracle_reaches(const SearchSpace &space, std::size_t cap, std::uint64_t plan_limit)
{
    return space.num_tables() <= cap and count_plans(space) <= plan_limit;
}

/** Minimum of every objective over all plans of the query. */
std::vector<double> minima(const TestCase &test, const Profile &profile)
{
    const SearchSpace space = test.search_space();
    bool use_oracle = false;
    switch (profile.bound_minima) {
        case BoundMinima::AUTO:
            use_oracle = oracle_reaches(space, profile.oracle_cap, profile.oracle_plan_limit);
            break;
        case BoundMinima::ORACLE:
            if (not oracle_reaches(space, profile.oracle_cap, profile.oracle_plan_limit))
                throw InvalidInput("bound generation by oracle requested for a query beyond the oracle's reach");
            use_oracle = true;
            break;
        case BoundMinima::EXA:
            break;
    }
    if (use_oracle) return objective_minima(true_pareto(space, profile.oracle_cap));

    /* Every objective's cost depends on that objective alone, so a single-objective run finds its minimum. */
    std::vector<double> result;
    for (std::size_t i = 0; i != test.objectives.size(); ++i) {
        SearchSpace single = space;
        single.objectives = ObjectiveList{ test.objectives[i] };
        const ParetoPlans plans = find_pareto_plans(single, PruneMode::exact());
        const PlanSet &top = plans[single.graph.all_tables()];
        result.push_back(top.cost(0)[0]);
    }
    return result;
}

}

TestCase moqo::generate_testcase(std::uint64_t seed, const Profile &profile, std::size_t run)
{
    if (run >= profile.runs.size()) throw InvalidInput("profile has no run " + std::to_string(run));
    std::mt19937_64 rng(seed);

    TestCase t;
    t.seed = seed;
    t.run = profile.runs[run];
    t.operators = profile.operators;
    t.n = uniform_int(rng, profile.tables_min, profile.tables_max);
    t.shape = profile.shapes[uniform_int(rng, 0, profile.shapes.size() - 1)];
    std::tie(t.catalog, t.query) = generate_query(t.shape, t.n, rng, profile.max_cardinality);

    /* Partial Fisher-Yates draw of l objectives, kept in canonical order. */
    const std::size_t l = uniform_int(rng, profile.objectives_min, profile.objectives_max);
    std::array<Objective, NUM_OBJECTIVES> pool = ALL_OBJECTIVES;
    for (std::size_t i = 0; i != l; ++i) std::swap(pool[i], pool[uniform_int(rng, i, NUM_OBJECTIVES - 1)]);
    std::sort(pool.begin(), pool.begin() + l);
    t.objectives = ObjectiveList(std::span<const Objective>(pool.data(), l));

    std::vector<double> w(l);
    do {
        for (auto &x : w) x = uniform01(rng);
    } while (std::all_of(w.begin(), w.end(), [](double x) { return x == 0; }));
    t.weights = WeightVector(t.objectives, w);

    std::vector<std::optional<double>> b(l);
    std::vector<double> factor(l);
    bool needs_minima = false;
    for (std::size_t i = 0; i != l; ++i) {
        const bool bounded = uniform01(rng) < profile.bound_probability;
        factor[i] = uniform01(rng);
        if (not bounded) continue;
        if (t.objectives[i] == Objective::tuple_loss) {
            b[i] = factor[i];
        } else {
            b[i] = 1.0 + factor[i];
            needs_minima = true;
        }
    }
    if (needs_minima) {
        const auto mins = minima(t, profile);
        for (std::size_t i = 0; i != l; ++i)
            if (b[i] and t.objectives[i] != Objective::tuple_loss) *b[i] *= mins[i];
    }
    t.bounds = BoundVector(t.objectives, b);
    return t;
}

std::vector<TestCase> moqo::generate_suite(std::uint64_t first, std::uint64_t last, const Profile &profile)
{
    if (first > last) throw InvalidInput("empty seed range");
    std::vector<TestCase> suite;
    for (std::uint64_t seed = first;; ++seed) {
        TestCase base = generate_testcase(seed, profile, 0);
        for (std::size_t r = 0; r != profile.runs.size(); ++r) {
            suite.push_back(base);
            suite.back().run = profile.runs[r];
        }
        if (seed == last) break;
    }
    return suite;
}


/*======================================================================================================================
 * Benchmark execution
 *====================================================================================================================*/

BenchmarkOptions BenchmarkOptions::from(const Profile &profile)
{
    BenchmarkOptions o;
    o.deadline_ms = profile.deadline_ms;
    o.max_iterations = profile.max_iterations;
    o.oracle_cap = profile.oracle_cap;
    o.oracle_plan_limit = profile.oracle_plan_limit;
    return o;
}

RunMetrics moqo::run_testcase(const TestCase &test, const BenchmarkOptions &options)
{
    RunMetrics m;
    m.seed = test.seed;
    m.algorithm = test.run.algorithm;
    m.alpha = test.run.alpha;
    m.n = test.n;
    m.l = test.objectives.size();
    try {
        const ProblemInstance instance = test.instance();
        OptimizerOptions opt;
        opt.deadline = Deadline::after(std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::duration<double, std::milli>(options.deadline_ms)));
        opt.max_iterations = options.max_iterations;

        const OptimizerReport report = run_algorithm(test.run.algorithm, instance, opt);
        m.wall_ms = report.wall_ms;
        m.plans_total = report.plans_total;
        m.plans_max_set = report.plans_max_set;
        m.iterations = report.iterations.size();
        m.weighted_cost = report.chosen_weighted_cost;
        m.timeout = report.timed_out;
        m.iteration_cap = report.status == RunStatus::ITERATION_CAP_REACHED;

        if (not report.timed_out and oracle_reaches(instance.space, options.oracle_cap, options.oracle_plan_limit)) {
            const GuaranteeCheck check = check_guarantee(report, instance, options.oracle_cap);
            m.rho = check.rho;
            m.guarantee_violated = not check.pass;
        }
    } catch (const std::exception &e) {
        m.error = e.what();
    }
    return m;
}

std::vector<RunMetrics> moqo::run_benchmark(const std::vector<TestCase> &suite, const BenchmarkOptions &options)
{
    std::vector<RunMetrics> rows(suite.size());
    std::atomic<std::size_t> next{ 0 };
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < suite.size();) rows[i] = run_testcase(suite[i], options);
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, unsigned(suite.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (unsigned t = 0; t != jobs; ++t) threads.emplace_back(worker);
    }
    return rows;
}
