#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <moqo/error.hpp>
#include <moqo/io.hpp>
#include <sstream>


using namespace moqo;

namespace {

const char *MINIMAL = R"js({
  "tables": [{"name": "A", "cardinality": 1000}, {"name": "B", "cardinality": 500, "index": true}],
  "predicates": [{"left": "A", "right": "B", "selectivity": 0.01}],
  "objectives": ["total_time"],
  "weights": {"total_time": 1}
})js";

std::string with(const std::string &field)
{
    std::string s = MINIMAL;
    s.insert(s.rfind('}'), "," + field + "\n");
    return s;
}

std::vector<std::string> lines(const std::string &s)
{
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) v.push_back(line);
    return v;
}

}

TEST_CASE("minimal query specification")
{
    const auto spec = parse_query_spec(MINIMAL);
    CHECK(spec.objectives.size() == 1);
    CHECK(spec.alpha == 1);
    CHECK(spec.algorithm == Algorithm::EXA);
    const auto instance = spec.instance();
    CHECK(instance.space.num_tables() == 2);
    CHECK(instance.weights[0] == 1);
    CHECK_FALSE(instance.bounds.any_bounded());
}

TEST_CASE("query specification errors")
{
    CHECK_THROWS_WITH_AS(parse_query_spec(with(R"("alpha": 0.9)")), "alpha: alpha must be ≥ 1", InvalidInput);
    CHECK_THROWS_WITH_AS(parse_query_spec(with(R"js("bounds": {"latency": 3})js")),
                         doctest::Contains("bounds.latency: unknown objective kind"), InvalidInput);
    CHECK_THROWS_WITH_AS(parse_query_spec(with(R"js("bounds": {"total_time": -3})js")),
                         doctest::Contains("bounds.total_time"), InvalidInput);
    CHECK_THROWS_WITH_AS(parse_query_spec(with(R"("algorithm": "fast")")), doctest::Contains("algorithm"),
                         InvalidInput);
    CHECK_THROWS_WITH_AS(parse_query_spec(R"js({"tables": [{"name": "A"}], "objectives": ["cores"],
                                             "weights": {"cores": 1}})js"),
                         doctest::Contains("tables[0].cardinality"), InvalidInput);
    CHECK_THROWS_WITH_AS(parse_query_spec("{\n  \"tables\": [\n  }"), doctest::Contains("line 3"), InvalidInput);

    std::string zero = MINIMAL;
    zero.replace(zero.find("\"total_time\": 1"), 15, "\"total_time\": 0");
    CHECK_THROWS_WITH_AS(parse_query_spec(zero), doctest::Contains("weights"), InvalidInput);
}

TEST_CASE("zero tuple-loss bound")
{
    const auto spec = parse_query_spec(R"js({
      "tables": [{"name": "A", "cardinality": 100}],
      "objectives": ["total_time", "tuple_loss"],
      "weights": {"total_time": 1},
      "bounds": {"tuple_loss": 0},
      "alpha": 1.5,
      "algorithm": "ira"
    })js");
    const auto instance = spec.instance();
    CHECK(instance.bounds.get(1) == 0.0);
    CHECK(instance.weights[1] == 0);
    const auto report = run_algorithm(spec.algorithm, instance);
    CHECK(report.chosen_cost[1] == 0);
    CHECK(report.chosen_plan == "FullScan(A)");
}

TEST_CASE("specification round trip")
{
    auto spec = parse_query_spec(with(R"("bounds": {"total_time": 1e6}, "alpha": 1.25, "algorithm": "ira",
                                          "deadline_ms": 500, "seed": 17)"));
    const std::string printed = print_query_spec(spec);
    const auto again = parse_query_spec(printed);
    CHECK(print_query_spec(again) == printed);
    CHECK(again.alpha == 1.25);
    CHECK(again.algorithm == Algorithm::IRA);
    CHECK(again.bounds[0] == 1e6);
    CHECK(again.seed == 17u);
    CHECK(again.query.predicates.size() == 1);
    CHECK(again.catalog.tables()[1].has_index);
}

TEST_CASE("cost configuration file")
{
    const auto dir = std::filesystem::temp_directory_path() / "moqo_io_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "costs.cfg") << "scan.time.per_tuple=3\n";
    const auto spec = parse_query_spec(with(R"("cost_config": "costs.cfg")"));
    CHECK(spec.instance(dir.string()).space.model.config().scan_time_per_tuple == 3);
    CHECK_THROWS_AS(spec.instance("/nonexistent"), InvalidInput);
}

TEST_CASE("frontier export")
{
    OptimizerReport r;
    r.objectives = ObjectiveList{ Objective::total_time, Objective::buffer_footprint };
    r.frontier.push_back({ PlanId(1), CostVector(r.objectives, { 2.0, 2.0 }), "FullScan(B)" });
    r.frontier.push_back({ PlanId(0), CostVector(r.objectives, { 1.0, 4.0 }), "HashJ[d=1](FullScan(A),FullScan(B))" });
    const auto csv = lines(frontier_csv(r));
    REQUIRE(csv.size() == 3);
    CHECK(csv[0] == "total_time,buffer_footprint,plan");
    CHECK(csv[1] == "1,4,\"HashJ[d=1](FullScan(A),FullScan(B))\"");
    CHECK(csv[2] == "2,2,\"FullScan(B)\"");

    r.frontier.pop_back();
    CHECK(lines(frontier_csv(r)).size() == 2);
    CHECK_THROWS_AS(export_frontier(r, "/nonexistent/dir/f.csv"), InvalidInput);
}

TEST_CASE("metrics export")
{
    const std::string header =
        "seed,algorithm,alpha,n,l,wall_ms,plans_total,plans_max_set,iterations,weighted_cost,rho,timeout";
    CHECK(metrics_csv({}) == header + "\n");

    RunMetrics m;
    m.seed = 4;
    m.n = 3;
    m.l = 2;
    m.wall_ms = 1.5;
    m.plans_total = 10;
    m.plans_max_set = 4;
    m.iterations = 1;
    m.weighted_cost = 0.1;
    m.rho = 1;
    const auto csv = lines(metrics_csv({ m }));
    REQUIRE(csv.size() == 2);
    CHECK(csv[1] == "4,exa,1,3,2,1.5,10,4,1,0.1,1,0");
    CHECK(lines(metrics_csv({ m }, true))[1] == "4,exa,1,3,2,,10,4,1,0.1,1,0");
}

TEST_CASE("number formatting round-trips")
{
    for (double x : { 0.1, 1.0 / 3, 1e-300, 12345678.9, 0.0 }) CHECK(std::stod(format_number(x)) == x);
    CHECK(format_number(2) == "2");
}
