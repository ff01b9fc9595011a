#pragma once

#include <cstdint>
#include <moqo/catalog.hpp>
#include <moqo/optimizer.hpp>
#include <moqo/oracle.hpp>
#include <moqo/workload.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>


namespace moqo {

/** A parsed query specification document. */
struct QuerySpec
{
    TableCatalog catalog;
    Query query;
    ObjectiveList objectives;
    std::vector<std::optional<double>> weights; ///< per objective; absent weights print as absent and parse as 0
    std::vector<std::optional<double>> bounds;  ///< per objective; absent means UNBOUNDED
    double alpha = 1;
    Algorithm algorithm = Algorithm::EXA;
    std::optional<std::string> cost_config; ///< path of a cost coefficient file
    std::optional<double> deadline_ms;
    std::optional<std::uint64_t> seed;

    /** Builds the problem instance, loading `cost_config` relative to `base_dir` if set. */
    ProblemInstance instance(const std::string &base_dir = ".") const;
    OptimizerOptions options() const;
};

/** Parses a JSON query specification.  Throws `InvalidInput` with a line and column for syntax errors and with the
 * field path for semantic errors, e.g. `weights.total_tme: unknown objective kind`. */
QuerySpec parse_query_spec(std::string_view text);
QuerySpec load_query_spec(const std::string &path);

/** JSON text that `parse_query_spec` reads back to an equivalent specification. */
std::string print_query_spec(const QuerySpec &spec);

/** Shortest decimal text that reads back to the same double. */
std::string format_number(double x);

/** CSV with one column per objective and a final `plan` column; rows sorted lexicographically by cost. */
std::string frontier_csv(const OptimizerReport &report);
/** Throws `InvalidInput` if `path` cannot be written. */
void export_frontier(const OptimizerReport &report, const std::string &path);

/** CSV with columns seed, algorithm, alpha, n, l, wall_ms, plans_total, plans_max_set, iterations, weighted_cost, rho,
 * timeout.  With `deterministic`, wall_ms is left empty so that reruns compare byte for byte. */
std::string metrics_csv(const std::vector<RunMetrics> &rows, bool deterministic = false);
void export_metrics(const std::vector<RunMetrics> &rows, const std::string &path, bool deterministic = false);

/** Human-readable summary of an optimizer run. */
std::string format_report(const OptimizerReport &report);

}
