#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <moqo/error.hpp>
#include <moqo/io.hpp>
#include <moqo/optimizer.hpp>
#include <moqo/oracle.hpp>
#include <moqo/workload.hpp>
#include <string>


using namespace moqo;

namespace {

constexpr int EXIT_INVALID_INPUT = 1;
constexpr int EXIT_GUARANTEE_VIOLATION = 2;
constexpr int EXIT_INTERNAL = 3;

std::string directory_of(const std::string &path)
{
    const auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() ? "." : parent.string();
}

/** `a..b` or a single seed. */
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string &text)
{
    auto parse = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() or ptr != s.data() + s.size() or s.empty())
            throw InvalidInput("--seeds: expected a..b, got " + text);
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const auto v = parse(text);
        return { v, v };
    }
    const auto a = parse(std::string_view(text).substr(0, dots)), b = parse(std::string_view(text).substr(dots + 2));
    if (a > b) throw InvalidInput("--seeds: empty range " + text);
    return { a, b };
}

OptimizerReport run_spec(const std::string &path, const std::optional<std::string> &algorithm)
{
    QuerySpec spec = load_query_spec(path);
    if (algorithm) {
        auto a = parse_algorithm(*algorithm);
        if (not a) throw InvalidInput("--algorithm: expected exa, rta, or ira");
        spec.algorithm = *a;
    }
    return run_algorithm(spec.algorithm, spec.instance(directory_of(path)), spec.options());
}

int check_status(const OptimizerReport &report)
{
    if (report.status == RunStatus::ITERATION_CAP_REACHED) {
        std::cerr << "error: iteration cap reached before the stopping condition held\n";
        return EXIT_INTERNAL;
    }
    if (report.timed_out) std::cerr << "warning: deadline expired; result degraded\n";
    return EXIT_SUCCESS;
}

}

int main(int argc, char **argv)
{
    CLI::App app("Multi-objective query optimizer", "moqo");
    app.require_subcommand(1);

    std::string spec_path, out_path, profile_path, seeds;
    std::optional<std::string> algorithm;
    unsigned jobs = 1, tables = 0, ops = 0;
    bool deterministic = false;
    std::size_t cap = DEFAULT_ENUMERATION_CAP;

    auto *optimize = app.add_subcommand("optimize", "Optimize the query of a specification and print the result");
    optimize->add_option("spec", spec_path, "Query specification (JSON)")->required();
    optimize->add_option("--algorithm", algorithm, "Override the specification's algorithm (exa, rta, ira)");

    auto *frontier = app.add_subcommand("frontier", "Write the plan frontier of the whole query as CSV");
    frontier->add_option("spec", spec_path, "Query specification (JSON)")->required();
    frontier->add_option("--out", out_path, "Output CSV")->required();
    frontier->add_option("--algorithm", algorithm, "Override the specification's algorithm (exa, rta, ira)");

    auto *bench = app.add_subcommand("bench", "Run a generated benchmark suite and write metrics as CSV");
    bench->add_option("--profile", profile_path, "Benchmark profile (JSON)")->required();
    bench->add_option("--seeds", seeds, "Seed range a..b")->required();
    bench->add_option("--out", out_path, "Output CSV")->required();
    bench->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    bench->add_flag("--deterministic", deterministic, "Omit wall-clock times so reruns are byte-identical");

    auto *verify = app.add_subcommand("verify", "Optimize and check the result against brute-force enumeration");
    verify->add_option("spec", spec_path, "Query specification (JSON)")->required();
    verify->add_option("--algorithm", algorithm, "Override the specification's algorithm (exa, rta, ira)");
    verify->add_option("--cap", cap, "Largest query to enumerate");

    auto *count = app.add_subcommand("count", "Print the number of bushy plans");
    count->add_option("--tables", tables, "Number of tables")->required()->check(CLI::PositiveNumber);
    count->add_option("--ops", ops, "Operator configurations")->required()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : EXIT_INVALID_INPUT;
    }

    try {
        if (*optimize) {
            const OptimizerReport report = run_spec(spec_path, algorithm);
            std::cout << format_report(report);
            return check_status(report);
        }
        if (*frontier) {
            const OptimizerReport report = run_spec(spec_path, algorithm);
            export_frontier(report, out_path);
            std::cout << "wrote " << report.frontier.size() << " plans to " << out_path << '\n';
            return check_status(report);
        }
        if (*bench) {
            const auto [first, last] = parse_seed_range(seeds);
            const Profile profile = Profile::load(profile_path);
            BenchmarkOptions options = BenchmarkOptions::from(profile);
            options.jobs = jobs;
            const auto rows = run_benchmark(generate_suite(first, last, profile), options);
            export_metrics(rows, out_path, deterministic);

            std::size_t errors = 0, violations = 0;
            for (auto &m : rows) {
                if (not m.error.empty()) {
                    ++errors;
                    std::cerr << "seed " << m.seed << " " << algorithm_name(m.algorithm) << ": " << m.error << '\n';
                }
                if (m.iteration_cap) {
                    ++errors;
                    std::cerr << "seed " << m.seed << " " << algorithm_name(m.algorithm) << ": iteration cap reached\n";
                }
                if (m.guarantee_violated) {
                    ++violations;
                    std::cerr << "seed " << m.seed << " " << algorithm_name(m.algorithm) << ": guarantee violated, rho="
                              << format_number(*m.rho) << '\n';
                }
            }
            std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
            if (violations) return EXIT_GUARANTEE_VIOLATION;
            return errors ? EXIT_INTERNAL : EXIT_SUCCESS;
        }
        if (*verify) {
            std::optional<ProblemInstance> instance;
            QuerySpec spec = load_query_spec(spec_path);
            if (algorithm) {
                auto a = parse_algorithm(*algorithm);
                if (not a) throw InvalidInput("--algorithm: expected exa, rta, or ira");
                spec.algorithm = *a;
            }
            instance.emplace(spec.instance(directory_of(spec_path)));
            const OptimizerReport report = run_algorithm(spec.algorithm, *instance, spec.options());
            std::cout << format_report(report);
            if (const int status = check_status(report)) return status;
            const GuaranteeCheck check = check_guarantee(report, *instance, cap);
            std::cout << "oracle_plan: " << check.optimum.plan << '\n';
            std::cout << "oracle_weighted_cost: " << format_number(check.optimum.weighted_cost) << '\n';
            std::cout << "oracle_feasible: " << (check.optimum.feasible_exists ? "yes" : "no") << '\n';
            std::cout << "rho: " << format_number(check.rho) << '\n';
            std::cout << "guarantee: " << (check.pass ? "pass" : "FAIL") << '\n';
            return check.pass ? EXIT_SUCCESS : EXIT_GUARANTEE_VIOLATION;
        }
        if (*count) {
            std::cout << count_bushy(ops, tables) << '\n';
            return EXIT_SUCCESS;
        }
    } catch (const InvalidInput &e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_INVALID_INPUT;
    } catch (const ContractError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_INVALID_INPUT;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return EXIT_INTERNAL;
    }
    return EXIT_INTERNAL;
}
