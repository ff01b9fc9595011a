#include <moqo/io.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <moqo/error.hpp>
#include <nlohmann/json.hpp>
#include <sstream>


using namespace moqo;
using json = nlohmann::ordered_json;


std::string moqo::format_number(double x)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}


/*======================================================================================================================
 * Query specifications
 *====================================================================================================================*/

namespace {

[[noreturn]] void field_error(const std::string &path, const std::string &what)
{
    throw InvalidInput(path + ": " + what);
}

const json & require(const json &object, const char *key, const std::string &path)
{
    auto it = object.find(key);
    if (it == object.end()) field_error(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

std::string join_path(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string &path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double real(const json &j, const std::string &path)
{
    if (not j.is_number()) field_error(path, "expected a number");
    return j.get<double>();
}

double non_negative(const json &j, const std::string &path)
{
    const double x = real(j, path);
    if (not(x >= 0)) field_error(path, "must be non-negative");
    return x;
}

std::string text(const json &j, const std::string &path)
{
    if (not j.is_string()) field_error(path, "expected a string");
    return j.get<std::string>();
}

Objective objective(const std::string &name, const std::string &path)
{
    auto o = parse_objective(name);
    if (not o) field_error(path, "unknown objective kind " + name);
    return *o;
}

/** Values of a `kind → real` map, aligned with `objectives`. */
std::vector<std::optional<double>> objective_map(const json &j, ObjectiveList objectives, const std::string &path)
{
    if (not j.is_object()) field_error(path, "expected an object mapping objective kinds to numbers");
    std::vector<std::optional<double>> values(objectives.size());
    for (auto &[key, value] : j.items()) {
        const std::string p = join_path(path, key);
        const auto i = objectives.index_of(objective(key, p));
        if (not i) field_error(p, "objective is not listed in objectives");
        values[*i] = non_negative(value, p);
    }
    return values;
}

}

QuerySpec moqo::parse_query_spec(std::string_view input)
{
    json doc;
    try {
        doc = json::parse(input);
    } catch (const json::parse_error &e) {
        /* Translate the byte offset into a line and column. */
        const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, input.size());
        const std::size_t line = 1 + std::count(input.begin(), input.begin() + offset, '\n');
        const std::size_t line_start = input.rfind('\n', offset == 0 ? 0 : offset - 1);
        const std::size_t column = offset - (line_start == std::string_view::npos or offset == 0 ? 0 : line_start + 1) + 1;
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw InvalidInput("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
    }
    if (not doc.is_object()) throw InvalidInput("query specification must be a JSON object");

    static const char *KNOWN[] = { "tables", "predicates", "objectives", "weights", "bounds", "alpha",
                                   "algorithm", "cost_config", "deadline_ms", "seed" };
    for (auto &[key, value] : doc.items())
        if (std::find(std::begin(KNOWN), std::end(KNOWN), key) == std::end(KNOWN)) field_error(key, "unknown field");

    QuerySpec spec;

    const json &tables = require(doc, "tables", "");
    if (not tables.is_array() or tables.empty()) field_error("tables", "expected a non-empty list");
    for (std::size_t i = 0; i != tables.size(); ++i) {
        const std::string path = index_path("tables", i);
        const json &t = tables[i];
        if (not t.is_object()) field_error(path, "expected an object");
        Table table;
        table.name = text(require(t, "name", path), join_path(path, "name"));
        const json &card = require(t, "cardinality", path);
        if (not card.is_number_unsigned() and not(card.is_number_integer() and card.get<std::int64_t>() >= 0))
            field_error(join_path(path, "cardinality"), "expected a non-negative integer");
        table.cardinality = card.get<std::uint64_t>();
        if (auto it = t.find("index"); it != t.end()) {
            if (not it->is_boolean()) field_error(join_path(path, "index"), "expected true or false");
            table.has_index = it->get<bool>();
        }
        for (auto &[key, value] : t.items())
            if (key != "name" and key != "cardinality" and key != "index")
                field_error(join_path(path, key), "unknown field");
        spec.catalog.add(table);
        spec.query.tables.push_back(table.name);
    }

    if (auto it = doc.find("predicates"); it != doc.end()) {
        if (not it->is_array()) field_error("predicates", "expected a list");
        for (std::size_t i = 0; i != it->size(); ++i) {
            const std::string path = index_path("predicates", i);
            const json &p = (*it)[i];
            if (not p.is_object()) field_error(path, "expected an object");
            for (auto &[key, value] : p.items())
                if (key != "left" and key != "right" and key != "selectivity")
                    field_error(join_path(path, key), "unknown field");
            spec.query.predicates.push_back({ text(require(p, "left", path), join_path(path, "left")),
                                              text(require(p, "right", path), join_path(path, "right")),
                                              real(require(p, "selectivity", path), join_path(path, "selectivity")) });
        }
    }
    try {
        validate_catalog(spec.catalog, spec.query);
    } catch (const InvalidInput &e) {
        throw InvalidInput(std::string("tables/predicates: ") + e.what());
    }

    const json &objectives = require(doc, "objectives", "");
    if (not objectives.is_array() or objectives.empty()) field_error("objectives", "expected a non-empty list");
    std::vector<Objective> kinds;
    for (std::size_t i = 0; i != objectives.size(); ++i) {
        const std::string path = index_path("objectives", i);
        const Objective o = objective(text(objectives[i], path), path);
        if (std::find(kinds.begin(), kinds.end(), o) != kinds.end()) field_error(path, "duplicate objective");
        kinds.push_back(o);
    }
    if (kinds.size() > NUM_OBJECTIVES) field_error("objectives", "too many objectives");
    spec.objectives = ObjectiveList(kinds);

    spec.weights = objective_map(require(doc, "weights", ""), spec.objectives, "weights");
    if (std::none_of(spec.weights.begin(), spec.weights.end(), [](auto w) { return w and *w > 0; }))
        field_error("weights", "at least one weight must be positive");

    spec.bounds.assign(spec.objectives.size(), std::nullopt);
    if (auto it = doc.find("bounds"); it != doc.end()) {
        spec.bounds = objective_map(*it, spec.objectives, "bounds");
    }

    if (auto it = doc.find("alpha"); it != doc.end()) {
        spec.alpha = real(*it, "alpha");
        if (not(spec.alpha >= 1)) field_error("alpha", "alpha must be ≥ 1");
    }
    if (auto it = doc.find("algorithm"); it != doc.end()) {
        const auto a = parse_algorithm(text(*it, "algorithm"));
        if (not a) field_error("algorithm", "expected \"exa\", \"rta\", or \"ira\"");
        spec.algorithm = *a;
    }
    if (auto it = doc.find("cost_config"); it != doc.end()) spec.cost_config = text(*it, "cost_config");
    if (auto it = doc.find("deadline_ms"); it != doc.end()) {
        spec.deadline_ms = real(*it, "deadline_ms");
        if (not(*spec.deadline_ms > 0)) field_error("deadline_ms", "must be positive");
    }
    if (auto it = doc.find("seed"); it != doc.end()) {
        if (not it->is_number_unsigned() and not(it->is_number_integer() and it->get<std::int64_t>() >= 0))
            field_error("seed", "expected a non-negative integer");
        spec.seed = it->get<std::uint64_t>();
    }
    return spec;
}

QuerySpec moqo::load_query_spec(const std::string &path)
{
    std::ifstream in(path);
    if (not in) throw InvalidInput("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_query_spec(ss.str());
}

ProblemInstance QuerySpec::instance(const std::string &base_dir) const
{
    CostModel model;
    if (cost_config) {
        std::filesystem::path p(*cost_config);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        model = CostModel(CostConfig::load(p.string()));
    }
    SearchSpace space(JoinGraph(catalog, query), objectives, OperatorSpace::standard(), model);

    std::vector<double> w;
    for (auto &x : weights) w.push_back(x.value_or(0));
    return ProblemInstance(std::move(space), WeightVector(objectives, w), BoundVector(objectives, bounds),
                           Precision(alpha));
}

OptimizerOptions QuerySpec::options() const
{
    OptimizerOptions o;
    if (deadline_ms)
        o.deadline = Deadline::after(std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::duration<double, std::milli>(*deadline_ms)));
    return o;
}

std::string moqo::print_query_spec(const QuerySpec &spec)
{
    json doc;
    doc["tables"] = json::array();
    for (auto &t : spec.catalog.tables())
        doc["tables"].push_back({ { "name", t.name }, { "cardinality", t.cardinality }, { "index", t.has_index } });
    doc["predicates"] = json::array();
    for (auto &p : spec.query.predicates)
        doc["predicates"].push_back({ { "left", p.left }, { "right", p.right }, { "selectivity", p.selectivity } });
    doc["objectives"] = json::array();
    for (std::size_t i = 0; i != spec.objectives.size(); ++i)
        doc["objectives"].push_back(std::string(objective_name(spec.objectives[i])));
    doc["weights"] = json::object();
    doc["bounds"] = json::object();
    for (std::size_t i = 0; i != spec.objectives.size(); ++i) {
        const std::string name(objective_name(spec.objectives[i]));
        if (spec.weights[i]) doc["weights"][name] = *spec.weights[i];
        if (spec.bounds[i]) doc["bounds"][name] = *spec.bounds[i];
    }
    doc["alpha"] = spec.alpha;
    doc["algorithm"] = std::string(algorithm_name(spec.algorithm));
    if (spec.cost_config) doc["cost_config"] = *spec.cost_config;
    if (spec.deadline_ms) doc["deadline_ms"] = *spec.deadline_ms;
    if (spec.seed) doc["seed"] = *spec.seed;
    return doc.dump(2) + "\n";
}


/*======================================================================================================================
 * CSV export
 *====================================================================================================================*/

namespace {

std::string csv_quote(const std::string &s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const std::string &path, const std::string &contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (not out) throw InvalidInput("cannot write " + path);
    out << contents;
    out.close();
    if (not out) throw InvalidInput("failed writing " + path);
}

}

std::string moqo::frontier_csv(const OptimizerReport &report)
{
    std::string out;
    for (std::size_t i = 0; i != report.objectives.size(); ++i) {
        out += objective_name(report.objectives[i]);
        out += ',';
    }
    out += "plan\n";

    std::vector<const FrontierEntry*> rows;
    for (auto &e : report.frontier) rows.push_back(&e);
    std::stable_sort(rows.begin(), rows.end(), [](auto a, auto b) {
        if (lex_less(a->cost, b->cost)) return true;
        if (lex_less(b->cost, a->cost)) return false;
        return a->plan < b->plan;
    });
    for (auto *e : rows) {
        for (std::size_t i = 0; i != e->cost.size(); ++i) {
            out += format_number(e->cost[i]);
            out += ',';
        }
        out += csv_quote(e->plan);
        out += '\n';
    }
    return out;
}

void moqo::export_frontier(const OptimizerReport &report, const std::string &path)
{
    write_file(path, frontier_csv(report));
}

std::string moqo::metrics_csv(const std::vector<RunMetrics> &rows, bool deterministic)
{
    std::string out = "seed,algorithm,alpha,n,l,wall_ms,plans_total,plans_max_set,iterations,weighted_cost,rho,timeout\n";
    for (auto &m : rows) {
        const bool failed = not m.error.empty();
        out += std::to_string(m.seed) + ',';
        out += std::string(algorithm_name(m.algorithm)) + ',';
        out += format_number(m.alpha) + ',';
        out += std::to_string(m.n) + ',';
        out += std::to_string(m.l) + ',';
        if (not deterministic and not failed) out += format_number(m.wall_ms);
        out += ',';
        if (not failed) out += std::to_string(m.plans_total);
        out += ',';
        if (not failed) out += std::to_string(m.plans_max_set);
        out += ',';
        if (not failed) out += std::to_string(m.iterations);
        out += ',';
        if (not failed) out += format_number(m.weighted_cost);
        out += ',';
        if (m.rho) out += format_number(*m.rho);
        out += ',';
        out += m.timeout ? "1" : "0";
        out += '\n';
    }
    return out;
}

void moqo::export_metrics(const std::vector<RunMetrics> &rows, const std::string &path, bool deterministic)
{
    write_file(path, metrics_csv(rows, deterministic));
}

std::string moqo::format_report(const OptimizerReport &report)
{
    std::ostringstream os;
    os << "algorithm: " << algorithm_name(report.algorithm) << '\n';
    os << "objectives: " << to_string(report.objectives) << '\n';
    os << "plan: " << report.chosen_plan << '\n';
    os << "cost:";
    for (std::size_t i = 0; i != report.chosen_cost.size(); ++i)
        os << ' ' << objective_name(report.objectives[i]) << '=' << format_number(report.chosen_cost[i]);
    os << '\n';
    os << "weighted_cost: " << format_number(report.chosen_weighted_cost) << '\n';
    os << "frontier_size: " << report.frontier.size() << '\n';
    os << "plans_total: " << report.plans_total << '\n';
    os << "plans_max_set: " << report.plans_max_set << '\n';
    os << "iterations: " << report.iterations.size() << '\n';
    for (auto &it : report.iterations)
        os << "  iteration " << it.iteration << ": alpha=" << format_number(it.alpha)
           << " internal_alpha=" << format_number(it.internal_alpha) << " plans_total=" << it.plans_total
           << " plans_max_set=" << it.plans_max_set << " frontier=" << it.frontier_size << '\n';
    os << "wall_ms: " << format_number(report.wall_ms) << '\n';
    os << "timed_out: " << (report.timed_out ? "yes" : "no") << '\n';
    if (report.status == RunStatus::ITERATION_CAP_REACHED) os << "status: iteration cap reached\n";
    return os.str();
}
