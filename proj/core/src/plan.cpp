#include <moqo/plan.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <moqo/error.hpp>
#include <sstream>


using namespace moqo;


/*======================================================================================================================
 * Operators
 *====================================================================================================================*/

ScanOperator ScanOperator::sample(double rate)
{
    if (std::find(SAMPLING_RATES.begin(), SAMPLING_RATES.end(), rate) == SAMPLING_RATES.end())
        throw InvalidInput("sampling rate must be one of 0.01, 0.02, 0.03, 0.04, 0.05");
    return { SAMPLE_SCAN, rate };
}

JoinOperator JoinOperator::make(Kind kind, unsigned dop)
{
    if (dop < 1 or dop > 4) throw InvalidInput("degree of parallelism must lie in 1..4");
    return { kind, std::uint8_t(dop) };
}

std::string_view moqo::join_kind_name(JoinOperator::Kind kind)
{
    switch (kind) {
        case JoinOperator::HASH: return "HashJ";
        case JoinOperator::SORT_MERGE: return "MergeJ";
        case JoinOperator::NESTED_LOOP: return "NestLoopJ";
        case JoinOperator::INDEX_NESTED_LOOP: return "IdxNL";
    }
    return "?";
}

OperatorSpace OperatorSpace::standard()
{
    OperatorSpace space;
    space.scans.push_back(ScanOperator::full());
    for (double rate : SAMPLING_RATES) space.scans.push_back(ScanOperator::sample(rate));
    for (auto kind : { JoinOperator::HASH, JoinOperator::SORT_MERGE, JoinOperator::NESTED_LOOP,
                       JoinOperator::INDEX_NESTED_LOOP })
        for (unsigned dop : { 1, 2, 4 })
            space.joins.push_back(JoinOperator::make(kind, dop));
    return space;
}

OperatorSpace OperatorSpace::uniform(std::size_t j)
{
    if (j < 1 or j > 6) throw InvalidInput("uniform operator space supports 1 to 6 configurations");
    static const ScanOperator scans[] = {
        ScanOperator::full(),        ScanOperator::sample(0.01), ScanOperator::sample(0.05),
        ScanOperator::sample(0.02),  ScanOperator::sample(0.03), ScanOperator::sample(0.04),
    };
    static const JoinOperator joins[] = {
        JoinOperator::make(JoinOperator::HASH, 1),       JoinOperator::make(JoinOperator::HASH, 4),
        JoinOperator::make(JoinOperator::SORT_MERGE, 1), JoinOperator::make(JoinOperator::NESTED_LOOP, 1),
        JoinOperator::make(JoinOperator::SORT_MERGE, 4), JoinOperator::make(JoinOperator::NESTED_LOOP, 2),
    };
    OperatorSpace space;
    space.scans.assign(scans, scans + j);
    space.joins.assign(joins, joins + j);
    return space;
}


/*======================================================================================================================
 * CostConfig
 *====================================================================================================================*/

namespace {

struct ConfigKey
{
    const char *key;
    double CostConfig::*field;
};

constexpr ConfigKey CONFIG_KEYS[] = {
    { "scan.time.per_tuple", &CostConfig::scan_time_per_tuple },
    { "scan.io.per_tuple", &CostConfig::scan_io_per_tuple },
    { "scan.cpu.per_tuple", &CostConfig::scan_cpu_per_tuple },
    { "scan.energy.per_tuple", &CostConfig::scan_energy_per_tuple },
    { "scan.cores", &CostConfig::scan_cores },
    { "scan.buffer", &CostConfig::scan_buffer },
    { "hash.work.left_coeff", &CostConfig::hash_work_left },
    { "hash.work.right_coeff", &CostConfig::hash_work_right },
    { "hash.work.out_coeff", &CostConfig::hash_work_out },
    { "sort_merge.work.sort_coeff", &CostConfig::sort_merge_work_sort },
    { "sort_merge.work.left_coeff", &CostConfig::sort_merge_work_left },
    { "sort_merge.work.right_coeff", &CostConfig::sort_merge_work_right },
    { "sort_merge.work.out_coeff", &CostConfig::sort_merge_work_out },
    { "nested_loop.work.product_coeff", &CostConfig::nested_loop_work_product },
    { "nested_loop.work.out_coeff", &CostConfig::nested_loop_work_out },
    { "index_nested_loop.work.lookup_coeff", &CostConfig::index_nested_loop_work_lookup },
    { "index_nested_loop.work.out_coeff", &CostConfig::index_nested_loop_work_out },
    { "hash.spill.right_coeff", &CostConfig::hash_spill_right },
    { "sort_merge.spill.left_coeff", &CostConfig::sort_merge_spill_left },
    { "sort_merge.spill.right_coeff", &CostConfig::sort_merge_spill_right },
    { "hash.buffer.right_coeff", &CostConfig::hash_buffer_right },
    { "sort_merge.buffer.left_coeff", &CostConfig::sort_merge_buffer_left },
    { "sort_merge.buffer.right_coeff", &CostConfig::sort_merge_buffer_right },
    { "nested_loop.buffer.const", &CostConfig::nested_loop_buffer },
    { "index_nested_loop.buffer.const", &CostConfig::index_nested_loop_buffer },
    { "hash.startup.build_coeff", &CostConfig::hash_startup_build },
    { "sort_merge.startup.sort_coeff", &CostConfig::sort_merge_startup_sort },
    { "energy.parallel_overhead", &CostConfig::energy_parallel_overhead },
};

std::string_view trim(std::string_view s)
{
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (not s.empty() and std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}

CostConfig CostConfig::parse(std::string_view text)
{
    CostConfig config;
    std::size_t line_no = 0;
    while (not text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view() : text.substr(eol + 1);

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InvalidInput(where + "expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value_text = trim(line.substr(eq + 1));

        auto it = std::find_if(std::begin(CONFIG_KEYS), std::end(CONFIG_KEYS),
                               [&](const ConfigKey &k) { return k.key == key; });
        if (it == std::end(CONFIG_KEYS)) throw InvalidInput(where + "unknown key " + std::string(key));

        double value;
        auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (ec != std::errc() or ptr != value_text.data() + value_text.size() or not std::isfinite(value))
            throw InvalidInput(where + "malformed value for " + std::string(key));
        if (value < 0) throw InvalidInput(where + std::string(key) + " must be non-negative");
        config.*(it->field) = value;
    }
    return config;
}

CostConfig CostConfig::load(const std::string &path)
{
    std::ifstream in(path);
    if (not in) throw InvalidInput("cannot read cost configuration " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string CostConfig::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    for (auto &k : CONFIG_KEYS) os << k.key << '=' << this->*(k.field) << '\n';
    return os.str();
}


/*======================================================================================================================
 * CostModel
 *====================================================================================================================*/

namespace {

inline double n_log_n(double card) { return card * std::log2(1.0 + card); }

}

double CostModel::work(JoinOperator op, double l, double r, double out) const
{
    const auto &c = config_;
    switch (op.kind) {
        case JoinOperator::HASH:
            return c.hash_work_left * l + c.hash_work_right * r + c.hash_work_out * out;
        case JoinOperator::SORT_MERGE:
            return c.sort_merge_work_sort * (n_log_n(l) + n_log_n(r)) + c.sort_merge_work_left * l +
                   c.sort_merge_work_right * r + c.sort_merge_work_out * out;
        case JoinOperator::NESTED_LOOP:
            return c.nested_loop_work_product * l * r + c.nested_loop_work_out * out;
        case JoinOperator::INDEX_NESTED_LOOP:
            return c.index_nested_loop_work_lookup * l * std::log2(1.0 + r) + c.index_nested_loop_work_out * out;
    }
    return 0;
}

void CostModel::scan_cost(ObjectiveList objectives, ScanOperator op, double table_card, double *out) const
{
    const auto &c = config_;
    const double tuples = op.kind == ScanOperator::FULL_SCAN ? table_card : op.rate * table_card;
    for (std::size_t i = 0, end = objectives.size(); i != end; ++i) {
        switch (objectives[i]) {
            case Objective::total_time:       out[i] = c.scan_time_per_tuple * tuples; break;
            case Objective::startup_time:     out[i] = 0; break;
            case Objective::io_load:          out[i] = c.scan_io_per_tuple * tuples; break;
            case Objective::cpu_load:         out[i] = c.scan_cpu_per_tuple * tuples; break;
            case Objective::cores:            out[i] = c.scan_cores; break;
            case Objective::disc_footprint:   out[i] = 0; break;
            case Objective::buffer_footprint: out[i] = c.scan_buffer; break;
            case Objective::energy:           out[i] = c.scan_energy_per_tuple * tuples; break;
            case Objective::tuple_loss:       out[i] = op.kind == ScanOperator::FULL_SCAN ? 0.0 : 1.0 - op.rate; break;
        }
    }
}

CostVector CostModel::scan_cost(ObjectiveList objectives, ScanOperator op, double table_card) const
{
    std::array<double, NUM_OBJECTIVES> out;
    scan_cost(objectives, op, table_card, out.data());
    return CostVector(objectives, std::span(out.data(), objectives.size()));
}

JoinTerms CostModel::join_terms(JoinOperator op, double card_left, double card_right, double card_out) const
{
    const auto &c = config_;
    JoinTerms t{};
    t.op = op;
    t.work = work(op, card_left, card_right, card_out);
    t.time = t.work / double(op.dop);
    t.energy = t.work * (1.0 + c.energy_parallel_overhead * (double(op.dop) - 1.0));
    switch (op.kind) {
        case JoinOperator::HASH:
            t.spill = c.hash_spill_right * card_right;
            t.buffer = c.hash_buffer_right * card_right;
            t.startup_right = c.hash_startup_build * card_right;
            break;
        case JoinOperator::SORT_MERGE:
            t.spill = c.sort_merge_spill_left * card_left + c.sort_merge_spill_right * card_right;
            t.buffer = c.sort_merge_buffer_left * card_left + c.sort_merge_buffer_right * card_right;
            t.startup_left = c.sort_merge_startup_sort * n_log_n(card_left);
            t.startup_right = c.sort_merge_startup_sort * n_log_n(card_right);
            break;
        case JoinOperator::NESTED_LOOP:
            t.buffer = c.nested_loop_buffer;
            break;
        case JoinOperator::INDEX_NESTED_LOOP:
            t.buffer = c.index_nested_loop_buffer;
            break;
    }
    return t;
}

CostVector CostModel::combine_cost(JoinOperator op, const CostVector &left, const CostVector &right,
                                   double card_left, double card_right, double card_out) const
{
    if (left.objectives() != right.objectives())
        throw StructuralError("combine_cost: operand objective lists differ");
    std::array<double, NUM_OBJECTIVES> out;
    combine_cost(left.objectives(), join_terms(op, card_left, card_right, card_out), left.data(), right.data(),
                 out.data());
    return CostVector::unchecked(left.objectives(), out.data());
}

double CostModel::objective_floor(Objective o) const
{
    /* Every non-zero cost is a sum or maximum of non-negative terms, at least one of them positive.  Cardinalities fed
     * to join formulas are at least one tuple and scans read at least the smallest sampling rate of a one-tuple table,
     * so the smallest positive atomic term bounds every non-zero cost from below. */
    const auto &c = config_;
    const double min_tuples = SAMPLING_RATES.front();
    auto min_positive = [](std::initializer_list<double> terms) {
        double m = std::numeric_limits<double>::infinity();
        for (double t : terms)
            if (t > 0) m = std::min(m, t);
        return m;
    };
    const double min_work = min_positive({ c.hash_work_left, c.hash_work_right, c.hash_work_out,
                                           c.sort_merge_work_sort, c.sort_merge_work_left, c.sort_merge_work_right,
                                           c.sort_merge_work_out, c.nested_loop_work_product, c.nested_loop_work_out,
                                           c.index_nested_loop_work_lookup, c.index_nested_loop_work_out });
    switch (o) {
        case Objective::total_time:
            return min_positive({ c.scan_time_per_tuple * min_tuples, min_work / 4 });
        case Objective::startup_time:
            return min_positive({ c.hash_startup_build, c.sort_merge_startup_sort });
        case Objective::io_load:
            return min_positive({ c.scan_io_per_tuple * min_tuples, c.hash_spill_right, c.sort_merge_spill_left,
                                  c.sort_merge_spill_right });
        case Objective::cpu_load:
            return min_positive({ c.scan_cpu_per_tuple * min_tuples, min_work });
        case Objective::cores:
            return min_positive({ c.scan_cores, 1.0 });
        case Objective::disc_footprint:
            return min_positive({ c.hash_spill_right, c.sort_merge_spill_left, c.sort_merge_spill_right });
        case Objective::buffer_footprint:
            return min_positive({ c.scan_buffer, c.hash_buffer_right, c.sort_merge_buffer_left,
                                  c.sort_merge_buffer_right, c.nested_loop_buffer, c.index_nested_loop_buffer });
        case Objective::energy:
            return min_positive({ c.scan_energy_per_tuple * min_tuples, min_work });
        case Objective::tuple_loss:
            return 1.0 - SAMPLING_RATES.back();
    }
    return 0;
}


/*======================================================================================================================
 * Plan records
 *====================================================================================================================*/

const PlanRecord & PlanRegistry::at(PlanId id) const
{
    if (not contains(id)) throw StructuralError("dangling plan identifier " + std::to_string(std::uint32_t(id)));
    return (*this)[id];
}

PlanRecord moqo::scan_plan(const JoinGraph &graph, const CostModel &model, ObjectiveList objectives,
                           std::size_t table, ScanOperator op)
{
    if (table >= graph.num_tables()) throw StructuralError("scan of unknown table position");
    const double t = graph.cardinality(table);
    PlanRecord p;
    p.op = op;
    p.tables = TableSet::singleton(table);
    p.out_card = op.kind == ScanOperator::FULL_SCAN ? t : op.rate * t;
    p.cost = model.scan_cost(objectives, op, t);
    return p;
}

bool moqo::join_applicable(const JoinGraph &graph, JoinOperator op, const PlanRecord &right)
{
    if (op.kind != JoinOperator::INDEX_NESTED_LOOP) return true;
    return right.is_scan() and graph.has_index(right.tables.lowest());
}

std::optional<PlanRecord> moqo::combine_plans(const JoinGraph &graph, const CostModel &model, JoinOperator op,
                                              const PlanRecord &left, const PlanRecord &right)
{
    if (left.tables.intersects(right.tables)) throw StructuralError("join operands cover overlapping table sets");
    if (not join_applicable(graph, op, right)) return std::nullopt;

    PlanRecord p;
    p.op = op;
    p.left = left.id;
    p.right = right.id;
    p.tables = left.tables | right.tables;
    p.out_card = join_cardinality(left.out_card, right.out_card, graph.crossing_selectivity(left.tables, right.tables));
    p.cost = model.combine_cost(op, left.cost, right.cost, cost_cardinality(graph, left.tables),
                                cost_cardinality(graph, right.tables), cost_cardinality(graph, p.tables));
    return p;
}


/*======================================================================================================================
 * Textual form
 *====================================================================================================================*/

namespace {

std::string format_rate(double rate)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rate);
    return std::string(buf, ptr);
}

void serialize_rec(const PlanRecord &p, const PlanRegistry &registry, const JoinGraph &graph, std::string &out)
{
    if (auto scan = std::get_if<ScanOperator>(&p.op)) {
        const auto &name = graph.name(p.tables.lowest());
        if (scan->kind == ScanOperator::FULL_SCAN)
            out += "FullScan(" + name + ")";
        else
            out += "SampleScan(" + name + "," + format_rate(scan->rate) + ")";
        return;
    }
    const auto &join = std::get<JoinOperator>(p.op);
    out += join_kind_name(join.kind);
    out += "[d=" + std::to_string(unsigned(join.dop)) + "](";
    serialize_rec(registry.at(p.left), registry, graph, out);
    out += ',';
    serialize_rec(registry.at(p.right), registry, graph, out);
    out += ')';
}

/** Recursive-descent parser over the textual plan form. */
class PlanParser
{
    std::string_view text_;
    std::size_t pos_ = 0;
    const JoinGraph &graph_;
    const CostModel &model_;
    ObjectiveList objectives_;
    PlanRegistry &registry_;

    [[noreturn]] void fail(const std::string &msg) const {
        throw InvalidInput("plan text, offset " + std::to_string(pos_) + ": " + msg);
    }

    void expect(char c) {
        if (pos_ >= text_.size() or text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view token(std::string_view stops) {
        const auto begin = pos_;
        while (pos_ < text_.size() and stops.find(text_[pos_]) == std::string_view::npos) ++pos_;
        if (pos_ == begin) fail("empty token");
        return text_.substr(begin, pos_ - begin);
    }

    std::size_t table(std::string_view name) const {
        auto pos = graph_.position(std::string(name));
        if (not pos) throw InvalidInput("plan text references unknown table " + std::string(name));
        return *pos;
    }

    public:
    PlanParser(std::string_view text, const JoinGraph &graph, const CostModel &model, ObjectiveList objectives,
               PlanRegistry &registry)
        : text_(text), graph_(graph), model_(model), objectives_(objectives), registry_(registry) { }

    PlanId parse_all() {
        PlanId id = parse();
        if (pos_ != text_.size()) fail("trailing characters");
        return id;
    }

    PlanId parse() {
        const auto head = token("([");
        if (head == "FullScan") {
            expect('(');
            const auto t = table(token(")"));
            expect(')');
            return registry_.add(scan_plan(graph_, model_, objectives_, t, ScanOperator::full()));
        }
        if (head == "SampleScan") {
            expect('(');
            const auto t = table(token(","));
            expect(',');
            const auto rate_text = token(")");
            double rate;
            auto [ptr, ec] = std::from_chars(rate_text.data(), rate_text.data() + rate_text.size(), rate);
            if (ec != std::errc() or ptr != rate_text.data() + rate_text.size()) fail("malformed sampling rate");
            expect(')');
            return registry_.add(scan_plan(graph_, model_, objectives_, t, ScanOperator::sample(rate)));
        }

        JoinOperator::Kind kind;
        if (head == "HashJ") kind = JoinOperator::HASH;
        else if (head == "MergeJ") kind = JoinOperator::SORT_MERGE;
        else if (head == "NestLoopJ") kind = JoinOperator::NESTED_LOOP;
        else if (head == "IdxNL") kind = JoinOperator::INDEX_NESTED_LOOP;
        else fail("unknown operator " + std::string(head));

        expect('[');
        expect('d');
        expect('=');
        const auto dop_text = token("]");
        unsigned dop = 0;
        auto [ptr, ec] = std::from_chars(dop_text.data(), dop_text.data() + dop_text.size(), dop);
        if (ec != std::errc() or ptr != dop_text.data() + dop_text.size()) fail("malformed degree of parallelism");
        expect(']');
        const auto op = JoinOperator::make(kind, dop);

        expect('(');
        const PlanId l = parse();
        expect(',');
        const PlanId r = parse();
        expect(')');
        auto joined = combine_plans(graph_, model_, op, registry_[l], registry_[r]);
        if (not joined) throw StructuralError("operator " + std::string(head) + " not applicable to its operands");
        return registry_.add(std::move(*joined));
    }
};

}

std::string moqo::serialize_plan(PlanId plan, const PlanRegistry &registry, const JoinGraph &graph)
{
    std::string out;
    serialize_rec(registry.at(plan), registry, graph, out);
    return out;
}

std::string moqo::serialize_plan(const PlanRecord &plan, const PlanRegistry &registry, const JoinGraph &graph)
{
    std::string out;
    serialize_rec(plan, registry, graph, out);
    return out;
}

PlanId moqo::parse_plan(std::string_view text, const JoinGraph &graph, const CostModel &model,
                        ObjectiveList objectives, PlanRegistry &registry)
{
    return PlanParser(text, graph, model, objectives, registry).parse_all();
}
