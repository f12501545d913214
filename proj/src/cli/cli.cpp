#include "lmival/cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lmival/gmp/gmp.hpp"
#include "lmival/models/builtins.hpp"
#include "lmival/models/model_io.hpp"
#include "lmival/oracle/oracle.hpp"
#include "lmival/relaxation/relaxation.hpp"
#include "lmival/sdp/moments.hpp"
#include "lmival/sdp/sdpa.hpp"

namespace lmival::cli {

using nlohmann::json;

char const* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::validated: return "validated";
    case Verdict::not_validated: return "not-validated";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

int exit_code(Verdict v) noexcept
{
    switch (v) {
    case Verdict::validated: return exit_validated;
    case Verdict::not_validated: return exit_not_validated;
    case Verdict::inconclusive: return exit_inconclusive;
    }
    return exit_inconclusive;
}

std::string model_hash(models::PiecewiseModel const& m)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : models::save_model(m).dump()) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

models::PiecewiseModel resolve_model(std::string const& ref)
{
    auto const names = models::builtin_model_names();
    if (std::find(names.begin(), names.end(), ref) != names.end())
        return models::build_builtin(ref);
    std::error_code ec;
    if (std::filesystem::is_regular_file(ref, ec))
        return models::load_model_file(ref);
    std::string known;
    for (auto const& n : names)
        known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown model '" + ref + "' (not a file; built-ins: " + known + ")");
}

std::vector<unsigned> parse_orders(std::string const& text)
{
    auto number = [&](std::string const& s) {
        unsigned v = 0;
        std::size_t used = 0;
        try {
            long const x = std::stol(s, &used);
            if (used != s.size() || x < 1 || x > 64)
                throw UsageError("");
            v = static_cast<unsigned>(x);
        } catch (std::exception const&) {
            throw UsageError("bad order '" + s + "' in '" + text + "'");
        }
        return v;
    };
    std::vector<unsigned> out;
    if (auto dots = text.find(".."); dots != std::string::npos) {
        unsigned const a = number(text.substr(0, dots)), b = number(text.substr(dots + 2));
        if (a > b)
            throw UsageError("empty order range '" + text + "'");
        for (unsigned d = a; d <= b; ++d)
            out.push_back(d);
        return out;
    }
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        out.push_back(number(item));
    if (out.empty())
        throw UsageError("no orders given");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1])
            throw UsageError("orders must be strictly ascending: '" + text + "'");
    return out;
}

namespace {

double slack(sdp::SolveOptions const& o, double bound)
{
    return 2.0 * o.gap_tol * std::max(1.0, std::abs(bound));
}

OrderRecord solve_order(models::PiecewiseModel const& m, unsigned d, sdp::SolveOptions const& so)
{
    OrderRecord rec;
    rec.order = d;
    auto const t0 = std::chrono::steady_clock::now();
    try {
        auto const r = relaxation::assemble_relaxation(gmp::assemble_gmp(m, d), d);
        rec.moments = r.layout.size();
        auto const s = sdp::solve(r.sdp, so);
        rec.status = sdp::to_string(s.status);
        rec.iterations = s.iterations;
        rec.gap = s.gap;
        rec.rel_gap = s.rel_gap;
        rec.extended_precision = s.extended_precision;
        rec.message = s.message;
        if (s.status == sdp::SolveStatus::optimal) {
            rec.bound = r.objective_sign * s.primal_objective;
            for (auto const& mm : sdp::extract_masses(s, r))
                rec.masses.emplace_back(mm.name, mm.mass);
        }
    } catch (std::exception const& e) {
        rec.status = "error";
        rec.message = e.what();
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

OracleRecord run_oracle(models::PiecewiseModel const& m, ValidateOptions const& o)
{
    OracleRecord rec;
    oracle::MonteCarloOptions mo;
    mo.sim.steps = o.sim_steps;
    mo.sim.invariants = oracle::quaternion_norms(m);
    mo.threads = o.threads;
    bool const dirac = models::is_dirac(m.initial);
    rec.method = dirac ? "simulate" : "monte-carlo";
    try {
        auto const mc = oracle::mc_bound(m, dirac ? 1 : o.mc_samples, o.seed, mo);
        rec.objective = mc.best_objective;
        rec.initial = mc.best_initial;
        rec.samples = mc.samples;
        auto const rep = oracle::simulate(m, mc.best_initial, mo.sim).second;
        for (std::size_t k = 0; k < m.cells.size(); ++k)
            rec.occupancy.emplace_back(m.cells[k].name, rep.occupancy[k]);
    } catch (std::exception const& e) {
        rec.message = e.what();
    }
    return rec;
}

}  // namespace

ValidationReport validate(models::PiecewiseModel const& m, ValidateOptions const& o)
{
    if (o.orders.empty())
        throw UsageError("validate needs at least one order");
    for (std::size_t i = 1; i < o.orders.size(); ++i)
        if (o.orders[i] <= o.orders[i - 1])
            throw UsageError("orders must be strictly ascending");
    bool const maximize = m.sense == models::Sense::maximize;
    if (o.max_bound && o.min_bound)
        throw UsageError("give at most one of --max-bound and --min-bound");
    if (o.max_bound && !maximize)
        throw UsageError("--max-bound needs a maximization model");
    if (o.min_bound && maximize)
        throw UsageError("--min-bound needs a minimization model");
    try {
        o.solver.validate();
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }

    ValidationReport rep;
    rep.model = m.name;
    rep.model_hash = model_hash(m);
    rep.sense = models::to_string(m.sense);
    rep.max_bound = o.max_bound;
    rep.min_bound = o.min_bound;

    std::vector<std::string> problems;
    std::optional<double> tight;
    for (unsigned d : o.orders) {
        rep.orders.push_back(solve_order(m, d, o.solver));
        auto const& rec = rep.orders.back();
        if (!rec.bound) {
            problems.push_back("order " + std::to_string(d) + ": " + rec.status
                               + (rec.message.empty() ? "" : " (" + rec.message + ")"));
            continue;
        }
        if (!tight || (maximize ? *rec.bound < *tight : *rec.bound > *tight))
            tight = rec.bound;
    }

    if (o.mc_samples > 0 || models::is_dirac(m.initial)) {
        auto orc = run_oracle(m, o);
        if (!orc.objective) {
            problems.push_back("oracle: " + orc.message);
        } else {
            for (auto const& rec : rep.orders) {
                if (!rec.bound)
                    continue;
                double const s = slack(o.solver, *rec.bound);
                bool const ok = maximize ? *orc.objective <= *rec.bound + s
                                         : *orc.objective >= *rec.bound - s;
                if (!ok) {
                    orc.sandwich = false;
                    problems.push_back("oracle objective " + std::to_string(*orc.objective)
                                       + " violates the order " + std::to_string(rec.order)
                                       + " bound");
                }
            }
        }
        rep.oracle = std::move(orc);
    }

    if (!problems.empty()) {
        rep.verdict = Verdict::inconclusive;
        for (auto const& p : problems)
            rep.message += (rep.message.empty() ? "" : "; ") + p;
        return rep;
    }
    bool ok = true;
    if (o.max_bound)
        ok = *tight <= *o.max_bound + slack(o.solver, *tight);
    if (o.min_bound)
        ok = *tight >= *o.min_bound - slack(o.solver, *tight);
    rep.verdict = ok ? Verdict::validated : Verdict::not_validated;
    if (!ok) {
        std::ostringstream os;
        os << std::setprecision(10) << "tightest bound " << *tight << " fails the threshold";
        rep.message = os.str();
    }
    return rep;
}

namespace {

json optional_number(std::optional<double> const& v)
{
    return v ? json(*v) : json(nullptr);
}

json named_values(std::vector<std::pair<std::string, double>> const& v)
{
    json a = json::array();
    for (auto const& [n, x] : v)
        a.push_back({{"name", n}, {"value", x}});
    return a;
}

}  // namespace

json to_json(ValidationReport const& r)
{
    json j;
    j["format"] = "lmival-report/1";
    j["model"] = {{"name", r.model}, {"hash", r.model_hash}, {"sense", r.sense}};
    j["threshold"] = {{"max_bound", optional_number(r.max_bound)},
                      {"min_bound", optional_number(r.min_bound)}};
    j["orders"] = json::array();
    for (auto const& o : r.orders)
        j["orders"].push_back({{"order", o.order},
                               {"status", o.status},
                               {"bound", optional_number(o.bound)},
                               {"iterations", o.iterations},
                               {"gap", o.gap},
                               {"rel_gap", o.rel_gap},
                               {"masses", named_values(o.masses)},
                               {"moments", o.moments},
                               {"wall_time_s", o.wall_time},
                               {"extended_precision", o.extended_precision},
                               {"message", o.message}});
    if (r.oracle)
        j["oracle"] = {{"method", r.oracle->method},
                       {"objective", optional_number(r.oracle->objective)},
                       {"initial", r.oracle->initial},
                       {"samples", r.oracle->samples},
                       {"occupancy", named_values(r.oracle->occupancy)},
                       {"sandwich", r.oracle->sandwich},
                       {"message", r.oracle->message}};
    else
        j["oracle"] = nullptr;
    j["verdict"] = to_string(r.verdict);
    j["message"] = r.message;
    return j;
}

json json_schema(json const& v)
{
    if (v.is_object()) {
        json o = json::object();
        for (auto const& [k, x] : v.items())
            o[k] = json_schema(x);
        return o;
    }
    if (v.is_array())
        return v.empty() ? json::array() : json::array({json_schema(v.front())});
    if (v.is_null())
        return "null";
    if (v.is_boolean())
        return "boolean";
    if (v.is_number())
        return "number";
    return "string";
}

namespace {

std::vector<double> parse_list(std::string const& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (std::exception const&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw UsageError("bad number '" + item + "' in '" + text + "'");
        out.push_back(v);
    }
    return out;
}

void write_text(std::string const& path, std::string const& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

int cmd_validate(std::string const& model_ref, std::string const& orders, ValidateOptions o,
                 std::string const& path, std::ostream& out)
{
    auto const m = resolve_model(model_ref);
    o.orders = parse_orders(orders);
    auto const rep = validate(m, o);
    write_text(path, to_json(rep).dump(2) + "\n", out);
    if (!path.empty() && path != "-")
        out << "verdict: " << to_string(rep.verdict) << "\n";
    return exit_code(rep.verdict);
}

int cmd_simulate(std::string const& model_ref, std::string const& x0_text, bool degrees,
                 std::size_t steps, std::string const& csv, std::ostream& out)
{
    auto const m = resolve_model(model_ref);
    std::vector<double> x0;
    if (x0_text.empty()) {
        auto const* d = std::get_if<models::DiracPoint>(&m.initial);
        if (!d)
            throw UsageError("--x0 is required: model '" + m.name + "' has no initial point");
        x0.assign(d->point.begin(),
                  d->point.begin() + static_cast<long>(m.num_states + m.num_parameters));
    } else {
        x0 = parse_list(x0_text);
        if (degrees)
            for (std::size_t i = 0; i < x0.size() && i < m.dimension(); ++i)
                if (std::find(m.angle_variables.begin(), m.angle_variables.end(),
                              m.space.name(i))
                    != m.angle_variables.end())
                    x0[i] *= std::numbers::pi / 180.0;
    }
    oracle::SimOptions so;
    so.steps = steps;
    so.invariants = oracle::quaternion_norms(m);
    std::pair<oracle::Trajectory, oracle::SimReport> res;
    try {
        res = oracle::simulate(m, x0, so);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    auto const& [tr, rep] = res;
    if (!csv.empty()) {
        std::ofstream f(csv);
        if (!f)
            throw std::runtime_error("cannot write '" + csv + "'");
        oracle::write_csv(f, m, tr);
    }
    json occ = json::object();
    for (std::size_t k = 0; k < m.cells.size(); ++k)
        occ[m.cells[k].name] = rep.occupancy[k];
    json j = {{"model", m.name},
              {"initial", x0},
              {"objective", rep.objective},
              {"terminal_state", rep.terminal_state},
              {"occupancy", occ},
              {"steps", rep.steps},
              {"switches", rep.switches},
              {"conservation_drift", rep.conservation_drift}};
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_export(std::string const& model_ref, unsigned order, std::string const& path,
               std::ostream& out)
{
    auto const m = resolve_model(model_ref);
    if (order < 1)
        throw UsageError("--order must be at least 1");
    auto const r = relaxation::assemble_relaxation(gmp::assemble_gmp(m, order), order);
    write_text(path, sdp::export_sdpa(r.sdp), out);
    return 0;
}

int cmd_size(std::size_t n, unsigned d, std::size_t K, std::ostream& out)
{
    relaxation::SizeReport s;
    try {
        s = relaxation::relaxation_size(n, d, K);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    out << "N=" << s.moments_per_measure << " M=" << s.matrix_side
        << " total=" << s.total_moments << "\n"
        << s.note << "\n";
    return 0;
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Trajectory validation by moment relaxations", "lmival"};
    app.require_subcommand(1);

    std::string model;
    std::string orders;
    std::string path;
    ValidateOptions vo;
    double max_bound = std::numeric_limits<double>::quiet_NaN();
    double min_bound = std::numeric_limits<double>::quiet_NaN();
    auto* val = app.add_subcommand("validate", "bound the objective over a hierarchy of orders");
    val->add_option("--model", model, "built-in name or model file")->required();
    val->add_option("--orders", orders, "e.g. 1,2,3 or 1..4")->required();
    val->add_option("--max-bound", max_bound, "validated if the bound is at most this");
    val->add_option("--min-bound", min_bound, "validated if the bound is at least this");
    val->add_option("--gap-tol", vo.solver.gap_tol);
    val->add_option("--feas-tol", vo.solver.feas_tol);
    val->add_option("--max-iter", vo.solver.max_iter);
    val->add_option("--mc-samples", vo.mc_samples, "0 disables Monte Carlo");
    val->add_option("--seed", vo.seed);
    val->add_option("--sim-steps", vo.sim_steps);
    val->add_option("--threads", vo.threads);
    val->add_flag("--verbose", vo.solver.verbose);
    val->add_option("-o,--out", path, "report path (stdout if omitted)");

    std::string x0;
    bool degrees = false;
    std::size_t steps = 100000;
    std::string csv;
    auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
    sim->add_option("--model", model)->required();
    sim->add_option("--x0", x0, "comma separated initial state");
    sim->add_flag("--deg", degrees, "angles in --x0 are degrees");
    sim->add_option("--steps", steps);
    sim->add_option("--csv", csv, "trajectory output");

    unsigned order = 0;
    auto* exp = app.add_subcommand("export-sdpa", "write one relaxation in SDPA sparse format");
    exp->add_option("--model", model)->required();
    exp->add_option("--order", order)->required();
    exp->add_option("-o,--out", path);

    std::size_t n = 0, K = 0;
    unsigned d = 0;
    auto* size = app.add_subcommand("size", "moment counts of a relaxation");
    size->add_option("-n", n, "variables")->required();
    size->add_option("-d", d, "relaxation order")->required();
    size->add_option("-K", K, "measures")->required();

    std::vector<char const*> argv{"lmival"};
    for (auto const& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return 0;
    } catch (CLI::ParseError const& e) {
        err << "lmival: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (*val) {
            if (!std::isnan(max_bound))
                vo.max_bound = max_bound;
            if (!std::isnan(min_bound))
                vo.min_bound = min_bound;
            return cmd_validate(model, orders, vo, path, out);
        }
        if (*sim)
            return cmd_simulate(model, x0, degrees, steps, csv, out);
        if (*exp)
            return cmd_export(model, order, path, out);
        return cmd_size(n, d, K, out);
    } catch (UsageError const& e) {
        err << "lmival: " << e.what() << "\n";
        return exit_usage;
    } catch (models::ModelFormatError const& e) {
        err << "lmival: " << e.what() << "\n";
        return exit_usage;
    } catch (std::exception const& e) {
        err << "lmival: " << e.what() << "\n";
        return exit_inconclusive;
    }
}

}  // namespace lmival::cli
