#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace pqcli {

using nlohmann::json;
namespace pf = pqfront;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const CsvTable& t) {
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }
json number_or_null(const std::optional<double>& v) { return v ? number_or_null(*v) : json(); }
std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

json table_json(const CsvTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(r);
    return {{"columns", t.header}, {"rows", rows}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string csv_text(const CsvTable& t) {
    std::ostringstream ss;
    write_csv(ss, t);
    return ss.str();
}

pf::OperatorSpec op_of(const RunConfig& c) { return make_operator(c.op); }

double required_c(const RunConfig& c) {
    if (!c.c) throw ConfigError("this command needs a speed: set shoot.c or pass --c");
    return *c.c;
}

CsvTable shoot_table(const pf::ShootOutcome& s) {
    CsvTable t{{"v", "y", "phi"}, {}};
    t.rows.reserve(s.samples.size());
    for (const auto& smp : s.samples)
        t.rows.push_back({format_number(smp.v), format_number(smp.y), format_number(smp.phi)});
    return t;
}

json shoot_json(const pf::ShootOutcome& s) {
    return {{"c", s.c},
            {"H", s.H},
            {"classification", pf::to_string(s.classification)},
            {"y_at_zero", number_or_null(s.y_at_zero)},
            {"max_y", s.max_y},
            {"stopped_at", number_or_null(s.stopped_at)},
            {"positive_interior", s.positive_interior},
            {"steps", s.steps},
            {"seed_delta", s.seed_delta}};
}

json bounds_json(const pf::BoundSet& b) {
    json j = {{"H", b.H},
              {"L0", number_or_null(b.unit_slopes.L0)},
              {"Lplus", number_or_null(b.unit_slopes.Lplus)},
              {"l0_status", pf::to_string(b.unit_slopes.l0_status)},
              {"lower", number_or_null(b.lower)},
              {"upper_analytic", number_or_null(b.upper_analytic)},
              {"upper_case", b.upper_case ? json(pf::to_string(*b.upper_case)) : json()},
              {"upper_numeric", number_or_null(b.upper_numeric)},
              {"competitive_c_max", number_or_null(b.competitive_c_max)},
              {"competitive_window_empty", b.competitive_window_empty}};
    j["competitive_window"] =
        b.competitive_window ? json::array({b.competitive_window->first, b.competitive_window->second}) : json();
    return j;
}

const std::vector<std::string> kBoundsHeader = {"H", "L0", "Lplus", "l0_status", "lower", "upper_analytic",
                                                "upper_case", "upper_numeric", "competitive_c_max",
                                                "competitive_window_empty"};

std::vector<std::string> bounds_row(const pf::BoundSet& b) {
    return {format_number(b.H),
            format_number(b.unit_slopes.L0),
            format_number(b.unit_slopes.Lplus),
            std::string(pf::to_string(b.unit_slopes.l0_status)),
            cell(b.lower),
            cell(b.upper_analytic),
            b.upper_case ? std::string(pf::to_string(*b.upper_case)) : "",
            cell(b.upper_numeric),
            cell(b.competitive_c_max),
            b.competitive_window_empty ? "true" : "false"};
}

/// Bound set of the configured problem, with slope overrides taken as constants of the unit problem.
pf::BoundSet resolved_bounds(const RunConfig& c) {
    const auto op = op_of(c);
    if (c.bounds.L0 || c.bounds.Lplus) {
        pf::SlopeLimits s{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                          pf::LimitStatus::converged};
        if (!(c.bounds.L0 && c.bounds.Lplus)) s = pf::slope_limits(pf::rescale_to_unit(make_reaction(c.reaction, op)));
        if (c.bounds.L0) {
            s.L0 = *c.bounds.L0;
            s.l0_status = pf::LimitStatus::converged;
        }
        if (c.bounds.Lplus) s.Lplus = *c.bounds.Lplus;
        return pf::bounds_from_slopes(op, s, c.reaction.H);
    }
    return pf::compute_bounds(op, make_reaction(c.reaction, op));
}

int code_for(pf::Classification c) {
    switch (c) {
        case pf::Classification::domain_breach: return ExitCode::breach;
        case pf::Classification::integration_failure: return ExitCode::numerical;
        default: return ExitCode::ok;
    }
}

}  // namespace

void emit(const Invocation& inv, const Output& out, std::ostream& os) {
    const json config = to_json(inv.cfg);
    json full = {{"command", out.name}, {"config", config}, {"result", out.record}};
    if (!out.table.header.empty()) full["data"] = table_json(out.table);

    if (!inv.out) {
        if (inv.format == "json")
            os << full.dump(2) << '\n';
        else
            write_csv(os, out.table);
        return;
    }
    std::filesystem::create_directories(*inv.out);
    if (inv.format == "json")
        write_file(*inv.out / (out.name + ".json"), full.dump(2) + "\n");
    else
        write_file(*inv.out / (out.name + ".csv"), csv_text(out.table));
    json files = json::array();
    for (const auto& [fname, table] : out.extra) {
        write_file(*inv.out / fname, csv_text(table));
        files.push_back(fname);
    }
    json manifest = {{"command", out.name}, {"config", config}, {"result", out.record}, {"files", files}};
    write_file(*inv.out / "manifest.json", manifest.dump(2) + "\n");
}

Output cmd_bounds(const Invocation& inv) {
    const auto b = resolved_bounds(inv.cfg);
    Output o{"bounds", bounds_json(b), {kBoundsHeader, {bounds_row(b)}}, {}, ExitCode::ok};
    return o;
}

Output cmd_classify(const Invocation& inv) {
    const auto& cfg = inv.cfg;
    const auto op = op_of(cfg);
    const auto r = make_reaction(cfg.reaction, op);
    const double c = required_c(cfg);
    const auto verdict = pf::classify_speed(op, r, c, cfg.solver);
    const auto shoot = pf::integrate_backward(op, r, c, cfg.solver);
    Output o;
    o.name = "classify";
    o.record = {{"c", c},
                {"classification", pf::to_string(verdict.classification)},
                {"y_at_zero", number_or_null(verdict.y_at_zero)},
                {"y_at_zero_half", number_or_null(verdict.y_at_zero_half)},
                {"max_y", verdict.max_y},
                {"lower_bound", number_or_null(verdict.lower_bound)},
                {"reason", verdict.reason},
                {"shoot", shoot_json(shoot)}};
    o.table = shoot_table(shoot);
    o.code = code_for(verdict.classification);
    return o;
}

Output cmd_critical_speed(const Invocation& inv) {
    const auto& cfg = inv.cfg;
    const auto op = op_of(cfg);
    const auto r = make_reaction(cfg.reaction, op);
    Output o;
    o.name = "critical_speed";
    if (op.mode() == pf::OperatorMode::competitive) {
        const auto scan = pf::competitive_window(op, r, cfg.solver, cfg.window);
        json pts = json::array();
        o.table.header = {"c", "classification", "y_at_zero", "max_y"};
        bool any_breach = false;
        for (const auto& p : scan.points) {
            pts.push_back({{"c", p.c},
                           {"classification", pf::to_string(p.classification)},
                           {"y_at_zero", number_or_null(p.y_at_zero)},
                           {"max_y", p.max_y}});
            o.table.rows.push_back({format_number(p.c), std::string(pf::to_string(p.classification)),
                                    format_number(p.y_at_zero), format_number(p.max_y)});
            any_breach = any_breach || p.classification == pf::Classification::domain_breach;
        }
        o.record = {{"mode", "competitive"},
                    {"bounds", bounds_json(pf::compute_bounds(op, r))},
                    {"scan", pts},
                    {"contiguous", scan.contiguous},
                    {"window", scan.interval ? json::array({scan.interval->first, scan.interval->second}) : json()}};
        const bool found = std::any_of(scan.points.begin(), scan.points.end(),
                                       [](const auto& p) { return p.classification == pf::Classification::admissible; });
        o.code = found ? ExitCode::ok : any_breach ? ExitCode::breach : ExitCode::numerical;
        return o;
    }
    const auto res = pf::critical_speed(op, r, cfg.solver);
    json ev = json::array();
    for (const auto& [c, y] : res.evaluations) ev.push_back({c, number_or_null(y)});
    o.record = {{"c_star", res.c_star},
                {"bracket", {res.bracket.first, res.bracket.second}},
                {"iterations", res.iterations},
                {"expansions", res.expansions},
                {"monotone_in_c", res.monotone_in_c},
                {"zero_tol", res.zero_tol},
                {"seed_delta", res.seed_delta},
                {"bounds", bounds_json(res.bound_set)},
                {"evaluations", ev}};
    o.table.header = {"c_star", "bracket_lo", "bracket_hi", "lower", "upper_analytic", "upper_numeric",
                      "iterations", "monotone_in_c"};
    o.table.rows.push_back({format_number(res.c_star), format_number(res.bracket.first),
                            format_number(res.bracket.second), cell(res.bound_set.lower),
                            cell(res.bound_set.upper_analytic), cell(res.bound_set.upper_numeric),
                            std::to_string(res.iterations), res.monotone_in_c ? "true" : "false"});
    return o;
}

namespace {

CsvTable profile_table(const pf::WaveProfile& p) {
    CsvTable t{{"z", "u", "du_dz"}, {}};
    t.rows.reserve(p.samples.size());
    for (const auto& s : p.samples)
        t.rows.push_back({format_number(s.z), format_number(s.u), format_number(s.du_dz)});
    return t;
}

}  // namespace

Output cmd_profile(const Invocation& inv) {
    const auto& cfg = inv.cfg;
    const auto op = op_of(cfg);
    const auto r = make_reaction(cfg.reaction, op);
    const double c = required_c(cfg);
    const auto shoot = pf::integrate_backward(op, r, c, cfg.solver);
    Output o;
    o.name = "profile";
    if (shoot.classification != pf::Classification::admissible) {
        o.record = {{"c", c}, {"error", "speed is not admissible"}, {"shoot", shoot_json(shoot)}};
        o.table.header = {"z", "u", "du_dz"};
        o.code = shoot.classification == pf::Classification::domain_breach ? ExitCode::breach : ExitCode::numerical;
        return o;
    }
    const auto prof = pf::reconstruct_profile(shoot, op, cfg.profile);
    const auto rates = pf::tail_exponents(prof);
    o.record = {{"c", c},
                {"samples", prof.samples.size()},
                {"z_span", {prof.z_span.first, prof.z_span.second}},
                {"tail_tol", prof.tail_tol},
                {"clamped_negative", prof.clamped_negative},
                {"truncated_by_cap", prof.truncated_by_cap},
                {"tail_rate_left", rates ? json(rates->left) : json()},
                {"tail_rate_right", rates ? json(rates->right) : json()},
                {"shoot", shoot_json(shoot)}};
    o.table = profile_table(prof);
    return o;
}

Output cmd_simulate(const Invocation& inv) {
    const auto& cfg = inv.cfg;
    const auto op = op_of(cfg);
    const auto r = make_reaction(cfg.reaction, op);
    const auto& g = cfg.simulate.grid;
    std::vector<double> u0;
    json init = {{"kind", cfg.simulate.initial}, {"x0", cfg.simulate.x0}};
    if (cfg.simulate.initial == "profile") {
        double c = 0.0;
        if (cfg.simulate.c) {
            c = *cfg.simulate.c;
        } else {
            c = pf::critical_speed(op, r, cfg.solver).c_star + 0.5;
        }
        const auto shoot = pf::integrate_backward(op, r, c, cfg.solver);
        if (shoot.classification != pf::Classification::admissible)
            throw pf::ProfileRefused("simulate: profile speed " + format_number(c) + " is not admissible");
        u0 = pf::profile_initial_data(pf::reconstruct_profile(shoot, op, cfg.profile), op, g, cfg.simulate.x0);
        init["c"] = c;
    } else {
        u0 = pf::step_initial_data(g, r.H(), cfg.simulate.x0);
    }
    const auto res = pf::run(std::move(u0), op, r, g);

    Output o;
    o.name = "simulate";
    o.record = {{"initial", init},
                {"status", res.status == pf::RunStatus::completed ? "completed" : "boundary_contamination"},
                {"fitted_speed", number_or_null(res.track.fitted_speed)},
                {"fit_residual", number_or_null(res.track.fit_residual)},
                {"t_reached", res.t_reached},
                {"steps", res.steps},
                {"last_dt", res.last_dt},
                {"reaction_floor", pf::reaction_floor(g, r)},
                {"snapshots", res.snapshots.size()}};
    o.table.header = {"t", "position"};
    for (std::size_t i = 0; i < res.track.times.size(); ++i)
        o.table.rows.push_back({format_number(res.track.times[i]), format_number(res.track.positions[i])});
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
        CsvTable snap{{"x", "u"}, {}};
        snap.rows.reserve(g.nx);
        for (std::size_t i = 0; i < g.nx; ++i)
            snap.rows.push_back({format_number(g.x(i)), format_number(res.snapshots[k].u[i])});
        char fname[32];
        std::snprintf(fname, sizeof fname, "snapshot_%05zu.csv", k);
        o.extra.emplace_back(fname, std::move(snap));
    }
    if (res.status != pf::RunStatus::completed) o.code = ExitCode::numerical;
    return o;
}

Output cmd_figure(const Invocation& inv, int figure_id) {
    const auto& s = inv.cfg.solver;
    Output o;
    o.name = "figure" + std::to_string(figure_id);
    if (figure_id == 1) {
        const auto op = pf::OperatorSpec::cooperative(4.0, 3.0);
        const double Lplus = 6.0;
        const double p = op.p(), q = op.q(), sum = p + q - 2.0;
        const double c_i = std::pow(Lplus, (q - 1.0) / q) * q / (q - 1.0) * std::pow(sum, 1.0 / q);
        const double c_ii = pf::upper_bound_cplus(op, Lplus).value;
        const auto m_i = pf::minimize_g(op, Lplus, c_i);
        const auto m_ii = pf::minimize_g(op, Lplus, c_ii);
        o.table.header = {"beta", "G_case_i", "G_case_ii"};
        const int n = 400;
        for (int k = 1; k <= n; ++k) {
            const double beta = 2.0 * k / n;
            o.table.rows.push_back({format_number(beta), format_number(pf::g_script(op, Lplus, c_i, beta)),
                                    format_number(pf::g_script(op, Lplus, c_ii, beta))});
        }
        o.record = {{"p", p},
                    {"q", q},
                    {"Lplus", Lplus},
                    {"c_case_i", c_i},
                    {"c_case_ii", c_ii},
                    {"min_G_case_i", m_i.value},
                    {"argmin_case_i", m_i.beta},
                    {"min_G_case_ii", m_ii.value},
                    {"argmin_case_ii", m_ii.beta},
                    {"numeric_cplus", number_or_null(pf::numeric_cplus(op, Lplus))}};
        return o;
    }
    if (figure_id < 1 || figure_id > 5) throw ConfigError("figure id must be 1..5");

    const bool competitive = figure_id >= 4;
    const auto op = competitive ? pf::OperatorSpec::competitive(4.0, 2.0) : pf::OperatorSpec::cooperative(4.0, 2.0);
    const double H = figure_id == 3 ? 7.0 : figure_id == 5 ? 4.0 : 1.0;
    const double c = figure_id == 3 ? 2.0 * std::sqrt(7.0) : 2.0;
    const auto r = pf::ReactionSpec::classical_logistic(H, op.q_conj());
    const auto shoot = pf::integrate_backward(op, r, c, s);
    o.record = {{"p", op.p()},
                {"q", op.q()},
                {"mode", pf::to_string(op.mode())},
                {"H", H},
                {"reaction", "u (H - u)"},
                {"shoot", shoot_json(shoot)},
                {"bounds", bounds_json(pf::compute_bounds(op, r))}};
    if (competitive) {
        o.record["y_max"] = pf::invertibility_limit(op).y_max;
        const auto scan = pf::competitive_window(op, r, s, inv.cfg.window);
        json pts = json::array();
        for (const auto& p : scan.points)
            pts.push_back({{"c", p.c}, {"classification", pf::to_string(p.classification)}, {"max_y", p.max_y}});
        o.record["window_scan"] = pts;
        o.record["window"] =
            scan.interval ? json::array({scan.interval->first, scan.interval->second}) : json();
    }
    o.table = shoot_table(shoot);
    return o;
}

namespace {

struct SweepCell {
    double p, q;
    std::optional<double> c, L;
};

}  // namespace

Output cmd_sweep(const Invocation& inv) {
    const auto& cfg = inv.cfg;
    const auto& sw = cfg.sweep;
    std::vector<SweepCell> cells;
    for (double p : sw.p)
        for (double q : sw.q) {
            if (sw.task == "classify") {
                for (double c : sw.c) cells.push_back({p, q, c, std::nullopt});
            } else if (sw.task == "bounds" && !sw.L.empty()) {
                for (double L : sw.L) cells.push_back({p, q, std::nullopt, L});
            } else {
                cells.push_back({p, q, std::nullopt, std::nullopt});
            }
        }

    Output o;
    o.name = "sweep";
    o.table.header = {"mode", "p",     "q",     "c",    "L",    "status", "lower", "upper_analytic",
                      "upper_case", "upper_numeric", "c_star", "classification", "y_at_zero", "max_y", "error"};
    std::vector<std::vector<std::string>> rows(cells.size());
    std::vector<json> records(cells.size());
    std::vector<char> succeeded(cells.size(), 0);

    auto evaluate = [&](std::size_t i) {
        const SweepCell& cell_spec = cells[i];
        std::vector<std::string> row(o.table.header.size());
        json rec = {{"p", cell_spec.p}, {"q", cell_spec.q}};
        row[0] = std::string(pf::to_string(cfg.op.mode));
        row[1] = format_number(cell_spec.p);
        row[2] = format_number(cell_spec.q);
        row[3] = cell(cell_spec.c);
        row[4] = cell(cell_spec.L);
        try {
            RunConfig local = cfg;
            local.op.p = cell_spec.p;
            local.op.q = cell_spec.q;
            if (cell_spec.L) local.bounds.L0 = local.bounds.Lplus = *cell_spec.L;
            const auto op = op_of(local);
            const auto r = make_reaction(local.reaction, op);
            const auto b = resolved_bounds(local);
            row[6] = cell(b.lower);
            row[7] = cell(b.upper_analytic);
            row[8] = b.upper_case ? std::string(pf::to_string(*b.upper_case)) : "";
            row[9] = cell(b.upper_numeric);
            rec["bounds"] = bounds_json(b);
            if (sw.task == "critical_speed") {
                const auto res = pf::critical_speed(op, r, local.solver);
                row[10] = format_number(res.c_star);
                rec["c_star"] = res.c_star;
            } else if (sw.task == "classify") {
                const auto v = pf::classify_speed(op, r, *cell_spec.c, local.solver);
                row[11] = std::string(pf::to_string(v.classification));
                row[12] = format_number(v.y_at_zero);
                row[13] = format_number(v.max_y);
                rec["c"] = *cell_spec.c;
                rec["classification"] = pf::to_string(v.classification);
            }
            row[5] = "ok";
            rec["status"] = "ok";
            succeeded[i] = 1;
        } catch (const std::exception& e) {
            row[5] = "error";
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            row[14] = msg;
            rec["status"] = "error";
            rec["error"] = e.what();
        }
        rows[i] = std::move(row);
        records[i] = std::move(rec);
    };

    std::size_t threads = sw.threads ? sw.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(1, cells.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < cells.size(); i = next++) evaluate(i);
        });
    for (auto& th : pool) th.join();

    o.table.rows = std::move(rows);
    o.record = {{"task", sw.task}, {"rows", records}};
    const bool any_ok = std::any_of(succeeded.begin(), succeeded.end(), [](char s) { return s != 0; });
    o.code = cells.empty() || any_ok ? ExitCode::ok : ExitCode::numerical;
    return o;
}

}  // namespace pqcli
