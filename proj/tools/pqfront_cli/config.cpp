#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace pqcli {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
    if (!std::isfinite(v)) throw ConfigError("config key '" + key + "': value must be finite");
    return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1e15)
        throw ConfigError("config key '" + key + "': '" + text + "' is not a nonnegative integer");
    return static_cast<std::size_t>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double(key, item));
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        auto num = [&m](const std::string& key, auto field) {
            m[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { field(c) = to_double(k, v); };
        };
        auto opt = [&m](const std::string& key, auto field) {
            m[key] = [field](RunConfig& c, const std::string& k, const std::string& v) {
                field(c) = std::optional<double>(to_double(k, v));
            };
        };
        auto count = [&m](const std::string& key, auto field) {
            m[key] = [field](RunConfig& c, const std::string& k, const std::string& v) {
                field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(to_count(k, v));
            };
        };
        auto list = [&m](const std::string& key, auto field) {
            m[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { field(c) = to_list(k, v); };
        };

        m["operator.mode"] = [](RunConfig& c, const std::string&, const std::string& v) {
            try {
                c.op.mode = pqfront::parse_operator_mode(trim(v));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        };
        num("operator.p", [](RunConfig& c) -> double& { return c.op.p; });
        num("operator.q", [](RunConfig& c) -> double& { return c.op.q; });

        m["reaction.family"] = [](RunConfig& c, const std::string&, const std::string& v) {
            try {
                c.reaction.family = pqfront::parse_reaction_family(trim(v));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        };
        num("reaction.amplitude", [](RunConfig& c) -> double& { return c.reaction.amplitude; });
        m["reaction.gamma"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (trim(v) == "matched") {
                c.reaction.gamma_matched = true;
            } else {
                c.reaction.gamma_matched = false;
                c.reaction.gamma = to_double(k, v);
            }
        };
        num("reaction.H", [](RunConfig& c) -> double& { return c.reaction.H; });
        m["reaction.table"] = [](RunConfig& c, const std::string&, const std::string& v) { c.reaction.table = trim(v); };

        num("solver.seed_delta", [](RunConfig& c) -> double& { return c.solver.seed_delta; });
        num("solver.atol", [](RunConfig& c) -> double& { return c.solver.atol; });
        num("solver.rtol", [](RunConfig& c) -> double& { return c.solver.rtol; });
        num("solver.zero_tol", [](RunConfig& c) -> double& { return c.solver.zero_tol; });
        num("solver.promote_tol", [](RunConfig& c) -> double& { return c.solver.promote_tol; });
        count("solver.grid_points", [](RunConfig& c) -> std::size_t& { return c.solver.grid_points; });
        num("solver.floor_rel", [](RunConfig& c) -> double& { return c.solver.floor_rel; });
        num("solver.bisect_tol", [](RunConfig& c) -> double& { return c.solver.bisect_tol; });
        count("solver.max_expansions", [](RunConfig& c) -> int& { return c.solver.max_expansions; });
        count("solver.max_steps", [](RunConfig& c) -> std::size_t& { return c.solver.max_steps; });

        opt("bounds.L0", [](RunConfig& c) -> std::optional<double>& { return c.bounds.L0; });
        opt("bounds.Lplus", [](RunConfig& c) -> std::optional<double>& { return c.bounds.Lplus; });
        opt("shoot.c", [](RunConfig& c) -> std::optional<double>& { return c.c; });

        num("profile.tail_tol", [](RunConfig& c) -> double& { return c.profile.tail_tol; });
        num("profile.anchor", [](RunConfig& c) -> double& { return c.profile.anchor; });
        num("profile.z_cap", [](RunConfig& c) -> double& { return c.profile.z_cap; });
        num("profile.max_dz", [](RunConfig& c) -> double& { return c.profile.max_dz; });

        num("simulate.x_min", [](RunConfig& c) -> double& { return c.simulate.grid.x_min; });
        num("simulate.x_max", [](RunConfig& c) -> double& { return c.simulate.grid.x_max; });
        count("simulate.nx", [](RunConfig& c) -> std::size_t& { return c.simulate.grid.nx; });
        num("simulate.dt", [](RunConfig& c) -> double& { return c.simulate.grid.dt; });
        num("simulate.t_end", [](RunConfig& c) -> double& { return c.simulate.grid.t_end; });
        count("simulate.snapshot_stride", [](RunConfig& c) -> std::size_t& { return c.simulate.grid.snapshot_stride; });
        opt("simulate.reaction_floor", [](RunConfig& c) -> std::optional<double>& { return c.simulate.grid.reaction_floor; });
        m["simulate.initial"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const std::string t = trim(v);
            if (t != "step" && t != "profile") throw ConfigError("config key '" + k + "': expected step or profile");
            c.simulate.initial = t;
        };
        opt("simulate.c", [](RunConfig& c) -> std::optional<double>& { return c.simulate.c; });
        num("simulate.x0", [](RunConfig& c) -> double& { return c.simulate.x0; });

        count("window.count", [](RunConfig& c) -> int& { return c.window.count; });
        opt("window.scan_cap", [](RunConfig& c) -> std::optional<double>& { return c.window.scan_cap; });

        list("sweep.p", [](RunConfig& c) -> std::vector<double>& { return c.sweep.p; });
        list("sweep.q", [](RunConfig& c) -> std::vector<double>& { return c.sweep.q; });
        list("sweep.c", [](RunConfig& c) -> std::vector<double>& { return c.sweep.c; });
        list("sweep.L", [](RunConfig& c) -> std::vector<double>& { return c.sweep.L; });
        m["sweep.task"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const std::string t = trim(v);
            if (t != "bounds" && t != "critical_speed" && t != "classify")
                throw ConfigError("config key '" + k + "': expected bounds, critical_speed or classify");
            c.sweep.task = t;
        };
        count("sweep.threads", [](RunConfig& c) -> std::size_t& { return c.sweep.threads; });
        return m;
    }();
    return table;
}

void validate(const RunConfig& c) {
    try {
        (void)make_operator(c.op);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.reaction.family == pqfront::ReactionFamily::tabulated && c.reaction.table.empty())
        throw ConfigError("reaction.table is required for the tabulated family");
    const auto& s = c.solver;
    if (!(s.seed_delta > 0.0)) throw ConfigError("solver.seed_delta must be > 0");
    if (!(s.atol > 0.0) || !(s.rtol > 0.0)) throw ConfigError("solver tolerances must be > 0");
    if (!(s.zero_tol > 0.0) || !(s.promote_tol >= s.zero_tol))
        throw ConfigError("solver needs 0 < zero_tol <= promote_tol");
    if (s.grid_points < 2) throw ConfigError("solver.grid_points must be >= 2");
    if (!(s.floor_rel > 0.0 && s.floor_rel < 1.0)) throw ConfigError("solver.floor_rel must lie in ]0, 1[");
    if (!(s.bisect_tol > 0.0)) throw ConfigError("solver.bisect_tol must be > 0");
    if (c.c && !(*c.c >= 0.0)) throw ConfigError("shoot.c must be >= 0");
    if (!(c.profile.tail_tol > 0.0 && c.profile.tail_tol <= 0.5)) throw ConfigError("profile.tail_tol must lie in ]0, 0.5]");
    if (!(c.profile.anchor > 0.0 && c.profile.anchor < 1.0)) throw ConfigError("profile.anchor must lie in ]0, 1[");
    if (!(c.profile.z_cap > 0.0) || !(c.profile.max_dz > 0.0)) throw ConfigError("profile.z_cap and max_dz must be > 0");
    try {
        pqfront::validate(c.simulate.grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }
    if (c.window.count < 1) throw ConfigError("window.count must be >= 1");
}

}  // namespace

RawConfig read_ini(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    RawConfig raw;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config key '" + section + "' is outside any section");
        for (const auto& [key, value] : body) raw[section + "." + key] = value.data();
    }
    return raw;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected section.key=value, got '" + text + "'");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

RunConfig resolve(const RawConfig& raw) {
    RunConfig cfg;
    const auto& table = schema();
    for (const auto& [key, value] : raw) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, setter] : schema()) k.push_back(name);
        return k;
    }();
    return keys;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
    using nlohmann::json;
    json j;
    j["operator"] = {{"mode", pqfront::to_string(c.op.mode)}, {"p", c.op.p}, {"q", c.op.q}};
    j["reaction"] = {{"family", pqfront::to_string(c.reaction.family)},
                     {"amplitude", c.reaction.amplitude},
                     {"gamma", c.reaction.gamma_matched ? json("matched") : json(c.reaction.gamma)},
                     {"H", c.reaction.H},
                     {"table", c.reaction.table}};
    const auto& s = c.solver;
    j["solver"] = {{"seed_delta", s.seed_delta}, {"atol", s.atol},           {"rtol", s.rtol},
                   {"zero_tol", s.zero_tol},     {"promote_tol", s.promote_tol}, {"grid_points", s.grid_points},
                   {"floor_rel", s.floor_rel},   {"bisect_tol", s.bisect_tol}, {"max_expansions", s.max_expansions},
                   {"max_steps", s.max_steps}};
    j["bounds"] = {{"L0", opt_json(c.bounds.L0)}, {"Lplus", opt_json(c.bounds.Lplus)}};
    j["shoot"] = {{"c", opt_json(c.c)}};
    j["profile"] = {{"tail_tol", c.profile.tail_tol},
                    {"anchor", c.profile.anchor},
                    {"z_cap", c.profile.z_cap},
                    {"max_dz", c.profile.max_dz}};
    const auto& g = c.simulate.grid;
    j["simulate"] = {{"x_min", g.x_min},     {"x_max", g.x_max},
                     {"nx", g.nx},           {"dt", g.dt},
                     {"t_end", g.t_end},     {"snapshot_stride", g.snapshot_stride},
                     {"reaction_floor", opt_json(g.reaction_floor)},
                     {"initial", c.simulate.initial},
                     {"c", opt_json(c.simulate.c)},
                     {"x0", c.simulate.x0}};
    j["window"] = {{"count", c.window.count}, {"scan_cap", opt_json(c.window.scan_cap)}};
    j["sweep"] = {{"p", c.sweep.p},       {"q", c.sweep.q},       {"c", c.sweep.c},
                  {"L", c.sweep.L},       {"task", c.sweep.task}, {"threads", c.sweep.threads}};
    return j;
}

pqfront::OperatorSpec make_operator(const OperatorBlock& op) { return pqfront::OperatorSpec::make(op.mode, op.p, op.q); }

pqfront::ReactionSpec make_reaction(const ReactionBlock& r, const pqfront::OperatorSpec& op) {
    const double qprime = op.q_conj();
    switch (r.family) {
        case pqfront::ReactionFamily::classical_logistic:
            return pqfront::ReactionSpec::classical_logistic(r.H, qprime, r.amplitude);
        case pqfront::ReactionFamily::power_logistic:
            return pqfront::ReactionSpec::power_logistic(r.amplitude, r.gamma_matched ? qprime - 1.0 : r.gamma, r.H,
                                                         qprime);
        case pqfront::ReactionFamily::tabulated: return pqfront::ReactionSpec::load_csv(r.table, qprime);
    }
    throw ConfigError("bad reaction family");
}

}  // namespace pqcli
