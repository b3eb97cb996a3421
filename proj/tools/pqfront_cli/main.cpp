#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::vector<std::string> sets;
    std::optional<double> p, q, H, c, L0, Lplus;
    std::string mode;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out, "write outputs and manifest.json into this directory");
    cmd->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--set", a.sets, "override a config value, section.key=value (repeatable)");
    cmd->add_option("--p", a.p, "operator.p");
    cmd->add_option("--q", a.q, "operator.q");
    cmd->add_option("--mode", a.mode, "operator.mode")
        ->check(CLI::IsMember({"cooperative", "competitive", "single_q"}));
    cmd->add_option("--H", a.H, "reaction.H");
    cmd->add_option("--c", a.c, "speed (shoot.c)");
}

pqcli::Invocation build(const CommonArgs& a) {
    pqcli::RawConfig raw;
    if (!a.config.empty()) raw = pqcli::read_ini(a.config);
    auto put = [&raw](const char* key, const std::optional<double>& v) {
        if (v) raw[key] = pqcli::format_number(*v);
    };
    put("operator.p", a.p);
    put("operator.q", a.q);
    put("reaction.H", a.H);
    put("shoot.c", a.c);
    put("bounds.L0", a.L0);
    put("bounds.Lplus", a.Lplus);
    if (!a.mode.empty()) raw["operator.mode"] = a.mode;
    for (const auto& s : a.sets) {
        auto [k, v] = pqcli::parse_assignment(s);
        raw[k] = v;
    }
    pqcli::Invocation inv;
    inv.cfg = pqcli::resolve(raw);
    inv.format = a.format;
    if (!a.out.empty()) inv.out = a.out;
    return inv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling fronts of (p,q)-Laplacian reaction-diffusion equations"};
    app.require_subcommand(1);
    CommonArgs args;
    int figure_id = 0;

    auto* bounds = app.add_subcommand("bounds", "analytic and numeric bounds on the critical speed");
    add_common(bounds, args);
    bounds->add_option("--L0", args.L0, "override L0 of the unit problem");
    bounds->add_option("--Lplus", args.Lplus, "override L+ of the unit problem");
    auto* classify = app.add_subcommand("classify", "backward shoot at one speed");
    add_common(classify, args);
    auto* critical = app.add_subcommand("critical-speed", "bisection for the critical speed");
    add_common(critical, args);
    auto* profile = app.add_subcommand("profile", "traveling-wave profile at an admissible speed");
    add_common(profile, args);
    auto* simulate = app.add_subcommand("simulate", "finite-difference simulation with front tracking");
    add_common(simulate, args);
    auto* figure = app.add_subcommand("figure", "data of the reference figures 1-5");
    add_common(figure, args);
    figure->add_option("id", figure_id, "figure number")->required()->check(CLI::Range(1, 5));
    auto* sweep = app.add_subcommand("sweep", "parameter sweep over p, q and c or L");
    add_common(sweep, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : pqcli::ExitCode::usage;
    }

    try {
        const pqcli::Invocation inv = build(args);
        pqcli::Output out;
        if (*bounds) out = pqcli::cmd_bounds(inv);
        else if (*classify) out = pqcli::cmd_classify(inv);
        else if (*critical) out = pqcli::cmd_critical_speed(inv);
        else if (*profile) out = pqcli::cmd_profile(inv);
        else if (*simulate) out = pqcli::cmd_simulate(inv);
        else if (*figure) out = pqcli::cmd_figure(inv, figure_id);
        else out = pqcli::cmd_sweep(inv);
        pqcli::emit(inv, out, std::cout);
        if (out.code != pqcli::ExitCode::ok && out.record.contains("error"))
            std::cerr << "error: " << out.record["error"].get<std::string>() << '\n';
        return out.code;
    } catch (const pqcli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return pqcli::ExitCode::usage;
    } catch (const pqfront::DomainBreach& e) {
        std::cerr << "domain breach: " << e.what() << '\n';
        return pqcli::ExitCode::breach;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return pqcli::ExitCode::usage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return pqcli::ExitCode::numerical;
    }
}
