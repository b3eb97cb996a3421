#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"

using namespace pqcli;
using nlohmann::json;

namespace {

struct Ran {
    int code;
    std::string out;
};

Ran run_cli(const std::string& args) {
    const std::string cmd = std::string(PQFRONT_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Invocation invocation(const RawConfig& raw) {
    Invocation inv;
    inv.cfg = resolve(raw);
    return inv;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
    const auto cfg = resolve({{"operator.p", "3"}, {"operator.q", "2"}, {"reaction.H", "7"}, {"solver.rtol", "1e-9"}});
    EXPECT_EQ(cfg.op.p, 3.0);
    EXPECT_EQ(cfg.reaction.H, 7.0);
    EXPECT_EQ(cfg.solver.rtol, 1e-9);
    EXPECT_EQ(cfg.solver.seed_delta, 1e-12);
}

TEST(Config, RejectsUnknownAndMalformed) {
    EXPECT_THROW(resolve({{"operator.r", "3"}}), ConfigError);
    EXPECT_THROW(resolve({{"solver.rtol", "tiny"}}), ConfigError);
    EXPECT_THROW(resolve({{"operator.mode", "mixed"}}), ConfigError);
    EXPECT_THROW(resolve({{"operator.p", "2"}, {"operator.q", "3"}}), ConfigError);
    EXPECT_THROW(parse_assignment("operator.p"), ConfigError);
    EXPECT_THROW(resolve({parse_assignment("p=3")}), ConfigError);
    EXPECT_EQ(parse_assignment("operator.p = 5").second, "5");
}

TEST(Config, ReadIni) {
    const auto path = write_temp("pqfront_cfg.ini", "; comment\n[operator]\nmode = single_q\nq = 2\n[sweep]\np = 3, 4\n");
    const auto raw = read_ini(path);
    EXPECT_EQ(raw.at("operator.mode"), "single_q");
    const auto cfg = resolve(raw);
    EXPECT_EQ(cfg.op.mode, pqfront::OperatorMode::single_q);
    EXPECT_EQ(cfg.sweep.p, (std::vector<double>{3, 4}));
    const auto bad = write_temp("pqfront_bad.ini", "[operator]\nwhat = 1\n");
    EXPECT_THROW(resolve(read_ini(bad)), ConfigError);
    std::filesystem::remove(path);
    std::filesystem::remove(bad);
}

TEST(Config, MatchedGamma) {
    const auto cfg = resolve({{"operator.p", "3"}, {"operator.q", "3"}, {"reaction.family", "power_logistic"},
                              {"reaction.gamma", "matched"}});
    const auto op = make_operator(cfg.op);
    const auto r = make_reaction(cfg.reaction, op);
    EXPECT_DOUBLE_EQ(r.gamma(), 0.5);
    EXPECT_DOUBLE_EQ(r.qprime(), 1.5);
}

TEST(Config, EchoContainsEveryBlock) {
    const auto j = to_json(resolve({}));
    for (const char* k : {"operator", "reaction", "solver", "profile", "simulate", "sweep"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(Commands, BoundsWithLOverride) {
    const auto o = cmd_bounds(invocation({{"operator.p", "4"}, {"operator.q", "3"}, {"bounds.Lplus", "6"}, {"bounds.L0", "6"}}));
    EXPECT_EQ(o.record["upper_case"], "ii");
    EXPECT_NEAR(o.record["upper_analytic"].get<double>(), 10.0, 1e-12);
    const double num = o.record["upper_numeric"].get<double>();
    EXPECT_GT(num, 8.4693);
    EXPECT_LE(num, 10.0);
}

TEST(Commands, BoundsDoubled) {
    const auto o = cmd_bounds(invocation({{"operator.p", "2"}, {"operator.q", "2"}}));
    EXPECT_NEAR(o.record["lower"].get<double>(), 2 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(o.record["upper_analytic"].get<double>(), 2 * std::sqrt(2.0), 1e-12);
}

TEST(Commands, BoundsCompetitive) {
    const auto o = cmd_bounds(invocation({{"operator.mode", "competitive"}}));
    EXPECT_NEAR(o.record["lower"].get<double>(), 2.0, 1e-12);
    EXPECT_NEAR(o.record["upper_analytic"].get<double>(), 2.0, 1e-12);
    EXPECT_NEAR(o.record["competitive_c_max"].get<double>(), 2 / std::sqrt(3.0), 1e-12);
    EXPECT_TRUE(o.record["competitive_window_empty"].get<bool>());
}

TEST(Commands, CriticalSpeed) {
    const auto f2 = cmd_critical_speed(invocation({}));
    EXPECT_EQ(f2.code, ExitCode::ok);
    const double c = f2.record["c_star"].get<double>();
    EXPECT_GE(c, 2.0);
    EXPECT_LE(c, 2.1);
    const auto s = cmd_critical_speed(invocation({{"operator.mode", "single_q"}, {"operator.q", "2"}}));
    EXPECT_NEAR(s.record["c_star"].get<double>(), 2.0, 1e-3);
    const auto d = cmd_critical_speed(invocation({{"operator.p", "2"}, {"operator.q", "2"}}));
    EXPECT_NEAR(d.record["c_star"].get<double>(), 2 * std::sqrt(2.0), 1e-3);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("").code, ExitCode::usage);
    EXPECT_EQ(run_cli("bounds --set operator.nope=1").code, ExitCode::usage);
    EXPECT_EQ(run_cli("bounds --p 2 --q 3").code, ExitCode::usage);
    EXPECT_EQ(run_cli("figure 9").code, ExitCode::usage);
    EXPECT_EQ(run_cli("bounds").code, ExitCode::ok);
    EXPECT_EQ(run_cli("classify --mode competitive --H 4 --c 4").code, ExitCode::breach);
    EXPECT_EQ(run_cli("profile --c 1").code, ExitCode::numerical);
}

TEST(Cli, CsvOutput) {
    const auto r = run_cli("classify --c 2.5");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "v,y,phi");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, pqfront::ShootSettings{}.grid_points);
    const auto j = json::parse(run_cli("classify --c 2.5 --format json").out);
    EXPECT_EQ(j["result"]["classification"], "admissible");
}

TEST(Cli, JsonEchoesConfig) {
    const auto r = run_cli("bounds --format json --p 4 --q 3 --Lplus 6 --L0 6");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["command"], "bounds");
    EXPECT_EQ(j["config"]["operator"]["p"], 4.0);
    EXPECT_NEAR(j["result"]["upper_analytic"].get<double>(), 10.0, 1e-12);
}

TEST(Cli, Deterministic) {
    const std::string args = "sweep --set sweep.p=3,4 --set sweep.q=2 --set sweep.c=1,2.5 --set sweep.task=classify";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto ja = run_cli("critical-speed --format json");
    const auto jb = run_cli("critical-speed --format json");
    EXPECT_EQ(ja.out, jb.out);
}

TEST(Cli, EmptySweep) {
    const auto r = run_cli("sweep");
    EXPECT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 1);
}

TEST(Cli, SweepIsolatesRowErrors) {
    const auto r = run_cli("sweep --set sweep.p=2,4 --set sweep.q=3 --set sweep.task=bounds --set reaction.family=power_logistic --set reaction.gamma=matched");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(",error,"), std::string::npos);
    EXPECT_NE(r.out.find(",ok,"), std::string::npos);
}

TEST(Cli, OutDirectoryWithManifest) {
    const auto dir = std::filesystem::temp_directory_path() / "pqfront_cli_out";
    std::filesystem::remove_all(dir);
    const auto r = run_cli("figure 1 --out " + dir.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "figure1.csv"));
    std::ifstream in(dir / "manifest.json");
    const auto m = json::parse(in);
    EXPECT_TRUE(m.contains("config"));
    EXPECT_TRUE(m.contains("files"));
    std::filesystem::remove_all(dir);
}

TEST(Cli, FiguresFourAndFive) {
    const auto f4 = run_cli("figure 4 --format json");
    ASSERT_EQ(f4.code, 0);
    const auto j4 = json::parse(f4.out);
    EXPECT_LT(j4["result"]["shoot"]["max_y"].get<double>(), 1.0 / 12.0);
    const auto f5 = run_cli("figure 5 --format json");
    const auto j5 = json::parse(f5.out);
    EXPECT_EQ(j5["result"]["shoot"]["classification"], "domain_breach");
    EXPECT_TRUE(j5["result"]["window"].is_null());
}
