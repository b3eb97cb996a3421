#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace pqcli {

enum ExitCode : int { ok = 0, usage = 1, numerical = 2, breach = 3 };

struct Invocation {
    RunConfig cfg;
    std::string format = "csv";  ///< csv | json
    std::optional<std::filesystem::path> out;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// What a command produced. With --out everything goes to files (the main
/// table or record, extra tables and manifest.json); otherwise the main
/// table (csv) or the full record (json) goes to the stream.
struct Output {
    std::string name;
    nlohmann::json record;
    CsvTable table;
    std::vector<std::pair<std::string, CsvTable>> extra;
    int code = ExitCode::ok;
};

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_number(double v);

void write_csv(std::ostream& os, const CsvTable& t);
void emit(const Invocation& inv, const Output& out, std::ostream& os);

Output cmd_bounds(const Invocation& inv);
Output cmd_classify(const Invocation& inv);
Output cmd_critical_speed(const Invocation& inv);
Output cmd_profile(const Invocation& inv);
Output cmd_simulate(const Invocation& inv);
Output cmd_figure(const Invocation& inv, int figure_id);
Output cmd_sweep(const Invocation& inv);

}  // namespace pqcli
