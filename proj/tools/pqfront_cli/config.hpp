#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqfront/pqfront.hpp"

namespace pqcli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OperatorBlock {
    pqfront::OperatorMode mode = pqfront::OperatorMode::cooperative;
    double p = 4.0;
    double q = 2.0;
};

struct ReactionBlock {
    pqfront::ReactionFamily family = pqfront::ReactionFamily::classical_logistic;
    double amplitude = 1.0;
    double gamma = 1.0;
    bool gamma_matched = false;  ///< gamma = q' - 1
    double H = 1.0;
    std::string table;
};

struct BoundsBlock {
    std::optional<double> L0;
    std::optional<double> Lplus;
};

struct SimulateBlock {
    pqfront::GridSpec grid{};
    std::string initial = "step";  ///< step | profile
    std::optional<double> c;       ///< profile speed; default c* + 0.5
    double x0 = 0.0;
};

struct SweepBlock {
    std::vector<double> p;
    std::vector<double> q;
    std::vector<double> c;
    std::vector<double> L;
    std::string task = "critical_speed";  ///< bounds | critical_speed | classify
    std::size_t threads = 0;
};

struct RunConfig {
    OperatorBlock op;
    ReactionBlock reaction;
    pqfront::ShootSettings solver;
    BoundsBlock bounds;
    std::optional<double> c;  ///< [shoot] c
    pqfront::ProfileOptions profile;
    SimulateBlock simulate;
    pqfront::WindowScanOptions window;
    SweepBlock sweep;
};

/// Flat "section.key" -> raw value map, in file order of precedence.
using RawConfig = std::map<std::string, std::string>;

/// Reads an INI file with sections; `;` and `#` start comments.
RawConfig read_ini(const std::filesystem::path& path);

/// Splits "section.key=value".
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Applies raw values on top of defaults. Unknown keys and malformed values throw ConfigError.
RunConfig resolve(const RawConfig& raw);

/// Every key the parser accepts.
const std::vector<std::string>& known_keys();

nlohmann::json to_json(const RunConfig& cfg);

pqfront::OperatorSpec make_operator(const OperatorBlock& op);
pqfront::ReactionSpec make_reaction(const ReactionBlock& r, const pqfront::OperatorSpec& op);

}  // namespace pqcli
