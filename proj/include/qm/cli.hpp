#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qm/report.hpp"

namespace qm {

// Everything a subcommand needs. Defaults are echoed into every output.
struct RunConfig {
    std::string preset = "cp1";
    std::string model;          // file path or inline JSON; overrides preset
    int mMin = 1;
    int mMax = 8;
    std::map<std::string, double> tol;  // overrides of the named thresholds
    int samples = 20000;
    uint64_t seed = 42;
    std::string out;
    std::string format = "json";

    std::string check = "all";  // shifts
    std::string bundle = "line:1";
    std::string quotient;       // file path or inline JSON
    std::string e, f;           // stability
    std::string symbol;         // toeplitz
    int grid = 100;             // cd-scan
    int points = 20;            // szego, ym probe
    std::string file;           // validate

    double tolerance(const std::string& name) const;
    ojson to_json() const;
};

// Named thresholds and their defaults.
const std::map<std::string, double>& default_tolerances();

// JSON text with // and /* */ comments. ParseError messages carry
// "line L, column C".
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

// Config file contents applied on top of `base`.
RunConfig config_from_json(const std::string& text, RunConfig base = {});

// "A..B" or "A".
std::pair<int, int> parse_m_range(const std::string& text);

// Exit codes: 0 all verdicts PASS, 1 some FAIL (or invalid report),
// 2 parse or configuration error, 3 any other error.
int run(const std::string& subcommand, const RunConfig& config, std::ostream& out, std::ostream& err);

const std::vector<std::string>& subcommands();

}  // namespace qm
