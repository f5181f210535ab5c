#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qm {

using ojson = nlohmann::ordered_json;

// Serialized numeric evidence. Key order of the JSON form is fixed:
// check, perLevel, verdict, fit, then anything in `extra`.
struct Report {
    std::string check;
    std::vector<ojson> perLevel;  // each entry starts with "m" and "residual"
    bool pass = true;
    ojson fit = ojson::object();
    ojson extra = ojson::object();

    std::string verdict() const { return pass ? "PASS" : "FAIL"; }
    ojson to_json() const;
    // Helper that keeps "m" and "residual" first.
    ojson& add_level(int m, double residual);
};

// JSON text with doubles printed as %.17g and the object order preserved.
std::string dump_json(const ojson& j, int indent = 2);

// Validation against the report schema shipped with the repository.
struct SchemaResult {
    bool ok = true;
    std::vector<std::string> errors;  // "path: message"
};
SchemaResult validate_report_text(const std::string& text);
SchemaResult validate_against(const nlohmann::json& schema, const nlohmann::json& doc);
const std::string& report_schema_text();

}  // namespace qm
