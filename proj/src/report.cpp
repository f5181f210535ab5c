#include "qm/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "report_schema.inc"

namespace qm {

ojson Report::to_json() const {
    ojson j;
    j["check"] = check;
    j["perLevel"] = ojson::array();
    for (auto& e : perLevel) j["perLevel"].push_back(e);
    j["verdict"] = verdict();
    j["fit"] = fit;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

ojson& Report::add_level(int m, double residual) {
    ojson e;
    e["m"] = m;
    e["residual"] = residual;
    perLevel.push_back(e);
    return perLevel.back();
}

static void put_string(std::ostringstream& os, const std::string& s) {
    os << ojson(s).dump();
}

static void dump_rec(std::ostringstream& os, const ojson& j, int indent, int depth) {
    auto nl = [&](int d) {
        if (indent > 0) {
            os << '\n' << std::string(size_t(indent * d), ' ');
        }
    };
    switch (j.type()) {
        case ojson::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                nl(depth + 1);
                put_string(os, it.key());
                os << (indent > 0 ? ": " : ":");
                dump_rec(os, it.value(), indent, depth + 1);
            }
            nl(depth);
            os << '}';
            return;
        }
        case ojson::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[';
            bool first = true;
            for (auto& v : j) {
                if (!first) os << ',';
                first = false;
                nl(depth + 1);
                dump_rec(os, v, indent, depth + 1);
            }
            nl(depth);
            os << ']';
            return;
        }
        case ojson::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s(buf);
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            os << s;
            return;
        }
        default:
            os << j.dump();
    }
}

std::string dump_json(const ojson& j, int indent) {
    std::ostringstream os;
    dump_rec(os, j, indent, 0);
    os << '\n';
    return os.str();
}

const std::string& report_schema_text() {
    static const std::string s(kReportSchema);
    return s;
}

// A validator for the subset of JSON Schema used by the shipped schema:
// type, required, properties, additionalProperties (bool), items, enum,
// minimum, minItems, and $ref to #/definitions/*.
namespace {

using nlohmann::json;

bool type_ok(const std::string& t, const json& d) {
    if (t == "object") return d.is_object();
    if (t == "array") return d.is_array();
    if (t == "string") return d.is_string();
    if (t == "integer") return d.is_number_integer();
    if (t == "number") return d.is_number();
    if (t == "boolean") return d.is_boolean();
    if (t == "null") return d.is_null();
    return false;
}

void check(const json& root, const json& s, const json& d, const std::string& path,
           std::vector<std::string>& errs) {
    if (s.contains("$ref")) {
        std::string ref = s.at("$ref").get<std::string>();
        const std::string pre = "#/definitions/";
        if (ref.compare(0, pre.size(), pre) != 0) {
            errs.push_back(path + ": unsupported $ref " + ref);
            return;
        }
        check(root, root.at("definitions").at(ref.substr(pre.size())), d, path, errs);
        return;
    }
    if (s.contains("type")) {
        const json& t = s.at("type");
        bool ok = false;
        if (t.is_string()) {
            ok = type_ok(t.get<std::string>(), d);
        } else {
            for (auto& x : t) ok = ok || type_ok(x.get<std::string>(), d);
        }
        if (!ok) {
            errs.push_back(path + ": expected type " + t.dump() + ", got " + d.type_name());
            return;
        }
    }
    if (s.contains("enum")) {
        bool hit = false;
        for (auto& v : s.at("enum")) hit = hit || v == d;
        if (!hit) errs.push_back(path + ": value " + d.dump() + " not in " + s.at("enum").dump());
    }
    if (s.contains("minimum") && d.is_number() && d.get<double>() < s.at("minimum").get<double>())
        errs.push_back(path + ": below minimum");
    if (d.is_object()) {
        if (s.contains("required"))
            for (auto& r : s.at("required"))
                if (!d.contains(r.get<std::string>()))
                    errs.push_back(path + ": missing required key \"" + r.get<std::string>() + "\"");
        const json* props = s.contains("properties") ? &s.at("properties") : nullptr;
        for (auto it = d.begin(); it != d.end(); ++it) {
            std::string sub = path + "/" + it.key();
            if (props && props->contains(it.key())) {
                check(root, props->at(it.key()), it.value(), sub, errs);
            } else if (s.contains("additionalProperties")) {
                const json& ap = s.at("additionalProperties");
                if (ap.is_boolean() && !ap.get<bool>())
                    errs.push_back(sub + ": unexpected key");
                else if (ap.is_object())
                    check(root, ap, it.value(), sub, errs);
            }
        }
    }
    if (d.is_array()) {
        if (s.contains("minItems") && d.size() < s.at("minItems").get<size_t>())
            errs.push_back(path + ": too few items");
        if (s.contains("items"))
            for (size_t i = 0; i < d.size(); ++i)
                check(root, s.at("items"), d[i], path + "/" + std::to_string(i), errs);
    }
}

}  // namespace

SchemaResult validate_against(const nlohmann::json& schema, const nlohmann::json& doc) {
    SchemaResult r;
    check(schema, schema, doc, "", r.errors);
    for (auto& e : r.errors)
        if (!e.empty() && e[0] == ':') e = "/" + e;
    r.ok = r.errors.empty();
    return r;
}

SchemaResult validate_report_text(const std::string& text) {
    SchemaResult r;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        r.ok = false;
        r.errors.push_back(std::string("/: not valid JSON (") + e.what() + ")");
        return r;
    }
    static const nlohmann::json schema = nlohmann::json::parse(report_schema_text());
    return validate_against(schema, doc);
}

}  // namespace qm
