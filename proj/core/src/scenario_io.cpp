#include "freefront/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "freefront/errors.hpp"

namespace freefront {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) throw SchemaError("unknown key \"" + path + key + "\"");
    }
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw SchemaError("missing key \"" + path + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number()) throw SchemaError("\"" + path + key + "\" must be a number");
    return v.get<double>();
}

FieldSpec parse_field(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw SchemaError("\"" + path + "\" must be an object");
    if (obj.contains("formula") && !obj.contains("kind")) {
        reject_unknown_keys(obj, {"formula"}, path + ".");
        const json& f = obj.at("formula");
        if (!f.is_string()) throw SchemaError("\"" + path + ".formula\" must be a string");
        return FieldSpec::from_formula(f.get<std::string>());
    }
    if (!obj.contains("kind")) throw SchemaError("\"" + path + "\" needs \"kind\" or \"formula\"");
    const json& kind = obj.at("kind");
    if (!kind.is_string()) throw SchemaError("\"" + path + ".kind\" must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "constant") {
        reject_unknown_keys(obj, {"kind", "value"}, path + ".");
        return FieldSpec::constant(require_number(obj, "value", path + "."));
    }
    if (k == "affine_t") {
        reject_unknown_keys(obj, {"kind", "a0", "a1"}, path + ".");
        return FieldSpec::affine(require_number(obj, "a0", path + "."),
                                 require_number(obj, "a1", path + "."));
    }
    if (k == "gauss_band") {
        reject_unknown_keys(obj, {"kind", "a0", "a1", "gamma0"}, path + ".");
        const double a0 = require_number(obj, "a0", path + ".");
        const double a1 = obj.contains("a1") ? require_number(obj, "a1", path + ".") : 0.0;
        const double gamma0 = require_number(obj, "gamma0", path + ".");
        if (!(gamma0 > 0.0))
            throw SchemaError("\"" + path + ".gamma0\" must be > 0 for a gauss band");
        return FieldSpec::gauss_band(a0, a1, gamma0);
    }
    if (k == "expression" || k == "formula") {
        reject_unknown_keys(obj, {"kind", "formula"}, path + ".");
        if (!obj.contains("formula") || !obj.at("formula").is_string())
            throw SchemaError("\"" + path + ".formula\" must be a string");
        return FieldSpec::from_formula(obj.at("formula").get<std::string>());
    }
    throw SchemaError("\"" + path + ".kind\" must be one of constant, affine_t, gauss_band, "
                      "expression; got \"" +
                      k + "\"");
}

json field_to_json(const FieldSpec& f) {
    json obj;
    switch (f.kind) {
        case FieldKind::constant:
            obj["kind"] = "constant";
            obj["value"] = f.value;
            break;
        case FieldKind::affine_t:
            obj["kind"] = "affine_t";
            obj["a0"] = f.a0;
            obj["a1"] = f.a1;
            break;
        case FieldKind::gauss_band:
            obj["kind"] = "gauss_band";
            obj["a0"] = f.a0;
            obj["a1"] = f.a1;
            obj["gamma0"] = f.gamma0;
            break;
        case FieldKind::expression:
            obj["formula"] = f.formula_text;
            break;
    }
    return obj;
}

DeclaredBounds parse_bounds(const json& obj) {
    if (!obj.is_object()) throw SchemaError("\"bounds\" must be an object");
    reject_unknown_keys(obj, {"u_lip", "u0_max", "gamma_max", "c_gamma", "eta_star"}, "bounds.");
    DeclaredBounds b;
    auto grab = [&](const char* key, std::optional<double>& slot) {
        if (obj.contains(key)) slot = require_number(obj, key, "bounds.");
    };
    grab("u_lip", b.u_lip);
    grab("u0_max", b.u0_max);
    grab("gamma_max", b.gamma_max);
    grab("c_gamma", b.c_gamma);
    grab("eta_star", b.eta_star);
    return b;
}

}  // namespace

Scenario parse_scenario_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("scenario must be a JSON object");
    reject_unknown_keys(doc, {"gamma", "velocity", "gamma_star", "L0", "T", "X_max", "bounds"},
                        "");
    if (!doc.contains("gamma")) throw SchemaError("missing key \"gamma\"");
    if (!doc.contains("velocity")) throw SchemaError("missing key \"velocity\"");

    Scenario sc;
    sc.gamma = parse_field(doc.at("gamma"), "gamma");
    sc.velocity = parse_field(doc.at("velocity"), "velocity");
    sc.gamma_star = require_number(doc, "gamma_star", "");
    sc.L0 = require_number(doc, "L0", "");
    sc.T = require_number(doc, "T", "");
    sc.X_max = require_number(doc, "X_max", "");
    if (doc.contains("bounds")) sc.declared = parse_bounds(doc.at("bounds"));
    sc.check_shape();
    return sc;
}

Scenario read_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
    json doc;
    doc["gamma"] = field_to_json(sc.gamma);
    doc["velocity"] = field_to_json(sc.velocity);
    doc["gamma_star"] = sc.gamma_star;
    doc["L0"] = sc.L0;
    doc["T"] = sc.T;
    doc["X_max"] = sc.X_max;
    if (sc.declared) {
        json b = json::object();
        if (sc.declared->u_lip) b["u_lip"] = *sc.declared->u_lip;
        if (sc.declared->u0_max) b["u0_max"] = *sc.declared->u0_max;
        if (sc.declared->gamma_max) b["gamma_max"] = *sc.declared->gamma_max;
        if (sc.declared->c_gamma) b["c_gamma"] = *sc.declared->c_gamma;
        if (sc.declared->eta_star) b["eta_star"] = *sc.declared->eta_star;
        doc["bounds"] = b;
    }
    return doc.dump(2) + "\n";
}

}  // namespace freefront
