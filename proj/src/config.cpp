#include "flashsim/config.hpp"

#include "flashsim/error.hpp"

#include <json.hpp>

#include <limits>
#include <set>

namespace flashsim {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(ErrorCode code, const std::string& path, const std::string& what)
{
    throw Error(code, path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known)
{
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            fail(ErrorCode::UnknownKey, path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

const json& require_object(const json& parent, const std::string& key, const std::string& path)
{
    if (!parent.contains(key)) fail(ErrorCode::MissingSection, path, "missing required section");
    const json& v = parent.at(key);
    if (!v.is_object()) fail(ErrorCode::BadValue, path, "expected an object");
    return v;
}

std::uint64_t unsigned_value(const json& v, const std::string& path, std::uint64_t max)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        fail(ErrorCode::BadValue, path, "expected a non-negative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (n > max) fail(ErrorCode::BadValue, path, "value too large");
    return n;
}

bool bool_value(const json& v, const std::string& path)
{
    if (!v.is_boolean()) fail(ErrorCode::BadValue, path, "expected true or false");
    return v.get<bool>();
}

Geometry parse_geometry(const json& root)
{
    const json& g = require_object(root, "geometry", "geometry");
    static const std::vector<std::string> keys = {
        "channels",         "chips_per_channel", "dies_per_chip", "planes_per_die",
        "blocks_per_plane", "pages_per_block",   "page_size",     "oob_size"};
    reject_unknown(g, "geometry", {keys.begin(), keys.end()});
    std::array<std::uint32_t, 8> v{};
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const std::string path = "geometry." + keys[i];
        if (!g.contains(keys[i])) fail(ErrorCode::MissingSection, path, "missing required key");
        v[i] = static_cast<std::uint32_t>(
            unsigned_value(g.at(keys[i]), path, std::numeric_limits<std::uint32_t>::max()));
    }
    Geometry geo{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    try {
        validate_geometry(geo);
    } catch (const Error& e) {
        fail(e.code(), "geometry", e.what());
    }
    return geo;
}

CommandSet parse_supported(const json& root)
{
    if (!root.contains("supported_commands")) {
        fail(ErrorCode::MissingSection, "supported_commands", "missing required section");
    }
    const json& list = root.at("supported_commands");
    if (!list.is_array()) fail(ErrorCode::BadValue, "supported_commands", "expected a list of names");
    CommandSet set;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "supported_commands[" + std::to_string(i) + "]";
        if (!list[i].is_string()) fail(ErrorCode::BadValue, path, "expected a command name");
        const auto kind = command_kind_from_string(list[i].get<std::string>());
        if (!kind) fail(ErrorCode::BadValue, path, "unknown command '" + list[i].get<std::string>() + "'");
        set.insert(*kind);
    }
    return set;
}

Binding parse_binding(const json& v, const std::string& path, std::string_view parameter,
                      VariableSet vars)
{
    if (v.is_number()) {
        const double d = v.get<double>();
        if (d < 0.0) fail(ErrorCode::BadValue, path, "parameter must be non-negative");
        return BuiltIn{d};
    }
    if (v.is_string()) {
        try {
            return Expression::parse(v.get<std::string>(), vars);
        } catch (const Error& e) {
            fail(e.code(), path, e.what());
        }
    }
    if (v.is_object()) {
        reject_unknown(v, path, {std::string(parameter)});
        if (!v.contains(std::string(parameter))) {
            fail(ErrorCode::MissingSection, path + "." + std::string(parameter), "missing parameter");
        }
        return parse_binding(v.at(std::string(parameter)), path + "." + std::string(parameter),
                             parameter, vars);
    }
    fail(ErrorCode::BadValue, path, "expected a number, an expression string or a parameter table");
}

void parse_models(const json& root, ModelSet& models)
{
    for (const std::string section : {"performance", "power"}) {
        if (!root.contains(section)) continue;
        const json& obj = require_object(root, section, section);
        for (const auto& [key, value] : obj.items()) {
            const std::string path = section + "." + key;
            const auto kind = event_kind_from_string(key);
            if (!kind) fail(ErrorCode::UnknownKey, path, "unknown event kind");
            if (section == "performance") {
                models.set_latency(*kind, parse_binding(value, path, latency_parameter_name(*kind),
                                                        latency_variables()));
            } else {
                models.set_power(*kind, parse_binding(value, path, power_parameter_name(*kind),
                                                      power_variables()));
            }
        }
    }
    if (root.contains("idle_power")) {
        const json& obj = require_object(root, "idle_power", "idle_power");
        reject_unknown(obj, "idle_power", {"array", "bus"});
        if (obj.contains("array")) {
            models.set_idle(IdleClass::Array,
                            parse_binding(obj.at("array"), "idle_power.array", "p_idle", idle_variables()));
        }
        if (obj.contains("bus")) {
            models.set_idle(IdleClass::Bus,
                            parse_binding(obj.at("bus"), "idle_power.bus", "p_idle", idle_variables()));
        }
    }
}

Policy parse_policy(const json& root)
{
    Policy p;
    if (!root.contains("policy")) return p;
    const json& obj = require_object(root, "policy", "policy");
    reject_unknown(obj, "policy",
                   {"violation_severity", "endurance_limit", "die_serialization",
                    "cmd_overhead_on_bus", "preload_written", "multi_plane_same_offset"});
    if (obj.contains("violation_severity")) {
        const json& v = obj.at("violation_severity");
        const std::string s = v.is_string() ? v.get<std::string>() : "";
        if (s == "warning") {
            p.violation_severity = Severity::Warning;
        } else if (s == "error") {
            p.violation_severity = Severity::Error;
        } else {
            fail(ErrorCode::BadValue, "policy.violation_severity", "expected \"warning\" or \"error\"");
        }
    }
    if (obj.contains("endurance_limit") && !obj.at("endurance_limit").is_null()) {
        p.endurance_limit = unsigned_value(obj.at("endurance_limit"), "policy.endurance_limit",
                                           std::numeric_limits<std::uint64_t>::max());
    }
    if (obj.contains("die_serialization")) {
        p.die_serialization = bool_value(obj.at("die_serialization"), "policy.die_serialization");
    }
    if (obj.contains("cmd_overhead_on_bus")) {
        p.cmd_overhead_on_bus = bool_value(obj.at("cmd_overhead_on_bus"), "policy.cmd_overhead_on_bus");
    }
    if (obj.contains("preload_written")) {
        p.preload_written = bool_value(obj.at("preload_written"), "policy.preload_written");
    }
    if (obj.contains("multi_plane_same_offset")) {
        p.multi_plane_same_offset =
            bool_value(obj.at("multi_plane_same_offset"), "policy.multi_plane_same_offset");
    }
    return p;
}

}  // namespace

Config parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::BadValue, std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw Error(ErrorCode::BadValue, "config must be a JSON object");
    reject_unknown(root, "",
                   {"geometry", "supported_commands", "performance", "power", "idle_power", "policy"});

    Config cfg;
    cfg.geometry = parse_geometry(root);
    cfg.supported = parse_supported(root);
    parse_models(root, cfg.models);
    cfg.policy = parse_policy(root);
    return cfg;
}

}  // namespace flashsim
