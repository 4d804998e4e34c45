#pragma once

#include "flashsim/commands.hpp"
#include "flashsim/models.hpp"
#include "flashsim/policy.hpp"
#include "flashsim/topology.hpp"

#include <string_view>

namespace flashsim {

/// Everything a simulation needs besides the trace.
struct Config {
    Geometry geometry;
    CommandSet supported;
    ModelSet models = ModelSet::defaults();
    Policy policy;
};

/// Parses and fully validates a JSON configuration document; see
/// docs/formats.md for the schema. Throws Error with the offending key path
/// in the message (MissingSection, UnknownKey, BadValue, SyntaxError,
/// UnknownIdentifier, ZeroDimension, Overflow).
Config parse_config(std::string_view text);

}  // namespace flashsim
