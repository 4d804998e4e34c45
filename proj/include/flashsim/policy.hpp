#pragma once

#include <cstdint>
#include <optional>

namespace flashsim {

enum class Severity : std::uint8_t { Warning, Error };

/// Run-time switches that are not part of the structural or timing models.
struct Policy {
    /// Severity given to constraint violations (erase-before-write, endurance,
    /// copy-back and parallel-command shape rules).
    Severity violation_severity = Severity::Warning;
    std::optional<std::uint64_t> endurance_limit;
    /// Collapse all planes of a die onto one array resource.
    bool die_serialization = false;
    /// Make the per-command overhead event occupy the command's channel bus.
    bool cmd_overhead_on_bus = false;
    /// Start with every page Written instead of Erased.
    bool preload_written = false;
    /// Multi-plane operands must share (block, page) offsets.
    bool multi_plane_same_offset = true;
};

}  // namespace flashsim
