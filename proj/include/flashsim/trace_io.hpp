#pragma once

#include "flashsim/commands.hpp"
#include "flashsim/topology.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace flashsim {

inline constexpr std::string_view kTraceHeader = "flashsim-trace v1";

enum class TraceErrorKind : std::uint8_t { BadHeader, FieldCount, BadNumber, UnknownKind, AddressRange };

std::string_view to_string(TraceErrorKind kind);

struct TraceDiagnostic {
    std::size_t line = 0;
    TraceErrorKind kind = TraceErrorKind::FieldCount;
    std::string message;
};

struct TraceParseResult {
    std::vector<Command> commands;  ///< ordered by (arrival, line order)
    std::vector<TraceDiagnostic> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Parses a "flashsim-trace v1" stream. Every malformed line is reported
/// once; commands are only meaningful when errors is empty.
TraceParseResult parse_trace(std::istream& in, const Geometry& g);
TraceParseResult parse_trace(std::string_view text, const Geometry& g);

/// Writes commands back in trace syntax, in sequence_id order, with
/// hierarchical addresses.
void write_trace(std::ostream& out, std::span<const Command> commands);

/// Arrival times are decimal microseconds with at most three fractional digits.
std::optional<TimeNs> parse_time_us(std::string_view text);
std::string format_time_us(TimeNs ns);

}  // namespace flashsim
