#pragma once

#include "flashsim/policy.hpp"
#include "flashsim/resources.hpp"
#include "flashsim/topology.hpp"

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flashsim {

/// Simulated time in integer nanoseconds.
using TimeNs = std::int64_t;

enum class CommandKind : std::uint8_t {
    Read,
    Write,
    Erase,
    CopyBack,
    CacheRead,
    CacheWrite,
    MultiPlaneRead,
    MultiPlaneWrite,
    MultiPlaneErase,
    InterleavedRead,
    InterleavedWrite,
    InterleavedErase,
    MultiPlaneCopyBack,
};

inline constexpr std::size_t kCommandKindCount = 13;

inline constexpr std::array<CommandKind, kCommandKindCount> kAllCommandKinds = {
    CommandKind::Read,           CommandKind::Write,            CommandKind::Erase,
    CommandKind::CopyBack,       CommandKind::CacheRead,        CommandKind::CacheWrite,
    CommandKind::MultiPlaneRead, CommandKind::MultiPlaneWrite,  CommandKind::MultiPlaneErase,
    CommandKind::InterleavedRead, CommandKind::InterleavedWrite, CommandKind::InterleavedErase,
    CommandKind::MultiPlaneCopyBack,
};

/// Trace/config spelling, e.g. "copy_back".
std::string_view to_string(CommandKind kind);
std::optional<CommandKind> command_kind_from_string(std::string_view name);

bool is_multi_plane(CommandKind kind) noexcept;
bool is_interleaved(CommandKind kind) noexcept;
bool is_copy_back(CommandKind kind) noexcept;
bool is_cache(CommandKind kind) noexcept;

class CommandSet {
public:
    CommandSet() = default;
    CommandSet(std::initializer_list<CommandKind> kinds);

    static CommandSet legacy();
    static CommandSet all();

    void insert(CommandKind k) { bits_.set(static_cast<std::size_t>(k)); }
    bool contains(CommandKind k) const { return bits_.test(static_cast<std::size_t>(k)); }

    friend bool operator==(const CommandSet&, const CommandSet&) = default;

private:
    std::bitset<kCommandKindCount> bits_;
};

/// One trace entry.
///
/// `targets` holds the single address of legacy and cache commands, one
/// address per plane/die for parallel commands, and the source pages of
/// copy-back commands. `destinations` is used by copy-back kinds only.
struct Command {
    TimeNs arrival = 0;
    CommandKind kind = CommandKind::Read;
    std::vector<FlashAddress> targets;
    std::vector<FlashAddress> destinations;
    std::uint32_t page_count = 1;  ///< cache ops only
    std::uint64_t sequence_id = 0;
    std::size_t line = 0;          ///< source line, 0 when not read from a file

    // line is diagnostic metadata and does not take part in equality
    friend bool operator==(const Command& a, const Command& b)
    {
        return a.arrival == b.arrival && a.kind == b.kind && a.targets == b.targets &&
               a.destinations == b.destinations && a.page_count == b.page_count &&
               a.sequence_id == b.sequence_id;
    }
};

enum class EventKind : std::uint8_t {
    CmdOverhead,
    ArraySense,
    ArrayProgram,
    BlockErase,
    BusTransferIn,
    BusTransferOut,
    BufferCopy,
};

inline constexpr std::size_t kEventKindCount = 7;

inline constexpr std::array<EventKind, kEventKindCount> kAllEventKinds = {
    EventKind::CmdOverhead,   EventKind::ArraySense,     EventKind::ArrayProgram,
    EventKind::BlockErase,    EventKind::BusTransferIn,  EventKind::BusTransferOut,
    EventKind::BufferCopy,
};

/// Config spelling, e.g. "array_sense".
std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

using EventId = std::uint32_t;

/// A primitive hardware activity. Ids are positions in the command's event list.
struct FlashEvent {
    EventKind kind = EventKind::CmdOverhead;
    FlashAddress target;
    std::uint64_t byte_count = 0;          ///< bus transfers only
    std::optional<ResourceId> resource;    ///< empty: occupies nothing
    std::vector<EventId> depends_on;       ///< ids of earlier events, same command

    friend bool operator==(const FlashEvent&, const FlashEvent&) = default;
};

enum class Rule : std::uint8_t {
    UnsupportedCommand,
    AddressRange,
    MalformedCommand,
    CacheExtent,
    CopyBackCrossPlane,
    CopyBackParity,
    MultiPlaneShape,
    InterleaveShape,
    EraseBeforeWrite,
    EnduranceExceeded,
};

std::string_view to_string(Rule rule);

/// Hard rules make a command impossible to simulate and are always errors.
/// The others are constraint violations whose severity comes from the policy.
bool is_hard_rule(Rule rule) noexcept;

struct Finding {
    Rule rule = Rule::MalformedCommand;
    Severity severity = Severity::Warning;
    std::uint64_t sequence_id = 0;
    std::size_t line = 0;
    std::string message;
};

/// Structural validation of one command. Checks run in order: supported
/// kind, operand shape and address range, kind-specific rules, then
/// erase-before-write against `state` when one is given. Returns early after
/// the first failing hard check.
std::vector<Finding> validate(const Command& cmd, const Geometry& g, const CommandSet& supported,
                              const Policy& policy, const FlashState* state = nullptr);

/// Page and block state changes a command implies, applied to `state`.
/// Returns EraseBeforeWrite / EnduranceExceeded findings.
std::vector<Finding> apply_state_changes(const Command& cmd, FlashState& state,
                                         const Policy& policy);

/// Runs validate() then apply_state_changes() over a whole trace in order.
/// State changes of a command with a hard finding are skipped.
std::vector<Finding> check_commands(std::span<const Command> trace, const Geometry& g,
                                    const CommandSet& supported, const Policy& policy);

/// Expands a validated command into its event DAG.
std::vector<FlashEvent> decompose(const Command& cmd, const Geometry& g,
                                  const ResourceMap& resources, bool cmd_overhead_on_bus = false);

}  // namespace flashsim
