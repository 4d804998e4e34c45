#include "flashsim/commands.hpp"

#include <algorithm>
#include <set>

namespace flashsim {

namespace {

constexpr std::array<std::string_view, kCommandKindCount> kCommandNames = {
    "read",
    "write",
    "erase",
    "copy_back",
    "cache_read",
    "cache_write",
    "multi_plane_read",
    "multi_plane_write",
    "multi_plane_erase",
    "interleaved_read",
    "interleaved_write",
    "interleaved_erase",
    "multi_plane_copy_back",
};

constexpr std::array<std::string_view, kEventKindCount> kEventNames = {
    "cmd_overhead",    "array_sense",      "array_program", "block_erase",
    "bus_transfer_in", "bus_transfer_out", "buffer_copy",
};

bool is_write_like(CommandKind k)
{
    return k == CommandKind::Write || k == CommandKind::CacheWrite ||
           k == CommandKind::MultiPlaneWrite || k == CommandKind::InterleavedWrite;
}

bool is_erase_like(CommandKind k)
{
    return k == CommandKind::Erase || k == CommandKind::MultiPlaneErase ||
           k == CommandKind::InterleavedErase;
}

class FindingSink {
public:
    FindingSink(const Command& cmd, const Policy& policy, std::vector<Finding>& out)
        : cmd_(cmd), policy_(policy), out_(out) {}

    void add(Rule rule, std::string message)
    {
        Finding f;
        f.rule = rule;
        f.severity = is_hard_rule(rule) ? Severity::Error : policy_.violation_severity;
        f.sequence_id = cmd_.sequence_id;
        f.line = cmd_.line;
        f.message = std::string(to_string(cmd_.kind)) + ": " + std::move(message);
        out_.push_back(std::move(f));
    }

private:
    const Command& cmd_;
    const Policy& policy_;
    std::vector<Finding>& out_;
};

bool check_operand_shape(const Command& cmd, FindingSink& sink)
{
    const std::size_t n = cmd.targets.size();
    const std::size_t m = cmd.destinations.size();
    switch (cmd.kind) {
        case CommandKind::Read:
        case CommandKind::Write:
        case CommandKind::Erase:
        case CommandKind::CacheRead:
        case CommandKind::CacheWrite:
            if (n != 1 || m != 0) {
                sink.add(Rule::MalformedCommand, "expects exactly one address");
                return false;
            }
            return true;
        case CommandKind::CopyBack:
            if (n != 1 || m != 1) {
                sink.add(Rule::MalformedCommand, "expects one source and one destination");
                return false;
            }
            return true;
        case CommandKind::MultiPlaneCopyBack:
            if (n == 0 || n != m) {
                sink.add(Rule::MalformedCommand, "expects equal, non-empty source and destination lists");
                return false;
            }
            return true;
        default:
            if (n == 0 || m != 0) {
                sink.add(Rule::MalformedCommand, "expects a non-empty address list");
                return false;
            }
            return true;
    }
}

void check_copy_back_pair(const FlashAddress& src, const FlashAddress& dst, FindingSink& sink)
{
    if (!same_plane(src, dst)) {
        sink.add(Rule::CopyBackCrossPlane,
                 "source " + to_string(src) + " and destination " + to_string(dst) +
                     " are not in the same plane");
    }
    if (src.page % 2 != dst.page % 2) {
        sink.add(Rule::CopyBackParity,
                 "source page " + std::to_string(src.page) + " and destination page " +
                     std::to_string(dst.page) + " must be both odd or both even");
    }
}

void check_multi_plane(const std::vector<FlashAddress>& ops, bool compare_page,
                       const Policy& policy, FindingSink& sink)
{
    if (ops.size() < 2) {
        sink.add(Rule::MultiPlaneShape, "needs at least two planes");
        return;
    }
    std::set<std::uint32_t> planes;
    for (const auto& a : ops) {
        if (!same_die(a, ops.front())) {
            sink.add(Rule::MultiPlaneShape, "operand " + to_string(a) + " is not in the die of " +
                                                to_string(ops.front()));
            return;
        }
        if (!planes.insert(a.plane).second) {
            sink.add(Rule::MultiPlaneShape, "plane " + std::to_string(a.plane) + " named twice");
            return;
        }
        if (policy.multi_plane_same_offset &&
            (a.block != ops.front().block || (compare_page && a.page != ops.front().page))) {
            sink.add(Rule::MultiPlaneShape, "operand " + to_string(a) +
                                                " does not share the offset of " +
                                                to_string(ops.front()));
            return;
        }
    }
}

void check_interleaved(const std::vector<FlashAddress>& ops, FindingSink& sink)
{
    if (ops.size() < 2) {
        sink.add(Rule::InterleaveShape, "needs at least two dies");
        return;
    }
    std::set<std::uint32_t> dies;
    for (const auto& a : ops) {
        if (!same_chip(a, ops.front())) {
            sink.add(Rule::InterleaveShape, "operand " + to_string(a) + " is not in the chip of " +
                                                to_string(ops.front()));
            return;
        }
        if (!dies.insert(a.die).second) {
            sink.add(Rule::InterleaveShape, "die " + std::to_string(a.die) + " named twice");
            return;
        }
    }
}

/// Every page a command programs, in program order.
std::vector<FlashAddress> written_pages(const Command& cmd)
{
    std::vector<FlashAddress> pages;
    if (is_copy_back(cmd.kind)) {
        return cmd.destinations;
    }
    if (!is_write_like(cmd.kind)) {
        return pages;
    }
    if (cmd.kind == CommandKind::CacheWrite) {
        for (std::uint32_t i = 0; i < cmd.page_count; ++i) {
            FlashAddress a = cmd.targets.front();
            a.page += i;
            pages.push_back(a);
        }
        return pages;
    }
    return cmd.targets;
}

}  // namespace

std::string_view to_string(CommandKind kind)
{
    return kCommandNames[static_cast<std::size_t>(kind)];
}

std::optional<CommandKind> command_kind_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kCommandKindCount; ++i) {
        if (kCommandNames[i] == name) return static_cast<CommandKind>(i);
    }
    return std::nullopt;
}

std::string_view to_string(EventKind kind)
{
    return kEventNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> event_kind_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kEventKindCount; ++i) {
        if (kEventNames[i] == name) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

bool is_multi_plane(CommandKind kind) noexcept
{
    return kind == CommandKind::MultiPlaneRead || kind == CommandKind::MultiPlaneWrite ||
           kind == CommandKind::MultiPlaneErase || kind == CommandKind::MultiPlaneCopyBack;
}

bool is_interleaved(CommandKind kind) noexcept
{
    return kind == CommandKind::InterleavedRead || kind == CommandKind::InterleavedWrite ||
           kind == CommandKind::InterleavedErase;
}

bool is_copy_back(CommandKind kind) noexcept
{
    return kind == CommandKind::CopyBack || kind == CommandKind::MultiPlaneCopyBack;
}

bool is_cache(CommandKind kind) noexcept
{
    return kind == CommandKind::CacheRead || kind == CommandKind::CacheWrite;
}

CommandSet::CommandSet(std::initializer_list<CommandKind> kinds)
{
    for (auto k : kinds) insert(k);
}

CommandSet CommandSet::legacy()
{
    return {CommandKind::Read, CommandKind::Write, CommandKind::Erase};
}

CommandSet CommandSet::all()
{
    CommandSet s;
    for (auto k : kAllCommandKinds) s.insert(k);
    return s;
}

std::string_view to_string(Rule rule)
{
    switch (rule) {
        case Rule::UnsupportedCommand: return "UnsupportedCommand";
        case Rule::AddressRange: return "AddressRange";
        case Rule::MalformedCommand: return "MalformedCommand";
        case Rule::CacheExtent: return "CacheExtent";
        case Rule::CopyBackCrossPlane: return "CopyBackCrossPlane";
        case Rule::CopyBackParity: return "CopyBackParity";
        case Rule::MultiPlaneShape: return "MultiPlaneShape";
        case Rule::InterleaveShape: return "InterleaveShape";
        case Rule::EraseBeforeWrite: return "EraseBeforeWrite";
        case Rule::EnduranceExceeded: return "EnduranceExceeded";
    }
    return "Unknown";
}

bool is_hard_rule(Rule rule) noexcept
{
    return rule == Rule::UnsupportedCommand || rule == Rule::AddressRange ||
           rule == Rule::MalformedCommand || rule == Rule::CacheExtent;
}

std::vector<Finding> validate(const Command& cmd, const Geometry& g, const CommandSet& supported,
                              const Policy& policy, const FlashState* state)
{
    std::vector<Finding> out;
    FindingSink sink(cmd, policy, out);

    if (!supported.contains(cmd.kind)) {
        sink.add(Rule::UnsupportedCommand, "not in the supported command set");
        return out;
    }
    if (!check_operand_shape(cmd, sink)) {
        return out;
    }
    bool range_ok = true;
    for (const auto* list : {&cmd.targets, &cmd.destinations}) {
        for (const auto& a : *list) {
            if (!in_range(a, g)) {
                sink.add(Rule::AddressRange, "address " + to_string(a) + " outside the geometry");
                range_ok = false;
            }
        }
    }
    if (!range_ok) {
        return out;
    }

    if (is_cache(cmd.kind)) {
        const auto start = cmd.targets.front().page;
        if (cmd.page_count == 0 || cmd.page_count > g.pages_per_block ||
            std::uint64_t{start} + cmd.page_count > g.pages_per_block) {
            sink.add(Rule::CacheExtent, std::to_string(cmd.page_count) + " pages from page " +
                                            std::to_string(start) + " leave the block (" +
                                            std::to_string(g.pages_per_block) + " pages)");
            return out;
        }
    }

    switch (cmd.kind) {
        case CommandKind::CopyBack:
            check_copy_back_pair(cmd.targets.front(), cmd.destinations.front(), sink);
            break;
        case CommandKind::MultiPlaneCopyBack:
            check_multi_plane(cmd.targets, true, policy, sink);
            check_multi_plane(cmd.destinations, true, policy, sink);
            for (std::size_t i = 0; i < cmd.targets.size(); ++i) {
                check_copy_back_pair(cmd.targets[i], cmd.destinations[i], sink);
            }
            break;
        case CommandKind::MultiPlaneRead:
        case CommandKind::MultiPlaneWrite:
            check_multi_plane(cmd.targets, true, policy, sink);
            break;
        case CommandKind::MultiPlaneErase:
            check_multi_plane(cmd.targets, false, policy, sink);
            break;
        case CommandKind::InterleavedRead:
        case CommandKind::InterleavedWrite:
        case CommandKind::InterleavedErase:
            check_interleaved(cmd.targets, sink);
            break;
        default:
            break;
    }

    if (state != nullptr) {
        for (const auto& p : written_pages(cmd)) {
            if (state->page_status(p) == PageStatus::Written) {
                sink.add(Rule::EraseBeforeWrite, "page " + to_string(p) + " written without an erase");
            }
        }
    }
    return out;
}

std::vector<Finding> apply_state_changes(const Command& cmd, FlashState& state,
                                         const Policy& policy)
{
    std::vector<Finding> out;
    FindingSink sink(cmd, policy, out);
    if (is_erase_like(cmd.kind)) {
        for (const auto& a : cmd.targets) {
            const auto change = state.erase_block(a);
            if (change.warning == StateWarning::EnduranceExceeded) {
                FlashAddress b = a;
                b.page = 0;
                sink.add(Rule::EnduranceExceeded,
                         "block of " + to_string(b) + " erased " + std::to_string(change.erase_count) +
                             " times, endurance limit " + std::to_string(*policy.endurance_limit));
            }
        }
        return out;
    }
    for (const auto& p : written_pages(cmd)) {
        const auto change = state.write_page(p);
        if (change.warning == StateWarning::EraseBeforeWrite) {
            sink.add(Rule::EraseBeforeWrite, "page " + to_string(p) + " written without an erase");
        }
    }
    return out;
}

std::vector<Finding> check_commands(std::span<const Command> trace, const Geometry& g,
                                    const CommandSet& supported, const Policy& policy)
{
    FlashState state(g, policy.endurance_limit,
                     policy.preload_written ? PageStatus::Written : PageStatus::Erased);
    std::vector<Finding> out;
    for (const auto& cmd : trace) {
        auto found = validate(cmd, g, supported, policy, nullptr);
        const bool hard = std::any_of(found.begin(), found.end(),
                                      [](const Finding& f) { return is_hard_rule(f.rule); });
        out.insert(out.end(), std::make_move_iterator(found.begin()),
                   std::make_move_iterator(found.end()));
        if (hard) continue;
        auto changes = apply_state_changes(cmd, state, policy);
        out.insert(out.end(), std::make_move_iterator(changes.begin()),
                   std::make_move_iterator(changes.end()));
    }
    return out;
}

std::vector<FlashEvent> decompose(const Command& cmd, const Geometry& g,
                                  const ResourceMap& resources, bool cmd_overhead_on_bus)
{
    std::vector<FlashEvent> events;
    const FlashAddress& head = cmd.targets.front();

    FlashEvent overhead;
    overhead.kind = EventKind::CmdOverhead;
    overhead.target = head;
    if (cmd_overhead_on_bus) overhead.resource = resources.bus(head.channel);
    events.push_back(overhead);

    auto add = [&](EventKind kind, const FlashAddress& a, std::vector<EventId> deps) {
        FlashEvent e;
        e.kind = kind;
        e.target = a;
        if (kind == EventKind::BusTransferIn || kind == EventKind::BusTransferOut) {
            e.byte_count = g.page_size;
            e.resource = resources.bus(a.channel);
        } else if (kind != EventKind::CmdOverhead) {
            e.resource = resources.array_unit(a);
        }
        e.depends_on = std::move(deps);
        events.push_back(std::move(e));
        return static_cast<EventId>(events.size() - 1);
    };

    switch (cmd.kind) {
        case CommandKind::Read:
        case CommandKind::MultiPlaneRead:
        case CommandKind::InterleavedRead:
            for (const auto& a : cmd.targets) {
                const EventId sense = add(EventKind::ArraySense, a, {0});
                add(EventKind::BusTransferOut, a, {sense});
            }
            break;
        case CommandKind::Write:
        case CommandKind::MultiPlaneWrite:
        case CommandKind::InterleavedWrite:
            for (const auto& a : cmd.targets) {
                const EventId in = add(EventKind::BusTransferIn, a, {0});
                add(EventKind::ArrayProgram, a, {in});
            }
            break;
        case CommandKind::Erase:
        case CommandKind::MultiPlaneErase:
        case CommandKind::InterleavedErase:
            for (const auto& a : cmd.targets) {
                add(EventKind::BlockErase, a, {0});
            }
            break;
        case CommandKind::CopyBack:
        case CommandKind::MultiPlaneCopyBack:
            for (std::size_t i = 0; i < cmd.targets.size(); ++i) {
                const EventId sense = add(EventKind::ArraySense, cmd.targets[i], {0});
                const EventId copy = add(EventKind::BufferCopy, cmd.targets[i], {sense});
                add(EventKind::ArrayProgram, cmd.destinations[i], {copy});
            }
            break;
        case CommandKind::CacheRead: {
            // sense i+1 follows sense i; transfer i follows sense i and transfer i-1
            EventId prev_sense = 0;
            std::optional<EventId> prev_xfer;
            for (std::uint32_t i = 0; i < cmd.page_count; ++i) {
                FlashAddress a = head;
                a.page += i;
                const EventId sense = add(EventKind::ArraySense, a, {prev_sense});
                std::vector<EventId> deps{sense};
                if (prev_xfer) deps.push_back(*prev_xfer);
                prev_xfer = add(EventKind::BusTransferOut, a, std::move(deps));
                prev_sense = sense;
            }
            break;
        }
        case CommandKind::CacheWrite: {
            EventId prev_xfer = 0;
            std::optional<EventId> prev_prog;
            for (std::uint32_t i = 0; i < cmd.page_count; ++i) {
                FlashAddress a = head;
                a.page += i;
                const EventId xfer = add(EventKind::BusTransferIn, a, {prev_xfer});
                std::vector<EventId> deps{xfer};
                if (prev_prog) deps.push_back(*prev_prog);
                prev_prog = add(EventKind::ArrayProgram, a, std::move(deps));
                prev_xfer = xfer;
            }
            break;
        }
    }
    return events;
}

}  // namespace flashsim
